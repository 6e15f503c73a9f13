"""Multi type derivations: checking, sizes, skeletons, substitution, and
constructive subject reduction / expansion.

A derivation is a tree of rule nodes (``ax``, ``lam``, ``app``, ``many``),
each carrying its conclusion judgment.  Smart constructors compute the
conclusion from the premises; :func:`check` validates an arbitrary tree.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

from .reduction import HEAD, LEFTMOST, ReductionTrace, normalize
from .syntax import (
    ARG, BODY, FN, Abs, App, Position, Term, Var, classify, format_position, parse,
    rename_free, replace_at, show, subst, subterm_at,
)
from .types import (
    EMPTY, AnyType, Arrow, Fresh, LinearType, MultiType, TyVar, TyVarSupply,
    TypeContext, apply_subst, arrow, context_from_json, context_size, context_to_json,
    ctx_sum, is_left_context, is_right, is_unitary_left_context, is_unitary_right,
    show_context, show_type, type_from_json, type_size, type_to_json, tyvars,
)

__all__ = [
    "Judgment", "Derivation", "CheckResult", "DerivationError", "axiom", "abstraction",
    "application", "many", "check", "deriv_size", "is_shrinking", "is_unitary_shrinking",
    "skeleton", "skeleton_eq", "subst_derivation", "head_minimal_derivation",
    "canonical_nf_derivation", "substitution_lemma", "split_substitution",
    "reduce_derivation", "expand_derivation", "infer_via_trace", "infer_head_via_trace",
    "subderivations", "derivation_tyvars", "rename_term_var", "align_names",
    "canonical_many_order", "equal_up_to_many_order", "derivation_to_json",
    "derivation_from_json", "show_derivation",
]

RULES = ("ax", "lam", "app", "many")


@dataclass(frozen=True)
class Judgment:
    ctx: TypeContext
    term: Term
    rhs: AnyType

    def __str__(self):
        return f"{show_context(self.ctx)} |- {show(self.term)} : {show_type(self.rhs)}"


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Judgment
    premises: Tuple["Derivation", ...] = ()

    @property
    def ctx(self) -> TypeContext:
        return self.conclusion.ctx

    @property
    def term(self) -> Term:
        return self.conclusion.term

    @property
    def rhs(self) -> AnyType:
        return self.conclusion.rhs

    def __str__(self):
        return show_derivation(self)


class DerivationError(ValueError):
    pass


# --------------------------------------------------------------------------
# Smart constructors

def axiom(x: str, l: LinearType) -> Derivation:
    return Derivation("ax", Judgment(TypeContext({x: MultiType([l])}), Var(x), l))


def abstraction(x: str, premise: Derivation) -> Derivation:
    if isinstance(premise.rhs, MultiType):
        raise DerivationError("lam premise must have a linear type")
    ctx = premise.ctx
    return Derivation("lam", Judgment(ctx.without(x), Abs(x, premise.term),
                                      Arrow(ctx[x], premise.rhs)), (premise,))


def application(left: Derivation, right: Derivation) -> Derivation:
    if not isinstance(left.rhs, Arrow):
        raise DerivationError(f"left premise must have an arrow type, got {show_type(left.rhs)}")
    if right.rule != "many" or left.rhs.dom != right.rhs:
        raise DerivationError(
            f"argument type {show_type(right.rhs)} does not match domain {show_type(left.rhs.dom)}")
    return Derivation("app", Judgment(left.ctx + right.ctx, App(left.term, right.term),
                                      left.rhs.cod), (left, right))


def many(term: Term, premises: Sequence[Derivation]) -> Derivation:
    premises = tuple(premises)
    return Derivation("many", Judgment(ctx_sum(*(p.ctx for p in premises)), term,
                                       MultiType(p.rhs for p in premises)), premises)


# --------------------------------------------------------------------------
# Checking

@dataclass(frozen=True)
class CheckResult:
    ok: bool
    path: Tuple[int, ...] = ()
    rule: str = ""
    message: str = ""

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "ok"
        where = "/".join(map(str, self.path)) or "root"
        return f"violation at {where} ({self.rule}): {self.message}"


def subderivations(d: Derivation, path=()) -> Iterator[Tuple[Tuple[int, ...], Derivation]]:
    """Pre-order walk yielding ``(path, node)``."""
    yield path, d
    for i, p in enumerate(d.premises):
        yield from subderivations(p, path + (i,))


def _local_violation(d: Derivation) -> Optional[str]:
    """The typing clause ``d`` breaks at its root, if any."""
    j, ps, t = d.conclusion, d.premises, d.term
    linear = isinstance(j.rhs, (TyVar, Arrow))
    if d.rule == "ax":
        if ps:
            return "ax has no premises"
        if not isinstance(t, Var):
            return "ax subject must be a variable"
        if not linear:
            return "ax concludes a linear type"
        if j.ctx != TypeContext({t.name: MultiType([j.rhs])}):
            return f"ax context must be {t.name} : [{show_type(j.rhs)}]"
        return None
    if d.rule == "lam":
        if len(ps) != 1:
            return "lam has one premise"
        (p,) = ps
        if not isinstance(t, Abs):
            return "lam subject must be an abstraction"
        if not isinstance(p.rhs, (TyVar, Arrow)):
            return "lam premise must have a linear type"
        if p.term != t.body or show(p.term) != show(t.body):
            return "lam premise subject must be the body"
        if j.ctx != p.ctx.without(t.binder):
            return "lam context must be the premise context minus the binder"
        if j.rhs != Arrow(p.ctx[t.binder], p.rhs):
            return "lam type must be Gamma(x) -o L"
        return None
    if d.rule == "app":
        if len(ps) != 2:
            return "app has two premises"
        l, r = ps
        if not isinstance(t, App):
            return "app subject must be an application"
        if l.term != t.fn or r.term != t.arg:
            return "app premise subjects must be the function and the argument"
        if not isinstance(l.rhs, Arrow):
            return "app left premise must have an arrow type"
        if r.rule != "many" or not isinstance(r.rhs, MultiType):
            return "app right premise must be a many rule"
        if l.rhs.dom != r.rhs:
            return (f"argument type {show_type(r.rhs)} differs from domain "
                    f"{show_type(l.rhs.dom)}")
        if j.rhs != l.rhs.cod:
            return "app type must be the codomain of the left premise"
        if j.ctx != l.ctx + r.ctx:
            return "app context must be the sum of the premise contexts"
        return None
    if d.rule == "many":
        if not isinstance(j.rhs, MultiType):
            return "many concludes a multi type"
        for p in ps:
            if p.term != t:
                return "many premises must share the subject"
            if not isinstance(p.rhs, (TyVar, Arrow)):
                return "many premises must have linear types"
            if p.rule == "many":
                return "many premise cannot be a many rule"
        if j.rhs != MultiType(p.rhs for p in ps):
            return "many type must be the multiset of premise types"
        if j.ctx != ctx_sum(*(p.ctx for p in ps)):
            return "many context must be the sum of the premise contexts"
        return None
    return f"unknown rule {d.rule!r}"


def check(d: Derivation, system: str = "standard") -> CheckResult:
    """Validate every node of ``d`` against the standard rules."""
    if system != "standard":
        raise ValueError(f"unknown system {system!r}")
    for path, node in subderivations(d):
        msg = _local_violation(node)
        if msg:
            return CheckResult(False, path, node.rule, msg)
    return CheckResult(True)


# --------------------------------------------------------------------------
# Measures and skeletons

def deriv_size(d: Derivation) -> int:
    """Number of lam and app nodes."""
    own = 1 if d.rule.rstrip("*") in ("lam", "app") else 0
    return own + sum(deriv_size(p) for p in d.premises)


def is_shrinking(d: Derivation) -> bool:
    return (isinstance(d.rhs, (TyVar, Arrow)) and is_left_context(d.ctx)
            and is_right(d.rhs))


def is_unitary_shrinking(d: Derivation) -> bool:
    return (isinstance(d.rhs, (TyVar, Arrow)) and is_unitary_left_context(d.ctx)
            and is_unitary_right(d.rhs))


def skeleton(d: Derivation):
    """Rule-tag fingerprint; ``many`` children are compared as a multiset."""
    tag = d.rule.rstrip("*")
    kids = tuple(skeleton(p) for p in d.premises)
    if tag == "many":
        kids = tuple(sorted(kids))
    return (tag,) + kids


def skeleton_eq(a: Derivation, b: Derivation) -> bool:
    return a.term == b.term and skeleton(a) == skeleton(b)


def derivation_tyvars(d: Derivation) -> frozenset:
    """Type variables occurring anywhere in ``d``."""
    out = set()
    for _, node in subderivations(d):
        out |= tyvars(node.ctx) | tyvars(node.rhs)
    return frozenset(out)


def subst_derivation(sigma, d: Derivation) -> Derivation:
    """Apply a type substitution to every judgment of ``d``."""
    if not sigma:
        return d
    j = d.conclusion
    return type(d)(d.rule, Judgment(apply_subst(sigma, j.ctx), j.term, apply_subst(sigma, j.rhs)),
                   tuple(subst_derivation(sigma, p) for p in d.premises))


def _rhs_key(t):
    return ("M", t.order_key) if isinstance(t, MultiType) else ("L", t.order_key)


def derivation_key(d: Derivation):
    return (d.rule, d.ctx.order_key, show(d.term), _rhs_key(d.rhs),
            tuple(derivation_key(p) for p in d.premises))


def canonical_many_order(d: Derivation) -> Derivation:
    """Same derivation with ``many`` premises sorted into a fixed order."""
    ps = tuple(canonical_many_order(p) for p in d.premises)
    if d.rule.rstrip("*") == "many":
        ps = tuple(sorted(ps, key=derivation_key))
    return type(d)(d.rule, d.conclusion, ps)


def equal_up_to_many_order(a: Derivation, b: Derivation) -> bool:
    return derivation_key(canonical_many_order(a)) == derivation_key(canonical_many_order(b))


# --------------------------------------------------------------------------
# Renaming term variables inside derivations

def rename_term_var(d: Derivation, old: str, new: str) -> Derivation:
    """Rename the free term variable ``old`` to ``new`` (``new`` must not occur)."""
    if old not in d.term.free_vars:
        return d
    j = d.conclusion
    return type(d)(d.rule, Judgment(j.ctx.rename(old, new), rename_free(j.term, old, new), j.rhs),
                   tuple(rename_term_var(p, old, new) for p in d.premises))


def align_names(d: Derivation, t: Term) -> Derivation:
    """Re-express ``d`` over the alpha-equivalent ``t`` using ``t``'s binder names."""
    if d.term != t:
        raise DerivationError(f"subject {show(d.term)} is not alpha-equivalent to {show(t)}")
    if show(d.term) == show(t):
        return d
    if d.rule == "many":
        return many(t, [align_names(p, t) for p in d.premises])
    if d.rule == "ax":
        return d
    if d.rule == "app":
        return application(align_names(d.premises[0], t.fn), align_names(d.premises[1], t.arg))
    p = d.premises[0]
    old, new = d.term.binder, t.binder
    if old != new:
        if new in p.term.free_vars:
            raise DerivationError(f"cannot rename binder {old} to {new}")
        p = rename_term_var(p, old, new)
    return abstraction(new, align_names(p, t.body))


# --------------------------------------------------------------------------
# Type substitution of derivation subjects (the substitution lemma and its inverse)

def substitution_lemma(ds: Derivation, x: str, u: Term, bag: Sequence[Derivation]) -> Derivation:
    """From ``Gamma, x:M |- s : T`` and derivations of ``u`` whose types form
    ``M``, build a derivation of ``s{x<-u}``.

    Axioms for ``x`` are visited in pre-order; each takes the first remaining
    bag member of the matching type.
    """
    bag = list(bag)
    for b in bag:
        if b.term != u:
            raise DerivationError(f"bag derivation types {show(b.term)}, expected {show(u)}")
        if isinstance(b.rhs, MultiType):
            raise DerivationError("bag derivations must have linear types")
    if ds.ctx[x] != MultiType(b.rhs for b in bag):
        raise DerivationError(
            f"bag types {show_type(MultiType(b.rhs for b in bag))} do not match "
            f"{x} : {show_type(ds.ctx[x])}")
    remaining = bag

    def go(d: Derivation) -> Derivation:
        t = d.term
        if x not in t.free_vars:
            return d
        if d.rule == "many":
            return many(subst(t, x, u), [go(p) for p in d.premises])
        if d.rule == "ax":
            for i, b in enumerate(remaining):
                if b.rhs == d.rhs:
                    return remaining.pop(i)
            raise DerivationError(f"no bag derivation of type {show_type(d.rhs)}")
        if d.rule == "app":
            return application(go(d.premises[0]), go(d.premises[1]))
        p = d.premises[0]
        y = t.binder
        new_y = _renamed_binder(t, x, u)
        if new_y != y:
            p = rename_term_var(p, y, new_y)
        return abstraction(new_y, go(p))

    out = go(ds)
    if remaining:
        raise DerivationError(f"{len(remaining)} bag derivation(s) left unused")
    return out


def _renamed_binder(t: Abs, x: str, u: Term) -> str:
    # read the binder off subst itself so both stay in lockstep
    return subst(t, x, u).binder


def split_substitution(s: Term, x: str, u: Term, d: Derivation):
    """Inverse of :func:`substitution_lemma`: from a derivation of
    ``s{x<-u}`` recover ``(derivation of s with x in context, bag for u)``.
    """
    if d.term != subst(s, x, u):
        raise DerivationError(f"subject {show(d.term)} is not {show(s)}{{{x}<-{show(u)}}}")

    def go(s: Term, d: Derivation):
        if d.rule == "many":
            parts = [go(s, p) for p in d.premises]
            return many(s, [p for p, _ in parts]), [b for _, bs in parts for b in bs]
        if x not in s.free_vars:
            return d, []
        if isinstance(s, Var):
            if isinstance(d.rhs, MultiType):
                raise DerivationError("expected a linear derivation for the substituted term")
            return axiom(x, d.rhs), [d]
        if isinstance(s, App):
            if d.rule != "app":
                raise DerivationError(f"expected app rule for {show(s)}")
            l, bl = go(s.fn, d.premises[0])
            r, br = go(s.arg, d.premises[1])
            return application(l, r), bl + br
        if d.rule != "lam":
            raise DerivationError(f"expected lam rule for {show(s)}")
        y, body = s.binder, s.body
        new_y = d.term.binder
        if new_y != y:
            if new_y in body.free_vars:
                raise DerivationError(f"binder {new_y} would capture a variable of {show(s)}")
            body = rename_free(body, y, new_y)
        pb, bag = go(body, d.premises[0])
        if new_y != y:
            pb = rename_term_var(pb, new_y, y)
        return abstraction(y, pb), bag

    return go(s, d)


# --------------------------------------------------------------------------
# Subject reduction and expansion

def _rewrite(d: Derivation, pos: Position, at_redex, new_term: Term) -> Derivation:
    """Apply ``at_redex`` to every linear sub-derivation typing position ``pos``."""
    if d.rule == "many":
        return many(new_term, [_rewrite(p, pos, at_redex, new_term) for p in d.premises])
    if not pos:
        return at_redex(d)
    step, rest = pos[0], pos[1:]
    if step == BODY and d.rule == "lam":
        return abstraction(d.term.binder, _rewrite(d.premises[0], rest, at_redex, new_term.body))
    if step == FN and d.rule == "app":
        left, right = d.premises
        return application(_rewrite(left, rest, at_redex, new_term.fn), right)
    if step == ARG and d.rule == "app":
        left, right = d.premises
        return application(left, _rewrite(right, rest, at_redex, new_term.arg))
    raise DerivationError(f"derivation does not follow position {format_position(pos)}")


def _redex_parts(t: Term, pos: Position):
    r = subterm_at(t, pos)
    if not (isinstance(r, App) and isinstance(r.fn, Abs)):
        raise DerivationError(f"no redex at {format_position(pos)} in {show(t)}")
    return r.fn.binder, r.fn.body, r.arg


def reduce_derivation(d: Derivation, pos: Position) -> Derivation:
    """Subject reduction for the beta-step of ``d``'s subject at ``pos``."""
    t = d.term
    x, s, u = _redex_parts(t, pos)
    new_t = replace_at(t, pos, subst(s, x, u))

    def contract(r: Derivation) -> Derivation:
        lam_d, arg_d = r.premises
        return substitution_lemma(lam_d.premises[0], x, u, arg_d.premises)

    return _rewrite(d, pos, contract, new_t)


def expand_derivation(d: Derivation, t: Term, pos: Position) -> Derivation:
    """Subject expansion: ``d`` types the reduct of ``t`` at ``pos``; return a
    derivation of ``t`` with the same conclusion context and type."""
    x, s, u = _redex_parts(t, pos)
    new_t = replace_at(t, pos, subst(s, x, u))
    d = align_names(d, new_t)

    def expand(r: Derivation) -> Derivation:
        ds, bag = split_substitution(s, x, u, r)
        return application(abstraction(x, ds), many(u, bag))

    out = _rewrite(d, pos, expand, t)
    return out


# --------------------------------------------------------------------------
# Synthesis

def head_minimal_derivation(h: Term, supply: TyVarSupply = None) -> Derivation:
    """Derivation of size ``head_size(h)``: the head variable gets
    ``0 -o ... -o 0 -o X`` and every argument is left untyped."""
    c = classify(h)
    if not c.is_head_normal:
        raise DerivationError(f"not head normal: {show(h)}")
    result = Fresh(supply).take()
    d = axiom(c.head_var, arrow(*([EMPTY] * len(c.args)), result))
    for a in c.args:
        d = application(d, many(a, []))
    for x in reversed(c.binders):
        d = abstraction(x, d)
    return d


def canonical_nf_derivation(f: Term, supply: TyVarSupply = None) -> Derivation:
    """Unitary shrinking derivation of the normal form ``f`` with
    ``size = inner_size(f) = |context| + |type|``.

    Every neutral subterm gets a fresh type variable and every argument of a
    neutral application is typed exactly once.
    """
    if not f.is_normal:
        raise DerivationError(f"not normal: {show(f)}")
    fresh = Fresh(supply)

    def go(t: Term) -> Derivation:
        if isinstance(t, Abs):
            return abstraction(t.binder, go(t.body))
        c = classify(t)
        arg_ds = [go(a) for a in c.args]
        result = fresh.take()
        d = axiom(c.head_var, arrow(*[MultiType([ad.rhs]) for ad in arg_ds], result))
        for a, ad in zip(c.args, arg_ds):
            d = application(d, many(a, [ad]))
        return d

    return go(f)


def _pull_back(d: Derivation, trace: ReductionTrace) -> Derivation:
    terms = trace.terms
    for i in reversed(range(len(trace.steps))):
        d = expand_derivation(d, terms[i], trace.steps[i].position)
    return d


def infer_via_trace(t: Term, fuel: int, supply: TyVarSupply = None):
    """Leftmost-normalize ``t`` and expand the canonical derivation of its
    normal form back along the trace.  ``None`` when fuel runs out."""
    trace = normalize(t, LEFTMOST, fuel)
    if trace.outcome != "normal":
        return None
    return _pull_back(canonical_nf_derivation(trace.final, supply), trace), trace


def infer_head_via_trace(t: Term, fuel: int, supply: TyVarSupply = None):
    """Head variant: expand the head-minimal derivation of the head normal form."""
    trace = normalize(t, HEAD, fuel)
    if trace.outcome != "head-normal":
        return None
    return _pull_back(head_minimal_derivation(trace.final, supply), trace), trace


# --------------------------------------------------------------------------
# Printing and JSON

def show_derivation(d: Derivation, indent: str = "") -> str:
    lines = [f"{indent}{d.rule}: {d.conclusion}"]
    for p in d.premises:
        lines.append(show_derivation(p, indent + "  "))
    return "\n".join(lines)


def derivation_to_json(d: Derivation) -> dict:
    return {
        "rule": d.rule,
        "ctx": context_to_json(d.ctx),
        "term": show(d.term),
        "rhs": type_to_json(d.rhs),
        "premises": [derivation_to_json(p) for p in d.premises],
    }


def derivation_from_json(obj: dict, cls=None) -> Derivation:
    rule = obj["rule"]
    if cls is None:
        if rule.endswith("*"):
            from .dry import DryDerivation
            cls = DryDerivation
        else:
            cls = Derivation
    judgment = Judgment(context_from_json(obj["ctx"]), parse(obj["term"]), type_from_json(obj["rhs"]))
    return cls(rule, judgment, tuple(derivation_from_json(p, cls) for p in obj.get("premises", [])))
