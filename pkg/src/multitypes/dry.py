"""Dry derivations for normal forms.

Neutral terms get a bare type variable, which ``app*`` enlarges on the fly
with ``{X <- M -o Y}`` for a fresh ``Y``.  Premises of ``app*`` and ``many*``
live on disjoint sets of type variables.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, NamedTuple, Optional, Tuple

from .derivations import (
    CheckResult, Derivation, DerivationError, Judgment, abstraction, application,
    axiom, many, subderivations, subst_derivation, _local_violation,
)
from .syntax import Abs, App, Var, classify, show
from .types import (
    EMPTY, Arrow, Fresh, MultiType, TyVar, TyVarSupply, TypeContext, TypeSubstitution,
    apply_subst, arrow, context_size, ctx_sum, occurrences, show_type, type_size, tyvars,
)

__all__ = [
    "DryDerivation", "check_dry", "dry_of", "as_standard", "rename_dry",
    "check_two_occurrence", "dry_minimality", "Minimality", "one_type_representation",
    "final_support",
]

DRY_RULES = ("ax*", "lam*", "app*", "many*")


@dataclass(frozen=True)
class DryDerivation(Derivation):

    @cached_property
    def support(self) -> frozenset:
        """Type variables occurring anywhere in the derivation."""
        out = set(tyvars(self.ctx)) | tyvars(self.rhs)
        for p in self.premises:
            out |= p.support
        return frozenset(out)


def final_support(d: Derivation) -> frozenset:
    return tyvars(d.ctx) | tyvars(d.rhs)


def _ax(x: str, v: TyVar) -> DryDerivation:
    return DryDerivation("ax*", Judgment(TypeContext({x: MultiType([v])}), Var(x), v))


def _lam(x: str, p: DryDerivation) -> DryDerivation:
    return DryDerivation("lam*", Judgment(p.ctx.without(x), Abs(x, p.term), Arrow(p.ctx[x], p.rhs)), (p,))


def _app(left: DryDerivation, right: DryDerivation, y: TyVar) -> DryDerivation:
    sub = TypeSubstitution({left.rhs: Arrow(right.rhs, y)})
    ctx = apply_subst(sub, left.ctx) + right.ctx
    return DryDerivation("app*", Judgment(ctx, App(left.term, right.term), y), (left, right))


def _many(term, premises) -> DryDerivation:
    premises = tuple(premises)
    return DryDerivation("many*", Judgment(ctx_sum(*(p.ctx for p in premises)), term,
                                           MultiType(p.rhs for p in premises)), premises)


def _support(d: Derivation) -> frozenset:
    return d.support if isinstance(d, DryDerivation) else frozenset().union(
        *(final_support(n) for _, n in subderivations(d)))


def _dry_violation(d: Derivation) -> Optional[str]:
    j, ps, t = d.conclusion, d.premises, d.term
    if d.rule not in DRY_RULES:
        return f"{d.rule!r} is not a dry rule"
    if not t.is_normal:
        return "dry subjects must be normal"
    if d.rule == "ax*":
        if not isinstance(j.rhs, TyVar):
            return "ax* concludes a type variable"
        return _local_violation(Derivation("ax", j))
    if d.rule == "lam*":
        return _local_violation(Derivation("lam", j, tuple(_as_plain(p) for p in ps)))
    if d.rule == "many*":
        msg = _local_violation(Derivation("many", j, tuple(_as_plain(p) for p in ps)))
        if msg:
            return msg
        seen = set()
        for p in ps:
            s = _support(p)
            if seen & s:
                return "many* premises must have disjoint supports"
            seen |= s
        return None
    # app*
    if len(ps) != 2:
        return "app* has two premises"
    l, r = ps
    if not isinstance(t, App) or l.term != t.fn or r.term != t.arg:
        return "app* premise subjects must be the function and the argument"
    if not t.fn.is_neutral:
        return "app* function must be neutral"
    if not isinstance(l.rhs, TyVar):
        return "app* left premise must conclude a type variable"
    if r.rule != "many*":
        return "app* right premise must be a many* rule"
    if not isinstance(j.rhs, TyVar):
        return "app* concludes a type variable"
    y = j.rhs
    ls, rs = _support(l), _support(r)
    if ls & rs:
        return "app* premises must have disjoint supports"
    if y in ls or y in rs:
        return f"{y} is not fresh"
    expected = apply_subst(TypeSubstitution({l.rhs: Arrow(r.rhs, y)}), l.ctx) + r.ctx
    if j.ctx != expected:
        return "app* context must be the enlarged left context plus the right context"
    return None


def _as_plain(d: Derivation) -> Derivation:
    # shallow view used to reuse the standard local checks
    return Derivation(d.rule.rstrip("*"), d.conclusion, d.premises)


def check_dry(d: Derivation) -> CheckResult:
    for path, node in subderivations(d):
        msg = _dry_violation(node)
        if msg:
            return CheckResult(False, path, node.rule, msg)
    return CheckResult(True)


def dry_of(d: Derivation, supply: TyVarSupply = None) -> Tuple[DryDerivation, TypeSubstitution]:
    """Dry derivation skeleton-equivalent to ``d`` plus ``sigma`` with
    ``sigma(dry conclusion) = conclusion of d``.

    Fresh variables are drawn from one counter, left to right with premises
    before conclusions, so sibling supports are disjoint by construction.
    """
    if not d.term.is_normal:
        raise DerivationError(f"not normal: {show(d.term)}")
    fresh = Fresh(supply)

    def go(d: Derivation):
        if d.rule == "ax":
            v = fresh.take()
            return _ax(d.term.name, v), TypeSubstitution({v: d.rhs})
        if d.rule == "lam":
            p, sigma = go(d.premises[0])
            return _lam(d.term.binder, p), sigma
        if d.rule == "many":
            parts = [go(p) for p in d.premises]
            sigma = TypeSubstitution()
            for _, s in parts:
                sigma = sigma.union(s)
            return _many(d.term, [p for p, _ in parts]), sigma
        if d.rule == "app":
            (ln, sn), (rf, sf) = go(d.premises[0]), go(d.premises[1])
            y = fresh.take()
            sigma = sn.without(ln.rhs).union(sf).union(TypeSubstitution({y: d.rhs}))
            return _app(ln, rf, y), sigma
        raise DerivationError(f"unexpected rule {d.rule!r}")

    return go(d)


def as_standard(d: DryDerivation) -> Derivation:
    """The standard derivation of the same judgment (app* substitutions pushed
    into the left premise)."""
    if d.rule == "ax*":
        return axiom(d.term.name, d.rhs)
    if d.rule == "lam*":
        return abstraction(d.term.binder, as_standard(d.premises[0]))
    if d.rule == "many*":
        return many(d.term, [as_standard(p) for p in d.premises])
    l, r = d.premises
    sub = TypeSubstitution({l.rhs: Arrow(r.rhs, d.rhs)})
    return application(subst_derivation(sub, as_standard(l)), as_standard(r))


def rename_dry(d: DryDerivation, renaming: Mapping) -> DryDerivation:
    """Apply an injective renaming of type variables."""
    sub = TypeSubstitution(renaming)
    for v in sub.values():
        if not isinstance(v, TyVar):
            raise ValueError("a renaming maps type variables to type variables")
    images = [sub.get(v, v) for v in d.support]
    if len(set(images)) != len(images):
        raise ValueError("renaming is not injective on the support")
    return subst_derivation(sub, d)


def check_two_occurrence(d: Derivation) -> Optional[TyVar]:
    """None when every variable of the final judgment occurs exactly twice;
    otherwise the first offending variable."""
    occ = occurrences(d.ctx) + occurrences(d.rhs)
    for v in sorted(occ, key=lambda v: v.order_key):
        if occ[v] != 2:
            return v
    return None


class Minimality(NamedTuple):
    size: int
    judgment_size: int
    equal: bool


def dry_minimality(d: Derivation) -> Minimality:
    from .derivations import deriv_size
    size = deriv_size(d)
    js = context_size(d.ctx) + type_size(d.rhs)
    return Minimality(size, js, size == js)


def one_type_representation(d: Derivation, target=None, var: TyVar = TyVar("X")) -> Derivation:
    """Skeleton-equivalent standard derivation using the single variable ``var``.

    For a neutral subject with linear type, ``target`` fixes the final type
    (any type over ``var``) and the size is ``|context| - |target|``; for a
    normal subject it is ``|context| + |type|``.
    """
    if not d.term.is_normal:
        raise DerivationError(f"not normal: {show(d.term)}")
    if target is not None and tyvars(target) - {var}:
        raise DerivationError(f"target {show_type(target)} uses variables other than {var}")

    def neutral(d: Derivation, target) -> Derivation:
        if d.rule == "ax":
            return axiom(d.term.name, target)
        if d.rule != "app":
            raise DerivationError(f"neutral subject typed by {d.rule}")
        arg = multi(d.premises[1])
        fn = neutral(d.premises[0], Arrow(arg.rhs, target))
        return application(fn, arg)

    def normal(d: Derivation) -> Derivation:
        if d.rule == "lam":
            return abstraction(d.term.binder, normal(d.premises[0]))
        return neutral(d, var)

    def multi(d: Derivation) -> Derivation:
        return many(d.term, [normal(p) for p in d.premises])

    if d.rule == "many":
        return multi(d)
    if target is not None:
        if not d.term.is_neutral:
            raise DerivationError("a target type is only meaningful for neutral subjects")
        return neutral(d, target)
    return normal(d)
