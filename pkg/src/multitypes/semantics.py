"""Composable pairs of types and the bounds they give on evaluation length.

Membership ``L in [[t]]`` is decided constructively: a derivation of
``|- t : L`` is searched for, head-reducing ``t`` as needed (the set of
derivable judgments is invariant under beta).  Running out of fuel gives an
``unknown`` outcome, never a negative one.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from .derivations import (
    Derivation, DerivationError, abstraction, application, axiom, deriv_size,
    expand_derivation, infer_head_via_trace, infer_via_trace, many,
)
from .dry import dry_of, one_type_representation
from .reduction import HEAD, LEFTMOST, beta_step_at, head_step
from .syntax import Abs, App, Term, classify, head_size, inner_size, show
from .types import (
    AnyType, Arrow, LinearType, MultiType, TyVar, TyVarSupply, TypeContext,
    TypeSubstitution, apply_subst, is_right, show_type, type_size,
)

__all__ = [
    "ComposablePair", "BoundReport", "ExactPair", "HypothesisError", "MembershipError",
    "FuelExhausted", "SearchResult", "find_derivation", "compose", "is_composable_pair",
    "is_composable_up_to_subst", "pair_from_application", "lax_bound_check", "exact_pair",
]

SHRINKING = "shrinking"
PLAIN = "plain"


class HypothesisError(ValueError):
    pass


class MembershipError(ValueError):
    pass


class FuelExhausted(RuntimeError):
    pass


# --------------------------------------------------------------------------
# Derivation search

class SearchResult(NamedTuple):
    status: str  # "found" | "none" | "unknown"
    derivation: Optional[Derivation] = None

    @property
    def found(self) -> bool:
        return self.status == "found"


class _OutOfFuel(Exception):
    pass


def _compositions(n: int, k: int) -> Iterator[Tuple[int, ...]]:
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _splits(ctx: TypeContext, fvs: Sequence[frozenset]) -> Iterator[Tuple[TypeContext, ...]]:
    """All ways to cut ``ctx`` into ``len(fvs)`` summands, the i-th summand
    mentioning only variables of ``fvs[i]``."""
    units = []
    for x, m in ctx.items():
        allowed = [i for i, fv in enumerate(fvs) if x in fv]
        if not allowed:
            return
        for l, count in Counter(m.elements).items():
            units.append((x, l, count, allowed))
    choices = [list(_compositions(count, len(allowed))) for _, _, count, allowed in units]
    for pick in product(*choices):
        parts = [[] for _ in fvs]
        for (x, l, _, allowed), comp in zip(units, pick):
            for i, c in zip(allowed, comp):
                parts[i].extend([(x, MultiType([l]))] * c)
        yield tuple(TypeContext(p) for p in parts)


class _Search:
    def __init__(self, fuel: int):
        self.fuel = fuel
        self.memo: Dict = {}

    def linear(self, t: Term, ctx: TypeContext, l: LinearType) -> Optional[Derivation]:
        key = (t.key, ctx, l)
        if key not in self.memo:
            self.memo[key] = self._linear(t, ctx, l)
        return self.memo[key]

    def _linear(self, t, ctx, l):
        if not ctx.domain <= t.free_vars:
            return None
        step = head_step(t)
        if step is not None:
            self.fuel -= 1
            if self.fuel < 0:
                raise _OutOfFuel
            pos, reduct = step
            d = self.linear(reduct, ctx, l)
            return None if d is None else expand_derivation(d, t, pos)
        if isinstance(t, Abs):
            if not isinstance(l, Arrow) or t.binder in ctx:
                return None
            d = self.linear(t.body, ctx + TypeContext({t.binder: l.dom}), l.cod)
            return None if d is None else abstraction(t.binder, d)
        c = classify(t)
        y, args = c.head_var, c.args
        for a in dict.fromkeys(ctx[y].elements):
            doms, rest_type = [], a
            for _ in args:
                if not isinstance(rest_type, Arrow):
                    break
                doms.append(rest_type.dom)
                rest_type = rest_type.cod
            else:
                if rest_type != l:
                    continue
                rest = ctx.without(y) + TypeContext({y: ctx[y].remove_one(a)})
                if not args:
                    if not rest:
                        return axiom(y, a)
                    continue
                for parts in _splits(rest, [arg.free_vars for arg in args]):
                    ds = []
                    for arg, part, m in zip(args, parts, doms):
                        d = self.multi(arg, part, m)
                        if d is None:
                            break
                        ds.append(d)
                    else:
                        out = axiom(y, a)
                        for d in ds:
                            out = application(out, d)
                        return out
        return None

    def multi(self, t: Term, ctx: TypeContext, m: MultiType) -> Optional[Derivation]:
        key = (t.key, ctx, m)
        if key not in self.memo:
            self.memo[key] = self._multi(t, ctx, m)
        return self.memo[key]

    def _multi(self, t, ctx, m):
        if not m:
            return None if ctx else many(t, [])
        elems = m.elements
        for parts in _splits(ctx, [t.free_vars] * len(elems)):
            ds = []
            for part, l in zip(parts, elems):
                d = self.linear(t, part, l)
                if d is None:
                    break
                ds.append(d)
            else:
                return many(t, ds)
        return None


def find_derivation(t: Term, rhs: AnyType, ctx: TypeContext = None, fuel: int = 100) -> SearchResult:
    """Search for a derivation of ``ctx |- t : rhs``."""
    ctx = ctx if ctx is not None else TypeContext()
    s = _Search(fuel)
    try:
        d = s.multi(t, ctx, rhs) if isinstance(rhs, MultiType) else s.linear(t, ctx, rhs)
    except _OutOfFuel:
        return SearchResult("unknown")
    return SearchResult("none") if d is None else SearchResult("found", d)


# --------------------------------------------------------------------------
# Pairs

@dataclass(frozen=True)
class ComposablePair:
    left: LinearType
    right: MultiType
    kind: str = SHRINKING
    witness: Optional[TypeSubstitution] = None

    @property
    def size(self) -> int:
        """``|L| + |M| + 1``."""
        return type_size(self.left) + type_size(self.right) + 1

    def substituted(self) -> "ComposablePair":
        sigma = self.witness or TypeSubstitution()
        return ComposablePair(apply_subst(sigma, self.left), apply_subst(sigma, self.right), self.kind)

    def __str__(self):
        out = f"({show_type(self.left)}, {show_type(self.right)})"
        return out + (f" up to {self.witness!r}" if self.witness else "")


def _require_closed(*terms: Term):
    for t in terms:
        if not t.is_closed:
            raise HypothesisError(
                f"{show(t)} is open; close it by abstracting its free variables")


def compose(dt: Derivation, du: Derivation) -> Derivation:
    """Join derivations of ``|- t : M -o L`` and ``|- u : M`` with rule app."""
    _require_closed(dt.term, du.term)
    if dt.ctx or du.ctx:
        raise DerivationError("compose expects derivations with empty contexts")
    return application(dt, du)


def _shape_ok(p: ComposablePair) -> bool:
    if not isinstance(p.left, Arrow) or p.left.dom != p.right:
        return False
    return p.kind == PLAIN or is_right(p.left.cod)


def is_composable_pair(p: ComposablePair, t: Term, u: Term, fuel: int = 100) -> Optional[bool]:
    """True / False, or None when fuel ran out before membership was settled.
    Any witness on ``p`` is ignored."""
    _require_closed(t, u)
    if not _shape_ok(p):
        return False
    unknown = False
    for term, ty in ((t, p.left), (u, p.right)):
        r = find_derivation(term, ty, fuel=fuel)
        if r.status == "none":
            return False
        unknown |= r.status == "unknown"
    return None if unknown else True


def is_composable_up_to_subst(p: ComposablePair, t: Term, u: Term, fuel: int = 100) -> Optional[bool]:
    return is_composable_pair(p.substituted(), t, u, fuel)


def _final_app(t: Term, u: Term, fuel: int, strategy: str):
    tu = App(t, u)
    r = infer_via_trace(tu, fuel) if strategy == LEFTMOST else infer_head_via_trace(tu, fuel)
    if r is None:
        return None
    d, trace = r
    return d.premises[0], d.premises[1], trace


def pair_from_application(t: Term, u: Term, fuel: int, strategy: str = LEFTMOST) -> Optional[ComposablePair]:
    """The pair typing the final app rule of the derivation synthesized for
    ``t u``; shrinking for leftmost, plain for head.  None when ``t u`` does
    not (head-)normalize within ``fuel``."""
    _require_closed(t, u)
    r = _final_app(t, u, fuel, strategy)
    if r is None:
        return None
    dl, dr, _ = r
    return ComposablePair(dl.rhs, dr.rhs, SHRINKING if strategy == LEFTMOST else PLAIN)


# --------------------------------------------------------------------------
# Bounds

@dataclass(frozen=True)
class BoundReport:
    theorem: str
    subjects: Tuple[str, ...]
    steps: int
    result_size: int
    pair_size: int
    relation: str  # "lax" | "exact"
    passed: bool

    @property
    def measured(self) -> int:
        return 2 * self.steps + self.result_size

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem, "subjects": list(self.subjects), "steps": self.steps,
            "result_size": self.result_size, "pair_size": self.pair_size,
            "relation": self.relation, "pass": self.passed,
        }


class ExactPair(NamedTuple):
    left: LinearType
    right: MultiType
    witness: Optional[TypeSubstitution]
    report: BoundReport

    @property
    def pair(self) -> ComposablePair:
        return ComposablePair(self.left, self.right, SHRINKING if self.witness is not None else PLAIN,
                              self.witness)


def _require_normal(f: Term, f2: Term):
    _require_closed(f, f2)
    for t in (f, f2):
        if not t.is_normal:
            raise HypothesisError(f"{show(t)} is not normal; the bounds need normal subjects")


def _run(f: Term, f2: Term, strategy: str, fuel: int):
    from .reduction import normalize
    trace = normalize(App(f, f2), strategy, fuel)
    if trace.outcome == "fuel-exhausted":
        raise FuelExhausted(f"{show(App(f, f2))} did not {strategy}-normalize within {fuel} steps")
    size = inner_size(trace.final) if strategy == LEFTMOST else head_size(trace.final)
    return trace, size


def lax_bound_check(f: Term, f2: Term, p: ComposablePair, fuel: int, mode: str = LEFTMOST) -> BoundReport:
    """Check ``2|d| + size(result) <= |L| + |M| + 1`` for a membership-verified pair."""
    _require_normal(f, f2)
    q = p.substituted()
    q = ComposablePair(q.left, q.right, p.kind if mode == LEFTMOST else PLAIN)
    ok = is_composable_pair(q, f, f2, fuel)
    if ok and p.witness:
        # the unsubstituted types must be inhabited as well
        for t, ty in ((f, p.left), (f2, p.right)):
            status = find_derivation(t, ty, fuel=fuel).status
            if status != "found":
                ok = None if status == "unknown" else False
                break
    if ok is None:
        raise MembershipError(f"membership of {p} undecided within fuel {fuel}")
    if not ok:
        raise MembershipError(f"{p} is not a composable pair for {show(f)} and {show(f2)}")
    trace, size = _run(f, f2, mode, fuel)
    theorem = "T24" if mode == LEFTMOST else "T27"
    return BoundReport(theorem, (show(f), show(f2)), len(trace), size, p.size, "lax",
                       2 * len(trace) + size <= p.size)


def exact_pair(f: Term, f2: Term, fuel: int, mode: str = LEFTMOST) -> ExactPair:
    """Pair read off the tight derivation of ``f f2``: dried (leftmost) or
    represented over one type variable (head)."""
    _require_normal(f, f2)
    r = _final_app(f, f2, fuel, mode)
    if r is None:
        raise FuelExhausted(f"{show(App(f, f2))} did not {mode}-normalize within {fuel} steps")
    dl, dr, trace = r
    if mode == LEFTMOST:
        pl, sl = dry_of(dl)
        pr, sr = dry_of(dr, TyVarSupply().beyond(pl.support))
        left, right, witness = pl.rhs, pr.rhs, sl.union(sr)
        size = inner_size(trace.final)
        theorem = "T25"
    else:
        left = one_type_representation(dl).rhs
        right = one_type_representation(dr).rhs
        witness = None
        size = head_size(trace.final)
        theorem = "T28"
    pair_size = type_size(left) + type_size(right) + 1
    report = BoundReport(theorem, (show(f), show(f2)), len(trace), size, pair_size, "exact",
                         2 * len(trace) + size == pair_size)
    return ExactPair(left, right, witness, report)
