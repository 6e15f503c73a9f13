"""Worked examples replayed as a quick self-check.

Each example is built by hand with the rule constructors and compared with
what the synthesis, reduction and dry machinery produce.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List

from .derivations import (
    abstraction, application, axiom, canonical_nf_derivation, check, deriv_size, derivation_tyvars,
    equal_up_to_many_order, head_minimal_derivation, infer_via_trace, is_shrinking,
    is_unitary_shrinking, many, skeleton_eq, subst_derivation,
)
from .dry import dry_of, one_type_representation
from .reduction import LEFTMOST, normalize
from .semantics import ComposablePair, exact_pair, is_composable_pair, pair_from_application
from .syntax import head_size, inner_size, parse
from .types import (
    TyVar, TyVarSupply, TypeSubstitution, arrow, mset, type_size,
)

__all__ = ["GoldenCase", "GoldenReport", "golden_examples", "delta_id_derivation"]

DELTA = parse(r"\x. x x")
ID = parse(r"\y. y")
W = TyVar("W")
W2 = arrow(mset(W), W)


@dataclass
class GoldenCase:
    name: str
    passed: bool
    values: Dict = field(default_factory=dict)


@dataclass
class GoldenReport:
    cases: List[GoldenCase]
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def to_json(self) -> dict:
        return {"suite": "golden", "pass": self.passed, "seconds": round(self.seconds, 4),
                "cases": [{"name": c.name, "pass": c.passed, **c.values} for c in self.cases]}

    def table(self) -> str:
        lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}  "
                 + " ".join(f"{k}={v}" for k, v in c.values.items()) for c in self.cases]
        return "\n".join(lines)


def delta_id_derivation():
    """The unitary shrinking derivation of ``(\\x. x x) (\\y. y)`` with
    ``W2 = [W] -o W``, built rule by rule."""
    head = axiom("x", arrow(mset(W2), W2))
    arg = many(parse("x"), [axiom("x", W2)])
    psi_delta = abstraction("x", application(head, arg))
    big_id = abstraction("y", axiom("y", W2))
    small_id = abstraction("y", axiom("y", W))
    psi_id = many(ID, [big_id, small_id])
    return application(psi_delta, psi_id)


def _x_omega():
    t = parse(r"x ((\x. x x) (\x. x x))")
    d = head_minimal_derivation(t)
    vals = {"size": deriv_size(d), "head_size": head_size(t), "inner_size": inner_size(t),
            "shrinking": is_shrinking(d)}
    ok = check(d).ok and vals == {"size": 1, "head_size": 1, "inner_size": 6, "shrinking": False}
    return GoldenCase("x Omega: size 1, head size 1, inner size 6, not shrinking", ok, vals)


def _y_iz():
    X, Y = TyVar("X"), TyVar("Y")
    t = parse(r"y ((\x. x) z)")
    iz = application(abstraction("x", axiom("x", X)), many(parse("z"), [axiom("z", X)]))
    twice = many(iz.term, [iz, iz])
    d = application(axiom("y", arrow(mset(X, X), Y)), twice)
    inferred, trace = infer_via_trace(t, 10)
    vals = {"size": deriv_size(d), "inferred_size": deriv_size(inferred), "steps": len(trace)}
    ok = (check(d).ok and d.term == t and is_shrinking(d) and not is_unitary_shrinking(d)
          and is_unitary_shrinking(inferred)
          and vals == {"size": 5, "inferred_size": 3, "steps": 1})
    return GoldenCase("y (I z): shrinking size 5 vs unitary size 3", ok, vals)


def _delta_id():
    t = parse(r"(\x. x x) (\y. y)")
    trace = normalize(t, LEFTMOST, 10)
    d, _ = infer_via_trace(t, 10)
    dii = delta_id_derivation()
    renamed = subst_derivation(TypeSubstitution({v: W for v in derivation_tyvars(d)}), d)
    vals = {"steps": len(trace), "nf_inner_size": inner_size(trace.final), "size": deriv_size(d)}
    ok = (trace.outcome == "normal" and trace.final == ID and check(dii).ok
          and deriv_size(dii) == 5 and is_unitary_shrinking(d)
          and equal_up_to_many_order(renamed, dii)
          and vals == {"steps": 2, "nf_inner_size": 1, "size": 5})
    return GoldenCase("delta I: 2 steps, |I| = 1, derivation size 5 = 2*2+1", ok, vals)


def _pairs():
    dii = delta_id_derivation()
    left, right = dii.premises
    p = ComposablePair(left.rhs, right.rhs)
    pl, sl = dry_of(left)
    # disjoint supports for the two sides
    pr, sr = dry_of(right, TyVarSupply().beyond(pl.support))
    sigma = sl.union(sr)
    dry_pair = ComposablePair(pl.rhs, pr.rhs, witness=sigma)
    synthesized = pair_from_application(DELTA, ID, 10)
    exact = exact_pair(DELTA, ID, 10)
    vals = {
        "p_left": type_size(p.left), "p_right": type_size(p.right),
        "p_sum": type_size(p.left) + type_size(p.right),
        "dry_pair_size": dry_pair.size, "exact_pair_size": exact.report.pair_size,
    }
    ok = (vals == {"p_left": 6, "p_right": 4, "p_sum": 10, "dry_pair_size": 5, "exact_pair_size": 5}
          and dry_pair.substituted() == p
          and is_composable_pair(p, DELTA, ID) is True
          and is_composable_pair(ComposablePair(pl.rhs, pr.rhs), DELTA, ID) is False
          and type_size(synthesized.left) + type_size(synthesized.right) == 10
          and exact.report.passed and not (2 * 2 + 1 == p.size))
    return GoldenCase("pairs for delta I: |p| = 10, |p'| + 1 = 5, p' sigma = p", ok, vals)


def _six_arrows():
    X, Y = TyVar("X"), TyVar("Y")
    phi = one_type_representation(canonical_nf_derivation(DELTA))
    psi = subst_derivation(TypeSubstitution({X: arrow(mset(Y), Y)}), phi)
    want = arrow(mset(arrow(mset(arrow(mset(Y), Y)), mset(Y), Y), arrow(mset(Y), Y)), mset(Y), Y)
    vals = {"size": deriv_size(psi), "type_size": type_size(psi.rhs)}
    ok = (phi.rhs == arrow(mset(arrow(mset(X), X), X), X) and psi.rhs == want
          and skeleton_eq(phi, psi) and is_unitary_shrinking(psi) and check(psi).ok
          and vals == {"size": 2, "type_size": 6})
    return GoldenCase("delta with X <- [Y] -o Y: size 2, six arrows", ok, vals)


def golden_examples() -> GoldenReport:
    start = time.perf_counter()
    cases = [_x_omega(), _y_iz(), _delta_id(), _pairs(), _six_arrows()]
    return GoldenReport(cases, time.perf_counter() - start)
