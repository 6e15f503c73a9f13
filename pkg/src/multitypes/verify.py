"""Corpus-driven checks of the size and bound properties, one checker per
theorem identifier."""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from .derivations import (
    Derivation, canonical_nf_derivation, check, deriv_size, derivation_key,
    derivation_tyvars, equal_up_to_many_order, expand_derivation, head_minimal_derivation,
    infer_head_via_trace, infer_via_trace, is_shrinking, is_unitary_shrinking,
    reduce_derivation, skeleton_eq, subst_derivation,
)
from .dry import (
    as_standard, check_dry, check_two_occurrence, dry_minimality, dry_of,
    one_type_representation, rename_dry,
)
from .reduction import HEAD, LEFTMOST, head_step, normalize, one_step_reducts
from .semantics import (
    PLAIN, SHRINKING, ComposablePair, exact_pair, find_derivation, is_composable_pair,
    is_composable_up_to_subst, lax_bound_check, pair_from_application,
)
from .syntax import App, Term, classify, enumerate_terms, head_size, inner_size, show
from .types import (
    EMPTY, Arrow, MultiType, TyVar, TypeSubstitution, apply_subst, arrow, context_size,
    mset, type_size,
)

__all__ = ["THEOREMS", "Entry", "TheoremReport", "verify_theorem", "derivation_pool",
           "default_corpus"]


@dataclass
class Entry:
    subjects: Tuple[str, ...]
    passed: bool
    measures: Dict = field(default_factory=dict)
    failure: str = ""

    def to_json(self) -> dict:
        out = {"subjects": list(self.subjects), "pass": self.passed, **self.measures}
        if self.failure:
            out["failure"] = self.failure
        return out


@dataclass
class TheoremReport:
    theorem: str
    config: Dict
    entries: List[Entry]
    skipped: int = 0

    @property
    def failures(self) -> List[Entry]:
        return [e for e in self.entries if not e.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> dict:
        return {"checked": len(self.entries), "failed": len(self.failures), "skipped": self.skipped}

    def to_json(self) -> dict:
        return {"theorem": self.theorem, "config": self.config, "summary": self.summary(),
                "pass": self.passed, "entries": [e.to_json() for e in self.entries]}

    def table(self) -> str:
        lines = [f"{self.theorem}: " + ("PASS" if self.passed else "FAIL") + " "
                 + json.dumps(self.summary())]
        for e in self.entries:
            mark = "ok  " if e.passed else "FAIL"
            extra = " ".join(f"{k}={v}" for k, v in e.measures.items())
            lines.append(f"  {mark} {' | '.join(e.subjects)}  {extra}"
                         + (f"  ({e.failure})" if e.failure else ""))
        return "\n".join(lines)


class _Checks:
    def __init__(self):
        self.failure = ""

    def expect(self, cond, msg):
        if not cond and not self.failure:
            self.failure = msg
        return cond


# --------------------------------------------------------------------------
# Derivations built for a subject

def _variants(d: Derivation) -> List[Derivation]:
    vs = sorted(derivation_tyvars(d), key=lambda v: v.order_key)
    if not vs:
        return []
    subs = [
        TypeSubstitution({v: arrow(mset(v), v) for v in vs}),
        TypeSubstitution({v: arrow(EMPTY, v) for v in vs}),
        TypeSubstitution({v: vs[0] for v in vs}),
    ]
    return [subst_derivation(s, d) for s in subs]


def derivation_pool(t: Term, fuel: int) -> List[Derivation]:
    """Every derivation the checks build from ``t``: the synthesized ones,
    their reducts along the traces, the canonical ones for normal and head
    normal subjects, and a few substitution images of all of these."""
    base = []
    for infer in (infer_via_trace, infer_head_via_trace):
        r = infer(t, fuel)
        if r is None:
            continue
        d, trace = r
        base.append(d)
        for st in trace.steps:
            d = reduce_derivation(d, st.position)
            base.append(d)
    if t.is_normal:
        base.append(canonical_nf_derivation(t))
    if classify(t).is_head_normal:
        base.append(head_minimal_derivation(t))
    out, seen = [], set()
    for d in base + [v for d in base for v in _variants(d)]:
        k = derivation_key(d)
        if k not in seen:
            seen.add(k)
            out.append(d)
    return out


# --------------------------------------------------------------------------
# Per-subject checkers; each returns an Entry or None when the subject is
# outside the theorem's hypotheses.

def _p3(t: Term, fuel: int):
    ck = _Checks()
    n = 0
    for infer in (infer_via_trace, infer_head_via_trace):
        r = infer(t, fuel)
        if r is None:
            continue
        d, trace = r
        terms = trace.terms
        for i, st in enumerate(trace.steps):
            d2 = reduce_derivation(d, st.position)
            n += 1
            ck.expect(check(d2).ok, f"reduct derivation does not check at step {i}")
            ck.expect((d2.ctx, d2.rhs) == (d.ctx, d.rhs), f"judgment changed at step {i}")
            hs = head_step(terms[i])
            if hs is not None and hs[0] == st.position:
                ck.expect(deriv_size(d2) == deriv_size(d) - 2, f"head step {i} did not lose 2")
            else:
                ck.expect(deriv_size(d2) <= deriv_size(d), f"size grew at step {i}")
            back = expand_derivation(d2, terms[i], st.position)
            ck.expect(check(back).ok and (back.ctx, back.rhs) == (d.ctx, d.rhs),
                      f"expansion failed at step {i}")
            d = d2
        # any other redex of the source term
        d0 = r[0]
        for pos, _ in one_step_reducts(t):
            d2 = reduce_derivation(d0, pos)
            n += 1
            ck.expect(check(d2).ok and deriv_size(d2) <= deriv_size(d0)
                      and (d2.ctx, d2.rhs) == (d0.ctx, d0.rhs), "non-strategy step broke reduction")
    if n == 0:
        return None
    return Entry((show(t),), not ck.failure, {"steps_checked": n}, ck.failure)


def _p5(t: Term, fuel: int):
    ck = _Checks()
    n = 0
    for d in derivation_pool(t, fuel):
        if classify(d.term).is_head_normal and not isinstance(d.rhs, MultiType):
            n += 1
            ck.expect(head_size(d.term) <= deriv_size(d), f"size below head size for {show(d.term)}")
    tr = normalize(t, HEAD, fuel)
    if tr.outcome == "head-normal":
        h = head_minimal_derivation(tr.final)
        ck.expect(check(h).ok and deriv_size(h) == head_size(tr.final), "head-minimal size mismatch")
        n += 1
    if n == 0:
        return None
    return Entry((show(t),), not ck.failure, {"derivations": n}, ck.failure)


def _t6(t: Term, fuel: int):
    r = infer_head_via_trace(t, fuel)
    if r is None:
        return None
    d, trace = r
    ck = _Checks()
    h = trace.final
    ck.expect(check(d).ok, "derivation does not check")
    ck.expect(2 * len(trace) + head_size(h) == deriv_size(d), "2n + |h|_h != size")
    for e in derivation_pool(t, fuel):
        if e.term == t and not isinstance(e.rhs, MultiType):
            ck.expect(2 * len(trace) + head_size(h) <= deriv_size(e), "head bound fails")
    return Entry((show(t),), not ck.failure,
                 {"steps": len(trace), "head_size": head_size(h), "size": deriv_size(d)}, ck.failure)


def _t8(t: Term, fuel: int):
    r = infer_via_trace(t, fuel)
    if r is None:
        return None
    d, trace = r
    ck = _Checks()
    bound = 2 * len(trace) + inner_size(trace.final)
    ck.expect(is_shrinking(d), "synthesized derivation is not shrinking")
    n = 0
    for e in derivation_pool(t, fuel):
        if e.term == t and not isinstance(e.rhs, MultiType) and is_shrinking(e):
            n += 1
            ck.expect(bound <= deriv_size(e), "2n + |f| exceeds a shrinking derivation's size")
    return Entry((show(t),), not ck.failure, {"steps": len(trace), "shrinking_checked": n},
                 ck.failure)


def _t9(t: Term, fuel: int):
    r = infer_via_trace(t, fuel)
    if r is None:
        return None
    d, trace = r
    ck = _Checks()
    f = trace.final
    ck.expect(check(d).ok, "derivation does not check")
    ck.expect(is_unitary_shrinking(d), "not unitary shrinking")
    ck.expect(2 * len(trace) + inner_size(f) == deriv_size(d), "2n + |f| != size")
    return Entry((show(t),), not ck.failure,
                 {"steps": len(trace), "inner_size": inner_size(f), "size": deriv_size(d)},
                 ck.failure)


def _normal_pool(t: Term, fuel: int):
    return [d for d in derivation_pool(t, fuel) if d.term.is_normal]


def _p10(t: Term, fuel: int):
    tr = normalize(t, LEFTMOST, fuel)
    if tr.outcome != "normal":
        return None
    f = tr.final
    ck = _Checks()
    c = canonical_nf_derivation(f)
    ck.expect(is_unitary_shrinking(c) and deriv_size(c) == inner_size(f), "canonical size mismatch")
    for d in _normal_pool(t, fuel):
        if not isinstance(d.rhs, MultiType) and is_shrinking(d):
            ck.expect(inner_size(d.term) <= deriv_size(d), f"size below |f| for {show(d.term)}")
    return Entry((show(f),), not ck.failure, {"inner_size": inner_size(f)}, ck.failure)


def _p12(t: Term, fuel: int):
    tr = normalize(t, LEFTMOST, fuel)
    if tr.outcome != "normal":
        return None
    f = tr.final
    ck = _Checks()
    c = canonical_nf_derivation(f)
    js = context_size(c.ctx) + type_size(c.rhs)
    ck.expect(inner_size(f) == js, "|f| != |(Gamma, L)| for the canonical derivation")
    for d in _normal_pool(t, fuel):
        if not isinstance(d.rhs, MultiType) and is_shrinking(d):
            ck.expect(inner_size(d.term) <= context_size(d.ctx) + type_size(d.rhs),
                      f"shrinking types do not bound {show(d.term)}")
    return Entry((show(f),), not ck.failure, {"inner_size": inner_size(f), "judgment_size": js},
                 ck.failure)


def _p13(t: Term, fuel: int):
    ck = _Checks()
    n = 0
    for d in _normal_pool(t, fuel):
        n += 1
        size = deriv_size(d)
        ck.expect(size <= context_size(d.ctx) + type_size(d.rhs),
                  f"size exceeds judgment size for {show(d.term)}")
        if d.term.is_neutral and not isinstance(d.rhs, MultiType):
            ck.expect(size <= context_size(d.ctx) - type_size(d.rhs),
                      f"neutral bound fails for {show(d.term)}")
    if n == 0:
        return None
    return Entry((show(t),), not ck.failure, {"derivations": n}, ck.failure)


def _dry_checks(d: Derivation, ck: _Checks):
    psi, sigma = dry_of(d)
    ck.expect(check_dry(psi).ok, "dry derivation does not check")
    ck.expect(skeleton_eq(psi, d), "not skeleton equivalent")
    ck.expect(check_two_occurrence(psi) is None, "two-occurrence property fails")
    if not isinstance(psi.rhs, MultiType):
        ck.expect(dry_minimality(psi).equal, "dry derivation not minimal")
    ck.expect(apply_subst(sigma, psi.ctx) == d.ctx and apply_subst(sigma, psi.rhs) == d.rhs,
              "sigma does not reconstruct the conclusion")
    ck.expect(equal_up_to_many_order(subst_derivation(sigma, as_standard(psi)), d),
              "sigma does not reconstruct the derivation")
    # skeletal invariants
    ck.expect(deriv_size(psi) == deriv_size(d), "sizes differ")
    ck.expect(psi.ctx.domain == d.ctx.domain, "context domains differ")
    ck.expect(all(len(psi.ctx[x]) == len(d.ctx[x]) for x in d.ctx.domain), "cardinalities differ")
    ck.expect(isinstance(psi.rhs, MultiType) == isinstance(d.rhs, MultiType), "rhs kinds differ")
    if isinstance(d.rhs, MultiType):
        ck.expect(len(psi.rhs) == len(d.rhs), "multi rhs cardinalities differ")
    else:
        # only this direction survives substitution images such as {X <- 0 -o X}
        ck.expect(is_shrinking(psi) or not is_shrinking(d), "dry derivation lost shrinking")
        ck.expect(is_unitary_shrinking(psi) or not is_unitary_shrinking(d),
                  "dry derivation lost unitary shrinking")
    # renaming stability
    ren = {v: TyVar(f"R{i}") for i, v in enumerate(sorted(psi.support, key=lambda v: v.order_key))}
    r = rename_dry(psi, ren)
    ck.expect(check_dry(r).ok and skeleton_eq(r, psi) and check_two_occurrence(r) is None
              and deriv_size(r) == deriv_size(psi), "renaming broke the dry derivation")


def _dry_entry(t: Term, fuel: int):
    ck = _Checks()
    pool = _normal_pool(t, fuel)
    for d in pool:
        _dry_checks(d, ck)
    if not pool:
        return None
    return Entry((show(t),), not ck.failure, {"derivations": len(pool)}, ck.failure)


def _one_type_checks(d: Derivation, ck: _Checks):
    x = TyVar("X")
    psi = one_type_representation(d)
    ck.expect(check(psi).ok, "one-type derivation does not check")
    ck.expect(skeleton_eq(psi, d), "one-type derivation not skeleton equivalent")
    ck.expect(derivation_tyvars(psi) <= {x}, "more than one type variable")
    ck.expect(deriv_size(psi) == context_size(psi.ctx) + type_size(psi.rhs), "normal size equality fails")
    if d.term.is_neutral and not isinstance(d.rhs, MultiType):
        for target in (x, arrow(mset(x), x), arrow(EMPTY, mset(x, x), x)):
            n = one_type_representation(d, target)
            ck.expect(check(n).ok and n.rhs == target
                      and deriv_size(n) == context_size(n.ctx) - type_size(target),
                      "neutral size equality fails")


def _one_type_entry(t: Term, fuel: int):
    ck = _Checks()
    pool = _normal_pool(t, fuel)
    for d in pool:
        _one_type_checks(d, ck)
        for sub in _neutral_subderivations(d):
            _one_type_checks(sub, ck)
    if not pool:
        return None
    return Entry((show(t),), not ck.failure, {"derivations": len(pool)}, ck.failure)


def _neutral_subderivations(d: Derivation):
    from .derivations import subderivations
    for _, node in subderivations(d):
        if node is not d and node.term.is_neutral and not isinstance(node.rhs, MultiType):
            yield node


# pair theorems ------------------------------------------------------------

def _l22(pair, fuel):
    t, u = pair
    tr = normalize(App(t, u), LEFTMOST, fuel)
    p = pair_from_application(t, u, fuel)
    ck = _Checks()
    ck.expect((p is not None) == (tr.outcome == "normal"), "pair exists iff tu normalizes fails")
    if p is not None:
        ck.expect(is_composable_pair(p, t, u, fuel) is not False, "found pair is not composable")
    return Entry((show(t), show(u)), not ck.failure, {"normalizes": tr.outcome == "normal"},
                 ck.failure)


def _l26(pair, fuel):
    t, u = pair
    tr = normalize(App(t, u), HEAD, fuel)
    p = pair_from_application(t, u, fuel, HEAD)
    ck = _Checks()
    ck.expect((p is not None) == (tr.outcome == "head-normal"), "pair exists iff tu head-normalizes fails")
    if p is not None:
        ck.expect(is_composable_pair(p, t, u, fuel) is not False, "found pair is not composable")
    return Entry((show(t), show(u)), not ck.failure, {"head_normalizes": tr.outcome == "head-normal"},
                 ck.failure)


def _t23(pair, fuel):
    t, u = pair
    tr = normalize(App(t, u), LEFTMOST, fuel)
    if tr.outcome != "normal":
        return None
    p = pair_from_application(t, u, fuel)
    ck = _Checks()
    f = tr.final
    cod = p.left.cod
    ck.expect(inner_size(f) <= type_size(cod), "|f| > |L|")
    ck.expect(inner_size(f) == type_size(cod), "canonical pair is not exact")
    return Entry((show(t), show(u)), not ck.failure,
                 {"inner_size": inner_size(f), "codomain_size": type_size(cod)}, ck.failure)


def _lax(pair, fuel, mode):
    f, g = pair
    tr = normalize(App(f, g), mode, fuel)
    if tr.outcome == "fuel-exhausted":
        return None
    ck = _Checks()
    p = pair_from_application(f, g, fuel, mode)
    measures = {}
    candidates = [("synthesized", p)]
    if mode == LEFTMOST:
        # head-mode exact pairs carry no composability claim
        candidates.append(("exact", exact_pair(f, g, fuel, mode).pair))
    for name, q in candidates:
        rep = lax_bound_check(f, g, q, fuel, mode)
        ck.expect(rep.passed, f"lax bound fails for the {name} pair")
        measures[f"{name}_pair_size"] = rep.pair_size
        measures["steps"], measures["result_size"] = rep.steps, rep.result_size
    return Entry((show(f), show(g)), not ck.failure, measures, ck.failure)


def _t24(pair, fuel):
    return _lax(pair, fuel, LEFTMOST)


def _t27(pair, fuel):
    return _lax(pair, fuel, HEAD)


def _exact(pair, fuel, mode):
    f, g = pair
    tr = normalize(App(f, g), mode, fuel)
    if tr.outcome == "fuel-exhausted":
        return None
    e = exact_pair(f, g, fuel, mode)
    ck = _Checks()
    ck.expect(e.report.passed, "2|d| + size != |L| + |M| + 1")
    if mode == LEFTMOST:
        ck.expect(is_composable_up_to_subst(e.pair, f, g, fuel) is not False,
                  "dry pair is not composable up to its witness")
    else:
        ck.expect(find_derivation(f, e.left, fuel=fuel).status != "none"
                  and find_derivation(g, e.right, fuel=fuel).status != "none",
                  "one-type pair is not inhabited")
    return Entry((show(f), show(g)), not ck.failure,
                 {k: v for k, v in e.report.to_json().items()
                  if k in ("steps", "result_size", "pair_size")}, ck.failure)


def _t25(pair, fuel):
    return _exact(pair, fuel, LEFTMOST)


def _t28(pair, fuel):
    return _exact(pair, fuel, HEAD)


# --------------------------------------------------------------------------
# Registry and driver

# id -> (checker, corpus kind, default max nodes)
THEOREMS: Dict[str, Tuple[Callable, str, int]] = {
    "P3": (_p3, "closed", 8),
    "P5": (_p5, "closed", 8),
    "T6": (_t6, "closed", 8),
    "T8": (_t8, "closed", 8),
    "T9": (_t9, "closed", 8),
    "P10": (_p10, "closed", 8),
    "P12": (_p12, "closed", 8),
    "P13": (_p13, "closed", 8),
    "P17": (_dry_entry, "closed", 8),
    "T19": (_dry_entry, "closed", 8),
    "T20": (_one_type_entry, "normal", 9),
    "T29": (_one_type_entry, "normal", 9),
    "L22": (_l22, "closed-pairs", 6),
    "T23": (_t23, "closed-pairs", 6),
    "T24": (_t24, "normal-pairs", 6),
    "T25": (_t25, "normal-pairs", 6),
    "L26": (_l26, "closed-pairs", 6),
    "T27": (_t27, "normal-pairs", 6),
    "T28": (_t28, "normal-pairs", 6),
}


def default_corpus(kind: str, max_nodes: int) -> List:
    closed = list(enumerate_terms(max_nodes))
    if kind == "closed":
        return list(closed)
    normal = [t for t in closed if t.is_normal]
    if kind == "normal":
        return normal
    base = closed if kind == "closed-pairs" else normal
    return [(a, b) for a in base for b in base]


def _run_chunk(args):
    theorem, items, fuel = args
    fn = THEOREMS[theorem][0]
    return [fn(item, fuel) for item in items]


def verify_theorem(theorem: str, corpus: Optional[Iterable] = None, max_nodes: Optional[int] = None,
                   fuel: int = 100, fail_fast: bool = False, jobs: int = 1) -> TheoremReport:
    """Run one theorem's checker over a corpus (default: enumerated terms)."""
    if theorem not in THEOREMS:
        raise KeyError(f"unknown theorem {theorem!r}; expected one of {', '.join(THEOREMS)}")
    fn, kind, default_nodes = THEOREMS[theorem]
    max_nodes = default_nodes if max_nodes is None else max_nodes
    items = list(corpus) if corpus is not None else default_corpus(kind, max_nodes)
    config = {"max_nodes": max_nodes if corpus is None else None, "fuel": fuel,
              "corpus_size": len(items)}
    results: List[Optional[Entry]] = []
    if jobs > 1 and not fail_fast:
        chunks = [items[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_run_chunk, [(theorem, c, fuel) for c in chunks]))
        # undo the striding so entries stay in corpus order
        results = [None] * len(items)
        for j, part in enumerate(parts):
            for k, r in enumerate(part):
                results[j + k * jobs] = r
    else:
        for item in items:
            r = fn(item, fuel)
            results.append(r)
            if fail_fast and r is not None and not r.passed:
                break
    entries = [r for r in results if r is not None]
    return TheoremReport(theorem, config, entries, skipped=len(results) - len(entries))
