import json

import pytest

from multitypes.derivations import (
    Derivation, DerivationError, Judgment, abstraction, application, axiom,
    canonical_nf_derivation, check, deriv_size, derivation_from_json, derivation_to_json,
    equal_up_to_many_order, expand_derivation, head_minimal_derivation, infer_head_via_trace,
    infer_via_trace, is_shrinking, is_unitary_shrinking, many, reduce_derivation, skeleton_eq,
    split_substitution, subst_derivation, substitution_lemma,
)
from multitypes.golden import delta_id_derivation
from multitypes.reduction import LEFTMOST, normalize
from multitypes.syntax import ARG, App, Var, enumerate_terms, head_size, inner_size, parse
from multitypes.types import (
    EMPTY, TyVar, TypeContext, TypeSubstitution, arrow, mset, parse_type, type_size,
)

X, Y, Z, W = TyVar("X"), TyVar("Y"), TyVar("Z"), TyVar("W")
W2 = arrow(mset(W), W)
I = parse(r"\y. y")
DELTA = parse(r"\x. x x")
OMEGA = App(DELTA, DELTA)
X_OMEGA = App(Var("x"), OMEGA)


def x_omega_derivation(l=X):
    return application(axiom("x", arrow(EMPTY, l)), many(OMEGA, []))


def y_iz_derivation():
    iz = application(abstraction("x", axiom("x", X)), many(parse("z"), [axiom("z", X)]))
    return application(axiom("y", arrow(mset(X, X), Y)), many(iz.term, [iz, iz]))


def test_check_examples():
    assert check(x_omega_derivation()).ok
    assert check(delta_id_derivation()).ok
    assert check(y_iz_derivation()).ok


def test_check_reports_bad_app():
    good = x_omega_derivation()
    left, right = good.premises
    bad_right = many(OMEGA, [])
    bad = Derivation("app", Judgment(left.ctx, X_OMEGA, Y), (left, bad_right))
    res = check(bad)
    assert not res.ok and res.path == () and res.rule == "app"
    # mismatch one level down is reported with its path
    wrapped = Derivation("lam", Judgment(TypeContext(), parse(r"\x. x ((\x. x x) (\x. x x))"),
                                         arrow(mset(arrow(EMPTY, X)), Y)), (bad,))
    res = check(wrapped)
    assert not res.ok and res.path == (0,)


def test_check_rejects_wrong_axiom():
    d = Derivation("ax", Judgment(TypeContext({"x": mset(X, X)}), Var("x"), X))
    assert not check(d).ok


def test_application_rejects_mismatch():
    with pytest.raises(DerivationError):
        application(axiom("x", arrow(mset(X), Y)), many(Var("z"), [axiom("z", Y)]))


def test_sizes_and_flags():
    assert deriv_size(x_omega_derivation()) == 1
    assert deriv_size(y_iz_derivation()) == 5
    assert deriv_size(axiom("x", X)) == 0
    assert not is_shrinking(x_omega_derivation())
    assert is_shrinking(y_iz_derivation()) and not is_unitary_shrinking(y_iz_derivation())
    d, _ = infer_via_trace(parse(r"y ((\x. x) z)"), 10)
    assert is_unitary_shrinking(d) and deriv_size(d) == 3
    assert d.ctx == TypeContext({"y": mset(arrow(mset(d.ctx["z"].elements[0]), d.rhs)),
                                 "z": d.ctx["z"]})


def test_skeleton_eq():
    phi = canonical_nf_derivation(DELTA)
    psi = subst_derivation(TypeSubstitution({v: W2 for v in (TyVar("X0"), TyVar("X1"))}), phi)
    assert skeleton_eq(phi, psi) and skeleton_eq(phi, phi)
    assert not skeleton_eq(phi, canonical_nf_derivation(I))


def test_subst_derivation():
    phi = canonical_nf_derivation(DELTA)
    ident = subst_derivation(TypeSubstitution(), phi)
    assert ident == phi
    one = subst_derivation(TypeSubstitution({TyVar("X1"): TyVar("X0")}), phi)
    six = subst_derivation(TypeSubstitution({TyVar("X0"): arrow(mset(Y), Y)}), one)
    assert check(six).ok and deriv_size(six) == deriv_size(phi) == 2
    assert type_size(six.rhs) == 6
    # the delta half of the worked derivation is the Z <- W2 image
    psi_delta = delta_id_derivation().premises[0]
    z = subst_derivation(TypeSubstitution({TyVar("X1"): TyVar("X0")}), phi)
    assert subst_derivation(TypeSubstitution({TyVar("X0"): W2}), z).rhs == psi_delta.rhs


def test_head_minimal_derivation():
    d = head_minimal_derivation(X_OMEGA)
    assert check(d).ok and deriv_size(d) == 1
    assert d.ctx["x"] == mset(arrow(EMPTY, d.rhs))
    d = head_minimal_derivation(I)
    assert deriv_size(d) == 1 and d.rhs == arrow(mset(d.rhs.cod), d.rhs.cod)
    d = head_minimal_derivation(parse(r"\x. \y. x"))
    assert deriv_size(d) == 2 and type_size(d.rhs) == 2
    for t in enumerate_terms(6):
        if t.is_normal:
            h = head_minimal_derivation(t)
            assert check(h).ok and deriv_size(h) == head_size(t)


def test_canonical_nf_derivation():
    d = canonical_nf_derivation(DELTA)
    assert d.rhs == parse_type("[X0, [X0] -o X1] -o X1") and deriv_size(d) == 2
    assert deriv_size(canonical_nf_derivation(I)) == 1
    v = canonical_nf_derivation(Var("x"))
    assert deriv_size(v) == 0 and v.ctx == TypeContext({"x": mset(v.rhs)})


def test_substitution_lemma_examples():
    b = canonical_nf_derivation(I)
    assert substitution_lemma(axiom("x", b.rhs), "x", I, [b]) == b
    z = axiom("z", X)
    assert substitution_lemma(z, "x", I, []) == z
    body = delta_id_derivation().premises[0].premises[0]
    bag = delta_id_derivation().premises[1].premises
    r = substitution_lemma(body, "x", I, bag)
    assert check(r).ok and deriv_size(r) == 3 and r.term == App(I, I)
    with pytest.raises(DerivationError):
        substitution_lemma(body, "x", I, bag[:1])


def test_split_substitution_examples():
    b = canonical_nf_derivation(I)
    ds, bag = split_substitution(Var("z"), "z", I, b)
    assert ds == axiom("z", b.rhs) and bag == [b]
    ds, bag = split_substitution(Var("w"), "z", I, axiom("w", X))
    assert ds == axiom("w", X) and bag == []
    body = delta_id_derivation().premises[0].premises[0]
    ii = substitution_lemma(body, "x", I, delta_id_derivation().premises[1].premises)
    ds, bag = split_substitution(parse("x x"), "x", I, ii)
    assert ds.ctx["x"] == mset(arrow(mset(W2), W2), W2)
    assert len(bag) == 2 and equal_up_to_many_order(ds, body)


def test_reduce_derivation_examples():
    d = delta_id_derivation()
    d1 = reduce_derivation(d, ())
    assert check(d1).ok and deriv_size(d1) == 3 and d1.term == App(I, I)
    d2 = reduce_derivation(d1, ())
    assert check(d2).ok and deriv_size(d2) == 1 and d2.term == I
    # a step inside an untyped argument changes nothing measurable
    e = reduce_derivation(x_omega_derivation(), (ARG,))
    assert deriv_size(e) == 1 and check(e).ok


def test_expand_derivation_examples():
    b = canonical_nf_derivation(I)
    up = expand_derivation(b, App(I, I), ())
    assert check(up).ok and deriv_size(up) == 3
    top = expand_derivation(up, App(DELTA, I), ())
    assert check(top).ok and deriv_size(top) == 5
    renamed = subst_derivation(TypeSubstitution({TyVar("X0"): W}), top)
    assert equal_up_to_many_order(renamed, delta_id_derivation())
    e = expand_derivation(x_omega_derivation(), X_OMEGA, (ARG,))
    assert deriv_size(e) == 1


def test_infer_via_trace_examples():
    d, tr = infer_via_trace(App(DELTA, I), 10)
    assert len(tr) == 2 and deriv_size(d) == 5 and is_unitary_shrinking(d)
    d, tr = infer_via_trace(I, 10)
    assert len(tr) == 0 and deriv_size(d) == 1
    assert infer_via_trace(OMEGA, 20) is None
    d, tr = infer_head_via_trace(X_OMEGA, 10)
    assert deriv_size(d) == 1 and len(tr) == 0


def test_infer_matches_step_count_on_corpus():
    for t in enumerate_terms(7):
        r = infer_via_trace(t, 50)
        tr = normalize(t, LEFTMOST, 50)
        if r is None:
            assert tr.outcome == "fuel-exhausted"
            continue
        d, _ = r
        assert check(d).ok and is_unitary_shrinking(d)
        assert deriv_size(d) == 2 * len(tr) + inner_size(tr.final)


def test_json_roundtrip():
    for d in (delta_id_derivation(), x_omega_derivation(), y_iz_derivation()):
        obj = derivation_to_json(d)
        back = derivation_from_json(json.loads(json.dumps(obj)))
        assert back == d
