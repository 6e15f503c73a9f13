import json
import random

import pytest

from multitypes.types import (
    EMPTY, Arrow, MultiType, TyVar, TyVarSupply, TypeContext, TypeSubstitution,
    TypeSyntaxError, apply_subst, arrow, classify_type, context_from_json, context_size,
    context_to_json, ctx_sum, fresh_tyvars, is_left_context, mset, occurrences, parse_type,
    show_type, type_from_json, type_size, type_to_json, tyvars,
)

import oracles

X, Y, Z, W = TyVar("X"), TyVar("Y"), TyVar("Z"), TyVar("W")
W2 = arrow(mset(W), W)


def test_type_size_examples():
    assert type_size(X) == 0
    assert type_size(arrow(mset(arrow(mset(Z), Z), Z), Z)) == 2
    big = mset(arrow(mset(arrow(mset(W2), W2), W2), W2))
    assert type_size(big) == 6


def test_type_size_counts_arrows():
    rng = random.Random(3)
    for _ in range(500):
        t = oracles.rand_multi(rng, 4)
        assert type_size(t) == oracles.count_arrows(t)


def test_context_size():
    assert context_size(TypeContext()) == 0
    assert context_size(TypeContext({"x": mset(X)})) == 0
    assert context_size(TypeContext({"x": mset(arrow(mset(X), X), X)})) == 1


def test_classify_type_examples():
    assert tuple(classify_type(mset(X))) == (True, True, True, True)
    c = classify_type(EMPTY)
    assert c.is_left and not c.is_right
    c = classify_type(mset(arrow(EMPTY, X)))
    assert c.is_right and not c.is_left


def test_classify_type_polarity_oracle():
    rng = random.Random(11)
    for i in range(3000):
        t = oracles.rand_type(rng, 4) if i % 2 else oracles.rand_multi(rng, 4)
        assert tuple(classify_type(t)) == oracles.polarity_class(t), show_type(t)


def test_ctx_sum():
    a = TypeContext({"x": mset(X)})
    assert ctx_sum(a, a) == TypeContext({"x": mset(X, X)})
    assert ctx_sum(a, TypeContext()) == a
    assert ctx_sum(a, TypeContext({"y": mset(Y)})) == TypeContext({"x": mset(X), "y": mset(Y)})
    assert "z" not in a and a["z"] == EMPTY
    # empty entries do not count as part of the domain
    assert TypeContext({"x": EMPTY}).domain == frozenset()


def test_multiset_order_is_irrelevant():
    assert mset(X, arrow(mset(X), X)) == mset(arrow(mset(X), X), X)
    assert mset(X, X) != mset(X)


def test_apply_subst_examples():
    dz = arrow(mset(arrow(mset(Z), Z), Z), Z)
    assert apply_subst(TypeSubstitution({Z: W2}), dz) == arrow(mset(arrow(mset(W2), W2), W2), W2)
    assert apply_subst(TypeSubstitution(), dz) == dz
    dx = arrow(mset(arrow(mset(X), X), X), X)
    six = apply_subst(TypeSubstitution({X: arrow(mset(Y), Y)}), dx)
    assert type_size(six) == 6


def test_substitution_algebra():
    s = TypeSubstitution({X: arrow(mset(Y), Y)})
    t = TypeSubstitution({Y: Z})
    ty = arrow(mset(X, Y), X)
    assert apply_subst(s.then(t), ty) == apply_subst(t, apply_subst(s, ty))
    assert TypeSubstitution({X: X}) == TypeSubstitution()
    with pytest.raises(ValueError):
        s.union(TypeSubstitution({X: Y}))
    assert s.union(t).domain == {X, Y}
    with pytest.raises(TypeError):
        TypeSubstitution({X: mset(Y)})


def test_fresh_tyvars():
    vs, sup = fresh_tyvars(TyVarSupply(), 2)
    assert vs == [TyVar("X0"), TyVar("X1")]
    assert fresh_tyvars(sup, 0) == ([], sup)
    more, _ = fresh_tyvars(sup, 3)
    assert not set(vs) & set(more)
    assert TyVarSupply().beyond([TyVar("X7"), TyVar("Y9")]).next == 8


def test_tyvars_and_occurrences():
    t = arrow(mset(arrow(mset(Z), Y), Z), Y)
    assert tyvars(t) == {Y, Z}
    assert occurrences(t) == {Y: 2, Z: 2}


def test_show_parse_roundtrip():
    rng = random.Random(5)
    for i in range(500):
        t = oracles.rand_type(rng, 4) if i % 2 else oracles.rand_multi(rng, 3)
        assert parse_type(show_type(t)) == t
        assert type_from_json(json.loads(json.dumps(type_to_json(t)))) == t
    assert show_type(EMPTY) == "0"
    assert parse_type("[[X] -o X, X] -o X") == arrow(mset(arrow(mset(X), X), X), X)


@pytest.mark.parametrize("text", ["[X", "X -o X", "[X] -o", "-o X", "[X] -o [X]"])
def test_parse_type_errors(text):
    with pytest.raises(TypeSyntaxError):
        parse_type(text)


def test_context_json_and_left():
    ctx = TypeContext({"x": mset(arrow(mset(X), X), X), "y": EMPTY})
    assert context_from_json(context_to_json(ctx)) == ctx
    assert is_left_context(ctx)
    assert not is_left_context(TypeContext({"x": mset(arrow(EMPTY, X))}))
