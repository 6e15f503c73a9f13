import pytest

from multitypes.syntax import (
    ARG, BODY, FN, Abs, App, NotHeadNormalError, ParseError, UnboundVariableError, Var,
    classify, enumerate_terms, fresh_name, head_size, inner_size, node_count, parse,
    parse_position, format_position, rename_free, replace_at, show, subst, subterm_at,
)

import oracles

I = parse(r"\x. x")
DELTA = parse(r"\x. x x")


def test_parse_basic():
    assert parse(r"\x. x x") == Abs("x", App(Var("x"), Var("x")))
    omega = parse(r"(\x. x x)(\x. x x)")
    assert omega == App(DELTA, DELTA)
    assert parse(r"\x y. y x") == parse(r"\x. \y. y x")
    assert parse("a b c") == App(App(Var("a"), Var("b")), Var("c"))


@pytest.mark.parametrize("text", [r"\x.", "(x", "x)", "", r"\. x", "x $"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_parse_closed_flag():
    with pytest.raises(UnboundVariableError):
        parse(r"\x. y", closed=True)
    assert parse(r"\x. x", closed=True) == I


def test_show_roundtrip_on_corpus():
    for t in enumerate_terms(7, closed_only=False):
        assert parse(show(t)) == t


def test_alpha_equality():
    assert parse(r"\x. x") == parse(r"\z. z")
    assert parse(r"\x. y") != parse(r"\x. z")
    assert hash(parse(r"\a. \b. a")) == hash(parse(r"\u. \v. u"))


def test_subst_examples():
    assert subst(parse("x x"), "x", I) == App(I, I)
    r = subst(parse(r"\y. x"), "x", Var("y"))
    assert isinstance(r, Abs) and r.binder != "y" and r.body == Var("y")
    assert r == parse(r"\w. y")
    assert subst(I, "x", parse("u")) == I


def test_subst_against_de_bruijn():
    # substituting a free variable is the same as the nameless substitution
    for u in (parse(r"\z. y z"), parse("y"), parse(r"x1 \x1. x1")):
        for t in enumerate_terms(6, closed_only=False, free_vars=("y", "x")):
            got = subst(t, "x", u)
            assert oracles.to_db(got) == oracles.subst_free(oracles.to_db(t), "x", oracles.to_db(u))


def test_rename_free_and_fresh_name():
    assert rename_free(parse(r"x \x. x"), "x", "q") == parse(r"q \x. x")
    assert fresh_name("x", {"x", "x1"}) not in {"x", "x1"}


def test_sizes():
    assert inner_size(Var("x")) == 0
    assert inner_size(DELTA) == 2
    assert inner_size(parse(r"x ((\x. x x) (\x. x x))")) == 6
    assert head_size(parse(r"x ((\x. x x) (\x. x x))")) == 1
    assert head_size(parse(r"\x. \y. x")) == 2
    with pytest.raises(NotHeadNormalError):
        head_size(App(DELTA, I))
    assert node_count(DELTA) == 4


def test_inner_size_oracle():
    for t in enumerate_terms(7, closed_only=False):
        assert inner_size(t) == oracles.db_inner(oracles.to_db(t))


def test_classify():
    c = classify(parse(r"x (\y. y)"))
    assert (c.is_neutral, c.is_normal, c.is_head_normal) == (True, True, True)
    c = classify(parse(r"x ((\x. x x) (\x. x x))"))
    assert (c.is_neutral, c.is_normal, c.is_head_normal) == (False, False, True)
    assert c.prefix_len == 0 and c.spine_len == 1
    c = classify(App(DELTA, I))
    assert (c.is_neutral, c.is_normal, c.is_head_normal) == (False, False, False)


def test_positions():
    t = parse(r"\x. x (y z)")
    assert subterm_at(t, (BODY, ARG, FN)) == Var("y")
    assert replace_at(t, (BODY, ARG), Var("w")) == parse(r"\x. x w")
    p = (BODY, FN, ARG)
    assert parse_position(format_position(p)) == p
    assert format_position(()) == "root"
    with pytest.raises((ValueError, IndexError, TypeError)):
        subterm_at(Var("x"), (FN,))


def test_enumerate_small():
    assert list(enumerate_terms(1)) == []
    assert list(enumerate_terms(2)) == [I]
    four = set(enumerate_terms(4))
    for s in (r"\x. \y. x", r"\x. \y. y", r"\x. x x", r"\x. \y. \z. z"):
        assert parse(s) in four


@pytest.mark.parametrize("n", range(1, 10))
def test_enumerate_counts_match_oracle(n):
    terms = list(enumerate_terms(n))
    assert len(terms) == len(set(terms))
    assert len(terms) == sum(oracles.count_terms(m, 0) for m in range(1, n + 1))
    normal = sum(1 for t in terms if t.is_normal)
    assert normal == sum(oracles.count_normal(m, 0) for m in range(1, n + 1))


def test_frozen_counts():
    # frozen from the counting oracle
    assert [len(list(enumerate_terms(n))) for n in range(1, 9)] == [0, 1, 3, 7, 20, 62, 201, 707]
