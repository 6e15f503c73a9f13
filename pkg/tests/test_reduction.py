import pytest

from multitypes.reduction import (
    HEAD, LEFTMOST, NotARedexError, beta_step_at, head_step, leftmost_step, normalize,
    one_step_reducts, redex_positions,
)
from multitypes.syntax import ARG, BODY, FN, App, enumerate_terms, parse

import oracles

I = parse(r"\x. x")
DELTA = parse(r"\x. x x")
OMEGA = App(DELTA, DELTA)
II = App(I, I)


def test_beta_step_at():
    assert beta_step_at(App(DELTA, I), ()) == II
    assert beta_step_at(parse(r"y ((\z. z) y)"), (ARG,)) == parse("y y")
    with pytest.raises(NotARedexError):
        beta_step_at(parse("y"), ())


def test_head_step():
    assert head_step(App(DELTA, I)) == ((), II)
    assert head_step(OMEGA)[1] == OMEGA
    assert head_step(App(parse("x"), OMEGA)) is None
    assert head_step(parse(r"\y. (\x. x) y")) == ((BODY,), parse(r"\y. y"))


def test_leftmost_step():
    t = App(App(parse("x"), II), II)
    pos, r = leftmost_step(t)
    assert pos == (FN, ARG) and r == App(App(parse("x"), I), II)
    # the head redex fires before anything inside the arguments
    t = App(App(DELTA, II), II)
    pos, r = leftmost_step(t)
    assert pos == (FN,)
    assert r == App(App(II, II), II)
    assert r != App(App(DELTA, I), II)
    assert leftmost_step(I) is None


def test_normalize_examples():
    tr = normalize(App(DELTA, I), LEFTMOST, 10)
    assert (tr.outcome, len(tr), tr.final) == ("normal", 2, I)
    assert tr.terms == [App(DELTA, I), II, I]
    assert normalize(OMEGA, LEFTMOST, 50).outcome == "fuel-exhausted"
    assert len(normalize(OMEGA, LEFTMOST, 50)) == 50
    tr = normalize(App(parse("x"), OMEGA), HEAD, 10)
    assert (tr.outcome, len(tr)) == ("head-normal", 0)


def test_fuel_zero():
    assert normalize(App(DELTA, I), LEFTMOST, 0).outcome == "fuel-exhausted"
    assert normalize(I, LEFTMOST, 0).outcome == "normal"


@pytest.mark.parametrize("strategy,step", [(LEFTMOST, oracles.lo_step), (HEAD, oracles.head_step)])
def test_normalize_matches_nameless_oracle(strategy, step):
    for t in enumerate_terms(8):
        tr = normalize(t, strategy, 30)
        ref = oracles.run(oracles.to_db(t), step, 30)
        if ref is None:
            assert tr.outcome == "fuel-exhausted"
        else:
            assert (len(tr), oracles.to_db(tr.final)) == ref
            # every intermediate step agrees too
            db = oracles.to_db(t)
            for s in tr.steps:
                db = step(db)
                assert oracles.to_db(s.term) == db


def test_redex_positions_cover_all_reducts():
    for t in enumerate_terms(7, closed_only=False):
        mine = sorted(map(oracles.to_db, (r for _, r in one_step_reducts(t))), key=repr)
        ref = sorted(oracles.all_reducts(oracles.to_db(t)), key=repr)
        assert mine == ref
        ps = list(redex_positions(t))
        if ps:
            assert ps[0] == leftmost_step(t)[0]


def test_leftmost_normal_forms_are_normal():
    for t in enumerate_terms(8):
        tr = normalize(t, LEFTMOST, 40)
        if tr.outcome == "normal":
            assert tr.final.is_normal
        tr = normalize(t, HEAD, 40)
        if tr.outcome == "head-normal":
            assert head_step(tr.final) is None
