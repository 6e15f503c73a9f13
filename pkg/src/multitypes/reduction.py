"""Beta reduction: single steps, head and leftmost(-outermost) strategies,
fuel-bounded normalization with traces."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from .syntax import ARG, BODY, FN, Abs, App, Position, Term, format_position, replace_at, show, subst, subterm_at

__all__ = [
    "HEAD", "LEFTMOST", "STRATEGIES", "NotARedexError", "Step", "ReductionTrace",
    "beta_step_at", "head_step", "leftmost_step", "normalize", "redex_positions",
    "one_step_reducts",
]

HEAD = "head"
LEFTMOST = "leftmost"
STRATEGIES = (HEAD, LEFTMOST)


class NotARedexError(ValueError):
    pass


@dataclass(frozen=True)
class Step:
    position: Position
    term: Term  # the whole term after the step


@dataclass(frozen=True)
class ReductionTrace:
    initial: Term
    steps: Tuple[Step, ...]
    outcome: str  # "normal" | "head-normal" | "fuel-exhausted"
    strategy: str

    @property
    def final(self) -> Term:
        return self.steps[-1].term if self.steps else self.initial

    @property
    def terms(self) -> List[Term]:
        """All terms of the trace, initial included."""
        return [self.initial] + [s.term for s in self.steps]

    def __len__(self):
        return len(self.steps)


def _contract(r: Term) -> Term:
    return subst(r.fn.body, r.fn.binder, r.arg)


def beta_step_at(t: Term, p: Position) -> Term:
    try:
        r = subterm_at(t, p)
    except ValueError as e:
        raise NotARedexError(str(e)) from None
    if not (isinstance(r, App) and isinstance(r.fn, Abs)):
        raise NotARedexError(f"no redex at {format_position(p)} in {show(t)}")
    return replace_at(t, p, _contract(r))


def _head_pos(t: Term) -> Optional[Position]:
    path = []
    while isinstance(t, Abs):
        path.append(BODY)
        t = t.body
    # t = a t1 ... tk; follow the function spine
    spine = []
    while isinstance(t, App):
        if isinstance(t.fn, Abs):
            return tuple(path + spine)
        spine.append(FN)
        t = t.fn
    return None


def _leftmost_pos(t: Term) -> Optional[Position]:
    path = []
    while True:
        if isinstance(t, Abs):
            path.append(BODY)
            t = t.body
            continue
        if not isinstance(t, App):
            return None
        if isinstance(t.fn, Abs):
            return tuple(path)
        p = _leftmost_pos(t.fn)
        if p is not None:
            return tuple(path) + (FN,) + p
        # the function part is neutral: move to the argument
        path.append(ARG)
        t = t.arg


def head_step(t: Term) -> Optional[Tuple[Position, Term]]:
    p = _head_pos(t)
    return None if p is None else (p, beta_step_at(t, p))


def leftmost_step(t: Term) -> Optional[Tuple[Position, Term]]:
    p = _leftmost_pos(t)
    return None if p is None else (p, beta_step_at(t, p))


def normalize(t: Term, strategy: str, fuel: int) -> ReductionTrace:
    """Iterate ``strategy`` until no step applies or ``fuel`` steps are spent."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    step_fn = head_step if strategy == HEAD else leftmost_step
    done = "head-normal" if strategy == HEAD else "normal"
    steps = []
    cur = t
    while True:
        nxt = step_fn(cur)
        if nxt is None:
            return ReductionTrace(t, tuple(steps), done, strategy)
        if len(steps) >= fuel:
            return ReductionTrace(t, tuple(steps), "fuel-exhausted", strategy)
        cur = nxt[1]
        steps.append(Step(nxt[0], cur))


def redex_positions(t: Term, prefix: Position = ()) -> Iterator[Position]:
    """Every redex position, outermost-leftmost first."""
    if isinstance(t, Abs):
        yield from redex_positions(t.body, prefix + (BODY,))
    elif isinstance(t, App):
        if isinstance(t.fn, Abs):
            yield prefix
        yield from redex_positions(t.fn, prefix + (FN,))
        yield from redex_positions(t.arg, prefix + (ARG,))


def one_step_reducts(t: Term) -> Iterator[Tuple[Position, Term]]:
    for p in redex_positions(t):
        yield p, beta_step_at(t, p)
