"""Untyped lambda-terms.

Terms carry surface names for printing, but equality and hashing go through a
nameless key (bound variables as de Bruijn indices, free variables by name),
so ``==`` is alpha-equivalence.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence, Tuple, Union

__all__ = [
    "Term", "Var", "Abs", "App", "TermClass", "Position",
    "BODY", "FN", "ARG", "ParseError", "UnboundVariableError", "NotHeadNormalError",
    "parse", "show", "subst", "rename_free", "fresh_name", "inner_size", "head_size",
    "node_count", "classify", "enumerate_terms", "subterm_at", "replace_at",
    "format_position", "parse_position", "app", "lam",
]


class Term:
    """Base class of the three term constructors."""

    @cached_property
    def key(self):
        return _key(self, ())

    def __eq__(self, other):
        if not isinstance(other, Term):
            return NotImplemented
        return self is other or self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __str__(self):
        return show(self)

    @cached_property
    def free_vars(self) -> frozenset:
        if isinstance(self, Var):
            return frozenset((self.name,))
        if isinstance(self, Abs):
            return self.body.free_vars - {self.binder}
        return self.fn.free_vars | self.arg.free_vars

    @cached_property
    def names(self) -> frozenset:
        """Every variable name occurring in the term, bound or free."""
        if isinstance(self, Var):
            return frozenset((self.name,))
        if isinstance(self, Abs):
            return self.body.names | {self.binder}
        return self.fn.names | self.arg.names

    @property
    def is_closed(self) -> bool:
        return not self.free_vars

    @cached_property
    def is_neutral(self) -> bool:
        head, args = _spine(self)
        return isinstance(head, Var) and all(a.is_normal for a in args)

    @cached_property
    def is_normal(self) -> bool:
        t = self
        while isinstance(t, Abs):
            t = t.body
        return t.is_neutral


@dataclass(frozen=True, eq=False)
class Var(Term):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, eq=False)
class Abs(Term):
    binder: str
    body: Term

    def __repr__(self):
        return f"Abs({self.binder!r}, {self.body!r})"


@dataclass(frozen=True, eq=False)
class App(Term):
    fn: Term
    arg: Term

    def __repr__(self):
        return f"App({self.fn!r}, {self.arg!r})"


def _key(t, env):
    if isinstance(t, Var):
        try:
            return ("b", env.index(t.name))
        except ValueError:
            return ("f", t.name)
    if isinstance(t, Abs):
        return ("l", _key(t.body, (t.binder,) + env))
    return ("a", _key(t.fn, env), _key(t.arg, env))


def app(*terms: Term) -> Term:
    """Left-nested application ``t0 t1 ... tn``."""
    out = terms[0]
    for t in terms[1:]:
        out = App(out, t)
    return out


def lam(binders: Sequence[str], body: Term) -> Term:
    for x in reversed(binders):
        body = Abs(x, body)
    return body


def _spine(t: Term):
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


# --------------------------------------------------------------------------
# Positions

BODY, FN, ARG = "abs", "fn", "arg"

Position = Tuple[str, ...]


def subterm_at(t: Term, p: Position) -> Term:
    for i, d in enumerate(p):
        if d == BODY and isinstance(t, Abs):
            t = t.body
        elif d == FN and isinstance(t, App):
            t = t.fn
        elif d == ARG and isinstance(t, App):
            t = t.arg
        else:
            raise ValueError(f"invalid position {format_position(p)} (fails at step {i})")
    return t


def replace_at(t: Term, p: Position, u: Term) -> Term:
    if not p:
        return u
    d, rest = p[0], p[1:]
    if d == BODY and isinstance(t, Abs):
        return Abs(t.binder, replace_at(t.body, rest, u))
    if d == FN and isinstance(t, App):
        return App(replace_at(t.fn, rest, u), t.arg)
    if d == ARG and isinstance(t, App):
        return App(t.fn, replace_at(t.arg, rest, u))
    raise ValueError(f"invalid position {format_position(p)}")


def format_position(p: Position) -> str:
    return ".".join(p) if p else "root"


def parse_position(text: str) -> Position:
    if text in ("", "root"):
        return ()
    parts = tuple(text.split("."))
    for d in parts:
        if d not in (BODY, FN, ARG):
            raise ValueError(f"bad position component {d!r}")
    return parts


# --------------------------------------------------------------------------
# Substitution

def fresh_name(base: str, avoid) -> str:
    """``base`` with the smallest serial suffix not in ``avoid``."""
    stem = base.rstrip("0123456789") or base
    i = 1
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def binder_renaming(binder: str, body: Term, x: str, u: Term) -> Optional[str]:
    """The new binder name ``subst`` uses when pushing ``{x<-u}`` under
    ``\\binder. body``, or None when the binder is kept.

    Only meaningful when ``binder != x`` and ``x`` is free in ``body``.
    """
    if binder in u.free_vars:
        return fresh_name(binder, body.names | u.names | {x})
    return None


def subst(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding ``t{x<-u}``."""
    if x not in t.free_vars:
        return t
    if isinstance(t, Var):
        return u
    if isinstance(t, App):
        return App(subst(t.fn, x, u), subst(t.arg, x, u))
    # Abs with x free in the body, so binder != x
    y, body = t.binder, t.body
    y2 = binder_renaming(y, body, x, u)
    if y2 is not None:
        body = rename_free(body, y, y2)
        y = y2
    return Abs(y, subst(body, x, u))


def rename_free(t: Term, old: str, new: str) -> Term:
    """Rename free ``old`` to ``new``; ``new`` must not occur in ``t``."""
    return subst(t, old, Var(new))


# --------------------------------------------------------------------------
# Sizes and classification

def inner_size(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    if isinstance(t, Abs):
        return inner_size(t.body) + 1
    return inner_size(t.fn) + inner_size(t.arg) + 1


def node_count(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    if isinstance(t, Abs):
        return node_count(t.body) + 1
    return node_count(t.fn) + node_count(t.arg) + 1


@dataclass(frozen=True)
class TermClass:
    is_neutral: bool
    is_normal: bool
    is_head_normal: bool
    # head-normal decomposition \x1..xn. y t1..tk (None when not head normal)
    binders: Optional[Tuple[str, ...]] = None
    head_var: Optional[str] = None
    args: Optional[Tuple[Term, ...]] = None

    @property
    def prefix_len(self) -> Optional[int]:
        return None if self.binders is None else len(self.binders)

    @property
    def spine_len(self) -> Optional[int]:
        return None if self.args is None else len(self.args)


def classify(t: Term) -> TermClass:
    binders = []
    body = t
    while isinstance(body, Abs):
        binders.append(body.binder)
        body = body.body
    head, args = _spine(body)
    if not isinstance(head, Var):
        return TermClass(False, False, False)
    return TermClass(
        is_neutral=t.is_neutral,
        is_normal=t.is_normal,
        is_head_normal=True,
        binders=tuple(binders),
        head_var=head.name,
        args=tuple(args),
    )


class NotHeadNormalError(ValueError):
    pass


def head_size(h: Term) -> int:
    c = classify(h)
    if not c.is_head_normal:
        raise NotHeadNormalError(f"not head normal: {show(h)}")
    return c.prefix_len + c.spine_len


# --------------------------------------------------------------------------
# Parsing and printing

class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at offset {pos}")
        self.pos = pos


class UnboundVariableError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<lam>\\|λ)|(?P<dot>\.)|(?P<lp>\()|(?P<rp>\))|(?P<id>[a-z][a-zA-Z0-9_']*))")


def _tokenize(text: str):
    pos, out = 0, []
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("eof", "", n))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind):
        tok = self.toks[self.i]
        if tok[0] != kind:
            what = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise ParseError(f"expected {kind}, got {what}", tok[2])
        self.i += 1
        return tok

    def term(self):
        if self.peek()[0] == "lam":
            return self.abstraction()
        items = []
        while True:
            kind = self.peek()[0]
            if kind in ("id", "lp"):
                items.append(self.atom())
            elif kind == "lam":
                items.append(self.abstraction())
                break
            else:
                break
        if not items:
            tok = self.peek()
            what = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise ParseError(f"expected a term, got {what}", tok[2])
        return app(*items)

    def abstraction(self):
        self.take("lam")
        binders = [self.take("id")[1]]
        while self.peek()[0] == "id":
            binders.append(self.take("id")[1])
        self.take("dot")
        return lam(binders, self.term())

    def atom(self):
        if self.peek()[0] == "id":
            return Var(self.take("id")[1])
        self.take("lp")
        t = self.term()
        self.take("rp")
        return t


def parse(text: str, closed: bool = False) -> Term:
    """Parse surface syntax: ``\\x. t`` or ``λx. t``, juxtaposition, parentheses."""
    p = _Parser(text)
    t = p.term()
    tok = p.peek()
    if tok[0] != "eof":
        raise ParseError(f"unexpected {tok[1]!r}", tok[2])
    if closed and t.free_vars:
        raise UnboundVariableError("unbound variable(s): " + ", ".join(sorted(t.free_vars)))
    return t


def show(t: Term) -> str:
    return _show(t, True)


def _show(t, tail):
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Abs):
        s = f"\\{t.binder}. {_show(t.body, True)}"
        return s if tail else f"({s})"
    fn = t.fn
    fs = f"({_show(fn, True)})" if isinstance(fn, Abs) else _show(fn, False)
    a = t.arg
    if isinstance(a, App):
        as_ = f"({_show(a, True)})"
    else:
        as_ = _show(a, tail)
    return f"{fs} {as_}"


# --------------------------------------------------------------------------
# Enumeration

_BINDER_POOL = ("x", "y", "z", "w", "v", "u")


def _binder_names(free_vars):
    names, i = [], 0
    while True:
        for b in _BINDER_POOL:
            name = b if i == 0 else f"{b}{i}"
            if name not in free_vars:
                yield name
        i += 1


def enumerate_terms(max_nodes: int, closed_only: bool = True,
                    free_vars: Sequence[str] = ("a", "b")) -> Iterator[Term]:
    """Every term with at most ``max_nodes`` AST nodes, once per alpha-class.

    Ordered by node count, then Var < Abs < App.  Open terms draw their free
    variables from ``free_vars``; binders are named by depth.
    """
    free = () if closed_only else tuple(free_vars)
    gen = _binder_names(set(free))
    names = [next(gen) for _ in range(max_nodes)]
    cache = {}

    def terms(n, depth):
        k = (n, depth)
        if k in cache:
            return cache[k]
        out = []
        if n == 1:
            out.extend(Var(names[depth - 1 - i]) for i in range(depth))
            out.extend(Var(f) for f in free)
        if n >= 2:
            out.extend(Abs(names[depth], b) for b in terms(n - 1, depth + 1))
        for k1 in range(1, n - 1):
            fs = terms(k1, depth)
            if not fs:
                continue
            args = terms(n - 1 - k1, depth)
            out.extend(App(f, a) for f in fs for a in args)
        cache[k] = out
        return out

    for n in range(1, max_nodes + 1):
        yield from terms(n, 0)
