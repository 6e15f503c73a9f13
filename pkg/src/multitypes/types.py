"""Linear types, multi types, type contexts and type substitutions.

Multi types are finite multisets stored in a canonical sorted order, so
structural equality of the dataclasses is multiset equality.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import chain
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Tuple, Union

__all__ = [
    "TyVar", "Arrow", "MultiType", "LinearType", "AnyType", "EMPTY", "mset",
    "arrow", "TypeContext", "TypeSubstitution", "TyVarSupply", "Fresh",
    "fresh_tyvars", "type_size", "context_size", "judgment_size", "TypeClass",
    "classify_type", "is_right", "is_left", "is_unitary_right", "is_unitary_left",
    "is_left_context", "is_unitary_left_context", "ctx_sum", "apply_subst",
    "tyvars", "occurrences", "parse_type", "show_type", "show_context",
    "type_to_json", "type_from_json", "context_to_json", "context_from_json",
    "TypeSyntaxError",
]

_SERIAL = re.compile(r"^(.*?)(\d*)$")


@dataclass(frozen=True)
class TyVar:
    name: str

    @cached_property
    def order_key(self):
        base, digits = _SERIAL.match(self.name).groups()
        return (0, base, int(digits) if digits else -1, self.name)

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Arrow:
    dom: "MultiType"
    cod: "LinearType"

    @cached_property
    def order_key(self):
        return (1, self.dom.order_key, self.cod.order_key)

    def __str__(self):
        return show_type(self)


LinearType = Union[TyVar, Arrow]


@dataclass(frozen=True, init=False)
class MultiType:
    elements: Tuple[LinearType, ...]

    def __init__(self, elements: Iterable[LinearType] = ()):
        elems = tuple(sorted(elements, key=lambda l: l.order_key))
        for e in elems:
            if not isinstance(e, (TyVar, Arrow)):
                raise TypeError(f"multi type elements must be linear types, got {e!r}")
        object.__setattr__(self, "elements", elems)

    @cached_property
    def order_key(self):
        return tuple(e.order_key for e in self.elements)

    def __add__(self, other: "MultiType") -> "MultiType":
        return MultiType(self.elements + other.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __bool__(self):
        return bool(self.elements)

    def remove_one(self, l: LinearType) -> "MultiType":
        elems = list(self.elements)
        elems.remove(l)
        return MultiType(elems)

    def __str__(self):
        return show_type(self)


AnyType = Union[TyVar, Arrow, MultiType]

EMPTY = MultiType()


def mset(*elements: LinearType) -> MultiType:
    return MultiType(elements)


def arrow(*parts) -> Arrow:
    """``arrow(M1, ..., Mk, L)`` builds ``M1 -o ... -o Mk -o L``."""
    out = parts[-1]
    for m in reversed(parts[:-1]):
        out = Arrow(m, out)
    return out


# --------------------------------------------------------------------------
# Contexts

class TypeContext(Mapping):
    """Finite map from term variables to multi types; absent means ``0``."""

    __slots__ = ("_items", "_hash")

    def __init__(self, entries: Union[Mapping, Iterable] = ()):
        if isinstance(entries, Mapping):
            entries = entries.items()
        acc: Dict[str, MultiType] = {}
        for x, m in entries:
            if not isinstance(m, MultiType):
                raise TypeError(f"context entries must be multi types, got {m!r}")
            acc[x] = acc[x] + m if x in acc else m
        self._items = tuple(sorted((x, m) for x, m in acc.items() if m))
        self._hash = None

    def __getitem__(self, x: str) -> MultiType:
        for k, m in self._items:
            if k == x:
                return m
        return EMPTY

    def __contains__(self, x):
        return any(k == x for k, _ in self._items)

    def __iter__(self):
        return (k for k, _ in self._items)

    def __len__(self):
        return len(self._items)

    def items(self):
        return self._items

    @property
    def domain(self) -> frozenset:
        return frozenset(k for k, _ in self._items)

    def __eq__(self, other):
        if isinstance(other, TypeContext):
            return self._items == other._items
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._items)
        return self._hash

    @property
    def order_key(self):
        return tuple((x, m.order_key) for x, m in self._items)

    def __add__(self, other: "TypeContext") -> "TypeContext":
        return TypeContext(chain(self._items, other._items))

    def without(self, x: str) -> "TypeContext":
        return TypeContext((k, m) for k, m in self._items if k != x)

    def rename(self, old: str, new: str) -> "TypeContext":
        return TypeContext(((new if k == old else k), m) for k, m in self._items)

    def map_types(self, fn) -> "TypeContext":
        return TypeContext((k, fn(m)) for k, m in self._items)

    def __repr__(self):
        return f"TypeContext({dict(self._items)!r})"

    def __str__(self):
        return show_context(self)


def ctx_sum(*contexts: TypeContext) -> TypeContext:
    return TypeContext(chain.from_iterable(c.items() for c in contexts))


# --------------------------------------------------------------------------
# Sizes

def type_size(t: AnyType) -> int:
    if isinstance(t, TyVar):
        return 0
    if isinstance(t, Arrow):
        return type_size(t.dom) + type_size(t.cod) + 1
    return sum(type_size(l) for l in t.elements)


def context_size(ctx: TypeContext) -> int:
    return sum(type_size(m) for _, m in ctx.items())


def judgment_size(ctx: TypeContext, t: AnyType) -> int:
    return context_size(ctx) + type_size(t)


# --------------------------------------------------------------------------
# Shrinking classification

def is_right(t: AnyType) -> bool:
    if isinstance(t, TyVar):
        return True
    if isinstance(t, Arrow):
        return is_left(t.dom) and is_right(t.cod)
    return len(t) >= 1 and all(is_right(l) for l in t)


def is_left(t: AnyType) -> bool:
    if isinstance(t, TyVar):
        return True
    if isinstance(t, Arrow):
        return is_right(t.dom) and is_left(t.cod)
    return all(is_left(l) for l in t)


def is_unitary_right(t: AnyType) -> bool:
    if isinstance(t, TyVar):
        return True
    if isinstance(t, Arrow):
        return is_unitary_left(t.dom) and is_unitary_right(t.cod)
    return len(t) == 1 and is_unitary_right(t.elements[0])


def is_unitary_left(t: AnyType) -> bool:
    if isinstance(t, TyVar):
        return True
    if isinstance(t, Arrow):
        return is_unitary_right(t.dom) and is_unitary_left(t.cod)
    return all(is_unitary_left(l) for l in t)


def is_left_context(ctx: TypeContext) -> bool:
    return all(is_left(m) for _, m in ctx.items())


def is_unitary_left_context(ctx: TypeContext) -> bool:
    return all(is_unitary_left(m) for _, m in ctx.items())


class TypeClass(NamedTuple):
    is_right: bool
    is_left: bool
    is_unitary_right: bool
    is_unitary_left: bool


def classify_type(t: AnyType) -> TypeClass:
    return TypeClass(is_right(t), is_left(t), is_unitary_right(t), is_unitary_left(t))


# --------------------------------------------------------------------------
# Type variables, substitutions, fresh supplies

def tyvars(t: Union[AnyType, TypeContext]) -> frozenset:
    return frozenset(occurrences(t))


def occurrences(t: Union[AnyType, TypeContext]) -> Counter:
    """Occurrence count of each type variable, multiplicities included."""
    c = Counter()
    _count(t, c)
    return c


def _count(t, c):
    if isinstance(t, TyVar):
        c[t] += 1
    elif isinstance(t, Arrow):
        _count(t.dom, c)
        _count(t.cod, c)
    elif isinstance(t, MultiType):
        for l in t.elements:
            _count(l, c)
    else:
        for _, m in t.items():
            _count(m, c)


class TypeSubstitution(Mapping):
    """Finite map from type variables to linear types, identity elsewhere."""

    def __init__(self, mapping: Union[Mapping, Iterable] = ()):
        if isinstance(mapping, Mapping):
            mapping = mapping.items()
        d = {}
        for k, v in mapping:
            k = TyVar(k) if isinstance(k, str) else k
            if not isinstance(v, (TyVar, Arrow)):
                raise TypeError(f"substitution images must be linear types, got {v!r}")
            if k != v:
                d[k] = v
        self._map = dict(sorted(d.items(), key=lambda kv: kv[0].order_key))

    def __getitem__(self, k):
        return self._map[k]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __eq__(self, other):
        if isinstance(other, TypeSubstitution):
            return self._map == other._map
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._map.items()))

    def __repr__(self):
        inner = ", ".join(f"{k}<-{show_type(v)}" for k, v in self._map.items())
        return "{" + inner + "}"

    @property
    def domain(self) -> frozenset:
        return frozenset(self._map)

    def __call__(self, t):
        return apply_subst(self, t)

    def then(self, other: "TypeSubstitution") -> "TypeSubstitution":
        """Sequential composition: apply ``self`` first, then ``other``."""
        keys = list(self._map) + [k for k in other._map if k not in self._map]
        return TypeSubstitution((k, apply_subst(other, apply_subst(self, k))) for k in keys)

    def union(self, other: "TypeSubstitution") -> "TypeSubstitution":
        clash = self.domain & other.domain
        if clash:
            raise ValueError("substitution domains overlap: " + ", ".join(sorted(map(str, clash))))
        return TypeSubstitution(list(self._map.items()) + list(other._map.items()))

    def without(self, *vars_: TyVar) -> "TypeSubstitution":
        return TypeSubstitution((k, v) for k, v in self._map.items() if k not in vars_)

    def restrict(self, vars_) -> "TypeSubstitution":
        return TypeSubstitution((k, v) for k, v in self._map.items() if k in vars_)


def apply_subst(sigma: Mapping, t):
    if not sigma:
        return t
    if isinstance(t, TyVar):
        return sigma.get(t, t)
    if isinstance(t, Arrow):
        return Arrow(apply_subst(sigma, t.dom), apply_subst(sigma, t.cod))
    if isinstance(t, MultiType):
        return MultiType(apply_subst(sigma, l) for l in t.elements)
    if isinstance(t, TypeContext):
        return t.map_types(lambda m: apply_subst(sigma, m))
    raise TypeError(f"cannot substitute into {t!r}")


@dataclass(frozen=True)
class TyVarSupply:
    """Immutable source of fresh type variables ``<base><serial>``."""
    base: str = "X"
    next: int = 0

    def beyond(self, used: Iterable[TyVar]) -> "TyVarSupply":
        """A supply that never issues any of ``used``."""
        n = self.next
        for v in used:
            b, digits = _SERIAL.match(v.name).groups()
            if b == self.base and digits:
                n = max(n, int(digits) + 1)
        return TyVarSupply(self.base, n)


def fresh_tyvars(supply: TyVarSupply, n: int) -> Tuple[List[TyVar], TyVarSupply]:
    out = [TyVar(f"{supply.base}{supply.next + i}") for i in range(n)]
    return out, TyVarSupply(supply.base, supply.next + n)


class Fresh:
    """Mutable cursor over a supply, for use inside one synthesis call."""

    def __init__(self, supply: TyVarSupply = None):
        self.supply = supply or TyVarSupply()

    def take(self) -> TyVar:
        (v,), self.supply = fresh_tyvars(self.supply, 1)
        return v


# --------------------------------------------------------------------------
# Surface syntax and JSON

class TypeSyntaxError(ValueError):
    pass


def show_type(t: AnyType) -> str:
    if isinstance(t, TyVar):
        return t.name
    if isinstance(t, Arrow):
        return f"{show_type(t.dom)} -o {show_type(t.cod)}"
    if not t.elements:
        return "0"
    return "[" + ", ".join(show_type(l) for l in t.elements) + "]"


def show_context(ctx: TypeContext) -> str:
    return ", ".join(f"{x} : {show_type(m)}" for x, m in ctx.items())


_TYTOK = re.compile(r"\s*(?:(?P<arrow>-o)|(?P<lb>\[)|(?P<rb>\])|(?P<comma>,)|(?P<lp>\()|(?P<rp>\))"
                    r"|(?P<zero>0(?![0-9A-Za-z_']))|(?P<var>[A-Z][A-Za-z0-9_']*))")


def parse_type(text: str) -> AnyType:
    """Parse ``X0``, ``[L, ...]``, ``0`` and ``M -o L`` (right associative)."""
    toks, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TYTOK.match(text, pos)
        if not m or m.end() == pos:
            raise TypeSyntaxError(f"unexpected character {text[pos]!r} at offset {pos}")
        toks.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    i = 0

    def peek():
        return toks[i][0]

    def take(kind):
        nonlocal i
        tok = toks[i]
        if tok[0] != kind:
            raise TypeSyntaxError(f"expected {kind} at offset {tok[2]}, got {tok[1] or 'end of input'!r}")
        i += 1
        return tok

    def any_type():
        if peek() in ("lb", "zero"):
            m = multi()
            if peek() == "arrow":
                take("arrow")
                return Arrow(m, linear())
            return m
        return linear()

    def linear():
        k = peek()
        if k == "var":
            return TyVar(take("var")[1])
        if k == "lp":
            take("lp")
            l = linear()
            take("rp")
            return l
        m = multi()
        take("arrow")
        return Arrow(m, linear())

    def multi():
        if peek() == "zero":
            take("zero")
            return EMPTY
        take("lb")
        elems = []
        if peek() != "rb":
            elems.append(linear())
            while peek() == "comma":
                take("comma")
                elems.append(linear())
        take("rb")
        return MultiType(elems)

    out = any_type()
    take("eof")
    return out


def type_to_json(t: AnyType):
    if isinstance(t, TyVar):
        return {"var": t.name}
    if isinstance(t, Arrow):
        return {"arrow": {"dom": type_to_json(t.dom), "cod": type_to_json(t.cod)}}
    return [type_to_json(l) for l in t.elements]


def type_from_json(obj) -> AnyType:
    if isinstance(obj, list):
        return MultiType(type_from_json(o) for o in obj)
    if isinstance(obj, dict) and set(obj) == {"var"}:
        return TyVar(obj["var"])
    if isinstance(obj, dict) and set(obj) == {"arrow"}:
        dom = type_from_json(obj["arrow"]["dom"])
        if not isinstance(dom, MultiType):
            raise TypeSyntaxError("arrow domain must be a multi type")
        cod = type_from_json(obj["arrow"]["cod"])
        if isinstance(cod, MultiType):
            raise TypeSyntaxError("arrow codomain must be a linear type")
        return Arrow(dom, cod)
    raise TypeSyntaxError(f"bad type JSON: {obj!r}")


def context_to_json(ctx: TypeContext):
    return [[x, type_to_json(m)] for x, m in ctx.items()]


def context_from_json(obj) -> TypeContext:
    entries = []
    for x, m in obj:
        m = type_from_json(m)
        if not isinstance(m, MultiType):
            raise TypeSyntaxError(f"context entry for {x} must be a multi type")
        entries.append((x, m))
    return TypeContext(entries)
