"""Tight multi types for the untyped lambda calculus: terms, reduction,
derivations, dry derivations and composable pairs."""
from .syntax import Abs, App, Term, Var, parse, show
from .reduction import HEAD, LEFTMOST, normalize
from .types import EMPTY, Arrow, MultiType, TyVar, arrow, mset, parse_type, show_type
from .derivations import check, deriv_size, infer_via_trace, infer_head_via_trace
from .dry import dry_of, one_type_representation
from .semantics import ComposablePair, exact_pair, find_derivation, pair_from_application
from .verify import THEOREMS, verify_theorem

__all__ = [
    "Abs", "App", "Term", "Var", "parse", "show", "HEAD", "LEFTMOST", "normalize",
    "EMPTY", "Arrow", "MultiType", "TyVar", "arrow", "mset", "parse_type", "show_type",
    "check", "deriv_size", "infer_via_trace", "infer_head_via_trace", "dry_of",
    "one_type_representation", "ComposablePair", "exact_pair", "find_derivation",
    "pair_from_application", "THEOREMS", "verify_theorem",
]
