"""Command line front end.

Exit status: 0 on success, 1 on a failed check or theorem, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from .derivations import (
    check, derivation_from_json, derivation_to_json, deriv_size, infer_head_via_trace,
    infer_via_trace, is_shrinking, is_unitary_shrinking, show_derivation,
)
from .dry import check_dry, check_two_occurrence, dry_minimality, dry_of, one_type_representation
from .golden import golden_examples
from .reduction import HEAD, LEFTMOST, normalize
from .semantics import compose, exact_pair, pair_from_application
from .syntax import ParseError, UnboundVariableError, classify, enumerate_terms, format_position, head_size, inner_size, node_count, parse, show
from .types import TyVarSupply, TypeSyntaxError, context_size, parse_type, show_type, type_size, type_to_json
from .verify import THEOREMS, verify_theorem


class UsageError(Exception):
    pass


def _emit(obj, fmt, text=None):
    if fmt == "json":
        print(json.dumps(obj, indent=2, ensure_ascii=False))
    else:
        print(text if text is not None else json.dumps(obj, ensure_ascii=False))


def _term_arg(args):
    if args.infile:
        with open(args.infile) as fh:
            return parse(fh.read().strip())
    if args.term is None:
        raise UsageError("a term is required (argument or --in FILE)")
    return parse(args.term)


def _load_derivation(path):
    if path is None:
        raise UsageError("a derivation JSON file is required (--in FILE)")
    with open(path) as fh:
        obj = json.load(fh)
    # accept the wrapped output of ``infer --format json`` as well
    if "derivation" in obj:
        obj = obj["derivation"]
    return derivation_from_json(obj)


def _supply(args):
    return TyVarSupply(next=args.seed_supply)


def _flags(d):
    linear = not hasattr(d.rhs, "elements")
    return {
        "size": deriv_size(d),
        "shrinking": linear and is_shrinking(d),
        "unitary_shrinking": linear and is_unitary_shrinking(d),
    }


# --------------------------------------------------------------------------
# Subcommands

def cmd_parse(args):
    t = _term_arg(args)
    c = classify(t)
    info = {
        "term": show(t), "closed": t.is_closed, "nodes": node_count(t),
        "inner_size": inner_size(t), "neutral": c.is_neutral, "normal": c.is_normal,
        "head_normal": c.is_head_normal,
    }
    if c.is_head_normal:
        info["head_size"] = head_size(t)
    _emit(info, args.format, "\n".join(f"{k}: {v}" for k, v in info.items()))
    return 0


def cmd_reduce(args):
    t = _term_arg(args)
    tr = normalize(t, args.strategy, args.fuel)
    obj = {
        "initial": show(t), "strategy": tr.strategy,
        "steps": [{"position": format_position(s.position), "term": show(s.term)} for s in tr.steps],
        "outcome": tr.outcome, "final": show(tr.final), "length": len(tr),
    }
    lines = [f"0: {show(t)}"]
    lines += [f"{k}: {show(s.term)}  [redex @ {format_position(s.position)}]"
              for k, s in enumerate(tr.steps, 1)]
    lines.append(f"{tr.outcome} after {len(tr)} step(s): {show(tr.final)}")
    _emit(obj, args.format, "\n".join(lines))
    return 0 if tr.outcome != "fuel-exhausted" else 1


def cmd_infer(args):
    t = _term_arg(args)
    infer = infer_via_trace if args.strategy == LEFTMOST else infer_head_via_trace
    r = infer(t, args.fuel, _supply(args))
    if r is None:
        print(f"no {args.strategy} normal form within {args.fuel} steps", file=sys.stderr)
        return 1
    d, tr = r
    obj = {"term": show(t), "strategy": args.strategy, "steps": len(tr), **_flags(d),
           "derivation": derivation_to_json(d)}
    text = show_derivation(d) + "\n" + " ".join(f"{k}={v}" for k, v in obj.items()
                                                 if k not in ("derivation", "term"))
    _emit(obj, args.format, text)
    return 0


def cmd_check(args):
    d = _load_derivation(args.infile)
    dry = d.rule.endswith("*")
    res = check_dry(d) if dry else check(d)
    obj = {"ok": res.ok, "system": "dry" if dry else "standard"}
    if not res.ok:
        obj.update({"path": list(res.path), "rule": res.rule, "message": res.message})
    else:
        obj.update(_flags(d))
        obj["judgment_size"] = context_size(d.ctx) + type_size(d.rhs)
    text = str(res) if not res.ok else "ok " + " ".join(f"{k}={v}" for k, v in obj.items()
                                                         if k not in ("ok",))
    _emit(obj, args.format, text)
    return 0 if res.ok else 1


def cmd_dry(args):
    d = _load_derivation(args.infile)
    res = check(d)
    if not res.ok:
        print(f"input derivation does not check: {res}", file=sys.stderr)
        return 1
    psi, sigma = dry_of(d, _supply(args))
    bad = check_two_occurrence(psi)
    mini = dry_minimality(psi)
    obj = {
        "derivation": derivation_to_json(psi),
        "sigma": {str(k): type_to_json(v) for k, v in sigma.items()},
        "two_occurrence": bad is None,
        "minimality": {"size": mini.size, "judgment_size": mini.judgment_size, "equal": mini.equal},
        "check": check_dry(psi).ok,
    }
    text = (show_derivation(psi) + f"\nsigma = {sigma!r}\n"
            f"two-occurrence: {'ok' if bad is None else bad}  minimality: {tuple(mini)}")
    _emit(obj, args.format, text)
    return 0 if obj["check"] and bad is None else 1


def cmd_onetype(args):
    d = _load_derivation(args.infile)
    target = parse_type(args.target) if args.target else None
    psi = one_type_representation(d, target)
    res = check(psi)
    obj = {"derivation": derivation_to_json(psi), "ok": res.ok, "size": deriv_size(psi),
           "context_size": context_size(psi.ctx), "type_size": type_size(psi.rhs)}
    _emit(obj, args.format, show_derivation(psi) + f"\nsize={obj['size']} context_size="
          f"{obj['context_size']} type_size={obj['type_size']}")
    return 0 if res.ok else 1


def cmd_compose(args):
    if len(args.files) != 2:
        raise UsageError("compose needs two derivation JSON files")
    d = compose(_load_derivation(args.files[0]), _load_derivation(args.files[1]))
    obj = {"derivation": derivation_to_json(d), **_flags(d)}
    _emit(obj, args.format, show_derivation(d) + f"\nsize={deriv_size(d)}")
    return 0


def cmd_pair(args):
    if len(args.terms) != 2:
        raise UsageError("pair needs two terms")
    t, u = (parse(x) for x in args.terms)
    p = pair_from_application(t, u, args.fuel, args.strategy)
    if p is None:
        print(f"{show(t)} applied to {show(u)} does not {args.strategy}-normalize "
              f"within {args.fuel} steps", file=sys.stderr)
        return 1
    obj = {"subjects": [show(t), show(u)], "strategy": args.strategy,
           "pair": {"left": show_type(p.left), "right": show_type(p.right), "size": p.size}}
    if t.is_normal and u.is_normal:
        e = exact_pair(t, u, args.fuel, args.strategy)
        obj["exact"] = {"left": show_type(e.left), "right": show_type(e.right),
                        "witness": None if e.witness is None else
                        {str(k): show_type(v) for k, v in e.witness.items()},
                        **e.report.to_json()}
    text = "\n".join(f"{k}: {v}" for k, v in obj.items())
    _emit(obj, args.format, text)
    return 0 if "exact" not in obj or obj["exact"]["pass"] else 1


def cmd_verify(args):
    theorems = list(THEOREMS) if args.theorem == "all" else [args.theorem]
    ok = True
    for th in theorems:
        if th not in THEOREMS:
            raise UsageError(f"unknown theorem {th}; choose from {', '.join(THEOREMS)}")
        rep = verify_theorem(th, max_nodes=args.max_nodes, fuel=args.fuel,
                             fail_fast=args.fail_fast, jobs=args.jobs)
        ok &= rep.passed
        if args.format == "json":
            print(json.dumps(rep.to_json(), indent=2, ensure_ascii=False))
        else:
            print(rep.table() if args.verbose else rep.table().splitlines()[0])
            for e in rep.failures[:5]:
                print(f"  counterexample: {' | '.join(e.subjects)}: {e.failure}")
    return 0 if ok else 1


def cmd_enumerate(args):
    terms = list(enumerate_terms(args.max_nodes, closed_only=not args.open))
    if args.normal:
        terms = [t for t in terms if t.is_normal]
    _emit([show(t) for t in terms], args.format, "\n".join(show(t) for t in terms))
    return 0


def cmd_golden(args):
    rep = golden_examples()
    _emit(rep.to_json(), args.format, rep.table())
    return 0 if rep.passed else 1


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, default=1000)
    common.add_argument("--format", choices=("json", "table"), default="table")
    common.add_argument("--strategy", choices=(HEAD, LEFTMOST), default=LEFTMOST)
    common.add_argument("--seed-supply", type=int, default=0,
                        help="first serial of freshly generated type variables")
    common.add_argument("--in", dest="infile", metavar="FILE")

    p = argparse.ArgumentParser(prog="multitypes", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, helptext in (("parse", cmd_parse, "classify and measure a term"),
                               ("reduce", cmd_reduce, "reduce a term with a strategy"),
                               ("infer", cmd_infer, "synthesize a tight derivation")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("term", nargs="?")
        s.set_defaults(fn=fn)

    s = sub.add_parser("check", parents=[common], help="check a derivation JSON file")
    s.set_defaults(fn=cmd_check)
    s = sub.add_parser("dry", parents=[common], help="dry representation of a derivation")
    s.set_defaults(fn=cmd_dry)
    s = sub.add_parser("onetype", parents=[common], help="single-variable representation")
    s.add_argument("--target", help="target type for neutral subjects")
    s.set_defaults(fn=cmd_onetype)
    s = sub.add_parser("compose", parents=[common], help="join two closed derivations")
    s.add_argument("files", nargs="*")
    s.set_defaults(fn=cmd_compose)
    s = sub.add_parser("pair", parents=[common], help="composable pairs for an application")
    s.add_argument("terms", nargs="*")
    s.set_defaults(fn=cmd_pair)
    s = sub.add_parser("verify", parents=[common], help="run a theorem suite")
    s.add_argument("--theorem", required=True, help="theorem id or 'all'")
    s.add_argument("--max-nodes", type=int, default=None)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--fail-fast", action="store_true")
    s.add_argument("--verbose", action="store_true")
    s.set_defaults(fn=cmd_verify)
    s = sub.add_parser("enumerate", parents=[common], help="list small terms")
    s.add_argument("--max-nodes", type=int, default=5)
    s.add_argument("--normal", action="store_true")
    s.add_argument("--open", action="store_true", help="also list open terms")
    s.set_defaults(fn=cmd_enumerate)
    s = sub.add_parser("golden", parents=[common], help="replay the worked examples")
    s.set_defaults(fn=cmd_golden)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.fuel < 0:
        parser.error("--fuel must be non-negative")
    try:
        return args.fn(args)
    except (UsageError, ParseError, UnboundVariableError, TypeSyntaxError, OSError,
            json.JSONDecodeError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
