"""Command-line front end: ``lmcapart {dist,prove,check,explain,to-proof,eval}``.

Exit codes: 0 success, 1 semantic rejection (invalid proof), 2 malformed
input, 3 unknown entity (state, generator, file).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .errors import InvalidProof, LmcApartError, ParseError, UnknownGenerator, UnknownState, ValidationError
from .kantorovich import DistanceTable, distance, distance_until
from .logic import (
    Evaluator,
    formula_from_json,
    formula_to_json,
    parse_formula,
    render_formula,
    simplify,
)
from .model import FiniteLmc, builtin_lmc, format_rational, load_lmc, parse_rational
from .proofs import ProofDag, check_proof, pretty, synthesize_proof
from .translate import formula_to_proof, proof_to_formula

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_MALFORMED = 2
EXIT_UNKNOWN = 3


class UsageError(Exception):
    """Bad flag combination; reported like an argparse error (exit 2)."""


def _bundled_fixture(name: str) -> bytes | None:
    stem = name[:-5] if name.endswith(".json") else name
    if "/" in stem or "\\" in stem:
        return None
    res = resources.files("lmcapart") / "fixtures" / f"{stem}.json"
    return res.read_bytes() if res.is_file() else None


def load_config_lmc(args):
    if args.lmc and args.builtin:
        raise UsageError("give either --lmc or --builtin, not both")
    if args.builtin:
        return builtin_lmc(args.builtin, _params(args.param))
    if args.param:
        raise UsageError("--param only applies to --builtin")
    if not args.lmc:
        raise UsageError("an LMC is required (--lmc PATH or --builtin NAME)")
    path = Path(args.lmc)
    if path.is_file():
        return load_lmc(path.read_bytes())
    data = _bundled_fixture(args.lmc)
    if data is None:
        raise FileNotFoundError(f"no such LMC file or bundled fixture: {args.lmc}")
    return load_lmc(data)


def _params(items):
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--param expects key=value, got {item!r}")
        out[key] = value
    return out


def _pair(lmc, args):
    if not args.pair:
        raise UsageError("--pair A,B is required")
    parts = args.pair.split(",")
    if len(parts) != 2:
        raise UsageError(f"--pair expects two comma-separated states, got {args.pair!r}")
    return tuple(lmc.require_state(lmc.parse_state(p.strip())) for p in parts)


def _depth(lmc, x, y, args, table):
    """Resolve --depth / --delta to a concrete depth."""
    if (args.depth is None) == (args.delta is None):
        raise UsageError("give exactly one of --depth N or --delta p/q")
    if args.depth is not None:
        if args.depth < 0:
            raise UsageError("--depth must be non-negative")
        return args.depth
    delta = parse_rational(args.delta)
    if delta <= 0:
        raise UsageError("--delta must be positive")
    _, depth = distance_until(lmc, x, y, delta, args.max_depth, table)
    return depth


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _read_input(source: str) -> bytes:
    if source == "-":
        return sys.stdin.buffer.read()
    return Path(source).read_bytes()


def _formula_arg(text: str):
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid formula JSON: {exc.msg}", exc.pos) from None
        return formula_from_json(data)
    return parse_formula(text)


# ------------------------------------------------------------------ commands


def cmd_dist(args) -> int:
    lmc = load_config_lmc(args)
    x, y = _pair(lmc, args)
    table = DistanceTable(lmc)
    depth = _depth(lmc, x, y, args, table)
    value = distance(lmc, x, y, depth, table)
    if args.json:
        _emit(args, _dump({"value": format_rational(value), "depth": depth}))
    elif args.delta is not None:
        _emit(args, f"{format_rational(value)} (depth {depth})\n")
    else:
        _emit(args, format_rational(value) + "\n")
    return EXIT_OK


def cmd_prove(args) -> int:
    lmc = load_config_lmc(args)
    x, y = _pair(lmc, args)
    table = DistanceTable(lmc)
    depth = _depth(lmc, x, y, args, table)
    dag = synthesize_proof(lmc, x, y, depth, table)
    if args.pretty:
        if args.out:
            Path(args.out).write_text(dag.dumps(), encoding="utf-8")
        sys.stdout.write(pretty(dag))
    else:
        _emit(args, dag.dumps())
    return EXIT_OK


def _load_proof(lmc, source):
    return ProofDag.loads(_read_input(source), lmc)


def cmd_check(args) -> int:
    lmc = load_config_lmc(args)
    dag = _load_proof(lmc, args.proof)
    report = check_proof(lmc, dag)
    if args.json:
        out = {"valid": report.valid, "root": str(report.root)}
        if not report.valid:
            out.update(path=report.location, node=report.node, rule=report.rule, condition=report.condition)
        _emit(args, _dump(out))
    else:
        _emit(args, str(report) + "\n")
    return EXIT_OK if report else EXIT_REJECTED


def cmd_explain(args) -> int:
    lmc = load_config_lmc(args)
    if args.proof:
        if args.depth is not None or args.delta is not None:
            raise UsageError("give a proof file or --depth/--delta, not both")
        proof = _load_proof(lmc, args.proof)
    else:
        x, y = _pair(lmc, args)
        table = DistanceTable(lmc)
        proof = synthesize_proof(lmc, x, y, _depth(lmc, x, y, args, table), table)
    root = proof.nodes[proof.root].judgement
    f = proof_to_formula(lmc, proof)
    if args.simplify:
        f = simplify(f)
    ev = Evaluator(lmc)
    values = {root.left: ev(f, root.left), root.right: ev(f, root.right)}
    # the construction guarantees these; a mismatch is a bug, not bad input
    assert values[root.left] == root.bound and values[root.right] == 0, values
    if args.json:
        _emit(args, _dump({
            "formula": formula_to_json(f),
            "text": render_formula(f),
            "bound": format_rational(root.bound),
            "interp": [[s, format_rational(v)] for s, v in values.items()],
        }))
    else:
        lines = [render_formula(f, compact=args.compact)]
        lines += [f"{s}: {format_rational(v)}" for s, v in values.items()]
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_to_proof(args) -> int:
    lmc = load_config_lmc(args)
    f = _formula_arg(args.formula)
    x, y = _pair(lmc, args)
    dag = ProofDag.from_tree(formula_to_proof(lmc, f, x, y))
    _emit(args, pretty(dag) if args.pretty else dag.dumps())
    return EXIT_OK


def cmd_eval(args) -> int:
    lmc = load_config_lmc(args)
    f = _formula_arg(args.formula)
    if args.states:
        states = [lmc.require_state(lmc.parse_state(s.strip())) for s in args.states.split(",")]
    elif args.pair:
        states = list(_pair(lmc, args))
    elif isinstance(lmc, FiniteLmc):
        states = lmc.states()
    else:
        raise UsageError("--states or --pair is required for generated LMCs")
    ev = Evaluator(lmc)
    values = [(s, format_rational(ev(f, s))) for s in states]
    if args.json:
        _emit(args, _dump({str(s): v for s, v in values}))
    else:
        _emit(args, "".join(f"{s}: {v}\n" for s, v in values))
    return EXIT_OK


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("input")
    src.add_argument("--lmc", metavar="PATH", help="LMC JSON file (or a bundled fixture name)")
    src.add_argument("--builtin", metavar="NAME", help="generated LMC, e.g. random-walk")
    src.add_argument("--param", metavar="K=V", action="append", default=[], help="generator parameter")
    src.add_argument("--pair", metavar="A,B", help="the two states to compare")
    src.add_argument("--depth", type=int, metavar="N", help="iteration depth")
    src.add_argument("--delta", metavar="P/Q", help="iterate until the increment drops below this")
    src.add_argument("--max-depth", type=int, default=64, metavar="N", help="cap for --delta (default 64)")
    out = common.add_argument_group("output")
    out.add_argument("--json", action="store_true", help="machine-readable output")
    out.add_argument("--simplify", action="store_true", help="simplify constructed formulas")
    out.add_argument("--out", metavar="PATH", help="write the result here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="lmcapart",
        description="Behavioural distance bounds for labelled Markov chains, with checkable proofs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("dist", parents=[common], help="distance iterate at a pair")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("prove", parents=[common], help="synthesize an apartness proof")
    p.add_argument("--pretty", action="store_true", help="print the proof as an indented tree")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("check", parents=[common], help="validate a proof file")
    p.add_argument("proof", metavar="PROOF", help="proof JSON file ('-' for stdin)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("explain", parents=[common], help="turn a proof into a distinguishing formula")
    p.add_argument("proof", nargs="?", metavar="PROOF", help="proof JSON file; omit to synthesize from --pair/--depth")
    p.add_argument("--compact", action="store_true", help="drop redundant parentheses")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("to-proof", parents=[common], help="turn a formula into a proof at a pair")
    p.add_argument("formula", metavar="FORMULA", help="formula text or formula JSON")
    p.add_argument("--pretty", action="store_true", help="print the proof as an indented tree")
    p.set_defaults(func=cmd_to_proof)

    p = sub.add_parser("eval", parents=[common], help="evaluate a formula")
    p.add_argument("formula", metavar="FORMULA", help="formula text or formula JSON")
    p.add_argument("--states", metavar="S,...", help="states to evaluate at (default: --pair, or all)")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        with contextlib.suppress(SystemExit):
            parser.error(str(exc))
        return EXIT_MALFORMED
    except InvalidProof as exc:
        print(f"error: {exc.report}", file=sys.stderr)
        return EXIT_REJECTED
    except (UnknownState, UnknownGenerator, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except (ParseError, ValidationError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except LmcApartError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
