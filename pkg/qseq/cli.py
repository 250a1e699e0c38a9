import argparse
import csv
import io
import json
import logging
import math
import sys
from typing import Any, Callable, Dict, List, Sequence

import numpy as np

from .chebyshev import ChebEval, ChebKind
from .contraction import (
    DEFAULT_MAX_ITER,
    DEFAULT_PROBLEM_PRESET,
    PROBLEM_PRESETS,
    SOLVE_METHODS,
    ContractionProblem,
    branch_enumeration_fixed_point,
    resolve_problem_config,
    solve_fixed_point,
)
from .errors import ConvergenceError, DomainError, NotContractionError, PreconditionError
from .means import MeanSpec, c_constant, is_sharp_witness, mean_of_chord_ratios, sharpness_witness
from .sequences import (
    AffineRep,
    WindowSequence,
    affine_coeffs,
    affine_envelope,
    chord_ratios,
    classify,
    make_affine,
    materialize_envelope,
    pointwise_min,
    support_chord,
)
from .verify import DEFAULT_SEED, list_available_checks, run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_DOMAIN = 2
EXIT_NO_CONVERGENCE = 3


def format_number(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return "%.17g" % value
    return str(value)


def flatten(payload: Any, prefix: str = "") -> List[Dict[str, Any]]:
    """Turn a JSON document into (field, value) rows with dotted paths."""
    if isinstance(payload, dict):
        rows: List[Dict[str, Any]] = []
        for key, value in payload.items():
            rows.extend(flatten(value, f"{prefix}.{key}" if prefix else str(key)))
        return rows
    if isinstance(payload, list):
        rows = []
        for index, value in enumerate(payload):
            rows.extend(flatten(value, f"{prefix}.{index}" if prefix else str(index)))
        return rows
    return [{"field": prefix, "value": payload}]


def write_csv(out, rows: List[Dict[str, Any]], fieldnames: Sequence[str] | None = None):
    keys = {k for row in rows for k in row.keys()}
    if fieldnames is None:
        field_list = sorted(keys)
    else:
        field_list = list(fieldnames)
    w = csv.DictWriter(out, fieldnames=field_list, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({name: format_number(row.get(name, "")) for name in field_list})


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def _jsonable(value: Any) -> Any:
    # JSON has no infinities; mirror the "inf"/"-inf" spelling used for mean exponents.
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return _jsonable(value.item())
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def render(payload: Dict[str, Any], fmt: str) -> str:
    """Format the whole payload up front so a bad value never leaves half a document behind."""
    if fmt == "csv":
        buffer = io.StringIO()
        rows = payload.get("rows") if isinstance(payload.get("rows"), list) else None
        if rows is not None and all(isinstance(r, dict) for r in rows):
            write_csv(buffer, rows, fieldnames=list(rows[0]) if rows else ["name"])
        else:
            write_csv(buffer, flatten(payload), fieldnames=["field", "value"])
        return buffer.getvalue()
    return json.dumps(_jsonable(payload), indent=2, default=_json_default, allow_nan=False) + "\n"


def emit(payload: Dict[str, Any], fmt: str, out) -> None:
    out.write(render(payload, fmt))


def parse_floats(text: str) -> List[float]:
    """Parse a comma separated list such as ``"0,1,2.5,1,0"``."""
    items = [x.strip() for x in text.split(",") if x.strip()]
    if not items:
        raise DomainError("expected a comma separated list of numbers")
    try:
        return [float(x) for x in items]
    except ValueError as exc:
        raise DomainError(f"not a number list: {text!r}") from exc


def load_sequence(args: argparse.Namespace) -> WindowSequence:
    """Read the sequence from ``--seq`` (inline) or ``--file`` (JSON, ``-`` for stdin)."""
    if args.seq:
        return WindowSequence.from_values(parse_floats(args.seq), args.start)
    if args.file:
        if args.file == "-":
            raw = sys.stdin.read()
        else:
            with open(args.file, encoding="utf-8") as f:
                raw = f.read()
        data = json.loads(raw)
        if isinstance(data, list):
            return WindowSequence.from_values(data, args.start)
        return WindowSequence.from_dict(data)
    raise DomainError("give a sequence with --seq or --file")


def cmd_cheb(args: argparse.Namespace) -> Dict[str, Any]:
    return ChebEval(ChebKind.parse(args.kind), args.order, args.x).to_dict()


def cmd_classify(args: argparse.Namespace) -> Dict[str, Any]:
    p = load_sequence(args)
    result = classify(p, args.q).to_dict()
    result["ratios"] = chord_ratios(p).tolist() if np.all(p.interior > 0.0) else None
    return result


def cmd_affine(args: argparse.Namespace) -> Dict[str, Any]:
    if args.seq or args.file:
        return affine_coeffs(load_sequence(args), args.q).to_dict()
    if args.a is None or args.b is None or args.end is None:
        raise DomainError("affine needs --a, --b and --end, or a sequence to decompose")
    rep = AffineRep(a=args.a, b=args.b, q=args.q, start=args.start)
    return make_affine(rep, args.end).to_dict()


def cmd_support(args: argparse.Namespace) -> Dict[str, Any]:
    p = load_sequence(args)
    chord = support_chord(p, args.q, args.j, args.k)
    result = chord.to_dict()
    result.update({"q": args.q, "j": args.j, "k": args.k})
    return result


def cmd_envelope(args: argparse.Namespace) -> Dict[str, Any]:
    p = load_sequence(args)
    q = args.q if args.q is not None else float(chord_ratios(p).max())
    reps = affine_envelope(p, q)
    members = materialize_envelope(reps, p.start, p.end)
    error = float(np.max(np.abs(pointwise_min(members).values - p.values)))
    return {
        "q": q,
        "members": [dict(rep.to_dict(), values=m.values.tolist()) for rep, m in zip(reps, members)],
        "reconstruction_error": error,
    }


def cmd_bounds(args: argparse.Namespace) -> Dict[str, Any]:
    spec = MeanSpec.parse(args.r)
    result: Dict[str, Any] = {"mean": spec.label, "r": spec.serialize(), "n": args.n, "m": args.m}
    result.update(c_constant(spec, args.n, args.m).to_dict())
    if args.witness is not None:
        witness = sharpness_witness(spec, args.n, args.m, args.witness)
        result["witness"] = witness.to_dict()
        result["achieved"] = mean_of_chord_ratios(spec, witness)
        result["sharp"] = is_sharp_witness(spec, args.n, args.m)
    return result


def _problem_from_args(args: argparse.Namespace) -> ContractionProblem:
    if args.gamma:
        config: Dict[str, Any] = {"gamma": parse_floats(args.gamma)}
        if args.n is not None:
            config["n"] = args.n
        config["weights"] = "default" if args.weights in (None, "", "default") else parse_floats(args.weights)
    else:
        config = resolve_problem_config(args.problem or DEFAULT_PROBLEM_PRESET)
        if args.weights:
            config["weights"] = "default" if args.weights == "default" else parse_floats(args.weights)
    return ContractionProblem.from_config(config)


def cmd_fixpoint(args: argparse.Namespace) -> Dict[str, Any]:
    prob = _problem_from_args(args)
    result = solve_fixed_point(prob, tol=args.tol, max_iter=args.max_iter, method=args.method).to_dict()
    result["method"] = args.method
    if args.oracle:
        oracle = branch_enumeration_fixed_point(prob)
        result["oracle"] = oracle.tolist()
        result["oracle_gap"] = float(np.max(np.abs(np.asarray(result["point"]) - oracle)))
    return result


def cmd_verify(args: argparse.Namespace) -> Dict[str, Any]:
    if args.list:
        return {"rows": list_available_checks()}
    only_list = [x for x in args.only.split(",") if x.strip()] if args.only else []
    exclude_list = [x for x in args.exclude.split(",") if x.strip()] if args.exclude else []
    return run_verification(seed=args.seed, only=only_list, exclude=exclude_list, parallel=args.parallel)


def _sequence_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seq", type=str, default="", help="Comma separated values p_n..p_m")
    parser.add_argument("--file", type=str, default="", help="JSON file with {start, values} or a list; - for stdin")
    parser.add_argument("--start", type=int, default=0, help="Window offset n for inline values")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", type=str, default="json", choices=["json", "csv"], help="Output format")
    common.add_argument("-v", "--verbose", action="count", default=0, help="More diagnostics on stderr (repeatable)")
    common.add_argument("-q", "--quiet", action="store_true", help="Only errors on stderr")

    parser = argparse.ArgumentParser(
        prog="qseq",
        description="q-convex sequences, Chebyshev identities, power-mean constants and a certified fixed-point solver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cheb", parents=[common], help="Evaluate T_k(x) or U_k(x)")
    p.add_argument("--kind", type=str, default="T", help="T or U")
    p.add_argument("--order", type=int, required=True, help="Integer order, negative allowed")
    p.add_argument("--x", type=float, required=True, help="Argument")
    p.set_defaults(handler=cmd_cheb)

    p = sub.add_parser("classify", parents=[common], help="Classify a sequence as q-convex/concave/affine")
    _sequence_options(p)
    p.add_argument("--q", type=float, required=True)
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("affine", parents=[common], help="Build a q-affine window or recover its coefficients")
    _sequence_options(p)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--end", type=int, default=None, help="Last index m of the window")
    p.set_defaults(handler=cmd_affine)

    p = sub.add_parser("support", parents=[common], help="Support chord through (j, p_j) and (k, p_k)")
    _sequence_options(p)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(handler=cmd_support)

    p = sub.add_parser("envelope", parents=[common], help="q-affine envelope of a positive sequence")
    _sequence_options(p)
    p.add_argument("--q", type=float, default=None, help="Defaults to the largest chord ratio")
    p.set_defaults(handler=cmd_envelope)

    p = sub.add_parser("bounds", parents=[common], help="Minimax constant of a power mean of chord ratios")
    p.add_argument("--r", type=str, required=True, help="Exponent: real, inf, -inf, max, min, A or G")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--witness", type=float, default=None, metavar="EPS", help="Also build the sharpness witness")
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("fixpoint", parents=[common], help="Certified fixed point of the min-of-averages operator")
    p.add_argument("--n", type=int, default=None, help="Dimension (inferred from --gamma when omitted)")
    p.add_argument("--gamma", type=str, default="", help="Comma separated gamma_1..gamma_floor((n+1)/2)")
    p.add_argument("--weights", type=str, default="", help="default or comma separated positive weights")
    p.add_argument(
        "--problem",
        type=str,
        default="",
        help=(
            "JSON string, file path or preset name for the whole problem "
            f"(presets: {', '.join(sorted(PROBLEM_PRESETS))}; see problems/*.json)"
        ),
    )
    p.add_argument("--tol", type=float, default=None, help="Certified distance to the fixed point (default QSEQ_TOL or 1e-9)")
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument(
        "--method",
        choices=SOLVE_METHODS,
        default="iterate",
        help="iterate: plain x <- T(x); policy: solve the active linear piece (iterations count solves)",
    )
    p.add_argument("--oracle", action="store_true", help="Cross-check with branch enumeration (n <= 6)")
    p.set_defaults(handler=cmd_fixpoint)

    p = sub.add_parser("verify", parents=[common], help="Run the identity and property sweeps")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
    p.add_argument("--only", type=str, default="", help="Comma separated check names to include")
    p.add_argument("--exclude", type=str, default="", help="Comma separated check names to exclude")
    p.add_argument("--parallel", action="store_true", help="Run checks on a thread pool")
    p.add_argument("--list", action="store_true", help="List check names and exit")
    p.set_defaults(handler=cmd_verify)

    return parser


def configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)


def _fail(code: int, message: str, payload: Dict[str, Any] | None, fmt: str, out) -> int:
    print(f"error: {message}", file=sys.stderr)
    if payload is not None:
        emit(payload, fmt, out)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    configure_logging(args.verbose, args.quiet)
    out = sys.stdout
    handler: Callable[[argparse.Namespace], Dict[str, Any]] = args.handler
    try:
        payload = handler(args)
        text = render(payload, args.format)
    except NotContractionError as exc:
        return _fail(EXIT_DOMAIN, str(exc), {"error": str(exc), "certificate": exc.certificate.to_dict()}, args.format, out)
    except ConvergenceError as exc:
        return _fail(EXIT_NO_CONVERGENCE, str(exc), exc.to_dict(), args.format, out)
    except (DomainError, PreconditionError, ValueError, TypeError, KeyError, OverflowError, OSError) as exc:
        return _fail(EXIT_DOMAIN, str(exc), None, args.format, out)

    out.write(text)
    if args.command == "verify" and "summary" in payload and not payload["summary"]["all_passed"]:
        failed = [row["name"] for row in payload["rows"] if not row["passed"]]
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
