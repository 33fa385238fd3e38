"""Command-line front end.

Subcommands: ``spectrum`` (eigenvalue table), ``schatten`` (partial sums
with certified tails and the convergence verdict), ``constant`` (sharp gain
constant, closed form vs numeric sup), ``green`` (apply the Green operator
to a spectral-function file), ``check`` (invariant suite).

Exit codes: 0 success (a Diverges verdict is a successful computation),
1 failed checks, 2 invalid flags or malformed input files, 3 budget or
probe exhaustion.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import __version__, check as checkmod
from .errors import (
    BudgetExceeded,
    FunctionFormatError,
    HeisenspecError,
    ProbeTooSmall,
    ValidationError,
)
from .green import (
    ConstantReport,
    function_from_jsonable,
    function_to_jsonable,
    green_apply,
    l2_norm,
    sharp_constant,
    sobolev_gain_check,
    sobolev_norm,
)
from .jsonio import dumps, fmt_float_plain
from .lattice import (
    DEFAULT_BUDGET,
    dual_lattice,
    entry_to_jsonable,
    lattice_from_jsonable,
    zn_lattice,
)
from .schatten import Converges, SchattenCutoffs, SchattenReport, schatten_partial
from .spectrum import (
    ManifoldParams,
    TypeAIndex,
    spectrum_stream,
)


class _CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _fail(message: str, code: int = 2):
    raise _CliError(message, code)


def _add_param_flags(sp):
    sp.add_argument("--params", help="JSON parameter file mirroring the manifold fields")
    sp.add_argument("--d", type=int, help="complex dimension d >= 1")
    sp.add_argument("--c", type=float, help="center period c > 0")
    sp.add_argument("--alpha", type=float, help="operator parameter, |alpha| <= d")
    sp.add_argument("--big-l", type=int, default=None, help="multiplicity constant L >= 1 (default 1)")
    sp.add_argument("--epsilon", type=float, default=None, help="metric parameter (default 1)")
    sp.add_argument(
        "--lattice",
        default=None,
        help="'zn' for Z^{2d}, a JSON file path, or inline JSON rows",
    )
    sp.add_argument(
        "--lattice-is-dual",
        action="store_true",
        help="treat the given lattice as the dual lattice (skip dualization)",
    )
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="enumeration point cap")


def _add_output_flags(sp, formats=("json", "csv"), default="json"):
    sp.add_argument("--format", choices=formats, default=default)
    sp.add_argument("--output", default=None, help="output path (default: stdout)")


def _load_params(args) -> ManifoldParams:
    doc = {}
    if args.params:
        try:
            with open(args.params) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            _fail(f"--params: cannot read parameter file: {exc}")
    d = args.d if args.d is not None else doc.get("d")
    c = args.c if args.c is not None else doc.get("c")
    alpha = args.alpha if args.alpha is not None else doc.get("alpha")
    big_l = args.big_l if args.big_l is not None else doc.get("big_l", 1)
    epsilon = args.epsilon if args.epsilon is not None else doc.get("epsilon", 1.0)
    if d is None:
        _fail("--d is required (directly or via --params)")
    if c is None:
        _fail("--c is required (directly or via --params)")
    if alpha is None:
        _fail("--alpha is required (directly or via --params)")
    if d < 1:
        _fail(f"--d must be a positive integer, got {d}")
    if not c > 0:
        _fail(f"--c must be positive, got {c}")
    if abs(alpha) > d:
        _fail(f"--alpha must satisfy |alpha| <= d, got alpha={alpha} with --d {d}")
    if big_l < 1:
        _fail(f"--big-l must be >= 1, got {big_l}")
    if not epsilon > 0:
        _fail(f"--epsilon must be positive, got {epsilon}")

    lat_spec = args.lattice if args.lattice is not None else doc.get("lattice", "zn")
    is_dual = bool(args.lattice_is_dual)
    if isinstance(lat_spec, dict):
        basis, file_dual = lattice_from_jsonable(lat_spec)
        is_dual = is_dual or file_dual
    elif lat_spec == "zn":
        basis = zn_lattice(2 * int(d))
        is_dual = True  # Z^{2d} is self-dual
    elif isinstance(lat_spec, str) and lat_spec.lstrip().startswith("["):
        try:
            rows = json.loads(lat_spec)
            basis, _ = lattice_from_jsonable({"rows": rows})
        except (json.JSONDecodeError, ValidationError) as exc:
            _fail(f"--lattice: bad inline rows: {exc}")
    else:
        try:
            with open(lat_spec) as fh:
                basis, file_dual = lattice_from_jsonable(json.load(fh))
            is_dual = is_dual or file_dual
        except (OSError, json.JSONDecodeError) as exc:
            _fail(f"--lattice: cannot read lattice file: {exc}")
        except ValidationError as exc:
            _fail(f"--lattice: {exc}")
    dual = basis if is_dual else dual_lattice(basis)
    try:
        return ManifoldParams(
            d=int(d), c=float(c), alpha=float(alpha), dual_lattice=dual,
            big_l=int(big_l), epsilon=float(epsilon),
        )
    except ValidationError as exc:
        _fail(str(exc))


def _write(args, text: str):
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _index_descriptor(idx) -> str:
    if isinstance(idx, TypeAIndex):
        return f"A:n={idx.n}:j={idx.j}"
    ns = idx.shell.norm_sq
    return f"B:normSq={entry_to_jsonable(ns)}"


def _mult_text(m) -> str:
    return "infinite" if m == math.inf else str(int(m))


# --- spectrum ---------------------------------------------------------------

SPECTRUM_COLUMNS = ["lambda", "mu", "multiplicity", "index", "kernel"]
COALESCED_COLUMNS = ["lambda", "multiplicity", "members", "coincidence"]


def cmd_spectrum(args) -> int:
    p = _load_params(args)
    if args.lambda_max is None or args.lambda_max < 0:
        _fail(f"--lambda-max must be a nonnegative number, got {args.lambda_max}")
    records = spectrum_stream(p, args.lambda_max, coalesce=args.coalesce, budget=args.budget)

    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if args.coalesce:
            w.writerow(COALESCED_COLUMNS)
            for line in records:
                w.writerow(
                    [
                        fmt_float_plain(line.lam),
                        _mult_text(line.multiplicity),
                        "|".join(_index_descriptor(r.index) for r in line.records),
                        str(line.coincidence).lower(),
                    ]
                )
        else:
            w.writerow(SPECTRUM_COLUMNS)
            for rec in records:
                w.writerow(
                    [
                        fmt_float_plain(rec.lam),
                        "" if rec.mu is None else fmt_float_plain(rec.mu),
                        _mult_text(rec.multiplicity),
                        _index_descriptor(rec.index),
                        str(rec.is_kernel).lower(),
                    ]
                )
        _write(args, buf.getvalue())
        return 0

    if args.coalesce:
        rows = [
            {
                "lambda": line.lam,
                "multiplicity": line.multiplicity,
                "members": [_index_descriptor(r.index) for r in line.records],
                "coincidence": line.coincidence,
            }
            for line in records
        ]
    else:
        rows = [
            {
                "lambda": rec.lam,
                "mu": rec.mu,
                "multiplicity": rec.multiplicity,
                "index": _index_descriptor(rec.index),
                "kernel": rec.is_kernel,
            }
            for rec in records
        ]
    _write(args, dumps({"command": "spectrum", "records": rows}) + "\n")
    return 0


# --- schatten ----------------------------------------------------------------


def _report_jsonable(rep: SchattenReport) -> dict:
    if isinstance(rep.verdict, Converges):
        verdict = {
            "kind": "Converges",
            "norm_upper_bound": rep.verdict.norm_upper_bound,
            "norm_lower_bound": rep.verdict.norm_lower_bound,
        }
    else:
        ev = rep.verdict.growth_witness
        verdict = {
            "kind": "Diverges",
            "growth_witness": {
                "n_values": list(ev.n_values),
                "witness_values": list(ev.witness_values),
                "exponent": ev.exponent,
                "slope_constant": ev.slope_constant,
            },
        }
    return {
        "command": "schatten",
        "r": rep.r,
        "partial_sum": rep.partial_sum,
        "tail_upper_bound": rep.tail_upper_bound,
        "lower_bound_at_cutoff": rep.lower_bound_at_cutoff,
        "verdict": verdict,
        "provenance": rep.provenance,
    }


def cmd_schatten(args) -> int:
    if args.r is None or args.r < 1:
        _fail(f"--r must be >= 1 (Schatten norms are defined for r >= 1), got {args.r}")
    p = _load_params(args)
    cutoffs = SchattenCutoffs(args.max_n, args.max_j, args.max_norm_sq)
    rep = schatten_partial(p, args.r, cutoffs, budget=args.budget)
    doc = _report_jsonable(rep)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["field", "value"])
        w.writerow(["r", fmt_float_plain(rep.r)])
        w.writerow(["partial_sum", fmt_float_plain(rep.partial_sum)])
        w.writerow(["tail_upper_bound", fmt_float_plain(rep.tail_upper_bound)])
        w.writerow(["lower_bound_at_cutoff", fmt_float_plain(rep.lower_bound_at_cutoff)])
        w.writerow(["verdict", doc["verdict"]["kind"]])
        if isinstance(rep.verdict, Converges):
            w.writerow(["norm_upper_bound", fmt_float_plain(rep.verdict.norm_upper_bound)])
            w.writerow(["norm_lower_bound", fmt_float_plain(rep.verdict.norm_lower_bound)])
        else:
            ev = rep.verdict.growth_witness
            for n, wv in zip(ev.n_values, ev.witness_values):
                w.writerow([f"witness[{n}]", fmt_float_plain(wv)])
        _write(args, buf.getvalue())
    else:
        _write(args, dumps(doc) + "\n")
    return 0


# --- constant ----------------------------------------------------------------


def _constant_jsonable(rep: ConstantReport) -> dict:
    return {
        "command": "constant",
        "closed_form": rep.closed_form,
        "numeric_sup": rep.numeric_sup,
        "argmax": _index_descriptor(rep.argmax),
        "candidates": [
            {"index": _index_descriptor(idx), "value": v} for idx, v in rep.candidates
        ],
    }


def cmd_constant(args) -> int:
    p = _load_params(args)
    if not args.lambda_max_probe > 0:
        _fail(f"--lambda-max-probe must be positive, got {args.lambda_max_probe}")
    rep = sharp_constant(p, args.lambda_max_probe, budget=args.budget)
    doc = _constant_jsonable(rep)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["field", "value"])
        w.writerow(["closed_form", fmt_float_plain(rep.closed_form)])
        w.writerow(["numeric_sup", fmt_float_plain(rep.numeric_sup)])
        w.writerow(["argmax", doc["argmax"]])
        for cand in doc["candidates"]:
            w.writerow([f"candidate[{cand['index']}]", fmt_float_plain(cand["value"])])
        _write(args, buf.getvalue())
    else:
        _write(args, dumps(doc) + "\n")
    return 0


# --- green -------------------------------------------------------------------


def cmd_green(args) -> int:
    p = _load_params(args)
    try:
        with open(args.function) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(f"--function: cannot read function file: {exc}")
    try:
        f = function_from_jsonable(doc, p)
    except FunctionFormatError as exc:
        _fail(f"--function: {exc}")
    result = green_apply(p, f)
    out = function_to_jsonable(result)
    out["command"] = "green"
    out["input_l2_norm"] = l2_norm(f)
    out["result_l2_norm"] = l2_norm(result)
    sob = []
    for s in args.s:
        gc = sobolev_gain_check(p, f, s)
        sob.append(
            {
                "s": s,
                "input_norm_s": sobolev_norm(p, f, s),
                "result_norm_s_plus_1": sobolev_norm(p, result, s + 1.0),
                "gain_lhs": gc.lhs,
                "gain_rhs": gc.rhs,
                "gain_holds": gc.holds,
            }
        )
    out["sobolev"] = sob
    _write(args, dumps(out) + "\n")
    return 0


# --- check -------------------------------------------------------------------


def cmd_check(args) -> int:
    results = checkmod.run_all(seed=args.seed, sabotage=args.sabotage)
    doc = checkmod.report_jsonable(args.seed, args.sabotage, results)
    if args.format == "json":
        _write(args, dumps(doc) + "\n")
    else:
        width = max(len(r.name) for r in results)
        lines = [f"seed={args.seed} sabotage={args.sabotage or 'none'}"]
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            suffix = f"  ({r.detail})" if r.detail else ""
            lines.append(f"{status}  {r.name:<{width}}{suffix}")
        lines.append("all passed" if doc["all_passed"] else "FAILURES present")
        _write(args, "\n".join(lines) + "\n")
    return 0 if doc["all_passed"] else 1


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="heisenspec",
        description="Spectra, Schatten sums and sharp Sobolev constants for "
        "Green operators on compact Heisenberg manifolds.",
    )
    ap.add_argument("--version", action="version", version=f"heisenspec {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="dump the eigenvalue table up to lambda-max")
    _add_param_flags(sp)
    _add_output_flags(sp)
    sp.add_argument("--lambda-max", type=float, required=True)
    sp.add_argument("--coalesce", action="store_true", help="merge equal eigenvalues")
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("schatten", help="Schatten partial sum with certified tail")
    _add_param_flags(sp)
    _add_output_flags(sp)
    sp.add_argument("--r", type=float, required=True, help="Schatten exponent, r >= 1")
    sp.add_argument("--max-n", type=int, default=100, help="|n| cutoff")
    sp.add_argument("--max-j", type=int, default=100, help="j cutoff")
    sp.add_argument("--max-norm-sq", type=float, default=100.0, help="shell cutoff")
    sp.set_defaults(func=cmd_schatten)

    sp = sub.add_parser("constant", help="sharp gain constant: closed form vs numeric sup")
    _add_param_flags(sp)
    _add_output_flags(sp)
    sp.add_argument("--lambda-max-probe", type=float, default=1000.0)
    sp.set_defaults(func=cmd_constant)

    sp = sub.add_parser("green", help="apply the Green operator to a function file")
    _add_param_flags(sp)
    _add_output_flags(sp, formats=("json",))
    sp.add_argument("--function", required=True, help="spectral-function JSON file")
    sp.add_argument("--s", type=float, nargs="*", default=[0.0], help="Sobolev orders to report")
    sp.set_defaults(func=cmd_green)

    sp = sub.add_parser("check", help="run the invariant suite")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--sabotage", choices=checkmod.SABOTAGE_MODES, default=None)
    _add_output_flags(sp, formats=("table", "json"), default="table")
    sp.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (BudgetExceeded, ProbeTooSmall) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HeisenspecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
