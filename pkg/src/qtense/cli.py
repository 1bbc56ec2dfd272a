"""Command-line front end.

Exit codes: 0 success, 1 internal error, 2 parse/validation error,
3 CH violation (range violation in eval/sweep, residual above tol in
check-ch), 4 verify inconclusive, 5 verify failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from importlib import resources
from pathlib import Path

from . import logic, model as qmodel, verify
from .consistency import ch_certify
from .linalg import DEFAULT_TOL, LinalgError
from .valuation import CH_FAST, GENERAL, EvalOptions, RangeViolation, ValuationError, tau_disjunction

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_CH = 0, 1, 2, 3
BUNDLED = ("rabi.model", "commuting_d8.model", "dephasing_3q.model")


class InputError(Exception):
    pass


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("qtense") / "data" / name))


def load_model_arg(path: str):
    if path is None:
        raise InputError("--model is required")
    p = Path(path)
    if not p.exists() and p.name in BUNDLED and p.parent == Path("."):
        p = bundled_path(p.name)
    if not p.exists():
        raise InputError(f"model file not found: {path}")
    return qmodel.read_model(p)


def parse_grid(grid: str) -> list:
    """``start:stop:step`` with the stop included when it falls on the grid."""
    try:
        start, stop, step = (float(x) for x in grid.split(":"))
    except ValueError:
        raise InputError(f"malformed grid {grid!r}; expected start:stop:step") from None
    if not all(math.isfinite(x) for x in (start, stop, step)):
        raise InputError("grid values must be finite")
    if start <= 0:
        raise InputError("grid start must be > 0 (F requires t > 0)")
    if step <= 0 or stop < start:
        raise InputError("grid needs step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(n)]


def _opts(args, clamp=False) -> EvalOptions:
    mode = CH_FAST if args.mode == "ch-fast" else GENERAL
    return EvalOptions(mode=mode, tolerance=args.tol, clamp=clamp)


def _present(raw: float) -> float:
    return min(max(raw, 0.0), 1.0)


def _emit(args, fields: dict, text_lines: list, out) -> None:
    if args.output == "structured":
        out.write(json.dumps(fields, sort_keys=False) + "\n")
    elif args.output == "csv":
        scalar = {k: v for k, v in fields.items() if not isinstance(v, (list, dict))}
        w = csv.writer(out, lineterminator="\n")
        w.writerow(scalar.keys())
        w.writerow(scalar.values())
    else:
        out.write("\n".join(text_lines) + "\n")


def _parse_prop(args, text, template=False):
    if text is None:
        raise InputError("--template is required" if template else "--prop is required")
    p = logic.parse(text, template=template)
    if args.strict:
        logic.check_strict(p)
    return p


def cmd_eval(args, out) -> int:
    m = load_model_arg(args.model)
    p = _parse_prop(args, args.prop)
    nf = logic.normalize(p, m)
    opts = _opts(args)
    tv = tau_disjunction(m, nf, opts)
    ch = ch_certify(m, nf, args.tol)
    breakdown = [(str(h), tau_disjunction(m, logic.NormalForm((h,)), EvalOptions(opts.mode, opts.tolerance, check_range=False)).raw) for h in nf]
    fields = {
        "command": "eval",
        "prop": logic.to_text(p),
        "tau": _present(tv.raw),
        "raw": tv.raw,
        "mode": opts.mode,
        "imag_residual": tv.imag_residual,
        "ch_residual": ch.max_residual,
        "n_histories": len(nf),
        "product_initial_state": m.product_form,
        "histories": [h for h, _ in breakdown],
    }
    lines = [
        f"tau = {_present(tv.raw):.6f}",
        f"raw = {tv.raw!r}",
        f"mode = {opts.mode}",
        f"imag_residual = {tv.imag_residual:.3e}",
        f"ch_residual = {ch.max_residual:.3e}",
    ]
    if not m.product_form:
        lines.append("note: initial state is a superposition, not a product |eta_0>|env>")
    lines.append(f"histories ({len(nf)}):")
    lines += [f"  {h}  tau={t:.6f}" for h, t in breakdown]
    _emit(args, fields, lines, out)
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    m = load_model_arg(args.model)
    template = _parse_prop(args, args.template, template=True)
    if not logic.has_time_symbol(template):
        raise InputError("template must contain the free time symbol 't'")
    if args.grid is None:
        raise InputError("--grid is required")
    grid = parse_grid(args.grid)
    opts = _opts(args)
    rows = []
    for t in grid:
        p = logic.instantiate(template, t)
        nf = logic.normalize(p, m)
        tv = tau_disjunction(m, nf, opts)
        rows.append((t, tv.raw, tv.imag_residual, ch_certify(m, nf, args.tol).max_residual))
    if args.output == "structured":
        keys = ("t", "tau", "imag_residual", "ch_residual")
        out.write(json.dumps({"command": "sweep", "rows": [dict(zip(keys, r)) for r in rows]}) + "\n")
    elif args.output == "text":
        out.write(f"{'t':>12} {'tau':>12} {'imag_residual':>14} {'ch_residual':>12}\n")
        for r in rows:
            out.write(f"{r[0]:>12.6f} {r[1]:>12.6f} {r[2]:>14.3e} {r[3]:>12.3e}\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["t", "tau", "imag_residual", "ch_residual"])
        for r in rows:
            w.writerow([repr(x) for x in r])
    return EXIT_OK


def cmd_check_ch(args, out) -> int:
    m = load_model_arg(args.model)
    p = _parse_prop(args, args.prop)
    nf = logic.normalize(p, m)
    r = ch_certify(m, nf, args.tol)
    holds = r.max_residual <= args.tol
    fields = {
        "command": "check-ch",
        "prop": logic.to_text(p),
        "max_residual": r.max_residual,
        "holds": holds,
        "n_pairs_checked": r.n_pairs_checked,
        "skipped_trivial": r.skipped_trivial,
        "worst_history": str(r.worst_history) if r.worst_history else None,
        "worst_pair": [list(a) for a in r.worst_pair] if r.worst_pair else None,
    }
    lines = [
        f"max_residual = {r.max_residual:.3e}",
        f"CH {'holds' if holds else 'violated'} at tol {args.tol:g}",
        f"pairs checked = {r.n_pairs_checked}, skipped trivial = {r.skipped_trivial}",
    ]
    if r.worst_pair:
        lines.append(f"worst pair {r.worst_pair[0]} vs {r.worst_pair[1]} in {r.worst_history}")
    _emit(args, fields, lines, out)
    return EXIT_OK if holds else EXIT_CH


def cmd_verify(args, out) -> int:
    if args.cases < 1:
        raise InputError("--cases must be at least 1")
    reports = verify.run_suite(args.family, args.cases, args.seed, args.tol, ch_filter=not args.no_ch_filter)
    code = verify.suite_exit_code(reports)
    if args.output == "structured":
        out.write(json.dumps({
            "command": "verify", "family": args.family, "cases": args.cases, "seed": args.seed,
            "exit_code": code,
            "theorems": [
                {"id": r.theorem_id, "status": r.status, "n_cases": r.n_cases, "n_filtered": r.n_filtered,
                 "max_violation": r.max_violation, "tolerance": r.tolerance,
                 "worst_seed": r.worst_case[0] if r.worst_case else None}
                for r in reports
            ],
        }) + "\n")
    elif args.output == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["theorem", "status", "n_cases", "n_filtered", "max_violation"])
        for r in reports:
            w.writerow([r.theorem_id, r.status, r.n_cases, r.n_filtered, repr(r.max_violation)])
    else:
        out.write(f"family={args.family} cases={args.cases} seed={args.seed}\n")
        out.write(verify.format_report(reports) + "\n")
    return code


def cmd_gen_model(args, out) -> int:
    fam = args.family
    if fam == "commuting":
        m = qmodel.generate_commuting_model(args.dim, args.events, args.seed)
    elif fam == "dephasing":
        couplings = [float(x) for x in args.couplings.split(",")] if args.couplings else [0.05] * args.n_env
        m = qmodel.generate_dephasing_model(len(couplings), args.splitting, couplings, args.seed)
    elif fam == "rabi":
        m = qmodel.rabi_model()
    else:
        m = qmodel.generate_generic_model(args.dim, 1, args.events, args.seed)
    text = qmodel.save_model(m)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="model file (bundled names: " + ", ".join(BUNDLED) + ")")
    common.add_argument("--mode", choices=("general", "ch-fast"), default="general")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--strict", action="store_true", help="only single-tense propositions")
    common.add_argument("--output", choices=("text", "csv", "structured"), default=None)

    ap = argparse.ArgumentParser(prog="qtense", description="Probability-valued tensed logic on small quantum models.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("eval", parents=[common], help="truth value of a proposition")
    p.add_argument("--prop")
    p = sub.add_parser("sweep", parents=[common], help="truth value over a time grid")
    p.add_argument("--template")
    p.add_argument("--grid", help="start:stop:step")
    p = sub.add_parser("check-ch", parents=[common], help="consistent-histories residual")
    p.add_argument("--prop")
    p = sub.add_parser("verify", parents=[common], help="run the theorem suite")
    p.add_argument("--family", choices=verify.FAMILIES, default="commuting")
    p.add_argument("--cases", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-ch-filter", action="store_true", help="run CH-dependent checks on every case")
    p = sub.add_parser("gen-model", parents=[common], help="write a generated model file")
    p.add_argument("--family", choices=verify.FAMILIES, default="commuting")
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--events", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-env", type=int, default=2)
    p.add_argument("--splitting", type=float, default=1.0)
    p.add_argument("--couplings", help="comma-separated, one per environment qubit")
    p.add_argument("--out")
    return ap


COMMANDS = {
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "check-ch": cmd_check_ch,
    "verify": cmd_verify,
    "gen-model": cmd_gen_model,
}
DEFAULT_OUTPUT = {"sweep": "csv"}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # argparse reports usage errors (exit 2) and --help (exit 0) this way
        return e.code if isinstance(e.code, int) else EXIT_INPUT
    if args.output is None:
        args.output = DEFAULT_OUTPUT.get(args.command, "text")
    if not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args, out)
    except RangeViolation as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CH
    except (InputError, logic.LogicError, qmodel.ModelError, LinalgError, ValuationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as e:  # noqa: BLE001
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


def run(argv=None) -> tuple:
    """Run the CLI in-process; returns ``(exit_code, stdout_text)``."""
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
