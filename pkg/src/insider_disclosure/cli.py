"""Command-line front end.

Subcommands ``solve``, ``figure``, ``simulate`` and ``compare``. Exit
codes: 0 success, 1 a statistical check failed, 2 usage or validation
error, 3 numeric failure inside a solver.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .errors import ModelError, NumericFailure, ValidationError
from .params import ModelParams, Regime, load_config, params_from_mapping, validate_regime
from .reporting import (COMPARE_COLUMNS, DEFAULT_K_GRID, FIGURE_COLUMNS, FIGURE_IDS,
                        SOLVE_COLUMNS, FigureSpec, compare_rows, figure_rows, run_simulation,
                        solve, solve_rows, to_csv, to_json)
from .simulator import SimulationConfig
from .two_period import compare_regimes

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"UsageError: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _model_flags(p: argparse.ArgumentParser, multi_K: bool = False) -> None:
    if multi_K:
        p.add_argument("--K", type=_float_list, help="belief parameter(s), comma separated")
    else:
        p.add_argument("--K", type=float, help="belief parameter in (0, 2)")
    p.add_argument("--N", type=int, help="number of auctions")
    p.add_argument("--p0", type=float, help="prior mean of the asset value")
    p.add_argument("--Sigma0", type=float, help="prior variance of the asset value")
    p.add_argument("--sigma-mu-sq", dest="sigma_mu_sq", type=float, help="noise-trade variance")
    p.add_argument("--regime", choices=[r.value for r in Regime], help="disclosure regime")
    p.add_argument("--config", type=Path, help="JSON file with K, p0, Sigma0, sigma_mu_sq, N, regime")


def _output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="emit JSON instead of CSV")
    p.add_argument("--out", type=Path, help="write to this file instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="insider-disclosure", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="equilibrium coefficients, one row per auction")
    _model_flags(p)
    _output_flags(p)

    p = sub.add_parser("figure", help="long-format figure data across a K grid")
    p.add_argument("--figure", default="all",
                   help=f"figure id or 'all'; one of {', '.join(FIGURE_IDS)}")
    p.add_argument("--K-grid", dest="K_grid", type=_float_list,
                   default=list(DEFAULT_K_GRID), help="comma-separated K values")
    p.add_argument("--N", type=int, default=20)
    p.add_argument("--p0", type=float, default=0.0)
    p.add_argument("--Sigma0", type=float, default=1.0)
    p.add_argument("--sigma-mu-sq", dest="sigma_mu_sq", type=float, default=1.0)
    p.add_argument("--out-dir", type=Path, help="write one <figure>.csv per figure into this directory")
    _output_flags(p)

    p = sub.add_parser("simulate", help="Monte Carlo validation report (JSON)")
    _model_flags(p)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    _output_flags(p)

    p = sub.add_parser("compare", help="two-auction regime comparison table")
    _model_flags(p, multi_K=True)
    _output_flags(p)
    return parser


def _resolve(args, K=None) -> tuple[ModelParams, Regime]:
    data = load_config(args.config) if args.config else {}
    for key in ("K", "N", "p0", "Sigma0", "sigma_mu_sq", "regime"):
        value = getattr(args, key, None)
        if key == "K" and K is not None:
            value = K
        if value is not None and not isinstance(value, list):
            data[key] = value
    return params_from_mapping(data)


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_solve(args) -> int:
    params, regime = _resolve(args)
    rows = solve_rows(solve(params, regime))
    if args.json:
        text = to_json({"params": vars_of(params), "regime": regime.value, "periods": rows})
    else:
        text = to_csv(rows, SOLVE_COLUMNS)
    _emit(text, args.out)
    return EXIT_OK


def vars_of(params: ModelParams) -> dict:
    return {"K": params.K, "p0": params.p0, "Sigma0": params.Sigma0,
            "sigma_mu_sq": params.sigma_mu_sq, "N": params.N}


def cmd_figure(args) -> int:
    ids = FIGURE_IDS if args.figure == "all" else tuple(args.figure.split(","))
    specs = [FigureSpec(fid, tuple(args.K_grid), args.N, args.p0, args.Sigma0, args.sigma_mu_sq)
             for fid in ids]
    tables = [(s.figure_id, figure_rows(s)) for s in specs]
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        for fid, rows in tables:
            ext = "json" if args.json else "csv"
            text = to_json(rows) if args.json else to_csv(rows, FIGURE_COLUMNS)
            _emit(text, args.out_dir / f"{fid}.{ext}")
        return EXIT_OK
    rows = [r for _, t in tables for r in t]
    _emit(to_json(rows) if args.json else to_csv(rows, FIGURE_COLUMNS), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    params, regime = _resolve(args)
    if args.paths < 1 or args.workers < 1:
        raise ValidationError("--paths and --workers must be positive")
    config = SimulationConfig(args.paths, args.seed, params, regime, workers=args.workers)
    report, _, _ = run_simulation(config)
    _emit(to_json(report), args.out)
    return EXIT_OK if report["all_passed"] else EXIT_CHECK


def cmd_compare(args) -> int:
    Ks = args.K if args.K is not None else [None]
    plist = []
    for K in Ks:
        params, _ = _resolve(args, K)
        plist.append(params)
    if any(p.N != 2 for p in plist):
        raise ValidationError(f"compare needs N=2: got N={plist[0].N}")
    rows = compare_rows(compare_regimes(plist))
    _emit(to_json(rows) if args.json else to_csv(rows, COMPARE_COLUMNS), args.out)
    return EXIT_OK


_COMMANDS = {"solve": cmd_solve, "figure": cmd_figure, "simulate": cmd_simulate,
             "compare": cmd_compare}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command") == "compare" and args.N is None and not args.config:
        args.N = 2
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        _report_error(exc, args)
        return EXIT_USAGE
    except NumericFailure as exc:
        _report_error(exc, args)
        return EXIT_NUMERIC


def _report_error(exc: ModelError, args) -> None:
    sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
    if getattr(args, "json", False):
        sys.stdout.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
