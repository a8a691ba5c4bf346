"""Command-line interface.

Subcommands: ``simulate`` (the five-method experiment on the benchmark
covariance), ``analyze`` (one method on a CSV dataset), ``theorem-check``
(analytic + Monte Carlo verification that the smallest-variance component
subset yields the minimal-volume box), and ``version``.

Exit codes: 0 success, 1 failed check, 2 usage error, 3 data error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    BetamodeError,
    DomainError,
    InvalidInputError,
    NumericalError,
)
from .fastprim import PETTIEST, PRINCIPAL, pettiest_optimality_check, select_components
from .prim import prim_cover
from .sim import (
    ALL_METHODS,
    METHOD_PRIM,
    METHOD_PRIM_PETTIEST,
    METHOD_PRIM_PRINCIPAL,
    SimConfig,
    benchmark_covariance,
    emit_report,
    run_experiment,
)
from .stats import Dataset, covariance_matrix, eigh, rotate, standardize
from .svgplot import emit_boxes_svg, project_report

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="betamode",
        description="PRIM / fastPRIM minimal-volume box detection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the five-method benchmark experiment")
    sim.add_argument("--n", type=int, default=300)
    sim.add_argument("--p", type=int, default=100)
    sim.add_argument("--beta", type=float, default=0.1)
    sim.add_argument("--alpha", type=float, default=0.05)
    sim.add_argument("--p-prime", type=int, default=2)
    sim.add_argument("--steps", type=int, default=10)
    sim.add_argument("--reps", type=int, default=1)
    sim.add_argument("--seed", type=int, default=1729)
    sim.add_argument(
        "--methods",
        default=",".join(ALL_METHODS),
        help="comma-separated subset of: " + ", ".join(ALL_METHODS),
    )
    sim.add_argument("--out", default="-", help="output path, or - for stdout")
    sim.add_argument("--format", choices=("csv", "json"), default="json")
    sim.add_argument(
        "--svg-dir",
        default=None,
        help="directory for per-method nested-box SVGs of the first replication",
    )

    ana = sub.add_parser("analyze", help="run one method on a CSV dataset")
    ana.add_argument("--input", required=True, help="CSV with a header row")
    ana.add_argument("--beta", type=float, default=0.1)
    ana.add_argument("--alpha", type=float, default=0.05)
    ana.add_argument("--p-prime", type=int, default=2)
    ana.add_argument("--steps", type=int, default=10)
    ana.add_argument("--method", choices=ALL_METHODS, required=True)
    ana.add_argument("--out", default="-", help="output path, or - for stdout")

    thm = sub.add_parser(
        "theorem-check",
        help="verify minimal-volume optimality of the pettiest component subset",
    )
    thm.add_argument("--p", type=int, default=5)
    thm.add_argument("--p-prime", type=int, default=2)
    thm.add_argument("--beta", type=float, default=0.1)
    thm.add_argument("--seed", type=int, default=1729)
    thm.add_argument("--n-mc", type=int, default=100000)

    sub.add_parser("version", help="print the package version")
    return parser


def _parse_methods(raw: str) -> tuple[str, ...]:
    methods = tuple(m.strip() for m in raw.split(",") if m.strip())
    for m in methods:
        if m not in ALL_METHODS:
            raise DomainError(f"unknown method {m!r}; choose from {', '.join(ALL_METHODS)}")
    if not methods:
        raise DomainError("--methods must name at least one method")
    return methods


def _write_output(payload: bytes, out: str) -> None:
    if out == "-":
        sys.stdout.buffer.write(payload)
    else:
        Path(out).write_bytes(payload)


def _read_csv_dataset(path: str) -> Dataset:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise InvalidInputError(f"{path}: empty CSV") from None
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise InvalidInputError(
                        f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}"
                    )
                try:
                    rows.append([float(c) for c in row])
                except ValueError:
                    raise InvalidInputError(
                        f"{path}:{lineno}: non-numeric cell"
                    ) from None
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    if len(rows) < 2:
        raise InvalidInputError(f"{path}: need at least 2 data rows")
    return Dataset(np.asarray(rows), tuple(header))


def _cmd_simulate(args) -> int:
    config = SimConfig(
        n=args.n,
        p=args.p,
        beta=args.beta,
        alpha=args.alpha,
        p_prime=args.p_prime,
        covering_steps=args.steps,
        reps=args.reps,
        seed=args.seed,
        methods=_parse_methods(args.methods),
    )
    results = run_experiment(config)
    payload = emit_report(results, format=args.format, config=config)
    _write_output(payload, args.out)
    if args.svg_dir is not None:
        _write_svgs(config, results, args.svg_dir)
    return EXIT_OK


def _write_svgs(config: SimConfig, results, svg_dir: str) -> None:
    from .mvn import sample_mvn
    from .sim import _replication_seed  # deterministic rep-0 data

    out_dir = Path(svg_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sigma = benchmark_covariance(config.p)
    data = sample_mvn(config.n, sigma, _replication_seed(config.seed, 0))
    rotated = None
    if any(m != METHOD_PRIM for m in config.methods):
        std = standardize(data)
        basis = eigh(covariance_matrix(std))
        rotated = rotate(std, basis)
        selections = {
            mode: select_components(basis, config.p_prime, mode)
            for mode in (PRINCIPAL, PETTIEST)
        }
    for result in results:
        if result.rep != 0:
            continue
        method = result.method
        if method == METHOD_PRIM:
            if config.p < 2:
                continue
            plot_data = data.select((0, 1))
            report = project_report(result.report, (0, 1))
        else:
            if config.p_prime != 2:
                continue
            mode = PRINCIPAL if method.endswith(PRINCIPAL) else PETTIEST
            dims = selections[mode].dims
            plot_data = rotated.select(dims)
            report = project_report(result.report, dims)
        emit_boxes_svg(plot_data, report, out_dir / f"{method}.svg")


def _cmd_analyze(args) -> int:
    data = _read_csv_dataset(args.input)
    beta, alpha, steps = args.beta, args.alpha, args.steps
    method = args.method
    if method == METHOD_PRIM:
        working = data
        report = prim_cover(working, beta, alpha, steps)
    else:
        if not 1 <= args.p_prime <= data.p:
            raise DomainError(
                f"--p-prime must lie in [1, {data.p}] for this dataset"
            )
        std = standardize(data)
        basis = eigh(covariance_matrix(std))
        rotated = rotate(std, basis)
        mode = PRINCIPAL if method.endswith(PRINCIPAL) else PETTIEST
        selection = select_components(basis, args.p_prime, mode)
        if method in (METHOD_PRIM_PRINCIPAL, METHOD_PRIM_PETTIEST):
            working = rotated.select(selection.dims)
            report = prim_cover(working, beta, alpha, steps)
        else:
            from .fastprim import fastprim_cover

            report = fastprim_cover(rotated, selection, beta, steps)
    doc = {
        "schema": "betamode-analysis-v1",
        "method": method,
        "beta": beta,
        "alpha": alpha,
        "steps": steps,
        "beta_T": report.beta_T,
        "boxes": [
            {
                "step": k + 1,
                "mass": e.mass,
                "count": e.count,
                "volume": e.volume,
                "density": e.density,
                "dims": list(e.box.dims),
                "intervals": [[lo, hi] for lo, hi in e.box.intervals],
            }
            for k, e in enumerate(report.entries)
        ],
    }
    _write_output((json.dumps(doc, indent=2) + "\n").encode("ascii"), args.out)
    return EXIT_OK


def _cmd_theorem_check(args) -> int:
    sigma = benchmark_covariance(args.p)
    report = pettiest_optimality_check(
        sigma, args.beta, args.p_prime, args.n_mc, args.seed
    )
    print(f"eigenvalues: {[round(v, 6) for v in report.eigenvalues]}")
    print(f"pettiest subset (rotated dims): {list(report.pettiest_subset)}")
    print(
        f"analytic argmin {list(report.analytic_scan.argmin_subset)} "
        f"pettiest={report.analytic_argmin_is_pettiest} tie={report.analytic_tie}"
    )
    print(
        f"empirical argmin {list(report.empirical_argmin)} "
        f"pettiest={report.empirical_argmin_is_pettiest} tie={report.empirical_tie}"
    )
    print(
        f"max |box mass - beta| = {report.max_mass_error:.5f} "
        f"(within slack: {report.masses_within_slack})"
    )
    if report.passed:
        print("PASS: pettiest component subset attains the minimal box volume")
        return EXIT_OK
    print("FAIL: optimality check did not hold")
    return EXIT_CHECK_FAILED


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "theorem-check":
            return _cmd_theorem_check(args)
        if args.command == "version":
            print(f"betamode {__version__}")
            return EXIT_OK
        parser.error(f"unknown command {args.command!r}")
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DomainError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BetamodeError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
