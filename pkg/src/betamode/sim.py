"""Simulation harness: the benchmark covariance, the five-method experiment
driver (PRIM raw, PRIM/fastPRIM on principal or pettiest components),
bias/variance summaries, and deterministic CSV/JSON report emission.

Replication r of a run with seed s draws from the RNG substream seeded by
SeedSequence((s, r)), so results are reproducible and independent of the
order in which replications execute.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .boxes import containment_mask
from .errors import DomainError, InvalidInputError
from .fastprim import (
    PETTIEST,
    PRINCIPAL,
    ComponentSelection,
    fastprim_cover,
    select_components,
)
from .mvn import sample_mvn
from .prim import CoveringReport, prim_cover
from .stats import Dataset, SymmetricMatrix, covariance_matrix, eigh, rotate, standardize

METHOD_PRIM = "prim"
METHOD_PRIM_PRINCIPAL = "prim-principal"
METHOD_PRIM_PETTIEST = "prim-pettiest"
METHOD_FASTPRIM_PRINCIPAL = "fastprim-principal"
METHOD_FASTPRIM_PETTIEST = "fastprim-pettiest"

ALL_METHODS = (
    METHOD_PRIM,
    METHOD_PRIM_PRINCIPAL,
    METHOD_PRIM_PETTIEST,
    METHOD_FASTPRIM_PRINCIPAL,
    METHOD_FASTPRIM_PETTIEST,
)

REPORT_SCHEMA = "betamode-report-v1"


def benchmark_covariance(p: int = 100) -> SymmetricMatrix:
    """The harness's benchmark covariance: a correlated pair of variance-1
    coordinates (cov 0.7), a correlated pair of variance-12 coordinates
    (cov 8) at the end, and independent variance-6 coordinates in between.
    """
    if p < 4:
        raise DomainError(f"benchmark covariance needs p >= 4, got {p}")
    sigma = np.zeros((p, p))
    np.fill_diagonal(sigma, 6.0)
    sigma[0, 0] = sigma[1, 1] = 1.0
    sigma[0, 1] = sigma[1, 0] = 0.7
    sigma[p - 2, p - 2] = sigma[p - 1, p - 1] = 12.0
    sigma[p - 2, p - 1] = sigma[p - 1, p - 2] = 8.0
    return SymmetricMatrix(sigma)


@dataclass(frozen=True)
class SimConfig:
    """Everything that pins down one experiment, including the RNG seed."""

    n: int = 300
    p: int = 100
    beta: float = 0.1
    alpha: float = 0.05
    p_prime: int = 2
    covering_steps: int = 10
    reps: int = 1
    seed: int = 1729
    methods: tuple[str, ...] = ALL_METHODS

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"n must be >= 2, got {self.n}")
        if not 1 <= self.p_prime <= self.p:
            raise DomainError(
                f"p_prime must lie in [1, p={self.p}], got {self.p_prime}"
            )
        if not 0.0 < self.beta < 1.0:
            raise DomainError(f"beta must lie in (0, 1), got {self.beta}")
        if not 0.0 < self.alpha < 0.5:
            raise DomainError(f"alpha must lie in (0, 0.5), got {self.alpha}")
        if self.covering_steps < 1:
            raise DomainError(f"covering steps must be >= 1, got {self.covering_steps}")
        if self.reps < 1:
            raise DomainError(f"reps must be >= 1, got {self.reps}")
        methods = tuple(self.methods)
        if not methods:
            raise DomainError("at least one method is required")
        for m in methods:
            if m not in ALL_METHODS:
                raise DomainError(
                    f"unknown method {m!r}; choose from {', '.join(ALL_METHODS)}"
                )
        if len(set(methods)) != len(methods):
            raise DomainError("methods must be unique")
        object.__setattr__(self, "methods", methods)


@dataclass(frozen=True)
class MethodRunResult:
    """One method on one replication: per-step box records, the center
    estimate (mean of the points in the first covered box, in the method's
    own working space), its distance to the origin, and the wall-clock
    runtime (kept out of serialized reports to preserve determinism).
    """

    method: str
    rep: int
    report: CoveringReport
    center_estimate: np.ndarray
    bias: float
    runtime_s: float


def _replication_seed(seed: int, rep: int) -> np.random.SeedSequence:
    return np.random.SeedSequence((seed, rep))


def _center_of_first_box(report: CoveringReport, working_values: np.ndarray,
                         center_dims: tuple[int, ...]) -> np.ndarray:
    box = report.entries[0].box
    mask = containment_mask(box, working_values)
    if not np.any(mask):
        raise InvalidInputError("first covered box is empty; cannot estimate a center")
    return working_values[mask][:, center_dims].mean(axis=0)


def _run_method(method: str, data: Dataset, rotated: Dataset | None,
                selections: dict[str, ComponentSelection], config: SimConfig,
                rep: int) -> MethodRunResult:
    t0 = time.perf_counter()
    if method == METHOD_PRIM:
        report = prim_cover(data, config.beta, config.alpha, config.covering_steps)
        center = _center_of_first_box(report, data.values, tuple(range(data.p)))
    elif method in (METHOD_PRIM_PRINCIPAL, METHOD_PRIM_PETTIEST):
        mode = PRINCIPAL if method == METHOD_PRIM_PRINCIPAL else PETTIEST
        projected = rotated.select(selections[mode].dims)
        report = prim_cover(projected, config.beta, config.alpha, config.covering_steps)
        center = _center_of_first_box(report, projected.values, tuple(range(projected.p)))
    else:
        mode = PRINCIPAL if method == METHOD_FASTPRIM_PRINCIPAL else PETTIEST
        selection = selections[mode]
        report = fastprim_cover(rotated, selection, config.beta, config.covering_steps)
        center = _center_of_first_box(report, rotated.values, selection.dims)
    runtime = time.perf_counter() - t0
    return MethodRunResult(
        method=method,
        rep=rep,
        report=report,
        center_estimate=center,
        bias=float(np.linalg.norm(center)),
        runtime_s=runtime,
    )


def _needs_reduction(methods) -> bool:
    return any(m != METHOD_PRIM for m in methods)


def run_experiment(config: SimConfig,
                   sigma: SymmetricMatrix | None = None) -> list[MethodRunResult]:
    """Run every configured method on every replication.

    Each replication draws a fresh dataset from N(0, sigma) (the benchmark
    covariance by default). The four reduced methods share one
    standardize -> eigendecompose -> rotate pipeline per replication and
    then work on the p' selected components.
    """
    if sigma is None:
        sigma = benchmark_covariance(config.p)
    if sigma.p != config.p:
        raise DomainError(f"sigma is {sigma.p}-dimensional but config.p={config.p}")
    results: list[MethodRunResult] = []
    for rep in range(config.reps):
        data = sample_mvn(config.n, sigma, _replication_seed(config.seed, rep))
        rotated = None
        selections: dict[str, ComponentSelection] = {}
        if _needs_reduction(config.methods):
            std = standardize(data)
            basis = eigh(covariance_matrix(std))
            rotated = rotate(std, basis)
            selections = {
                mode: select_components(basis, config.p_prime, mode)
                for mode in (PRINCIPAL, PETTIEST)
            }
        for method in config.methods:
            results.append(_run_method(method, data, rotated, selections, config, rep))
    return results


@dataclass(frozen=True)
class MethodSummary:
    """Across-replication spread and offset of a method's center estimates."""

    method: str
    variance: float  # mean squared distance of centers from their mean
    bias: float  # distance of the mean center from the origin


def summarize_bias_variance(results: list[MethodRunResult]) -> list[MethodSummary]:
    """Per method: variance and bias of the center estimates across reps."""
    by_method: dict[str, list[np.ndarray]] = {}
    order: list[str] = []
    for r in results:
        if r.method not in by_method:
            by_method[r.method] = []
            order.append(r.method)
        by_method[r.method].append(r.center_estimate)
    summaries = []
    for method in order:
        centers = np.asarray(by_method[method])
        if centers.shape[0] < 2:
            raise DomainError(
                f"bias/variance summary needs >= 2 replications, "
                f"method {method!r} has {centers.shape[0]}"
            )
        mean_center = centers.mean(axis=0)
        variance = float(np.mean(np.sum((centers - mean_center) ** 2, axis=1)))
        summaries.append(
            MethodSummary(
                method=method,
                variance=variance,
                bias=float(np.linalg.norm(mean_center)),
            )
        )
    return summaries


def _fmt(x: float) -> str:
    # 17 significant digits: lossless decimal round trip for float64
    return format(float(x), ".17g")


def _method_order(results: list[MethodRunResult]) -> list[str]:
    order: list[str] = []
    for r in results:
        if r.method not in order:
            order.append(r.method)
    return order


def _mean_densities(results: list[MethodRunResult], method: str) -> list[float]:
    per_rep = [
        [e.density for e in r.report.entries] for r in results if r.method == method
    ]
    return [float(np.mean(col)) for col in zip(*per_rep)]


def emit_report(results: list[MethodRunResult], format: str = "json",
                config: SimConfig | None = None) -> bytes:
    """Serialize results: a methods-by-steps density matrix plus, when there
    are >= 2 replications, the per-method bias/variance table.

    Densities in the matrix are averaged across replications. Output is
    byte-deterministic for identical results (wall-clock runtimes are
    deliberately excluded).
    """
    if not results:
        raise DomainError("cannot emit a report for an empty result list")
    if format not in ("csv", "json"):
        raise DomainError(f"unknown report format {format!r} (use 'csv' or 'json')")
    methods = _method_order(results)
    steps = len(results[0].report.entries)
    reps = 1 + max(r.rep for r in results)
    summaries = summarize_bias_variance(results) if reps >= 2 else None

    if format == "csv":
        lines = ["# densities"]
        lines.append("method," + ",".join(f"step_{k}" for k in range(1, steps + 1)))
        for method in methods:
            row = _mean_densities(results, method)
            lines.append(method + "," + ",".join(_fmt(v) for v in row))
        if summaries is not None:
            lines.append("")
            lines.append("# bias_variance")
            lines.append("method,variance,bias")
            for s in summaries:
                lines.append(f"{s.method},{_fmt(s.variance)},{_fmt(s.bias)}")
        return ("\n".join(lines) + "\n").encode("ascii")

    doc: dict = {
        "schema": REPORT_SCHEMA,
        "config": None,
        "methods": [],
    }
    if config is not None:
        doc["config"] = {
            "n": config.n,
            "p": config.p,
            "beta": config.beta,
            "alpha": config.alpha,
            "p_prime": config.p_prime,
            "covering_steps": config.covering_steps,
            "reps": config.reps,
            "seed": config.seed,
            "methods": list(config.methods),
        }
    summary_by_method = {s.method: s for s in (summaries or [])}
    for method in methods:
        method_doc = {
            "method": method,
            "density_by_step_mean": _mean_densities(results, method),
            "replications": [],
            "summary": None,
        }
        if method in summary_by_method:
            s = summary_by_method[method]
            method_doc["summary"] = {"variance": s.variance, "bias": s.bias}
        for r in results:
            if r.method != method:
                continue
            method_doc["replications"].append(
                {
                    "rep": r.rep,
                    "center": [float(c) for c in r.center_estimate],
                    "bias": r.bias,
                    "steps": [
                        {
                            "step": k + 1,
                            "mass": e.mass,
                            "count": e.count,
                            "volume": e.volume,
                            "density": e.density,
                        }
                        for k, e in enumerate(r.report.entries)
                    ],
                    "beta_T": r.report.beta_T,
                }
            )
        doc["methods"].append(method_doc)
    return (json.dumps(doc, indent=2) + "\n").encode("ascii")


def parse_report_csv(payload: bytes):
    """Read back a CSV report; returns (densities, bias_variance) dicts.

    densities maps method -> list of per-step densities; bias_variance maps
    method -> (variance, bias) and is empty when the report had none.
    """
    densities: dict[str, list[float]] = {}
    bias_variance: dict[str, tuple[float, float]] = {}
    section = None
    for line in payload.decode("ascii").splitlines():
        if not line:
            continue
        if line.startswith("#"):
            section = line[1:].strip()
            continue
        cells = line.split(",")
        if cells[0] == "method":
            continue
        if section == "densities":
            densities[cells[0]] = [float(c) for c in cells[1:]]
        elif section == "bias_variance":
            bias_variance[cells[0]] = (float(cells[1]), float(cells[2]))
        else:
            raise InvalidInputError(f"unrecognized report line: {line!r}")
    if not densities:
        raise InvalidInputError("report has no density section")
    return densities, bias_variance


def audit_results(config: SimConfig, results: list[MethodRunResult],
                  sigma: SymmetricMatrix | None = None) -> None:
    """Recompute every reported density from its stored box and the
    regenerated replication data; raises if any entry disagrees.

    PRIM methods claim disjoint point sets across covering steps, so their
    recomputed counts subtract the points claimed by earlier boxes; nested
    covering recomputes shell counts and volumes directly.
    """
    if sigma is None:
        sigma = benchmark_covariance(config.p)
    for rep in range(config.reps):
        data = sample_mvn(config.n, sigma, _replication_seed(config.seed, rep))
        rotated = None
        selections: dict[str, ComponentSelection] = {}
        if _needs_reduction(config.methods):
            std = standardize(data)
            basis = eigh(covariance_matrix(std))
            rotated = rotate(std, basis)
            selections = {
                mode: select_components(basis, config.p_prime, mode)
                for mode in (PRINCIPAL, PETTIEST)
            }
        for result in results:
            if result.rep != rep:
                continue
            if result.method == METHOD_PRIM:
                working = data
            elif result.method in (METHOD_PRIM_PRINCIPAL, METHOD_PRIM_PETTIEST):
                mode = PRINCIPAL if result.method == METHOD_PRIM_PRINCIPAL else PETTIEST
                working = rotated.select(selections[mode].dims)
            else:
                working = rotated
            nested = result.method in (METHOD_FASTPRIM_PRINCIPAL, METHOD_FASTPRIM_PETTIEST)
            claimed = np.zeros(working.n, dtype=bool)
            prev_count = 0
            prev_volume = 0.0
            for k, entry in enumerate(result.report.entries):
                mask = containment_mask(entry.box, working.values)
                from .boxes import volume as box_volume

                vol = box_volume(entry.box)
                if nested:
                    count = int(np.count_nonzero(mask)) - prev_count
                    shell_vol = vol - prev_volume
                    prev_count += count
                    prev_volume = vol
                else:
                    count = int(np.count_nonzero(mask & ~claimed))
                    claimed |= mask
                    shell_vol = vol
                density = count / shell_vol if count > 0 else 0.0
                ok = (
                    count == entry.count
                    and np.isclose(entry.mass, count / config.n, rtol=0, atol=1e-12)
                    and np.isclose(entry.volume, shell_vol, rtol=1e-9, atol=0)
                    and np.isclose(entry.density, density, rtol=1e-9, atol=0)
                )
                if not ok:
                    raise InvalidInputError(
                        f"audit mismatch: method {result.method}, rep {rep}, "
                        f"step {k + 1}"
                    )
