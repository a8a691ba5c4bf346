"""fastPRIM: one-step centered quantile boxes in rotated space, principal
and pettiest component selection, nested-box covering on the closed-form
cumulative-mass schedule, and the exhaustive subset-volume scan that makes
the minimal-volume optimality of the smallest-variance subsets checkable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .boxes import Box, analytic_box_volume, containment_mask, volume
from .errors import DegenerateDataError, DomainError
from .mvn import sample_mvn
from .prim import BoxRecord, CoveringReport, empirical_quantile
from .stats import Dataset, EigenBasis, SymmetricMatrix, eigh

PRINCIPAL = "principal"
PETTIEST = "pettiest"

_SUBSET_SCAN_MAX_P = 20
_MC_CHECK_MAX_P = 8


@dataclass(frozen=True)
class ComponentSelection:
    """p' component indices picked by variance rank, with their variances."""

    mode: str  # PRINCIPAL or PETTIEST
    p_prime: int
    dims: tuple[int, ...]
    variances: tuple[float, ...]

    def __post_init__(self):
        if self.mode not in (PRINCIPAL, PETTIEST):
            raise DomainError(f"mode must be 'principal' or 'pettiest', got {self.mode!r}")
        if len(self.dims) != self.p_prime or len(self.variances) != self.p_prime:
            raise DomainError("dims and variances must both have length p_prime")


def select_components(basis: EigenBasis, p_prime: int, mode: str) -> ComponentSelection:
    """Pick the p' largest- (principal) or smallest-variance (pettiest)
    components. Ties are already deterministic because the basis carries a
    stable ascending eigenvalue order.
    """
    if mode not in (PRINCIPAL, PETTIEST):
        raise DomainError(f"mode must be 'principal' or 'pettiest', got {mode!r}")
    p = basis.p
    if not 1 <= p_prime <= p:
        raise DomainError(f"p_prime must lie in [1, {p}], got {p_prime}")
    if mode == PETTIEST:
        dims = tuple(range(p_prime))
    else:
        dims = tuple(range(p - 1, p - p_prime - 1, -1))  # descending variance
    variances = tuple(float(basis.eigenvalues[d]) for d in dims)
    return ComponentSelection(mode=mode, p_prime=p_prime, dims=dims, variances=variances)


def _selection_dims(selection) -> tuple[int, ...]:
    if isinstance(selection, ComponentSelection):
        return selection.dims
    return tuple(int(d) for d in selection)


def fastprim_box(
    rotated: Dataset,
    selection: ComponentSelection | Sequence[int],
    beta_target: float,
) -> Box:
    """The one-step fastPRIM box at symmetric marginal quantile levels.

    Per selected dimension the interval runs from the empirical quantile at
    (1 - beta_target**(1/p'))/2 to the one at (1 + beta_target**(1/p'))/2.
    No iteration: for centered elliptical data this single cut replaces the
    whole peeling loop.
    """
    if not 0.0 < beta_target < 1.0:
        raise DomainError(f"beta_target must lie in (0, 1), got {beta_target}")
    dims = _selection_dims(selection)
    if not dims:
        raise DomainError("selection picks no dimensions")
    if max(dims) >= rotated.p:
        raise DomainError(
            f"selection dims {dims} exceed the data's {rotated.p} columns"
        )
    marginal = beta_target ** (1.0 / len(dims))
    lo_level = 0.5 * (1.0 - marginal)
    hi_level = 0.5 * (1.0 + marginal)
    intervals = []
    for d in dims:
        col = rotated.values[:, d]
        lo = empirical_quantile(col, lo_level)
        hi = empirical_quantile(col, hi_level)
        if not lo < hi:
            raise DegenerateDataError(
                f"quantile levels collapse on column {rotated.column_ids[d]!r}"
            )
        intervals.append((lo, hi))
    return Box(dims, tuple(intervals))


def beta_schedule(beta: float, t: int) -> float:
    """Cumulative covered mass after t rounds of taking beta of what remains."""
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    return 1.0 - (1.0 - beta) ** t


def fastprim_cover(
    rotated: Dataset,
    selection: ComponentSelection | Sequence[int],
    beta: float,
    t: int,
) -> CoveringReport:
    """t nested fastPRIM boxes at the cumulative schedule beta_T(k).

    Box k sits at quantile levels for beta_schedule(beta, k); nothing is
    deleted between steps, so the boxes nest. Each record carries the shell
    added at step k: its mass (box k minus box k-1, as a fraction of n),
    point count, volume, and density = shell count / shell volume.
    """
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    n = rotated.n
    records: list[BoxRecord] = []
    prev_count = 0
    prev_volume = 0.0
    for step in range(1, t + 1):
        box = fastprim_box(rotated, selection, beta_schedule(beta, step))
        count = int(np.count_nonzero(containment_mask(box, rotated.values)))
        vol = volume(box)
        shell_count = count - prev_count
        shell_volume = vol - prev_volume
        density = shell_count / shell_volume if shell_count > 0 else 0.0
        records.append(
            BoxRecord(
                box=box,
                mass=shell_count / n,
                count=shell_count,
                volume=shell_volume,
                density=density,
            )
        )
        prev_count, prev_volume = count, vol
    return CoveringReport(
        entries=tuple(records),
        beta_T=float(sum(r.mass for r in records)),
    )


@dataclass(frozen=True)
class SubsetScanResult:
    """Analytic box volume for every p'-subset of dimensions."""

    entries: tuple[tuple[tuple[int, ...], float], ...]
    argmin_subset: tuple[int, ...]

    @property
    def is_tied(self) -> bool:
        best = min(v for _, v in self.entries)
        near = sum(1 for _, v in self.entries if v <= best * (1.0 + 1e-12))
        return near > 1


def subset_volume_scan(sigmas, beta: float, p_prime: int) -> SubsetScanResult:
    """Analytic centered-box volume for all C(p, p') dimension subsets.

    The minimizer must be the subset of the p' smallest sigmas: the
    half-width multiplier is shared across subsets at fixed beta and p', so
    volumes order by the product of the chosen sigmas.
    """
    sigmas = [float(s) for s in sigmas]
    p = len(sigmas)
    if p > _SUBSET_SCAN_MAX_P:
        raise DomainError(f"subset scan capped at p <= {_SUBSET_SCAN_MAX_P}, got {p}")
    if not 1 <= p_prime <= p:
        raise DomainError(f"p_prime must lie in [1, {p}], got {p_prime}")
    entries = []
    best_subset = None
    best_volume = math.inf
    for subset in itertools.combinations(range(p), p_prime):
        vol = analytic_box_volume([sigmas[i] for i in subset], beta)
        entries.append((subset, vol))
        if vol < best_volume:
            best_volume = vol
            best_subset = subset
    return SubsetScanResult(entries=tuple(entries), argmin_subset=best_subset)


@dataclass(frozen=True)
class OptimalityCheckReport:
    """Outcome of the analytic + Monte Carlo pettiest-subset optimality check."""

    eigenvalues: tuple[float, ...]
    sigmas: tuple[float, ...]
    pettiest_subset: tuple[int, ...]
    analytic_scan: SubsetScanResult
    analytic_argmin_is_pettiest: bool
    analytic_tie: bool
    empirical_entries: tuple[tuple[tuple[int, ...], float, float], ...]  # (subset, volume, mass)
    empirical_argmin: tuple[int, ...]
    empirical_argmin_is_pettiest: bool
    empirical_tie: bool
    max_mass_error: float
    masses_within_slack: bool

    @property
    def passed(self) -> bool:
        analytic_ok = self.analytic_argmin_is_pettiest or self.analytic_tie
        empirical_ok = self.empirical_argmin_is_pettiest or self.empirical_tie
        return analytic_ok and empirical_ok and self.masses_within_slack


def pettiest_optimality_check(
    sigma: SymmetricMatrix | np.ndarray,
    beta: float,
    p_prime: int,
    n_mc: int,
    seed,
    mass_tol: float = 0.01,
) -> OptimalityCheckReport:
    """Verify that the smallest-variance component subset gives the
    minimal-volume box of probability beta, analytically and empirically.

    Eigendecomposes the covariance, scans all p'-subsets with the analytic
    volume formula, then draws n_mc points, rotates them onto the
    eigenbasis, builds the empirical fastPRIM box on every subset, and
    compares box volumes and empirical masses.
    """
    if not isinstance(sigma, SymmetricMatrix):
        sigma = SymmetricMatrix(np.asarray(sigma, dtype=float))
    p = sigma.p
    if p > _MC_CHECK_MAX_P:
        raise DomainError(
            f"Monte Carlo cross-check capped at p <= {_MC_CHECK_MAX_P}, got {p}"
        )
    if not 1 <= p_prime <= p:
        raise DomainError(f"p_prime must lie in [1, {p}], got {p_prime}")
    if n_mc < 10:
        raise DomainError(f"n_mc must be >= 10, got {n_mc}")
    basis = eigh(sigma)
    min_eig = float(basis.eigenvalues[0])
    if min_eig < -1e-10:
        raise DomainError(
            f"covariance is not positive semidefinite (min eigenvalue {min_eig:.3e})"
        )
    eigenvalues = tuple(float(v) for v in basis.eigenvalues)
    sigmas = tuple(math.sqrt(max(v, 0.0)) for v in eigenvalues)
    # eigenvalues are ascending, so the pettiest subset is the first p' dims
    pettiest = tuple(range(p_prime))

    scan = subset_volume_scan(sigmas, beta, p_prime)
    analytic_ok = tuple(sorted(scan.argmin_subset)) == pettiest

    from .stats import rotate  # local import keeps module init light

    data = sample_mvn(n_mc, sigma, seed)
    rotated = rotate(data, basis)
    empirical = []
    best_subset = None
    best_volume = math.inf
    for subset, _ in scan.entries:
        box = fastprim_box(rotated, subset, beta)
        vol = volume(box)
        mask = containment_mask(box, rotated.values)
        mass = float(np.count_nonzero(mask)) / n_mc
        empirical.append((subset, vol, mass))
        if vol < best_volume:
            best_volume = vol
            best_subset = subset
    empirical_tie = (
        sum(1 for _, v, _ in empirical if v <= best_volume * (1.0 + 1e-9)) > 1
    )
    max_mass_error = max(abs(mass - beta) for _, _, mass in empirical)
    return OptimalityCheckReport(
        eigenvalues=eigenvalues,
        sigmas=sigmas,
        pettiest_subset=pettiest,
        analytic_scan=scan,
        analytic_argmin_is_pettiest=analytic_ok,
        analytic_tie=scan.is_tied,
        empirical_entries=tuple(empirical),
        empirical_argmin=best_subset,
        empirical_argmin_is_pettiest=tuple(sorted(best_subset)) == pettiest,
        empirical_tie=empirical_tie,
        max_mass_error=max_mass_error,
        masses_within_slack=max_mass_error <= mass_tol,
    )
