"""Classical PRIM for mode hunting: quantile-slab peeling down to a target
mass, then covering (peeling repeated on whatever data remains).

The peel criterion is post-removal empirical density, points per unit
volume, which is the natural target when hunting the densest region of the
input distribution itself. Candidate comparisons run on log densities so
that 100-dimensional volumes never overflow. Pasting is not implemented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boxes import Box, containment_mask, log_volume, volume
from .errors import (
    CannotPeelError,
    DomainError,
    InsufficientPointsError,
    InvalidInputError,
)
from .stats import Dataset

LOW = "low"
HIGH = "high"


@dataclass(frozen=True)
class PeelStep:
    """One peel: which slab was removed and what it left behind."""

    dim: int
    side: str  # LOW or HIGH
    cut: float
    removed_count: int
    density_after: float

    def __post_init__(self):
        if self.side not in (LOW, HIGH):
            raise InvalidInputError(f"side must be 'low' or 'high', got {self.side!r}")
        if self.removed_count < 0:
            raise InvalidInputError("removed_count must be nonnegative")


@dataclass(frozen=True)
class BoxTrajectory:
    """A full peeling run: the steps taken and the box it ended on."""

    steps: tuple[PeelStep, ...]
    final_box: Box
    final_mass: float
    final_volume: float
    beta: float
    alpha: float


@dataclass(frozen=True)
class BoxRecord:
    """Per-covering-step record: the box, its claimed mass (fraction of the
    original n), claimed point count, volume, and density = count/volume.

    For nested-box covering the mass/count/volume are those of the shell
    added at this step, while ``box`` is the full nested box.
    """

    box: Box
    mass: float
    count: int
    volume: float
    density: float


@dataclass(frozen=True)
class CoveringReport:
    """Ordered per-step records plus the total covered mass ``beta_T``."""

    entries: tuple[BoxRecord, ...]
    beta_T: float


def empirical_quantile(values, q: float) -> float:
    """Nearest-rank quantile: the ceil(q*m)-th smallest of m values."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise InvalidInputError("quantile of an empty sample")
    if not 0.0 < q < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {q}")
    m = values.size
    # tiny backoff so ranks that are integers up to float noise do not bump up
    rank = math.ceil(q * m - 1e-9)
    rank = min(max(rank, 1), m)
    return float(np.partition(values, rank - 1)[rank - 1])


def bounding_box(data: Dataset) -> Box:
    """Smallest box containing every row under half-open membership.

    Lower edges sit one ulp below the column minima so the minimum points
    are inside.
    """
    mins = data.values.min(axis=0)
    maxs = data.values.max(axis=0)
    intervals = []
    for lo, hi in zip(mins, maxs):
        lo_open = float(np.nextafter(lo, -np.inf))
        if not lo_open < hi:
            # constant column: give it one ulp of width both ways
            hi = float(np.nextafter(hi, np.inf))
        intervals.append((lo_open, float(hi)))
    return Box(tuple(range(data.p)), tuple(intervals))


@dataclass(frozen=True)
class _Candidate:
    dim: int
    side: str
    cut: float
    removed: int
    log_density: float
    new_lo: float
    new_hi: float


def _peel_candidates(values: np.ndarray, box: Box, alpha: float):
    """All admissible peel slabs for the points currently in the box.

    Yields candidates in the deterministic tie order: ascending dimension,
    low side before high side. Slabs that remove nothing or would collapse
    the interval are skipped.
    """
    mask = containment_mask(box, values)
    m = int(np.count_nonzero(mask))
    if m < 2:
        raise CannotPeelError(f"box holds {m} point(s); need at least 2 to peel")
    in_box = values[mask]
    base_log_vol = log_volume(box)
    for d_pos, d in enumerate(box.dims):
        col = in_box[:, d]
        lo, hi = box.intervals[d_pos]
        width_log = math.log(hi - lo)
        # low slab: remove {x <= cut}, box interval becomes (cut, hi]
        cut = empirical_quantile(col, alpha)
        removed = int(np.count_nonzero(col <= cut))
        if removed and cut < hi and m - removed >= 0:
            new_w = hi - cut
            if new_w > 0:
                log_vol = base_log_vol - width_log + math.log(new_w)
                log_den = (math.log(m - removed) - log_vol) if m > removed else -math.inf
                yield _Candidate(d, LOW, cut, removed, log_den, cut, hi)
        # high slab: remove {x > cut}, box interval becomes (lo, cut]
        cut = empirical_quantile(col, 1.0 - alpha)
        removed = int(np.count_nonzero(col > cut))
        if removed and cut > lo:
            new_w = cut - lo
            if new_w > 0:
                log_vol = base_log_vol - width_log + math.log(new_w)
                log_den = (math.log(m - removed) - log_vol) if m > removed else -math.inf
                yield _Candidate(d, HIGH, cut, removed, log_den, lo, cut)


def peel(data: Dataset, box: Box, alpha: float) -> tuple[Box, PeelStep]:
    """Remove the quantile slab that maximizes the post-removal density.

    Candidate slabs are {x_j <= q_alpha} and {x_j > q_(1-alpha)} per box
    dimension, with quantiles taken over the points currently inside the
    box. Ties go to the lowest dimension index, low side first.
    """
    if not 0.0 < alpha < 0.5:
        raise DomainError(f"alpha must lie in (0, 0.5), got {alpha}")
    best: _Candidate | None = None
    for cand in _peel_candidates(data.values, box, alpha):
        if best is None or cand.log_density > best.log_density:
            best = cand
    if best is None:
        raise CannotPeelError("no admissible peel (all candidate slabs degenerate)")
    new_box = box.replace_interval(best.dim, best.new_lo, best.new_hi)
    step = PeelStep(
        dim=best.dim,
        side=best.side,
        cut=best.cut,
        removed_count=best.removed,
        density_after=math.exp(best.log_density),
    )
    return new_box, step


def prim_peel_to_beta(data: Dataset, beta: float, alpha: float) -> BoxTrajectory:
    """Peel until the box mass (fraction of this dataset's n) drops to beta.

    Mass is measured against the full input n throughout, not the shrinking
    in-box count, so beta means unconditional coverage of this dataset.
    """
    if not 0.0 < beta <= 1.0:
        raise DomainError(f"beta must lie in (0, 1], got {beta}")
    if not 0.0 < alpha < 0.5:
        raise DomainError(f"alpha must lie in (0, 0.5), got {alpha}")
    n = data.n
    if n * beta < 1.0:
        raise InvalidInputError(
            f"target mass beta={beta} selects less than one of n={n} points"
        )
    box = bounding_box(data)
    count = n  # every row is inside the initial bounding box
    steps: list[PeelStep] = []
    while count / n > beta:
        box, step = peel(data, box, alpha)
        count -= step.removed_count
        steps.append(step)
    return BoxTrajectory(
        steps=tuple(steps),
        final_box=box,
        final_mass=count / n,
        final_volume=volume(box),
        beta=beta,
        alpha=alpha,
    )


def prim_cover(data: Dataset, beta: float, alpha: float, t: int) -> CoveringReport:
    """Run t covering rounds: peel to beta, delete the box's points, repeat.

    Each round peels the remaining points down to fraction beta of that
    round's input, so round k claims roughly beta*(1-beta)**(k-1) of the
    original mass and the cumulative covered mass follows 1 - (1-beta)**t.
    Recorded masses are fractions of the original n; density is claimed
    point count per unit box volume.
    """
    if t < 1:
        raise DomainError(f"covering steps must be >= 1, got {t}")
    n = data.n
    remaining = np.arange(n)
    records: list[BoxRecord] = []
    for round_index in range(1, t + 1):
        m = remaining.size
        if m < 2 or m * beta < 1.0:
            raise InsufficientPointsError(round_index, int(m))
        subset = Dataset(data.values[remaining], data.column_ids)
        trajectory = prim_peel_to_beta(subset, beta, alpha)
        in_box = containment_mask(trajectory.final_box, subset.values)
        count = int(np.count_nonzero(in_box))
        vol = trajectory.final_volume
        records.append(
            BoxRecord(
                box=trajectory.final_box,
                mass=count / n,
                count=count,
                volume=vol,
                density=count / vol,
            )
        )
        remaining = remaining[~in_box]
    return CoveringReport(
        entries=tuple(records),
        beta_T=float(sum(r.mass for r in records)),
    )
