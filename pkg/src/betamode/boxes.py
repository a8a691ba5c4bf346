"""Axis-aligned box algebra: volumes, membership, empirical mass, the
analytic centered quantile box for independent normal marginals, and
active information.

Membership is half-open, (lower, upper]: a point sits inside when
``lower < x <= upper`` on every box dimension. Peeling and covering rely on
this so that a point on a shared cut boundary is claimed exactly once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError
from .stats import Dataset, normal_quantile

# product of widths switches to log space beyond this many dimensions to
# dodge under/overflow (high-dimensional boxes reach 1e+-100 scales)
_LOG_VOLUME_DIMS = 30


@dataclass(frozen=True)
class Box:
    """An axis-aligned hyper-rectangle over a subset of dimensions."""

    dims: tuple[int, ...]
    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        intervals = tuple((float(lo), float(hi)) for lo, hi in self.intervals)
        if len(dims) != len(intervals) or not dims:
            raise InvalidInputError("box needs one interval per dimension")
        if len(set(dims)) != len(dims):
            raise InvalidInputError("box dimensions must be unique")
        if any(d < 0 for d in dims):
            raise InvalidInputError("box dimensions must be nonnegative indices")
        for d, (lo, hi) in zip(dims, intervals):
            if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
                raise InvalidInputError(
                    f"invalid interval ({lo}, {hi}] on dimension {d}"
                )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "intervals", intervals)

    @property
    def widths(self) -> tuple[float, ...]:
        return tuple(hi - lo for lo, hi in self.intervals)

    def midpoint(self) -> np.ndarray:
        return np.array([0.5 * (lo + hi) for lo, hi in self.intervals])

    def replace_interval(self, dim: int, lo: float, hi: float) -> "Box":
        """New box with the interval on ``dim`` replaced."""
        intervals = list(self.intervals)
        intervals[self.dims.index(dim)] = (lo, hi)
        return Box(self.dims, tuple(intervals))


def log_volume(box: Box) -> float:
    return float(sum(math.log(w) for w in box.widths))


def volume(box: Box) -> float:
    """Product of interval widths (computed in log space in high dimension)."""
    if len(box.dims) > _LOG_VOLUME_DIMS:
        return math.exp(log_volume(box))
    return float(math.prod(box.widths))


def contains(box: Box, point) -> bool:
    """Half-open membership: lower < x <= upper on every box dimension."""
    coords = np.asarray(point, dtype=float)
    if coords.ndim != 1 or coords.shape[0] <= max(box.dims):
        raise InvalidInputError(
            f"point of length {coords.shape[0] if coords.ndim == 1 else 'n/a'} "
            f"is missing coordinates for box dims {box.dims}"
        )
    for d, (lo, hi) in zip(box.dims, box.intervals):
        x = coords[d]
        if not (lo < x <= hi):
            return False
    return True


def containment_mask(box: Box, values: np.ndarray) -> np.ndarray:
    """Boolean row mask of box membership for an (n, p) value matrix."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[1] <= max(box.dims):
        raise InvalidInputError("data columns do not cover the box dimensions")
    mask = np.ones(values.shape[0], dtype=bool)
    for d, (lo, hi) in zip(box.dims, box.intervals):
        col = values[:, d]
        mask &= (col > lo) & (col <= hi)
    return mask


def empirical_mass(box: Box, data: Dataset) -> float:
    """Fraction of rows inside the box."""
    mask = containment_mask(box, data.values)
    return float(np.count_nonzero(mask)) / data.n


def central_quantile_box(sigmas, beta: float, dims) -> Box:
    """Origin-centered box (-k*sigma_j, k*sigma_j] per dimension.

    ``k`` solves P(-k < Z < k) = beta**(1/p') for a standard normal Z, so
    under independent centered normals with the given scales the box has
    probability exactly ``beta``.
    """
    sigmas = [float(s) for s in sigmas]
    dims = tuple(int(d) for d in dims)
    _validate_spec_args(sigmas, beta)
    if len(dims) != len(sigmas):
        raise DomainError(
            f"{len(dims)} dims for {len(sigmas)} sigmas"
        )
    k = _half_width_multiplier(beta, len(sigmas))
    intervals = tuple((-k * s, k * s) for s in sigmas)
    return Box(dims, intervals)


def analytic_box_volume(sigmas, beta: float) -> float:
    """Closed-form volume (2k)**p' * prod(sigma) of the centered quantile box."""
    sigmas = [float(s) for s in sigmas]
    _validate_spec_args(sigmas, beta)
    p_prime = len(sigmas)
    k = _half_width_multiplier(beta, p_prime)
    log_vol = p_prime * math.log(2.0 * k) + sum(math.log(s) for s in sigmas)
    if p_prime > _LOG_VOLUME_DIMS:
        return math.exp(log_vol)
    return float((2.0 * k) ** p_prime * math.prod(sigmas))


def _half_width_multiplier(beta: float, p_prime: int) -> float:
    return normal_quantile(0.5 * (1.0 + beta ** (1.0 / p_prime)))


def _validate_spec_args(sigmas, beta: float) -> None:
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    if not sigmas:
        raise DomainError("at least one sigma is required")
    if any(not (s > 0.0 and math.isfinite(s)) for s in sigmas):
        raise DomainError("sigmas must be positive and finite")


@dataclass(frozen=True)
class QuantileBoxSpec:
    """The analytic centered box: target probability, half-width multiplier
    k, and per-dimension scales."""

    beta: float
    p_prime: int
    k: float
    sigmas: tuple[float, ...]

    def __post_init__(self):
        sigmas = tuple(float(s) for s in self.sigmas)
        _validate_spec_args(sigmas, self.beta)
        if self.p_prime != len(sigmas):
            raise DomainError("p_prime must match the number of sigmas")
        k_expected = _half_width_multiplier(self.beta, self.p_prime)
        if not math.isclose(self.k, k_expected, rel_tol=1e-9, abs_tol=0.0):
            raise DomainError(
                f"inconsistent k: got {self.k}, expected {k_expected}"
            )
        object.__setattr__(self, "sigmas", sigmas)

    @classmethod
    def from_beta(cls, beta: float, sigmas) -> "QuantileBoxSpec":
        sigmas = tuple(float(s) for s in sigmas)
        _validate_spec_args(sigmas, beta)
        return cls(
            beta=float(beta),
            p_prime=len(sigmas),
            k=_half_width_multiplier(beta, len(sigmas)),
            sigmas=sigmas,
        )

    def box(self, dims=None) -> Box:
        if dims is None:
            dims = range(self.p_prime)
        return central_quantile_box(self.sigmas, self.beta, dims)

    def volume(self) -> float:
        return analytic_box_volume(self.sigmas, self.beta)


def active_information(beta: float, box_volume: float, support_volume: float) -> float:
    """log of the box probability over its uniform-baseline probability.

    For a box of probability ``beta`` inside a bounded support, the uniform
    baseline assigns it box_volume / support_volume, so the information added
    by the data distribution is log(beta * support_volume / box_volume).
    Natural logarithm.
    """
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    if not box_volume > 0.0:
        raise DomainError(f"box volume must be positive, got {box_volume}")
    if not support_volume > 0.0:
        raise DomainError(f"support volume must be positive, got {support_volume}")
    if box_volume > support_volume:
        raise DomainError(
            f"box volume {box_volume} exceeds support volume {support_volume}"
        )
    return math.log(beta) + math.log(support_volume) - math.log(box_volume)
