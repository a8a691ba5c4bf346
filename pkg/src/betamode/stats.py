"""Core statistics: covariance/correlation, standardization, a symmetric
eigensolver, space rotation, and the standard-normal quantile function.

All operations are pure functions of their inputs. Arrays held by the domain
types are frozen (non-writeable) so shared instances are safe to read
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateColumnError,
    DomainError,
    InvalidInputError,
    NumericalError,
)

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Tolerances for the symmetric types and the Jacobi sweep.
SYMMETRY_TOL = 1e-12
EIGH_SYMMETRY_TOL = 1e-9
JACOBI_OFF_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def _frozen(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Dataset:
    """An n x p matrix of observations with unique column labels."""

    values: np.ndarray
    column_ids: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise InvalidInputError(f"dataset must be 2-D, got shape {values.shape}")
        n, p = values.shape
        if n < 2:
            raise InvalidInputError(f"dataset needs at least 2 rows, got {n}")
        if p < 1:
            raise InvalidInputError("dataset needs at least 1 column")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("dataset entries must be finite")
        ids = tuple(str(c) for c in self.column_ids)
        if len(ids) != p:
            raise InvalidInputError(
                f"{len(ids)} column ids for {p} columns"
            )
        if len(set(ids)) != p:
            raise InvalidInputError("column ids must be unique")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "column_ids", ids)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def select(self, dims: tuple[int, ...] | list[int]) -> "Dataset":
        """Dataset restricted to the given column indices, in the given order."""
        dims = tuple(int(d) for d in dims)
        for d in dims:
            if not 0 <= d < self.p:
                raise InvalidInputError(f"column index {d} out of range for p={self.p}")
        return Dataset(self.values[:, dims], tuple(self.column_ids[d] for d in dims))


@dataclass(frozen=True)
class SymmetricMatrix:
    """A p x p real symmetric matrix (symmetry enforced to 1e-12 absolute)."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise InvalidInputError(f"matrix must be square, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise InvalidInputError("matrix entries must be finite")
        asym = float(np.max(np.abs(entries - entries.T))) if entries.size else 0.0
        if asym > SYMMETRY_TOL:
            raise InvalidInputError(
                f"matrix is not symmetric (max |S - S^T| = {asym:.3e})"
            )
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def p(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class EigenBasis:
    """Eigenvalues (ascending) and the paired orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=float)
        vecs = np.asarray(self.eigenvectors, dtype=float)
        p = vals.shape[0]
        if vals.ndim != 1 or vecs.shape != (p, p):
            raise InvalidInputError("eigenvalues must be length p, eigenvectors p x p")
        if np.any(np.diff(vals) < 0):
            raise InvalidInputError("eigenvalues must be sorted ascending")
        gram = vecs.T @ vecs
        if float(np.max(np.abs(gram - np.eye(p)))) > 1e-8:
            raise InvalidInputError("eigenvector columns are not orthonormal")
        object.__setattr__(self, "eigenvalues", _frozen(vals))
        object.__setattr__(self, "eigenvectors", _frozen(vecs))

    @property
    def p(self) -> int:
        return self.eigenvalues.shape[0]


def covariance_matrix(data: Dataset) -> SymmetricMatrix:
    """Unbiased sample covariance (denominator n - 1)."""
    centered = data.values - data.values.mean(axis=0)
    cov = centered.T @ centered / (data.n - 1)
    # enforce exact symmetry against accumulation order effects
    cov = 0.5 * (cov + cov.T)
    return SymmetricMatrix(cov)


def _column_sds(data: Dataset) -> np.ndarray:
    """Sample standard deviations; raises naming the first degenerate column."""
    sds = data.values.std(axis=0, ddof=1)
    means = data.values.mean(axis=0)
    floor = 1e-12 * np.maximum(1.0, np.abs(means))
    bad = np.nonzero(sds <= floor)[0]
    if bad.size:
        raise DegenerateColumnError(data.column_ids[int(bad[0])])
    return sds


def correlation_matrix(data: Dataset) -> SymmetricMatrix:
    """Sample correlation matrix; every column must have positive variance."""
    sds = _column_sds(data)
    cov = covariance_matrix(data).entries
    corr = cov / np.outer(sds, sds)
    corr = np.clip(0.5 * (corr + corr.T), -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return SymmetricMatrix(corr)


def standardize(data: Dataset) -> Dataset:
    """Center each column to mean 0 and scale to unit sample variance."""
    sds = _column_sds(data)
    values = (data.values - data.values.mean(axis=0)) / sds
    return Dataset(values, data.column_ids)


def eigh(matrix: SymmetricMatrix | np.ndarray) -> EigenBasis:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius norm drops below 1e-12,
    capped at 100 sweeps (a cap hit raises :class:`NumericalError`). Output
    is deterministic: eigenvalues ascending with stable tie order, and each
    eigenvector scaled so its largest-magnitude entry is positive.
    """
    if isinstance(matrix, SymmetricMatrix):
        a = np.array(matrix.entries, dtype=float)
    else:
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInputError(f"matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("matrix entries must be finite")
        asym = float(np.max(np.abs(a - a.T)))
        if asym > EIGH_SYMMETRY_TOL:
            raise InvalidInputError(
                f"matrix is not symmetric (max |S - S^T| = {asym:.3e})"
            )
        a = 0.5 * (a + a.T)

    p = a.shape[0]
    vecs = np.eye(p)
    if p > 1:
        # off-diagonal Frobenius norm, computed directly (a difference of
        # squared norms cancels catastrophically near convergence)
        diag_idx = np.diag_indices(p)

        def _off_norm(m: np.ndarray) -> float:
            off = m.copy()
            off[diag_idx] = 0.0
            return float(np.linalg.norm(off))

        converged = False
        for _ in range(JACOBI_MAX_SWEEPS):
            off = _off_norm(a)
            if off < JACOBI_OFF_TOL:
                converged = True
                break
            for i in range(p - 1):
                for j in range(i + 1, p):
                    aij = a[i, j]
                    if aij == 0.0:
                        continue
                    tau = (a[j, j] - a[i, i]) / (2.0 * aij)
                    t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                    c = 1.0 / math.sqrt(t * t + 1.0)
                    s = t * c
                    row_i = a[i, :].copy()
                    row_j = a[j, :].copy()
                    a[i, :] = c * row_i - s * row_j
                    a[j, :] = s * row_i + c * row_j
                    col_i = a[:, i].copy()
                    col_j = a[:, j].copy()
                    a[:, i] = c * col_i - s * col_j
                    a[:, j] = s * col_i + c * col_j
                    a[i, j] = 0.0
                    a[j, i] = 0.0
                    vec_i = vecs[:, i].copy()
                    vec_j = vecs[:, j].copy()
                    vecs[:, i] = c * vec_i - s * vec_j
                    vecs[:, j] = s * vec_i + c * vec_j
        if not converged and _off_norm(a) >= JACOBI_OFF_TOL:
            raise NumericalError(
                f"Jacobi sweep cap ({JACOBI_MAX_SWEEPS}) hit with off-norm "
                f"{_off_norm(a):.3e}"
            )

    vals = np.diag(a).copy()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    # sign convention: largest-magnitude entry of each eigenvector is positive
    for j in range(p):
        k = int(np.argmax(np.abs(vecs[:, j])))
        if vecs[k, j] < 0.0:
            vecs[:, j] = -vecs[:, j]
    return EigenBasis(vals, vecs)


def rotate(data: Dataset, basis: EigenBasis) -> Dataset:
    """Project the data onto the basis columns (an orthogonal rotation).

    Column j of the result is the coordinate along eigenvector j; when the
    basis came from this data's own covariance, the rotated sample covariance
    is diagonal with the eigenvalues on the diagonal.
    """
    if basis.p != data.p:
        raise InvalidInputError(
            f"basis dimension {basis.p} does not match data dimension {data.p}"
        )
    values = data.values @ basis.eigenvectors
    ids = tuple(f"comp{j + 1}" for j in range(data.p))
    return Dataset(values, ids)


# Acklam's rational approximation to the inverse standard-normal CDF,
# refined below by one Halley step against the erfc-based CDF.
_ACK_A = (
    -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
    1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00,
)
_ACK_B = (
    -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
    6.680131188771972e+01, -1.328068155288572e+01,
)
_ACK_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
    -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00,
)
_ACK_D = (
    7.784695709041462e-03, 3.224671290700398e-01,
    2.445134137142996e+00, 3.754408661907416e+00,
)
_ACK_SPLIT = 0.02425


def _acklam_lower(s: float) -> float:
    # initial guess for 0 < s <= 0.5
    a, b, c, d = _ACK_A, _ACK_B, _ACK_C, _ACK_D
    if s < _ACK_SPLIT:
        q = math.sqrt(-2.0 * math.log(s))
        return (
            ((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]
        ) / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    q = s - 0.5
    r = q * q
    return (
        ((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]
    ) * q / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)


def _quantile_lower(s: float) -> float:
    # exact-to-rounding inverse CDF for 0 < s <= 0.5 (result <= 0)
    x = _acklam_lower(s)
    pdf = _INV_SQRT_2PI * math.exp(-0.5 * x * x)
    if pdf < 1e-300:
        return x
    err = 0.5 * math.erfc(-x / _SQRT2) - s
    u = err / pdf
    return x - u / (1.0 + 0.5 * x * u)


def normal_quantile(q: float) -> float:
    """Inverse standard-normal CDF, accurate to well below 1e-9 absolute."""
    q = float(q)
    if not 0.0 < q < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {q}")
    if q == 0.5:
        return 0.0
    if q > 0.5:
        return -_quantile_lower(1.0 - q)
    return _quantile_lower(q)
