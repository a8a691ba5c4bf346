"""Seeded multivariate-normal sampling via Cholesky factorization."""

from __future__ import annotations

import numpy as np

from .errors import NumericalError
from .stats import Dataset, SymmetricMatrix

# one retry with this ridge covers positive-semidefinite inputs whose
# smallest eigenvalues sit at rounding level
_CHOLESKY_JITTER = 1e-10


def cholesky_lower(sigma: SymmetricMatrix | np.ndarray) -> np.ndarray:
    """Lower-triangular Cholesky factor, retrying once with a tiny ridge."""
    entries = sigma.entries if isinstance(sigma, SymmetricMatrix) else np.asarray(sigma, dtype=float)
    try:
        return np.linalg.cholesky(entries)
    except np.linalg.LinAlgError:
        pass
    try:
        p = entries.shape[0]
        return np.linalg.cholesky(entries + _CHOLESKY_JITTER * np.eye(p))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"Cholesky factorization failed even with +{_CHOLESKY_JITTER} jitter"
        ) from exc


def sample_mvn(n: int, sigma: SymmetricMatrix | np.ndarray, seed) -> Dataset:
    """n i.i.d. draws from N(0, sigma), deterministic for a fixed seed.

    ``seed`` is anything accepted by numpy's default_rng (an integer or a
    SeedSequence). Rows are standard normal vectors pushed through the
    lower Cholesky factor, so the sample covariance converges to sigma.
    """
    if isinstance(sigma, SymmetricMatrix):
        p = sigma.p
    else:
        sigma = SymmetricMatrix(np.asarray(sigma, dtype=float))
        p = sigma.p
    lower = cholesky_lower(sigma)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((int(n), p))
    return Dataset(z @ lower.T, tuple(f"x{j + 1}" for j in range(p)))
