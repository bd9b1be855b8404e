"""Gaussian radial basis feature maps for the linear-in-parameter models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

__all__ = ["GaussianBasis", "fit_centers", "transform"]


@dataclass(frozen=True)
class GaussianBasis:
    """A set of Gaussian bump features phi_l(x) = exp(-||x - c_l||^2 / sigma^2).

    Parameters
    ----------
    centers : ndarray, shape (b, d)
        Distinct center points, sampled from training data.
    bandwidth : float
        Length scale sigma, in the same units as feature distances.  Note the
        exponent divides by sigma^2 with no extra factor of 2.
    truncated : bool
        Set when fewer distinct rows were available than centers requested.
    """

    centers: np.ndarray
    bandwidth: float
    truncated: bool = False

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=float)
        if centers.ndim != 2 or len(centers) < 1:
            raise ValueError(f"centers must be a nonempty 2-d array, got shape {centers.shape}")
        if not np.isfinite(self.bandwidth) or self.bandwidth <= 0:
            raise ValueError(f"bandwidth must be finite and positive, got {self.bandwidth}")
        object.__setattr__(self, "centers", centers)

    @property
    def size(self) -> int:
        return len(self.centers)

    @property
    def dim(self) -> int:
        return self.centers.shape[1]


def fit_centers(features: np.ndarray, b: int, rng_seed: int,
                bandwidth: float = 25.0) -> GaussianBasis:
    """Pick b distinct training points as Gaussian centers.

    Duplicate feature rows are removed first; if fewer than b distinct rows
    remain, all of them are used and the basis is flagged as truncated.

    Parameters
    ----------
    features : ndarray, shape (n, d)
        Training points to sample centers from.
    b : int
        Number of centers requested.
    rng_seed : int
        Seed for the without-replacement draw.
    bandwidth : float
        Length scale sigma (default 25).
    """
    features = np.asarray(features, dtype=float)
    if features.ndim != 2 or len(features) == 0:
        raise ValueError("features must be a nonempty 2-d array")
    if b < 1:
        raise ValueError(f"b must be >= 1, got {b}")
    distinct = np.unique(features, axis=0)
    if b >= len(distinct):
        return GaussianBasis(distinct, bandwidth, truncated=b > len(distinct))
    rng = np.random.default_rng(rng_seed)
    idx = rng.choice(len(distinct), size=b, replace=False)
    return GaussianBasis(distinct[idx], bandwidth)


def transform(basis: GaussianBasis, X: np.ndarray) -> np.ndarray:
    """Evaluate all basis functions on the rows of X.

    Returns the (len(X), b) matrix with entry (i, l) equal to
    exp(-||x_i - c_l||^2 / sigma^2); every entry lies in (0, 1], reaching 1
    exactly when x_i coincides with the center.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-d, got shape {X.shape}")
    if X.shape[1] != basis.dim:
        raise ValueError(f"X has {X.shape[1]} columns, basis expects {basis.dim}")
    sq = cdist(X, basis.centers, metric="sqeuclidean")
    return np.exp(-sq / basis.bandwidth**2)
