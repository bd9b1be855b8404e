"""Sample-set containers and label-pooling transforms.

Two separately labeled populations are represented by an :class:`OutcomeSet`
(features with outcomes only) and a :class:`TreatmentSet` (features with
treatment assignments only) per source population k = 1, 2.  Pooling the two
sources with sign-flipped labels produces the auxiliary (x, z) and (x, w)
samples that the direct estimator consumes.

All containers are immutable after construction; every operation is pure
given its seed, so values can be shared freely across threads.
"""

from __future__ import annotations

import csv
from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

__all__ = [
    "OutcomeSet",
    "TreatmentSet",
    "PooledZSet",
    "PooledWSet",
    "JointSample",
    "pool_outcome_sets",
    "pool_treatment_sets",
    "subsample_by_policy",
    "split_separate_labels",
    "attach_importance_weights",
    "joint_arrays",
    "load_joint_csv",
    "save_joint_csv",
]

# Policies map an (n, d) feature matrix to a vector of p(t=+1 | x).
Policy = Callable[[np.ndarray], np.ndarray]


def _as_2d_float(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array, got shape {arr.shape}")
    return arr


def _as_1d_float(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-d array, got shape {arr.shape}")
    return arr


def _check_weights(weights, n: int) -> np.ndarray | None:
    if weights is None:
        return None
    w = _as_1d_float(weights, "weights")
    if len(w) != n:
        raise ValueError(f"weights length {len(w)} != number of rows {n}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValueError("weights must be finite and nonnegative")
    return w


@dataclass(frozen=True)
class OutcomeSet:
    """Samples {(x, y)} from one source population, outcomes only.

    Parameters
    ----------
    features : ndarray, shape (n_k, d)
    outcomes : ndarray, shape (n_k,)
    source : int
        Which training population the samples came from, 1 or 2.
    weights : ndarray or None
        Optional nonnegative per-sample weights (importance weighting).
    """

    features: np.ndarray
    outcomes: np.ndarray
    source: int
    weights: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "features", _as_2d_float(self.features, "features"))
        object.__setattr__(self, "outcomes", _as_1d_float(self.outcomes, "outcomes"))
        if len(self.outcomes) != len(self.features):
            raise ValueError("features and outcomes must have the same number of rows")
        if self.source not in (1, 2):
            raise ValueError(f"source must be 1 or 2, got {self.source}")
        object.__setattr__(self, "weights", _check_weights(self.weights, len(self.features)))

    def __len__(self) -> int:
        return len(self.features)


@dataclass(frozen=True)
class TreatmentSet:
    """Samples {(x, t)} from one source population, treatment labels only.

    Treatments take values in {-1, +1}.
    """

    features: np.ndarray
    treatments: np.ndarray
    source: int
    weights: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "features", _as_2d_float(self.features, "features"))
        object.__setattr__(self, "treatments", _as_1d_float(self.treatments, "treatments"))
        if len(self.treatments) != len(self.features):
            raise ValueError("features and treatments must have the same number of rows")
        if not np.all(np.isin(self.treatments, (-1.0, 1.0))):
            raise ValueError("treatments must take values in {-1, +1}")
        if self.source not in (1, 2):
            raise ValueError(f"source must be 1 or 2, got {self.source}")
        object.__setattr__(self, "weights", _check_weights(self.weights, len(self.features)))

    def __len__(self) -> int:
        return len(self.features)


@dataclass(frozen=True)
class PooledZSet:
    """Pooled outcome samples (x, z) with z = +y for source 1, -y for source 2."""

    features: np.ndarray
    z: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "features", _as_2d_float(self.features, "features"))
        object.__setattr__(self, "z", _as_1d_float(self.z, "z"))
        if len(self.z) != len(self.features):
            raise ValueError("features and z must have the same number of rows")
        w = _check_weights(self.weights, len(self.features))
        if w is None:
            w = np.ones(len(self.features))
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return len(self.features)


@dataclass(frozen=True)
class PooledWSet:
    """Pooled treatment samples (x, w) with w = +t for source 1, -t for source 2."""

    features: np.ndarray
    w: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "features", _as_2d_float(self.features, "features"))
        object.__setattr__(self, "w", _as_1d_float(self.w, "w"))
        if len(self.w) != len(self.features):
            raise ValueError("features and w must have the same number of rows")
        if not np.all(np.isin(self.w, (-1.0, 1.0))):
            raise ValueError("w must take values in {-1, +1}")
        wts = _check_weights(self.weights, len(self.features))
        if wts is None:
            wts = np.ones(len(self.features))
        object.__setattr__(self, "weights", wts)

    def __len__(self) -> int:
        return len(self.features)


@dataclass(frozen=True)
class JointSample:
    """A test-time sample carrying both labels, plus an optional logged propensity."""

    features: np.ndarray
    treatment: int
    outcome: float
    propensity: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "features", _as_1d_float(self.features, "features"))
        if self.treatment not in (-1, 1):
            raise ValueError(f"treatment must be -1 or +1, got {self.treatment}")
        if self.propensity is not None and not 0.0 < self.propensity < 1.0:
            raise ValueError(f"propensity must lie strictly in (0, 1), got {self.propensity}")


def joint_arrays(samples: Sequence[JointSample]):
    """Stack a sequence of joint samples into (X, t, y, propensity) arrays.

    The propensity array is None unless every sample carries one.
    """
    if len(samples) == 0:
        raise ValueError("empty sample sequence")
    X = np.stack([s.features for s in samples])
    t = np.array([s.treatment for s in samples], dtype=float)
    y = np.array([s.outcome for s in samples], dtype=float)
    if all(s.propensity is not None for s in samples):
        e = np.array([s.propensity for s in samples], dtype=float)
    else:
        e = None
    return X, t, y, e


def pool_outcome_sets(s1: OutcomeSet, s2: OutcomeSet) -> PooledZSet:
    """Concatenate the two outcome sets into (x, z) samples.

    Source-1 outcomes keep their sign (z = +y) and source-2 outcomes are
    flipped (z = -y).  Per-sample weights are carried through; sets without
    weights contribute weight 1.
    """
    if s1.source != 1 or s2.source != 2:
        raise ValueError(f"expected sources (1, 2), got ({s1.source}, {s2.source})")
    features = np.concatenate([s1.features, s2.features])
    z = np.concatenate([s1.outcomes, -s2.outcomes])
    w1 = s1.weights if s1.weights is not None else np.ones(len(s1))
    w2 = s2.weights if s2.weights is not None else np.ones(len(s2))
    return PooledZSet(features, z, np.concatenate([w1, w2]))


def pool_treatment_sets(s1: TreatmentSet, s2: TreatmentSet) -> PooledWSet:
    """Concatenate the two treatment sets into (x, w) samples, flipping source 2."""
    if s1.source != 1 or s2.source != 2:
        raise ValueError(f"expected sources (1, 2), got ({s1.source}, {s2.source})")
    features = np.concatenate([s1.features, s2.features])
    w = np.concatenate([s1.treatments, -s2.treatments])
    w1 = s1.weights if s1.weights is not None else np.ones(len(s1))
    w2 = s2.weights if s2.weights is not None else np.ones(len(s2))
    return PooledWSet(features, w, np.concatenate([w1, w2]))


def subsample_by_policy(
    joint: Sequence[JointSample],
    original_policy: Policy,
    target_policy: Policy,
    rng_seed: int,
) -> list[JointSample]:
    """Rejection-subsample jointly labeled data so it follows a new treatment policy.

    Each sample is accepted independently with probability proportional to
    target(t | x) / original(t | x), normalized by the dataset maximum of that
    ratio so that acceptance probabilities are exact and at most 1.  The
    accepted subset follows the target policy while preserving p(y | x, t)
    and p(x).

    Parameters
    ----------
    joint : sequence of JointSample
    original_policy, target_policy : callable
        Map an (n, d) feature matrix to the vector of p(t=+1 | x).
    rng_seed : int
        Seed for the acceptance draws.
    """
    X, t, _, _ = joint_arrays(joint)
    orig_plus = np.asarray(original_policy(X), dtype=float)
    targ_plus = np.asarray(target_policy(X), dtype=float)
    if np.any(orig_plus <= 0.0) or np.any(orig_plus >= 1.0):
        raise ValueError("original policy must return probabilities strictly inside (0, 1)")
    treated = t > 0
    orig_t = np.where(treated, orig_plus, 1.0 - orig_plus)
    targ_t = np.where(treated, targ_plus, 1.0 - targ_plus)
    ratio = targ_t / orig_t
    top = ratio.max()
    if top <= 0.0:
        raise ValueError("target policy assigns zero probability to every observed treatment")
    accept = np.random.default_rng(rng_seed).random(len(joint)) < ratio / top
    return [s for s, keep in zip(joint, accept) if keep]


def split_separate_labels(
    joint: Sequence[JointSample],
    rng_seed: int,
    source: int = 1,
) -> tuple[OutcomeSet, TreatmentSet]:
    """Split a jointly labeled log into disjoint outcome-only and treatment-only halves.

    A seeded shuffle assigns each sample to exactly one half; the outcome half
    gets the extra sample when the count is odd.  Simulates the situation
    where every individual carries one missing label.
    """
    if len(joint) < 2:
        raise ValueError("need at least 2 samples to split")
    perm = np.random.default_rng(rng_seed).permutation(len(joint))
    n_outcome = (len(joint) + 1) // 2
    X, t, y, _ = joint_arrays(joint)
    out_idx, trt_idx = perm[:n_outcome], perm[n_outcome:]
    outcome_set = OutcomeSet(X[out_idx], y[out_idx], source=source)
    treatment_set = TreatmentSet(X[trt_idx], t[trt_idx], source=source)
    return outcome_set, treatment_set


def attach_importance_weights(sample_set, ratio_values, total: int):
    """Attach the importance weights that debias pooling under covariate shift.

    For a source-k set of size n_k within a pooled total of ``total`` rows,
    the weight on each sample is (total / (2 n_k)) * ratio, where ratio is
    the caller-supplied density-ratio value p(x) / p_k(x) at that sample.
    With equal set sizes and ratio 1 the weights are identically 1.

    Parameters
    ----------
    sample_set : OutcomeSet or TreatmentSet
    ratio_values : ndarray, shape (n_k,)
        Density-ratio values, nonnegative.  Never estimated here.
    total : int
        Pooled row count across both sources (n or n-tilde).

    Returns
    -------
    A copy of the set with weights attached.
    """
    ratio = _as_1d_float(ratio_values, "ratio_values")
    if len(ratio) != len(sample_set):
        raise ValueError(f"ratio length {len(ratio)} != set size {len(sample_set)}")
    if np.any(ratio < 0) or not np.all(np.isfinite(ratio)):
        raise ValueError("ratio values must be finite and nonnegative")
    if total < len(sample_set):
        raise ValueError(f"total {total} smaller than the set itself ({len(sample_set)})")
    factor = total / (2.0 * len(sample_set))
    return replace(sample_set, weights=factor * ratio)


# ---------------------------------------------------------------------------
# CSV schema for jointly labeled samples: x0,...,x{d-1},t,y[,propensity]
# ---------------------------------------------------------------------------

def load_joint_csv(path: str | Path) -> list[JointSample]:
    """Read jointly labeled samples from a CSV with header x0,...,t,y[,propensity]."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        feat_cols = [c for c in header if c.startswith("x")]
        expected = [f"x{i}" for i in range(len(feat_cols))]
        has_propensity = "propensity" in header
        want = expected + ["t", "y"] + (["propensity"] if has_propensity else [])
        if header[: len(want)] != want:
            raise ValueError(f"{path}: unexpected header {header}")
        d = len(feat_cols)
        samples = []
        for row in reader:
            x = np.array([float(v) for v in row[:d]])
            t = int(float(row[d]))
            y = float(row[d + 1])
            e = float(row[d + 2]) if has_propensity else None
            samples.append(JointSample(x, t, y, e))
    if not samples:
        raise ValueError(f"{path}: no data rows")
    return samples


def save_joint_csv(path: str | Path, samples: Sequence[JointSample],
                   extra_columns: dict[str, np.ndarray] | None = None) -> None:
    """Write jointly labeled samples to CSV; extra columns (e.g. u_true) appended."""
    X, t, y, e = joint_arrays(samples)
    extra = extra_columns or {}
    for name, col in extra.items():
        if len(col) != len(samples):
            raise ValueError(f"extra column {name!r} has length {len(col)} != {len(samples)}")
    header = [f"x{i}" for i in range(X.shape[1])] + ["t", "y"]
    if e is not None:
        header.append("propensity")
    header.extend(extra)
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(len(samples)):
            row = [repr(float(v)) for v in X[i]] + [str(int(t[i])), repr(float(y[i]))]
            if e is not None:
                row.append(repr(float(e[i])))
            row.extend(repr(float(extra[name][i])) for name in extra)
            writer.writerow(row)
