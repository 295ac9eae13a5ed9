"""Maximum-likelihood intrinsic dimension from k-nearest-neighbour distances,
plus seeded synthetic clouds with known dimension."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist
from scipy.stats import special_ortho_group

from texdim.errors import DomainError

_CHUNK = 512


@dataclass(frozen=True)
class IdimConfig:
    k_min: int = 10
    k_max: int = 20
    # "mean": average per-point estimates; "inverse": average their inverses then invert
    average: str = "mean"

    def __post_init__(self):
        if not 2 <= self.k_min <= self.k_max:
            raise DomainError(f"need 2 <= k_min <= k_max, got {self.k_min}..{self.k_max}")
        if self.average not in ("mean", "inverse"):
            raise DomainError(f"unknown averaging {self.average!r}")


@dataclass
class IdimEstimate:
    global_value: float
    per_k: dict[int, float]
    n_points: int
    merged_duplicates: int = 0
    per_point: np.ndarray | None = field(default=None, repr=False)


def as_point_cloud(data) -> np.ndarray:
    X = np.asarray(data, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 2 or X.shape[1] < 1:
        raise DomainError(f"point cloud must be N x D with N >= 2, D >= 1; got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DomainError("point cloud contains non-finite entries")
    return X


def merge_duplicates(X: np.ndarray) -> tuple[np.ndarray, int]:
    """Drop exact duplicate rows, keeping first occurrences in input order."""
    _, first = np.unique(X, axis=0, return_index=True)
    keep = np.sort(first)
    return X[keep], X.shape[0] - keep.size


def knn_distances(X, k_max: int, method: str = "brute") -> tuple[np.ndarray, np.ndarray]:
    """Sorted distances and indices of each point's k_max nearest neighbours.

    Self is excluded by index, ties are broken by the lower index. ``method``
    is ``"brute"`` (exact pairwise distances) or ``"kdtree"``.
    """
    X = as_point_cloud(X)
    n = X.shape[0]
    if not 1 <= k_max <= n - 1:
        raise DomainError(f"k_max must lie in [1, {n - 1}], got {k_max}")
    if method == "kdtree":
        dist, idx = cKDTree(X).query(X, k=k_max + 1)
        return _drop_self(dist, idx, k_max)
    if method != "brute":
        raise DomainError(f"unknown k-NN method {method!r}")
    dist = np.empty((n, k_max))
    idx = np.empty((n, k_max), dtype=np.int64)
    for start in range(0, n, _CHUNK):
        block = cdist(X[start : start + _CHUNK], X)
        rows = np.arange(block.shape[0])
        block[rows, start + rows] = np.inf
        order = np.argsort(block, axis=1, kind="stable")[:, :k_max]
        idx[start : start + _CHUNK] = order
        dist[start : start + _CHUNK] = np.take_along_axis(block, order, axis=1)
    return dist, idx


def _drop_self(dist, idx, k_max):
    n = dist.shape[0]
    out_d = np.empty((n, k_max))
    out_i = np.empty((n, k_max), dtype=np.int64)
    for r in range(n):
        keep = idx[r] != r
        out_d[r] = dist[r][keep][:k_max]
        out_i[r] = idx[r][keep][:k_max]
    return out_d, out_i


def mle_per_point(T: np.ndarray, k: int) -> np.ndarray:
    """[(1/(k-1)) sum_{j<k} ln(T_k / T_j)]^-1 for each row of sorted distances T."""
    logs = np.log(T[:, k - 1 : k] / T[:, : k - 1])
    return (k - 1) / logs.sum(axis=1)


def mle_intrinsic_dimension(
    data, config: IdimConfig = IdimConfig(), per_point: bool = False, method: str = "brute"
) -> IdimEstimate:
    X, merged = merge_duplicates(as_point_cloud(data))
    if config.k_max > X.shape[0] - 1:
        raise DomainError(
            f"k_max={config.k_max} needs at least {config.k_max + 1} distinct points, have {X.shape[0]}"
        )
    T, _ = knn_distances(X, config.k_max, method=method)
    degenerate = np.flatnonzero(T[:, config.k_min - 1] == T[:, 0])
    if degenerate.size:
        # T_k == T_1 makes every log-ratio zero and the estimate infinite
        raise DomainError(f"point {int(degenerate[0])} has {config.k_min} equidistant nearest neighbours")
    per_k = {}
    point_values = []
    for k in range(config.k_min, config.k_max + 1):
        m = mle_per_point(T, k)
        point_values.append(m)
        if config.average == "inverse":
            per_k[k] = float(1.0 / np.mean(1.0 / m))
        else:
            per_k[k] = float(np.mean(m))
    return IdimEstimate(
        global_value=float(np.mean(list(per_k.values()))),
        per_k=per_k,
        n_points=X.shape[0],
        merged_duplicates=merged,
        per_point=np.mean(point_values, axis=0) if per_point else None,
    )


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def generate_uniform_ball(n_points: int, p: int, seed=None) -> np.ndarray:
    """Uniform samples from the unit p-ball: random direction times U**(1/p)."""
    if p < 1 or n_points < 1:
        raise DomainError(f"need p >= 1 and n_points >= 1, got p={p}, n_points={n_points}")
    rng = _rng(seed)
    g = rng.standard_normal((n_points, p))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = rng.random(n_points) ** (1.0 / p)
    return g * r[:, None]


def random_rotation(dim: int, seed=None) -> np.ndarray:
    if dim == 1:
        return np.ones((1, 1))
    return special_ortho_group.rvs(dim, random_state=_rng(seed))


def generate_embedded_cube(n_points: int, intrinsic_p: int, ambient_D: int, seed=None, rotate: bool = True):
    """Uniform points of the unit intrinsic_p-cube, zero-padded to ambient_D and rotated."""
    if not 1 <= intrinsic_p <= ambient_D:
        raise DomainError(f"need 1 <= intrinsic_p <= ambient_D, got {intrinsic_p}, {ambient_D}")
    rng = _rng(seed)
    X = np.zeros((n_points, ambient_D))
    X[:, :intrinsic_p] = rng.random((n_points, intrinsic_p))
    if rotate:
        X = X @ random_rotation(ambient_D, rng).T
    return X
