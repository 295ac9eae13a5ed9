"""Gray-level co-occurrence matrices and the 13 Haralick texture features."""

from __future__ import annotations

from dataclasses import astuple, dataclass
from functools import lru_cache

import numpy as np

from texdim.errors import DomainError

FEATURE_NAMES = (
    "asm",
    "contrast",
    "correlation",
    "sum_average",
    "variance",
    "inverse_difference_moment",
    "sum_entropy",
    "sum_variance",
    "entropy",
    "difference_variance",
    "difference_entropy",
    "info_correlation_1",
    "info_correlation_2",
)


@dataclass(frozen=True)
class GrayImage:
    """Quantized single-channel raster. ``pixels`` has shape (height, width)."""

    pixels: np.ndarray
    levels: int

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise DomainError(f"pixels must be 2-D, got shape {px.shape}")
        if self.levels < 2:
            raise DomainError(f"levels must be >= 2, got {self.levels}")
        if not np.issubdtype(px.dtype, np.integer):
            if not np.all(px == np.floor(px)):
                raise DomainError("pixels must be integers")
        if px.size and (px.min() < 0 or px.max() >= self.levels):
            raise DomainError(f"pixel values must lie in [0, {self.levels - 1}]")
        object.__setattr__(self, "pixels", px.astype(np.int64, copy=False))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class GlcmOffset:
    dr: int
    dc: int
    symmetric: bool = False

    def __post_init__(self):
        if self.dr == 0 and self.dc == 0:
            raise DomainError("offset (0, 0) is not a valid GLCM displacement")


STANDARD_OFFSETS = (GlcmOffset(0, 1), GlcmOffset(1, 0), GlcmOffset(1, 1), GlcmOffset(1, -1))


@dataclass(frozen=True)
class GlcmMatrix:
    counts: np.ndarray
    levels: int

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class HaralickVector:
    asm: float
    contrast: float
    correlation: float
    sum_average: float
    variance: float
    inverse_difference_moment: float
    sum_entropy: float
    sum_variance: float
    entropy: float
    difference_variance: float
    difference_entropy: float
    info_correlation_1: float
    info_correlation_2: float
    # degenerate inputs report 0 for the affected feature and raise the flag
    correlation_degenerate: bool = False
    info_correlation_1_degenerate: bool = False

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self)[: len(FEATURE_NAMES)], dtype=float)


def compute_glcm(img: GrayImage, offset: GlcmOffset) -> GlcmMatrix:
    """Count co-occurring gray-level pairs ``(img[r, c], img[r + dr, c + dc])``."""
    h, w = img.height, img.width
    dr, dc = offset.dr, offset.dc
    if abs(dr) >= h or abs(dc) >= w:
        raise DomainError(f"offset ({dr}, {dc}) leaves no valid pixel pair in a {h}x{w} image")
    px = img.pixels
    src = px[max(0, -dr) : h - max(0, dr), max(0, -dc) : w - max(0, dc)]
    dst = px[max(0, dr) : h - max(0, -dr), max(0, dc) : w - max(0, -dc)]
    k = img.levels
    flat = np.bincount((src * k + dst).ravel(), minlength=k * k)
    counts = flat.reshape(k, k).astype(np.int64)
    if offset.symmetric:
        counts = counts + counts.T
    return GlcmMatrix(counts=counts, levels=k)


def normalize(glcm: GlcmMatrix) -> np.ndarray:
    total = glcm.total
    if total <= 0:
        raise DomainError("cannot normalize an empty GLCM")
    return glcm.counts / total


@lru_cache(maxsize=16)
def _index_grids(k: int):
    i, j = np.indices((k, k))
    return i, j, (i + j).ravel(), np.abs(i - j).ravel()


def _entropy(q: np.ndarray) -> float:
    nz = q[q > 0]
    return float(-(nz * np.log(nz)).sum())


def haralick_features(p: np.ndarray) -> HaralickVector:
    """Haralick's 13 statistics of a normalized co-occurrence matrix.

    Natural logarithms throughout; ``0 * ln 0`` is taken as 0. Sum variance
    is centred on the sum average.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise DomainError(f"expected a square probability matrix, got shape {p.shape}")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise DomainError("probability matrix must be nonnegative and sum to 1")
    k = p.shape[0]
    i, j, sum_idx, diff_idx = _index_grids(k)
    levels = np.arange(k, dtype=float)

    px = p.sum(axis=1)
    py = p.sum(axis=0)
    mu_x = float(levels @ px)
    mu_y = float(levels @ py)
    var_x = float(((levels - mu_x) ** 2) @ px)
    var_y = float(((levels - mu_y) ** 2) @ py)

    asm = float((p**2).sum())
    contrast = float(((i - j) ** 2 * p).sum())
    idm = float((p / (1.0 + (i - j) ** 2)).sum())

    sigma = np.sqrt(var_x) * np.sqrt(var_y)
    corr_degenerate = sigma == 0.0
    if corr_degenerate:
        correlation = 0.0
    else:
        correlation = float(np.clip(((i * j * p).sum() - mu_x * mu_y) / sigma, -1.0, 1.0))

    p_sum = np.bincount(sum_idx, weights=p.ravel(), minlength=2 * k - 1)
    p_diff = np.bincount(diff_idx, weights=p.ravel(), minlength=k)
    ks = np.arange(2 * k - 1, dtype=float)
    kd = np.arange(k, dtype=float)
    sum_average = float(ks @ p_sum)
    sum_variance = float(((ks - sum_average) ** 2) @ p_sum)
    diff_mean = float(kd @ p_diff)
    difference_variance = float(((kd - diff_mean) ** 2) @ p_diff)

    hxy = _entropy(p)
    hx = _entropy(px)
    hy = _entropy(py)
    mask = p > 0
    # p > 0 implies px, py > 0 on that cell; summing logs avoids px * py underflow
    log_outer = np.log(px, where=px > 0, out=np.zeros(k))[:, None] + np.log(py, where=py > 0, out=np.zeros(k))
    hxy1 = float(-(p[mask] * log_outer[mask]).sum())
    outer = np.outer(px, py)
    hxy2 = float(-(outer * log_outer)[outer > 0].sum())

    imc1_degenerate = max(hx, hy) == 0.0
    imc1 = 0.0 if imc1_degenerate else (hxy - hxy1) / max(hx, hy)
    # hxy2 >= hxy mathematically; clamp rounding noise
    imc2 = float(np.sqrt(max(0.0, 1.0 - np.exp(-2.0 * max(0.0, hxy2 - hxy)))))

    return HaralickVector(
        asm=asm,
        contrast=contrast,
        correlation=correlation,
        sum_average=sum_average,
        variance=var_x,
        inverse_difference_moment=idm,
        sum_entropy=_entropy(p_sum),
        sum_variance=sum_variance,
        entropy=hxy,
        difference_variance=difference_variance,
        difference_entropy=_entropy(p_diff),
        info_correlation_1=imc1,
        info_correlation_2=imc2,
        correlation_degenerate=bool(corr_degenerate),
        info_correlation_1_degenerate=bool(imc1_degenerate),
    )


def haralick_for_offsets(img: GrayImage, offsets) -> list[HaralickVector]:
    if not offsets:
        raise DomainError("at least one offset is required")
    return [haralick_features(normalize(compute_glcm(img, off))) for off in offsets]


def feature_names(n_offsets: int, agg: str = "avg") -> list[str]:
    if agg == "avg":
        return list(FEATURE_NAMES)
    if agg == "concat":
        return [f"{name}_o{o}" for o in range(n_offsets) for name in FEATURE_NAMES]
    raise DomainError(f"unknown aggregation mode {agg!r}")


def aggregate(vectors: list[HaralickVector], agg: str = "avg") -> np.ndarray:
    stacked = np.stack([v.as_array() for v in vectors])
    if agg == "avg":
        return stacked.mean(axis=0)
    if agg == "concat":
        return stacked.ravel()
    raise DomainError(f"unknown aggregation mode {agg!r}")


def feature_vector_for_patch(img: GrayImage, offsets=STANDARD_OFFSETS, agg: str = "avg") -> np.ndarray:
    """13 features per offset (``concat``) or their mean over offsets (``avg``)."""
    return aggregate(haralick_for_offsets(img, offsets), agg)
