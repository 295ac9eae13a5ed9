"""Nearest/farthest origin distances of n uniform points in the unit p-ball,
relative contrast, and a Monte Carlo oracle for all of them.

Two farthest-point expressions are carried side by side: the published
``1 - np / ((np + p - 1)(np + p))`` and ``pn / (pn + 1)``, which follows
from the radial CDF x**p via E[max] = int_0^1 (1 - x**(pn)) dx.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from texdim.errors import DomainError
from texdim.idim import generate_uniform_ball

MC_CHUNK = 1 << 16

# intrinsic dimensions reported for the object-recognition datasets
REFERENCE_IDIM = {"MNIST": 9.96, "CIFAR-10": 15.9, "DET": 17.01}
# raw-vector intrinsic dimensions of the texture datasets
TEXTURE_RAW_IDIM = {
    "Brodatz": 34.87,
    "VisTex": 44.81,
    "KTH": 43.69,
    "KTH2": 54.19,
    "Drexel": 30.26,
    "UIUCTex": 33.64,
}


@dataclass(frozen=True)
class GeometryParams:
    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if not self.p > 0:
            raise DomainError(f"p must be > 0, got {self.p}")


@dataclass
class MonteCarloStats:
    trials: int
    mean_min: float
    se_min: float
    mean_max: float
    se_max: float


@dataclass
class GeometryReport:
    n: int
    p: float
    mean_min_analytic: float
    mean_max_paper: float
    mean_max_corrected: float
    rc_paper: float
    rc_corrected: float
    monte_carlo: MonteCarloStats | None = None
    flags: list[str] = field(default_factory=list)


def _check(n, p):
    GeometryParams(n, p)


def log_mean_min_distance(n: int, p: float) -> float:
    _check(n, p)
    xi = np.arange(1, n + 1, dtype=float)
    return -float(np.log1p(1.0 / (p * xi)).sum())


def mean_min_distance(n: int, p: float) -> float:
    """prod_{xi=1..n} (1 + 1/(p xi))^-1, accumulated in log space."""
    return math.exp(log_mean_min_distance(n, p))


def _paper_max_gap(n, p):
    return n * p / ((n * p + p - 1) * (n * p + p))


def mean_max_distance_paper(n: int, p: float) -> float:
    _check(n, p)
    return 1.0 - _paper_max_gap(n, p)


def mean_max_distance_corrected(n: int, p: float) -> float:
    _check(n, p)
    return p * n / (p * n + 1.0)


def _log_mean_max(n, p, variant):
    if variant == "paper":
        return math.log1p(-_paper_max_gap(n, p))
    if variant == "corrected":
        return -math.log1p(1.0 / (p * n))
    raise DomainError(f"unknown variant {variant!r}; expected 'paper' or 'corrected'")


def relative_contrast(n: int, p: float, variant: str = "paper") -> float:
    """(E[max] - E[min]) / E[min], evaluated as expm1 of a log ratio."""
    _check(n, p)
    return math.expm1(_log_mean_max(n, p, variant) - log_mean_min_distance(n, p))


def aggarwal_bound(p: float, C: float, xi: float) -> float:
    return C / math.sqrt(p) * math.sqrt(1.0 / (2 * xi + 1))


def rc_diff_vs_aggarwal(n: int, p: float, C: float, xi: float) -> float:
    if C <= 0 or xi < 1:
        raise DomainError(f"need C > 0 and xi >= 1, got C={C}, xi={xi}")
    return aggarwal_bound(p, C, xi) - relative_contrast(n, p, "paper")


def rc_decay_exponent(n: int, p_values, variant: str = "paper") -> float:
    """Least-squares slope of log RC against log p; -1 means RC ~ 1/p."""
    ps = np.asarray(list(p_values), dtype=float)
    rc = np.array([relative_contrast(n, p, variant) for p in ps])
    slope, _ = np.polyfit(np.log(ps), np.log(rc), 1)
    return float(slope)


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("TEXDIM_THREADS", "1")))
    except ValueError:
        return 1


def _mc_chunk(n, p, seed, chunk, size):
    rng = np.random.default_rng([seed, chunk])
    norms = np.linalg.norm(generate_uniform_ball(size * n, p, rng), axis=1).reshape(size, n)
    lo = norms.min(axis=1)
    hi = norms.max(axis=1)
    return lo.sum(), (lo * lo).sum(), hi.sum(), (hi * hi).sum()


def monte_carlo_order_stats(n: int, p: int, trials: int, seed: int = 0) -> MonteCarloStats:
    """Empirical mean (and standard error) of the min and max origin distance.

    Trial chunks draw from streams keyed by (seed, chunk index), so results do
    not depend on TEXDIM_THREADS.
    """
    if int(p) != p or p < 1:
        raise DomainError(f"Monte Carlo needs an integer dimension >= 1, got {p}")
    if n < 1 or trials < 1:
        raise DomainError(f"need n >= 1 and trials >= 1, got n={n}, trials={trials}")
    p = int(p)
    sizes = [min(MC_CHUNK, trials - s) for s in range(0, trials, MC_CHUNK)]
    jobs = [(n, p, seed, c, size) for c, size in enumerate(sizes)]
    workers = _thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _mc_chunk(*a), jobs))
    else:
        parts = [_mc_chunk(*a) for a in jobs]
    s_lo, ss_lo, s_hi, ss_hi = (math.fsum(col) for col in zip(*parts))

    def mean_se(s, ss):
        mean = s / trials
        if trials < 2:
            return mean, float("nan")
        var = max(0.0, (ss - trials * mean * mean) / (trials - 1))
        return mean, math.sqrt(var / trials)

    m_lo, se_lo = mean_se(s_lo, ss_lo)
    m_hi, se_hi = mean_se(s_hi, ss_hi)
    return MonteCarloStats(trials=trials, mean_min=m_lo, se_min=se_lo, mean_max=m_hi, se_max=se_hi)


def geometry_report(
    n: int, p: float, trials: int | None = None, seed: int = 0, z: float = 4.0
) -> GeometryReport:
    """Analytic values for (n, p), optionally adjudicated by Monte Carlo.

    Flags name every expression lying more than ``z`` standard errors from
    its Monte Carlo estimate.
    """
    report = GeometryReport(
        n=n,
        p=p,
        mean_min_analytic=mean_min_distance(n, p),
        mean_max_paper=mean_max_distance_paper(n, p),
        mean_max_corrected=mean_max_distance_corrected(n, p),
        rc_paper=relative_contrast(n, p, "paper"),
        rc_corrected=relative_contrast(n, p, "corrected"),
    )
    if trials:
        if int(p) != p:
            report.flags.append("monte_carlo_skipped_fractional_p")
            return report
        mc = monte_carlo_order_stats(n, int(p), trials, seed)
        report.monte_carlo = mc
        if abs(mc.mean_min - report.mean_min_analytic) > z * mc.se_min:
            report.flags.append("mean_min_disagrees_with_monte_carlo")
        if abs(mc.mean_max - report.mean_max_paper) > z * mc.se_max:
            report.flags.append("mean_max_paper_disagrees_with_monte_carlo")
        if abs(mc.mean_max - report.mean_max_corrected) > z * mc.se_max:
            report.flags.append("mean_max_corrected_disagrees_with_monte_carlo")
    return report


@dataclass
class Table3Row:
    name: str
    p: float
    n: int
    value: float

    @property
    def formatted(self) -> str:
        return f"{self.value:.2f}"


def table3_report(datasets) -> list[Table3Row]:
    """Mean nearest-point distance for each ``(name, p, N)``.

    p is read as the dataset's intrinsic dimension and N as its training-set size.
    """
    rows = []
    for name, p, n in datasets:
        rows.append(Table3Row(name=name, p=float(p), n=int(n), value=mean_min_distance(int(n), float(p))))
    return rows
