"""Closed-form sizes of the GLCM feature space and an exhaustive enumerator.

The closed forms are evaluated exactly as stated, in arbitrary precision.
The enumerator walks every nonnegative integer kappa x kappa matrix whose
entries sum to n**2 and counts distinct values of each (unnormalized)
statistic, so formula and oracle can be compared side by side.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from texdim.errors import DomainError, ResourceError

STATISTICS = ("matrix_count", "asm", "correlation", "sum_average", "contrast")
DEFAULT_ENUMERATION_CAP = 10**7

CORRELATION_EXCLUSION_NOTE = (
    "matrices with zero marginal variance have undefined correlation and are excluded "
    "from the distinct-value set"
)


@dataclass(frozen=True)
class CountingParams:
    n: int
    kappa: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if self.kappa < 2:
            raise DomainError(f"kappa must be >= 2, got {self.kappa}")

    @property
    def cells(self) -> int:
        return self.kappa * self.kappa

    @property
    def total(self) -> int:
        return self.n * self.n


@dataclass
class CountReport:
    statistic: str
    formula_value: int | Fraction
    oracle_value: int | None = None
    flags: list[str] = field(default_factory=list)

    @property
    def agrees(self) -> bool | None:
        if self.oracle_value is None:
            return None
        return self.formula_value == self.oracle_value


def count_distinct_glcm_matrices(params: CountingParams) -> int:
    return math.comb(params.total + params.cells - 1, params.cells - 1)


def count_distinct_asm(params: CountingParams) -> int:
    n, k2 = params.n, params.cells
    q = (n * n) // k2
    return n**4 - (q * q * (k2 - 1) + (n * n - (k2 - 1) * q) ** 2 + 1)


def count_distinct_correlation(params: CountingParams) -> int | Fraction:
    n, k = params.n, params.kappa
    value = Fraction(n * n * k * k - n * n + 1) - Fraction(k * k, 2) + Fraction(k, 2)
    return int(value) if value.denominator == 1 else value


def count_distinct_sum_average(params: CountingParams) -> int:
    n, k = params.n, params.kappa
    return 2 * n * n * k - 2 * n * n + 1


def count_distinct_contrast(params: CountingParams) -> int:
    n, k = params.n, params.kappa
    return n * n * k * k + n * n - 2 * n * n * k + 1


FORMULAS = {
    "matrix_count": count_distinct_glcm_matrices,
    "asm": count_distinct_asm,
    "correlation": count_distinct_correlation,
    "sum_average": count_distinct_sum_average,
    "contrast": count_distinct_contrast,
}


def _compositions(total: int, parts: int, first: int):
    """All ``parts``-tuples of nonnegative ints summing to ``total`` with x[0] == first."""
    rest_total, rest_parts = total - first, parts - 1
    if rest_parts == 0:
        if rest_total == 0:
            yield (first,)
        return
    # stars and bars over the remaining cells
    for bars in itertools.combinations(range(rest_total + rest_parts - 1), rest_parts - 1):
        prev = -1
        out = [first]
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(rest_total + rest_parts - 2 - prev)
        yield tuple(out)


def _statistic_fn(statistic: str, kappa: int):
    idx = [(a, b) for a in range(kappa) for b in range(kappa)]
    if statistic == "matrix_count":
        return lambda x: x
    if statistic == "asm":
        return lambda x: sum(v * v for v in x)
    if statistic == "contrast":
        w = [(a - b) ** 2 for a, b in idx]
        return lambda x: sum(v * c for v, c in zip(x, w))
    if statistic == "sum_average":
        w = [a + b for a, b in idx]
        return lambda x: sum(v * c for v, c in zip(x, w))
    if statistic == "correlation":
        return lambda x: _correlation_key(x, kappa)
    raise DomainError(f"unknown statistic {statistic!r}; expected one of {STATISTICS}")


def _correlation_key(x, kappa: int):
    """Exact identity of the correlation value, or None when it is undefined.

    corr = cov / sqrt(var_x var_y); the pair (sign(cov), cov**2 / (var_x var_y))
    identifies it exactly without irrational arithmetic.
    """
    t = sx = sy = sxx = syy = sxy = 0
    for pos, v in enumerate(x):
        if not v:
            continue
        a, b = divmod(pos, kappa)
        t += v
        sx += a * v
        sy += b * v
        sxx += a * a * v
        syy += b * b * v
        sxy += a * b * v
    vx = t * sxx - sx * sx
    vy = t * syy - sy * sy
    if vx == 0 or vy == 0:
        return None
    cov = t * sxy - sx * sy
    return ((cov > 0) - (cov < 0), Fraction(cov * cov, vx * vy))


def _distinct_values_for_first(args):
    params, statistic, first = args
    fn = _statistic_fn(statistic, params.kappa)
    values = set()
    for x in _compositions(params.total, params.cells, first):
        values.add(fn(x))
    values.discard(None)
    return values


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("TEXDIM_THREADS", "1")))
    except ValueError:
        return 1


def brute_force_distinct_values(
    params: CountingParams, statistic: str, cap: int = DEFAULT_ENUMERATION_CAP
) -> int:
    """Number of distinct values of ``statistic`` over every GLCM with total n**2."""
    if statistic not in STATISTICS:
        raise DomainError(f"unknown statistic {statistic!r}; expected one of {STATISTICS}")
    size = count_distinct_glcm_matrices(params)
    if size > cap:
        raise ResourceError(
            f"enumerating {size} matrices for n={params.n}, kappa={params.kappa} "
            f"exceeds the enumeration cap of {cap}"
        )
    if statistic == "matrix_count":
        return sum(1 for f in range(params.total + 1) for _ in _compositions(params.total, params.cells, f))

    jobs = [(params, statistic, f) for f in range(params.total + 1)]
    workers = _thread_count()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_distinct_values_for_first, jobs))
    else:
        parts = [_distinct_values_for_first(j) for j in jobs]
    merged = set().union(*parts)
    return len(merged)


def count_report(
    params: CountingParams, statistic: str, brute_force: bool = False, cap: int = DEFAULT_ENUMERATION_CAP
) -> CountReport:
    report = CountReport(statistic=statistic, formula_value=FORMULAS[statistic](params))
    value = report.formula_value
    if isinstance(value, Fraction):
        report.flags.append("formula_non_integral")
    if value < 0:
        report.flags.append("formula_negative")
    if brute_force:
        try:
            report.oracle_value = brute_force_distinct_values(params, statistic, cap=cap)
        except ResourceError:
            report.flags.append("oracle_skipped_cap")
        else:
            if not report.agrees:
                report.flags.append("formula_oracle_disagree")
    if statistic == "correlation" and report.oracle_value is not None:
        report.flags.append("correlation_oracle_excludes_zero_variance")
    return report


def count_reports(params: CountingParams, brute_force: bool = False, cap: int = DEFAULT_ENUMERATION_CAP):
    return [count_report(params, s, brute_force=brute_force, cap=cap) for s in STATISTICS]


def haralick_vs_vc_comparison(params: CountingParams, w: int):
    """Compare the feature-space order n^2 kappa^2 + n^4 against the w^4 VC scale.

    Returns ``(feature_space, vc_scale, feature_space <= vc_scale)``.
    """
    if w < max(params.n, params.kappa):
        raise DomainError(f"w must be >= max(n, kappa) = {max(params.n, params.kappa)}, got {w}")
    lhs = params.n**2 * params.kappa**2 + params.n**4
    rhs = w**4
    return lhs, rhs, lhs <= rhs
