import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from texdim.counting import (
    CountingParams,
    brute_force_distinct_values,
    count_distinct_asm,
    count_distinct_contrast,
    count_distinct_correlation,
    count_distinct_glcm_matrices,
    count_distinct_sum_average,
    count_report,
    haralick_vs_vc_comparison,
)
from texdim.errors import DomainError, ResourceError


def product_matrices(n, kappa):
    """Every kappa^2-tuple summing to n^2, via a plain Cartesian product filter."""
    total = n * n
    for x in itertools.product(range(total + 1), repeat=kappa * kappa):
        if sum(x) == total:
            yield x


def P(n, k):
    return CountingParams(n, k)


class TestFormulas:
    @pytest.mark.parametrize("n, k, expected", [(2, 2, 35), (1, 2, 4), (3, 2, 220)])
    def test_matrix_count(self, n, k, expected):
        assert count_distinct_glcm_matrices(P(n, k)) == expected

    def test_matrix_count_large_is_exact(self):
        value = count_distinct_glcm_matrices(P(28, 256))
        assert value % 10**6 != 0 or value > 10**1000
        assert len(str(value)) > 1000

    @pytest.mark.parametrize("n, k, expected", [(2, 2, 11), (1, 2, -1)])
    def test_asm(self, n, k, expected):
        assert count_distinct_asm(P(n, k)) == expected

    @pytest.mark.parametrize("n, k, expected", [(2, 2, 12), (1, 2, 3), (2, 3, 30)])
    def test_correlation(self, n, k, expected):
        assert count_distinct_correlation(P(n, k)) == expected

    @given(st.integers(1, 40), st.integers(2, 300))
    def test_correlation_always_integral(self, n, k):
        assert isinstance(count_distinct_correlation(P(n, k)), int)

    @pytest.mark.parametrize("n, k, expected", [(2, 2, 9), (1, 2, 3)])
    def test_sum_average(self, n, k, expected):
        assert count_distinct_sum_average(P(n, k)) == expected

    @pytest.mark.parametrize("n, k, expected", [(2, 2, 5), (3, 2, 10)])
    def test_contrast(self, n, k, expected):
        assert count_distinct_contrast(P(n, k)) == expected

    @given(st.integers(1, 200), st.integers(2, 300))
    def test_contrast_factored(self, n, k):
        assert count_distinct_contrast(P(n, k)) == n * n * (k - 1) ** 2 + 1

    @pytest.mark.parametrize("k", range(2, 7))
    def test_monotone_in_n(self, k):
        for fn in (
            count_distinct_glcm_matrices,
            count_distinct_asm,
            count_distinct_correlation,
            count_distinct_sum_average,
            count_distinct_contrast,
        ):
            values = [fn(P(n, k)) for n in range(1, 9)]
            assert values == sorted(values), fn.__name__

    def test_deterministic(self):
        assert count_distinct_glcm_matrices(P(28, 256)) == count_distinct_glcm_matrices(P(28, 256))

    @pytest.mark.parametrize("n, k", [(0, 2), (1, 1)])
    def test_rejects_params(self, n, k):
        with pytest.raises(DomainError):
            P(n, k)


class TestBruteForce:
    @pytest.mark.parametrize("n, k", [(1, 2), (2, 2), (1, 3)])
    def test_matches_product_enumeration(self, n, k):
        mats = list(product_matrices(n, k))
        assert brute_force_distinct_values(P(n, k), "matrix_count") == len(mats)
        idx = [(a, b) for a in range(k) for b in range(k)]
        asm = {sum(v * v for v in x) for x in mats}
        contrast = {sum(v * (a - b) ** 2 for v, (a, b) in zip(x, idx)) for x in mats}
        sums = {sum(v * (a + b) for v, (a, b) in zip(x, idx)) for x in mats}
        assert brute_force_distinct_values(P(n, k), "asm") == len(asm)
        assert brute_force_distinct_values(P(n, k), "contrast") == len(contrast)
        assert brute_force_distinct_values(P(n, k), "sum_average") == len(sums)

    def test_asm_values_n2_k2(self):
        values = sorted({sum(v * v for v in x) for x in product_matrices(2, 2)})
        assert values == [4, 6, 8, 10, 16]
        assert brute_force_distinct_values(P(2, 2), "asm") == 5

    def test_contrast_n2_k2(self):
        assert brute_force_distinct_values(P(2, 2), "contrast") == 5

    def test_correlation_matches_float_enumeration(self):
        # float correlation values, rounded, must give the same number of distinct classes
        import math

        k = 2
        vals = set()
        for x in product_matrices(2, k):
            t = sum(x)
            p = [[x[a * k + b] / t for b in range(k)] for a in range(k)]
            px = [sum(row) for row in p]
            py = [sum(p[a][b] for a in range(k)) for b in range(k)]
            mx = sum(a * px[a] for a in range(k))
            my = sum(b * py[b] for b in range(k))
            vx = sum((a - mx) ** 2 * px[a] for a in range(k))
            vy = sum((b - my) ** 2 * py[b] for b in range(k))
            if vx == 0 or vy == 0:
                continue
            c = (sum(a * b * p[a][b] for a in range(k) for b in range(k)) - mx * my) / math.sqrt(vx * vy)
            vals.add(round(c, 9))
        assert brute_force_distinct_values(P(2, k), "correlation") == len(vals)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_matrix_count_formula_exact(self, n):
        assert brute_force_distinct_values(P(n, 2), "matrix_count") == count_distinct_glcm_matrices(P(n, 2))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_contrast_formula_kappa2(self, n):
        assert brute_force_distinct_values(P(n, 2), "contrast") == count_distinct_contrast(P(n, 2))

    def test_contrast_formula_kappa3_disagreement_recorded(self):
        report = count_report(P(2, 3), "contrast", brute_force=True)
        assert (report.formula_value, report.oracle_value) == (17, 14)
        assert "formula_oracle_disagree" in report.flags

    def test_cap(self):
        with pytest.raises(ResourceError, match="cap of 10"):
            brute_force_distinct_values(P(2, 2), "asm", cap=10)

    def test_unknown_statistic(self):
        with pytest.raises(DomainError):
            brute_force_distinct_values(P(1, 2), "homogeneity")

    def test_parallel_matches_serial(self, monkeypatch):
        serial = brute_force_distinct_values(P(2, 3), "correlation")
        monkeypatch.setenv("TEXDIM_THREADS", "2")
        assert brute_force_distinct_values(P(2, 3), "correlation") == serial


class TestReports:
    def test_asm_flagged(self):
        r = count_report(P(2, 2), "asm", brute_force=True)
        assert (r.formula_value, r.oracle_value, r.agrees) == (11, 5, False)
        assert "formula_oracle_disagree" in r.flags

    def test_negative_flagged(self):
        r = count_report(P(1, 2), "asm")
        assert r.formula_value == -1
        assert "formula_negative" in r.flags
        assert r.agrees is None

    def test_cap_skips_oracle(self):
        r = count_report(P(3, 3), "asm", brute_force=True, cap=100)
        assert r.oracle_value is None and "oracle_skipped_cap" in r.flags

    def test_fraction_flag(self):
        r = count_report(P(2, 2), "correlation")
        assert not isinstance(r.formula_value, Fraction)
        assert "formula_non_integral" not in r.flags


class TestVcComparison:
    @pytest.mark.parametrize(
        "n, k, w, expected",
        [(2, 2, 2, (32, 16, False)), (2, 2, 4, (32, 256, True))],
    )
    def test_examples(self, n, k, w, expected):
        assert haralick_vs_vc_comparison(P(n, k), w) == expected

    def test_paper_setting(self):
        assert haralick_vs_vc_comparison(P(28, 256), 256)[2] is True

    def test_precondition(self):
        with pytest.raises(DomainError):
            haralick_vs_vc_comparison(P(28, 256), 100)
