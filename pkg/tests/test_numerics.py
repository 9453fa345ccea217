import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eemx.errors import (
    ConstantTarget,
    DimensionMismatch,
    NotPositiveDefinite,
    NotStandardized,
    NotSymmetric,
    RankDeficient,
)
from eemx.numerics import cd_of_regression, cholesky_lower, correlation_matrix, ols_fit, sym_eigen
from tests.helpers import random_design
from tests.oracles import centered_r2, normal_equations

E4 = np.ones(4)
X2 = np.array([1.0, 2.0, 3.0, 4.0])
X3 = np.array([1.0, 2.0, 3.0, 5.0])


class TestOlsFit:
    def test_exact_fit(self):
        fit = ols_fit(np.column_stack([E4, X2]), X2)
        np.testing.assert_allclose(fit.coefficients, [0.0, 1.0], atol=1e-12)
        assert fit.rss == pytest.approx(0.0, abs=1e-24)
        assert fit.cd == 1.0

    def test_intercept_only_is_the_mean(self):
        fit = ols_fit(np.ones((3, 1)), [1.0, 2.0, 3.0])
        np.testing.assert_allclose(fit.coefficients, [2.0])
        np.testing.assert_allclose(fit.fitted, [2.0, 2.0, 2.0])

    def test_small_fit_against_exact_arithmetic(self):
        # slope Sxy/Sxx = 4.5/5, rss = 7/10, tss = 19/4, so cd = 81/95
        fit = ols_fit(np.column_stack([E4, X2]), [1.0, 2.0, 2.0, 4.0])
        np.testing.assert_allclose(fit.coefficients, [0.0, 0.9], atol=1e-14)
        assert fit.rss == pytest.approx(0.7, rel=1e-12)
        assert fit.cd == pytest.approx(81 / 95, rel=1e-12)
        assert fit.rse == pytest.approx(np.sqrt(0.7 / 2), rel=1e-12)

    def test_rank_deficient(self):
        with pytest.raises(RankDeficient):
            ols_fit(np.column_stack([E4, X2, 2 * X2]), X3)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ols_fit(np.column_stack([E4, X2]), [1.0, 2.0])
        with pytest.raises(DimensionMismatch):
            ols_fit(np.column_stack([E4[:2], X2[:2]]), [1.0, 2.0])

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_fit_invariants(self, seed):
        rng = np.random.default_rng(seed)
        n, k = int(rng.integers(6, 30)), int(rng.integers(2, 6))
        x = random_design(rng, n, k, collinear=0.5)
        y = rng.standard_normal(n) + x @ rng.standard_normal(k)
        fit = ols_fit(x, y)
        beta, rss, cd = normal_equations(x, y)
        np.testing.assert_allclose(fit.fitted + fit.residuals, y, rtol=1e-12, atol=1e-12)
        assert fit.rss == pytest.approx(float(fit.residuals @ fit.residuals), rel=1e-12)
        np.testing.assert_allclose(x.T @ fit.residuals, 0.0, atol=1e-8 * np.abs(x).max() * np.abs(y).max() * n)
        np.testing.assert_allclose(fit.coefficients, beta, rtol=1e-6, atol=1e-8)
        assert fit.cd == pytest.approx(cd, abs=1e-9)
        assert 0.0 <= fit.cd <= 1.0


class TestCdOfRegression:
    def test_small_design(self):
        # corr(x2, x3)^2 = 6.5^2 / (5 * 8.75) = 169/175
        x = np.column_stack([E4, X2, X3])
        assert cd_of_regression(2, x) == pytest.approx(169 / 175, rel=1e-12)

    def test_orthogonal_mean_zero(self):
        x = np.column_stack([E4, [1.0, -1.0, 1.0, -1.0], [1.0, 1.0, -1.0, -1.0]])
        assert cd_of_regression(1, x) == pytest.approx(0.0, abs=1e-14)

    def test_constant_target(self):
        with pytest.raises(ConstantTarget):
            cd_of_regression(1, np.column_stack([E4, 3 * E4 + 0.0, X2]))

    def test_gasoline_x4_on_m1(self, gasoline):
        c = [gasoline.column(n) for n in ("_const", "X2", "X7", "X12", "X4")]
        assert cd_of_regression(4, gasoline.design[:, c]) == pytest.approx(0.98, abs=0.005)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_normal_equations(self, seed):
        rng = np.random.default_rng(seed)
        x = random_design(rng, int(rng.integers(8, 25)), int(rng.integers(3, 7)), collinear=0.8)
        for k in range(1, x.shape[1]):
            assert cd_of_regression(k, x) == pytest.approx(centered_r2(x, k), abs=1e-9)


class TestSymEigen:
    def test_identity(self):
        eig = sym_eigen(np.eye(5))
        np.testing.assert_allclose(eig.eigenvalues, 1.0)
        np.testing.assert_allclose(np.abs(eig.eigenvectors), np.eye(5))

    def test_two_by_two(self):
        eig = sym_eigen([[1.0, 0.5], [0.5, 1.0]])
        np.testing.assert_allclose(eig.eigenvalues, [1.5, 0.5], atol=1e-14)
        np.testing.assert_allclose(eig.eigenvectors[:, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-14)

    def test_not_symmetric(self):
        with pytest.raises(NotSymmetric):
            sym_eigen([[1.0, 0.2], [0.3, 1.0]])

    def test_sign_convention(self):
        eig = sym_eigen([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])
        for j in range(3):
            v = eig.eigenvectors[:, j]
            assert v[np.argmax(np.abs(v))] > 0

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 12))
    def test_decomposition_invariants(self, seed, p):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((p, p)) * rng.uniform(0.01, 100)
        a = a + a.T
        eig = sym_eigen(a)
        scale = max(np.abs(a).max(), 1e-300)
        assert np.all(np.diff(eig.eigenvalues) <= 0)
        np.testing.assert_allclose(eig.reconstruct(), a, atol=1e-10 * scale)
        np.testing.assert_allclose(eig.eigenvectors.T @ eig.eigenvectors, np.eye(p), atol=1e-10)
        assert eig.eigenvalues.sum() == pytest.approx(np.trace(a), abs=1e-10 * scale * p)
        np.testing.assert_allclose(eig.eigenvalues, np.sort(np.linalg.eigvalsh(a))[::-1], atol=1e-10 * scale)


class TestCorrelationAndCholesky:
    def test_correlation_needs_standardized_columns(self):
        with pytest.raises(NotStandardized):
            correlation_matrix(np.array([[1.0, 2.0], [3.0, 4.0]]))

    def test_correlation_of_standardized(self):
        z = np.array([[-1.0, -1.0], [0.0, 0.0], [1.0, 1.0]]) / np.sqrt(2)
        np.testing.assert_allclose(correlation_matrix(z), [[1.0, 1.0], [1.0, 1.0]])

    def test_cholesky(self):
        a = np.array([[4.0, 2.0], [2.0, 3.0]])
        low = cholesky_lower(a)
        np.testing.assert_allclose(low @ low.T, a)
        assert low[0, 1] == 0.0

    @pytest.mark.parametrize(
        "bad", [[[1.0, 2.0], [2.0, 1.0]], [[1.0, 1.0], [1.0, 1.0]], [[1.0, 0.1], [0.2, 1.0]]]
    )
    def test_cholesky_rejects(self, bad):
        with pytest.raises(NotPositiveDefinite):
            cholesky_lower(bad)
