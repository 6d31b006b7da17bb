"""Linear family: OLS, ridge shrinkage, Bayesian ridge recovery."""

import numpy as np
import pytest

from emowear.errors import SingularSystem
from emowear.models import fit, make_config, predict
from emowear.models.linear import BayesianRidgeRegressor, LinearRegressor, RidgeRegressor


def _ols_oracle(X, y):
    """Independent normal-equations solve with an intercept column."""
    design = np.column_stack([X, np.ones(X.shape[0])])
    return np.linalg.solve(design.T @ design, design.T @ y)


class TestLinear:
    def test_exact_affine_recovery(self):
        X = np.array([[0.0], [1.0], [2.0]])
        y = 2.0 * X[:, 0] + 1.0
        reg = LinearRegressor().fit(X, y)
        assert reg.coef_[0] == pytest.approx(2.0, abs=1e-12)
        assert reg.intercept_ == pytest.approx(1.0, abs=1e-12)

    def test_matches_normal_equations_oracle(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(200, 8))
        y = X @ rng.normal(size=8) + 0.7 + rng.normal(0, 0.1, size=200)
        reg = LinearRegressor().fit(X, y)
        oracle = _ols_oracle(X, y)
        assert np.allclose(reg.coef_, oracle[:8], atol=1e-10)
        assert reg.intercept_ == pytest.approx(oracle[8], abs=1e-10)

    def test_residuals_orthogonal_to_features(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(300, 5))
        y = rng.normal(size=300)
        reg = LinearRegressor().fit(X, y)
        resid = y - reg.predict(X)
        for j in range(5):
            assert abs(float(resid @ X[:, j])) < 1e-8

    def test_collinear_features_raise(self):
        rng = np.random.default_rng(2)
        a = rng.normal(size=50)
        X = np.column_stack([a, 2.0 * a, rng.normal(size=50)])
        with pytest.raises(SingularSystem):
            LinearRegressor().fit(X, a)


class TestRidge:
    def test_zero_penalty_matches_ols(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(150, 8))
        y = X @ rng.normal(size=8) + 1.2 + rng.normal(0, 0.05, size=150)
        ridge = RidgeRegressor(alpha=0.0).fit(X, y)
        oracle = _ols_oracle(X, y)
        assert np.allclose(ridge.coef_, oracle[:8], atol=1e-8)
        assert ridge.intercept_ == pytest.approx(oracle[8], abs=1e-8)

    def test_coef_norm_non_increasing_in_penalty(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(100, 6))
        y = X @ rng.normal(size=6) + rng.normal(0, 0.2, size=100)
        norms = [
            float(np.linalg.norm(RidgeRegressor(alpha=a).fit(X, y).coef_))
            for a in (0.0, 0.1, 1.0, 10.0)
        ]
        assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))

    def test_rank_deficient_does_not_raise(self):
        rng = np.random.default_rng(5)
        a = rng.normal(size=60)
        X = np.column_stack([a, 2.0 * a])
        reg = RidgeRegressor(alpha=1.0).fit(X, a)
        assert np.all(np.isfinite(reg.coef_))

    def test_inert_table_parameters_stored(self):
        reg = RidgeRegressor(alpha=1.0, max_iter=1000, tol=1e-4)
        assert reg.max_iter == 1000 and reg.tol == 1e-4 and reg.solver == "svd"


class TestBayesianRidge:
    def test_recovers_weights_within_posterior_band(self):
        # 20 seeded linear-Gaussian datasets; the true weights should fall
        # within 3 posterior stds in nearly every run.
        hits = 0
        for seed in range(20):
            rng = np.random.default_rng(seed)
            X = rng.normal(size=(200, 8))
            w_true = rng.normal(size=8)
            y = X @ w_true + rng.normal(0.0, 0.1, size=200)
            reg = BayesianRidgeRegressor().fit(X, y)
            if np.all(np.abs(reg.coef_ - w_true) <= 3.0 * reg.coef_std_):
                hits += 1
        assert hits >= 18

    def test_noise_precision_estimate(self):
        rng = np.random.default_rng(42)
        sigma = 0.1
        X = rng.normal(size=(2000, 4))
        y = X @ np.array([1.0, -2.0, 0.5, 0.0]) + rng.normal(0, sigma, size=2000)
        reg = BayesianRidgeRegressor().fit(X, y)
        assert 1.0 / np.sqrt(reg.alpha_) == pytest.approx(sigma, rel=0.15)

    def test_close_to_ols_on_well_determined_data(self):
        rng = np.random.default_rng(6)
        X = rng.normal(size=(500, 5))
        y = X @ rng.normal(size=5) + 2.0 + rng.normal(0, 0.05, size=500)
        brr = BayesianRidgeRegressor().fit(X, y)
        oracle = _ols_oracle(X, y)
        assert np.allclose(brr.coef_, oracle[:5], atol=1e-3)


class TestUniformContract:
    def test_fit_predict_through_config(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(60, 3))
        y = X @ np.array([1.0, 2.0, 3.0]) + 0.5
        for family in ("Linear", "Ridge", "BayesianRidge"):
            model = fit(make_config(family), X, y)
            pred = predict(model, X)
            assert pred.shape == (60,)
            assert np.all(np.isfinite(pred))
