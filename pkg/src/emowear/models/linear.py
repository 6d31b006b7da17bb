"""Linear-family regressors: ordinary least squares, ridge, Bayesian ridge.

All three fit an unpenalized intercept by centering. Ridge solves the
penalized system directly through the SVD (max_iter/tol are stored but
inert under a direct solver); Bayesian ridge iterates the standard
evidence-maximization re-estimation of the noise and weight precisions.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch, SingularSystem


class LinearRegressor:
    """Ordinary least squares with intercept.

    Raises SingularSystem when the design matrix (with intercept column)
    is rank deficient, i.e. features are exactly collinear.
    """

    def fit(self, X, y):
        n, d = X.shape
        design = np.column_stack([X, np.ones(n)])
        coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
        if rank < d + 1:
            raise SingularSystem(f"design matrix rank {rank} < {d + 1}; features are collinear")
        self.coef_ = coef[:d]
        self.intercept_ = float(coef[d])
        return self

    def predict(self, X):
        self._check(X)
        return X @ self.coef_ + self.intercept_

    def _check(self, X):
        if X.shape[1] != self.coef_.shape[0]:
            raise DimensionMismatch(f"{X.shape[1]} columns, model has {self.coef_.shape[0]}")


class RidgeRegressor:
    """L2-penalized least squares, solved via SVD shrinkage.

    Coefficients along each singular direction shrink by s/(s^2 + alpha);
    alpha=0 reduces to the pseudo-inverse, so exact collinearity never
    raises here.
    """

    def __init__(self, alpha: float = 1.0, max_iter: int = 1000, tol: float = 1e-4,
                 solver: str = "svd"):
        if solver != "svd":
            raise ValueError(f"unsupported ridge solver {solver!r}")
        self.alpha = float(alpha)
        self.max_iter = max_iter  # inert under the direct SVD solver
        self.tol = tol
        self.solver = solver

    def fit(self, X, y):
        x_mean = X.mean(axis=0)
        y_mean = float(y.mean())
        xc = X - x_mean
        yc = y - y_mean
        u, s, vt = np.linalg.svd(xc, full_matrices=False)
        if self.alpha == 0.0:
            # Pseudo-inverse limit: drop numerically-zero singular values.
            cutoff = s[0] * 1e-12 if s.size else 0.0
            shrink = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
        else:
            shrink = s / (s * s + self.alpha)
        self.coef_ = vt.T @ (shrink * (u.T @ yc))
        self.intercept_ = y_mean - float(x_mean @ self.coef_)
        return self

    def predict(self, X):
        if X.shape[1] != self.coef_.shape[0]:
            raise DimensionMismatch(f"{X.shape[1]} columns, model has {self.coef_.shape[0]}")
        return X @ self.coef_ + self.intercept_


class BayesianRidgeRegressor:
    """Evidence-maximization Bayesian linear regression.

    Model: y ~ N(Xw + b, 1/alpha), w ~ N(0, I/lambda), with Gamma
    hyperpriors (alpha_1, alpha_2) on alpha and (lambda_1, lambda_2) on
    lambda. Each iteration recomputes the posterior mean through the SVD,
    then re-estimates alpha and lambda from the effective number of
    well-determined parameters gamma = sum(alpha s^2 / (lambda + alpha s^2)).
    Stops when the L1 change of the weights drops below tol.
    """

    def __init__(self, max_iter: int = 1000, tol: float = 1e-3,
                 alpha_1: float = 1e-6, alpha_2: float = 1e-6,
                 lambda_1: float = 1e-6, lambda_2: float = 1e-6):
        self.max_iter = max_iter
        self.tol = tol
        self.alpha_1 = alpha_1
        self.alpha_2 = alpha_2
        self.lambda_1 = lambda_1
        self.lambda_2 = lambda_2

    def fit(self, X, y):
        n, d = X.shape
        x_mean = X.mean(axis=0)
        y_mean = float(y.mean())
        xc = X - x_mean
        yc = y - y_mean

        u, s, vt = np.linalg.svd(xc, full_matrices=False)
        uty = u.T @ yc
        s2 = s * s

        y_var = float(yc.var())
        alpha = 1.0 / y_var if y_var > 0 else 1.0  # noise precision
        lam = 1.0  # weight precision

        coef = np.zeros(d)
        iters = 0
        for iters in range(1, self.max_iter + 1):
            coef_old = coef
            scale = (alpha * s) / (lam + alpha * s2)
            coef = vt.T @ (scale * uty)

            gamma = float(np.sum((alpha * s2) / (lam + alpha * s2)))
            resid = yc - xc @ coef
            rss = float(resid @ resid)
            lam = (gamma + 2.0 * self.lambda_1) / (float(coef @ coef) + 2.0 * self.lambda_2)
            alpha = (n - gamma + 2.0 * self.alpha_1) / (rss + 2.0 * self.alpha_2)

            if iters > 1 and float(np.sum(np.abs(coef - coef_old))) < self.tol:
                break

        scale = (alpha * s) / (lam + alpha * s2)
        self.coef_ = vt.T @ (scale * uty)
        self.intercept_ = y_mean - float(x_mean @ self.coef_)
        self.alpha_ = alpha
        self.lambda_ = lam
        # Posterior covariance of the weights: V diag(1/(lambda + alpha s^2)) V^T.
        self.sigma_ = (vt.T * (1.0 / (lam + alpha * s2))) @ vt
        self.iterations_ = iters
        return self

    @property
    def coef_std_(self) -> np.ndarray:
        """Posterior standard deviation of each weight."""
        return np.sqrt(np.diag(self.sigma_))

    def predict(self, X):
        if X.shape[1] != self.coef_.shape[0]:
            raise DimensionMismatch(f"{X.shape[1]} columns, model has {self.coef_.shape[0]}")
        return X @ self.coef_ + self.intercept_
