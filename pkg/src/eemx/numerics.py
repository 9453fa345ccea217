"""Dense linear-algebra kernels.

Everything here is a pure function of its inputs. Matrices are plain
two-dimensional ``numpy`` float arrays; the intercept column, when one is
required, is an all-ones column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from eemx.errors import (
    ConstantTarget,
    DimensionMismatch,
    NotPositiveDefinite,
    NotStandardized,
    NotSymmetric,
    RankDeficient,
    UsageError,
)

#: A Gram pivot counts as zero below this fraction of its own column's
#: squared norm (equivalently, a column with R^2 >= 1 - RANK_TOL on the
#: preceding columns is linearly dependent).
RANK_TOL = 1e-10

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def as_matrix(a, name="matrix") -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise UsageError(f"{name} contains non-finite entries")
    return m


def as_vector(v, name="vector") -> np.ndarray:
    x = np.asarray(v, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 1-D array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise UsageError(f"{name} contains non-finite entries")
    return x


def is_intercept(column: np.ndarray) -> bool:
    return bool(np.all(column == 1.0))


@dataclass(frozen=True)
class OlsFit:
    """Result of an ordinary least squares fit.

    ``rse`` is the residual standard error ``sqrt(rss / (N - p))`` and ``cd``
    the coefficient of determination measured against the response mean.
    """

    coefficients: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    rss: float
    rse: float
    cd: float

    @property
    def n_obs(self) -> int:
        return self.fitted.shape[0]

    @property
    def n_params(self) -> int:
        return self.coefficients.shape[0]


def _orthogonalize(design: np.ndarray):
    """Equilibrated QR of ``design`` with a rank check on the Gram pivots.

    Returns ``(q, r, norms)`` such that ``design / norms == q @ r``.
    """
    norms = np.sqrt(np.einsum("ij,ij->j", design, design))
    if np.any(norms == 0.0):
        bad = int(np.flatnonzero(norms == 0.0)[0])
        raise RankDeficient(f"column {bad} of the design is identically zero")
    q, r = np.linalg.qr(design / norms)
    # r_jj^2 is the j-th Cholesky pivot of the (unit-diagonal) scaled Gram matrix
    pivots = np.diag(r) ** 2
    if np.any(pivots < RANK_TOL):
        bad = int(np.flatnonzero(pivots < RANK_TOL)[0])
        raise RankDeficient(
            f"design is rank deficient: column {bad} is (numerically) a linear "
            f"combination of the preceding columns (pivot {pivots[bad]:.3g})"
        )
    return q, r, norms


def ols_fit(design, response) -> OlsFit:
    """Least squares fit of ``response`` on the columns of ``design``.

    Raises
    ------
    DimensionMismatch
        If the row counts disagree or there are not more rows than columns.
    RankDeficient
        If a Gram pivot falls below tolerance.
    """
    x = as_matrix(design, "design")
    y = as_vector(response, "response")
    n, p = x.shape
    if y.shape[0] != n:
        raise DimensionMismatch(f"design has {n} rows but response has length {y.shape[0]}")
    if n <= p:
        raise DimensionMismatch(f"need more observations than columns (N={n}, p={p})")

    q, r, norms = _orthogonalize(x)
    coef = solve_triangular(r, q.T @ y) / norms
    fitted = x @ coef
    resid = y - fitted
    rss = float(resid @ resid)
    centered = y - y.mean()
    tss = float(centered @ centered)
    if tss > 0.0:
        cd = 1.0 - rss / tss
    else:
        cd = 1.0 if rss <= RANK_TOL * float(y @ y) else 0.0
    return OlsFit(
        coefficients=coef,
        fitted=fitted,
        residuals=resid,
        rss=rss,
        rse=float(np.sqrt(rss / (n - p))),
        cd=float(min(max(cd, 0.0), 1.0)),
    )


def population_variance(x: np.ndarray) -> float:
    """Variance with the 1/N divisor."""
    c = x - x.mean()
    return float(c @ c) / x.shape[0]


def residual_fraction(target: int, design) -> float:
    """``1 - CD`` of column ``target`` on the other columns, as ``rss / (N s^2)``.

    Computed directly so that values near 0 keep full relative accuracy.
    The remaining columns must include the intercept.
    """
    x_all = as_matrix(design, "design")
    n, k = x_all.shape
    if not 0 <= target < k:
        raise UsageError(f"target column {target} out of range for {k} columns")
    others = np.delete(x_all, target, axis=1)
    if not any(is_intercept(others[:, j]) for j in range(others.shape[1])):
        raise UsageError("the regressors must include the all-ones intercept column")
    x = x_all[:, target]
    s2 = population_variance(x)
    if s2 <= 1e-15 * float(x @ x) / n:
        raise ConstantTarget(f"column {target} is constant (a multiple of the intercept)")
    fit = ols_fit(others, x)
    return float(min(max(fit.rss / (n * s2), 0.0), 1.0))


def cd_of_regression(target: int, design) -> float:
    """CD of column ``target`` regressed on all the other columns.

    The remaining columns must include the intercept, so the value is the
    usual centred R^2: ``x'(M - M_e)x / x'(I - M_e)x``. When the remaining
    design is the intercept alone the result is 0.
    """
    return 1.0 - residual_fraction(target, design)


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order with matching orthonormal columns.

    Within each eigenvector the entry of largest magnitude is positive, the
    lowest index winning ties.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T


def _check_symmetric(a: np.ndarray, rtol: float = 1e-12):
    if a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"matrix is not square: shape {a.shape}")
    scale = max(float(np.max(np.abs(a))), np.finfo(float).tiny)
    if float(np.max(np.abs(a - a.T))) > rtol * scale:
        raise NotSymmetric("matrix is not symmetric")


def sym_eigen(symmetric) -> EigenDecomposition:
    """Eigendecomposition of a small dense symmetric matrix (cyclic Jacobi)."""
    a = as_matrix(symmetric, "symmetric")
    _check_symmetric(a)
    a = 0.5 * (a + a.T)
    p = a.shape[0]
    v = np.eye(p)

    offdiag = ~np.eye(p, dtype=bool)
    for _ in range(JACOBI_MAX_SWEEPS):
        off = float(np.linalg.norm(a[offdiag]))
        if off <= JACOBI_TOL * float(np.linalg.norm(np.diag(a))) or off == 0.0:
            break
        for i in range(p - 1):
            for j in range(i + 1, p):
                aij = a[i, j]
                if aij == 0.0:
                    continue
                h = a[j, j] - a[i, i]
                if abs(aij) < 1e-18 * abs(h):
                    # theta would overflow; tan(phi) ~ aij / h to first order
                    t = aij / h
                else:
                    theta = h / (2.0 * aij)
                    t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                ai = a[:, i].copy()
                aj = a[:, j].copy()
                a[:, i] = c * ai - s * aj
                a[:, j] = s * ai + c * aj
                ri = a[i, :].copy()
                rj = a[j, :].copy()
                a[i, :] = c * ri - s * rj
                a[j, :] = s * ri + c * rj
                a[i, j] = a[j, i] = 0.0
                vi = v[:, i].copy()
                vj = v[:, j].copy()
                v[:, i] = c * vi - s * vj
                v[:, j] = s * vi + c * vj
    else:  # pragma: no cover - Jacobi converges quadratically on these sizes
        raise NotSymmetric("Jacobi iteration failed to converge")

    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    lead = np.argmax(np.abs(v), axis=0)
    signs = np.where(v[lead, np.arange(p)] < 0.0, -1.0, 1.0)
    return EigenDecomposition(eigenvalues=w, eigenvectors=v * signs)


def correlation_matrix(standardized) -> np.ndarray:
    """Gram matrix ``Z'Z`` of zero-mean, unit-norm columns."""
    z = as_matrix(standardized, "standardized")
    if np.any(np.abs(z.mean(axis=0)) > 1e-8) or np.any(
        np.abs(np.linalg.norm(z, axis=0) - 1.0) > 1e-8
    ):
        raise NotStandardized("columns must have zero mean and unit norm")
    r = z.T @ z
    r = 0.5 * (r + r.T)
    np.fill_diagonal(r, 1.0)
    return np.clip(r, -1.0, 1.0)


def cholesky_lower(spd) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == spd``."""
    a = as_matrix(spd, "spd")
    try:
        _check_symmetric(a)
    except NotSymmetric as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    try:
        low = np.linalg.cholesky(0.5 * (a + a.T))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("matrix is not positive definite") from exc
    if np.any(np.diag(low) ** 2 <= 1e-14 * float(np.max(np.diag(a)))):
        raise NotPositiveDefinite("matrix is numerically singular")
    return low
