"""Per-variable and per-model inefficiency/collinearity diagnostics.

For a design ``X`` whose first column is the intercept ``e``, each other
column ``x_k`` gets

* ``q_k^2 = (x_k'e)^2 / (x_k'x_k * e'e)``, the squared raw correlation with
  ``e``, and the I-index ``I_k = 1 / (1 - q_k^2) = 1 + xbar_k^2 / s_k^2``;
* the collinearity CD ``R_k^2`` of ``x_k`` on the remaining columns and the
  C-index ``C_k = 1 / (1 - R_k^2)`` (the VIF);
* ``H_k = I_k * C_k``, which scales the average predictive sampling variance
  of the term ``x_nk * beta_k`` to ``sigma^2 H_k / N``.

Standard deviations use the 1/N divisor.

When the model is just ``(e, x_k)`` there is nothing to regress on besides
the intercept; by convention the collinearity CD is then the raw ``q_k^2``,
so ``C_k == I_k`` and ``H_k = 1 / (1 - q_k^2)^2``. The regression CD proper
(0 in that case) is kept separately in ``regression_cd`` and drives the
EEF and classical standard errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from eemx.errors import ConstantColumn, PerfectCollinearity, UsageError, ZeroVector
from eemx.numerics import (
    OlsFit,
    as_matrix,
    as_vector,
    cd_of_regression,
    is_intercept,
    population_variance,
    residual_fraction,
)

PERFECT_TOL = 1e-10


def q_squared(column) -> float:
    x = as_vector(column, "column")
    ss = float(x @ x)
    if ss == 0.0:
        raise ZeroVector("q^2 is undefined for the zero vector")
    return min(float(x.sum()) ** 2 / (x.shape[0] * ss), 1.0)


def inefficiency_index(column) -> float:
    """I-index ``1 / (1 - q^2)``; raises ConstantColumn for multiples of ``e``."""
    x = as_vector(column, "column")
    q2 = q_squared(x)
    ns2 = x.shape[0] * population_variance(x)
    ss = float(x @ x)
    if ns2 <= 1e-15 * ss or q2 >= 1.0:
        raise ConstantColumn("I-index infinite; variable is immobile (a multiple of e)")
    # ||x||^2 / (N s^2) avoids forming 1 - q^2; clamp roundoff below 1
    return max(ss / ns2, 1.0)


def intercept_position(design: np.ndarray) -> int:
    hits = [j for j in range(design.shape[1]) if is_intercept(design[:, j])]
    if not hits:
        raise UsageError("design has no all-ones intercept column")
    if len(hits) > 1:
        raise UsageError("design has more than one intercept column")
    return hits[0]


def collinearity_cd(target: int, design) -> float:
    """The CD entering the C-index of column ``target``.

    Regression CD on the other columns, except that a two-column design
    ``(e, x_k)`` yields the raw ``q_k^2``.
    """
    x = as_matrix(design, "design")
    if x.shape[1] == 2 and is_intercept(x[:, 1 - target]):
        return q_squared(x[:, target])
    return cd_of_regression(target, x)


def _collinearity_residual(target: int, x: np.ndarray) -> float:
    """``1 - collinearity_cd`` computed without cancellation."""
    if x.shape[1] == 2 and is_intercept(x[:, 1 - target]):
        v = x[:, target]
        return min(x.shape[0] * population_variance(v) / float(v @ v), 1.0)
    return residual_fraction(target, x)


def _c_from_residual(res: float) -> float:
    if res <= PERFECT_TOL:
        raise PerfectCollinearity(f"CD {1.0 - res:.12g} is numerically 1; the variable is perfectly collinear")
    return 1.0 / res


def collinearity_index(target: int, design) -> float:
    """C-index (VIF) ``1 / (1 - R^2)`` of column ``target`` within ``design``."""
    return _c_from_residual(_collinearity_residual(target, as_matrix(design, "design")))


def h_index(i: float, c: float) -> float:
    if i < 1.0 or c < 1.0:
        raise UsageError("I and C indices are both at least 1")
    return i * c


def ind_psv(h: float, sigma_sq: float, n: int) -> float:
    """Individual predictive sampling variance ``sigma^2 H / N``."""
    if n < 1:
        raise UsageError("n must be positive")
    return sigma_sq * h / n


def ind_sv(sigma_sq: float, n: int, s_xk: float, vif: float) -> float:
    """Individual sampling variance ``sigma^2 VIF / (N s^2)``."""
    if s_xk <= 0.0:
        raise UsageError("s_xk must be positive")
    return sigma_sq * vif / (n * s_xk**2)


@dataclass(frozen=True)
class VariableIndexReport:
    """Diagnostics of one non-intercept column inside a model.

    ``r_check_squared``/``c_index`` are the collinearity CD and C-index used
    for control and comparison; ``regression_cd``/``vif``/``eef_squared`` are
    the plain regression quantities (they coincide with the former unless
    the model has a single regressor besides ``e``).
    """

    variable_index: int
    name: str
    q_squared: float
    i_index: float
    r_check_squared: float
    c_index: float
    h_index: float
    mean: float
    std_dev: float
    norm_squared: float
    regression_cd: float
    vif: float
    eef_squared: float

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.norm_squared))

    @property
    def psv_factor(self) -> float:
        """``I * VIF``; the predictive sampling variance is ``sigma^2 * psv_factor / N``."""
        return self.i_index * self.vif


@dataclass(frozen=True)
class ModelIndexReport:
    per_variable: list[VariableIndexReport]
    mean_h: float
    icri: tuple[float, float]
    column_size: int
    names: list[str] = field(default_factory=list)

    def by_name(self, name: str) -> VariableIndexReport:
        for r in self.per_variable:
            if r.name == name:
                return r
        raise KeyError(name)


def variable_report(target: int, design, name: str | None = None) -> VariableIndexReport:
    x_all = as_matrix(design, "design")
    n = x_all.shape[0]
    x = x_all[:, target]
    i_val = inefficiency_index(x)
    res = _collinearity_residual(target, x_all)
    c_val = _c_from_residual(res)
    r2 = 1.0 - res
    reg_res = res if x_all.shape[1] > 2 else 1.0
    s2 = population_variance(x)
    return VariableIndexReport(
        variable_index=target,
        name=name if name is not None else f"x{target}",
        q_squared=q_squared(x),
        i_index=i_val,
        r_check_squared=r2,
        c_index=c_val,
        h_index=h_index(i_val, c_val),
        mean=float(x.mean()),
        std_dev=float(np.sqrt(s2)),
        norm_squared=float(x @ x),
        regression_cd=1.0 - reg_res,
        vif=1.0 / reg_res,
        eef_squared=n * s2 * reg_res,
    )


def model_index_report(design, names=None) -> ModelIndexReport:
    """Index table of every non-intercept column, plus ``mean H`` and the ICRI."""
    x = as_matrix(design, "design")
    k = x.shape[1]
    if names is None:
        names = [f"x{j}" for j in range(k)]
    if len(names) != k:
        raise UsageError(f"got {len(names)} names for {k} columns")
    icpt = intercept_position(x)
    if k < 2:
        raise UsageError("design needs at least one column besides the intercept")
    reports = [variable_report(j, x, names[j]) for j in range(k) if j != icpt]
    return ModelIndexReport(
        per_variable=reports,
        mean_h=float(np.mean([r.h_index for r in reports])),
        icri=(max(r.i_index for r in reports), max(r.c_index for r in reports)),
        column_size=k,
        names=list(names),
    )


def se_and_pse(fit: OlsFit, report: VariableIndexReport, n: int) -> tuple[float, float]:
    """Standard error and predictive standard error of one coefficient.

    ``se = rse / sqrt(N s^2) * sqrt(VIF)`` and ``pse = rse * sqrt(I VIF / N)``.
    """
    se = fit.rse * (n * report.std_dev**2) ** -0.5 * np.sqrt(report.vif)
    pse = fit.rse * np.sqrt(report.psv_factor / n)
    return float(se), float(pse)
