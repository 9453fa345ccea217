"""Whole-model scoring of selected models against an observed response.

Criteria use the Gaussian concentrated log-likelihood with constants
dropped::

    aic = N ln(rss / N) + 2 J
    bic = N ln(rss / N) + J ln N

An exact fit (``rss == 0``) gives ``-inf`` for both and is flagged as
degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from eemx.errors import EmptyClass, NoResponse, UsageError
from eemx.indices import model_index_report
from eemx.model_space import ModelSubset, design_of
from eemx.numerics import as_vector, ols_fit

EXACT_FIT_TOL = 1e-13
CRITERIA = ("aic", "bic", "adjusted_cd", "rse")
_ALIASES = {"adjr2": "adjusted_cd", "adjusted_cd": "adjusted_cd", "aic": "aic", "bic": "bic", "rse": "rse"}


@dataclass(frozen=True)
class CoefficientScore:
    column: int
    coefficient: float
    se: float
    pse: float | None  # none for the intercept


@dataclass(frozen=True)
class ModelScore:
    model: ModelSubset
    rss: float
    rse: float
    cd: float
    adjusted_cd: float
    aic: float
    bic: float
    per_coef: tuple[CoefficientScore, ...]
    mean_h_scaled: float
    degenerate: bool = False

    def value(self, criterion: str) -> float:
        return getattr(self, canonical_criterion(criterion))


def canonical_criterion(name: str) -> str:
    try:
        return _ALIASES[name]
    except KeyError:
        raise UsageError(f"unknown criterion {name!r}; choose from {sorted(_ALIASES)}") from None


def _response_of(data, response):
    y = response if response is not None else getattr(data, "response", None)
    if y is None:
        raise NoResponse("scoring needs a response vector")
    return as_vector(y, "response")


def score_model(model: ModelSubset, data, response=None) -> ModelScore:
    """OLS fit of the response on ``model`` with whole-model criteria and SE/PSE."""
    x = design_of(data)
    y = _response_of(data, response)
    model.validate(x.shape[1])
    sub = x[:, model.columns]
    fit = ols_fit(sub, y)
    n, j = sub.shape
    # residuals at roundoff level count as an exact fit
    degenerate = fit.rss <= EXACT_FIT_TOL**2 * float(y @ y)
    if degenerate:
        fit = replace(fit, rss=0.0, rse=0.0, cd=1.0)
    adj = 1.0 - (1.0 - fit.cd) * (n - 1) / (n - j)
    if degenerate:
        aic = bic = -math.inf
    else:
        ll = n * math.log(fit.rss / n)
        aic = ll + 2 * j
        bic = ll + j * math.log(n)

    # slopes: se = rse / EEF, pse = rse * sqrt(I VIF / N)
    coefs = [CoefficientScore(model.columns[0], float(fit.coefficients[0]), _intercept_se(sub, fit.rse), None)]
    mean_h = 1.0
    if j >= 2:
        report = model_index_report(sub)
        for rep in report.per_variable:
            pos = rep.variable_index
            se = fit.rse / math.sqrt(rep.eef_squared)
            pse = fit.rse * math.sqrt(rep.psv_factor / n)
            coefs.append(CoefficientScore(model.columns[pos], float(fit.coefficients[pos]), se, pse))
        mean_h = float(np.mean([rep.psv_factor for rep in report.per_variable]))
    return ModelScore(
        model=model,
        rss=fit.rss,
        rse=fit.rse,
        cd=fit.cd,
        adjusted_cd=float(adj),
        aic=aic,
        bic=bic,
        per_coef=tuple(coefs),
        mean_h_scaled=fit.rse * mean_h / math.sqrt(n),
        degenerate=degenerate,
    )


def _intercept_se(sub: np.ndarray, rse: float) -> float:
    # intercept SE from the leading element of (X'X)^{-1}
    _, r = np.linalg.qr(sub)
    rinv = np.linalg.inv(r)
    return float(rse * math.sqrt(float(rinv[0] @ rinv[0])))


@dataclass(frozen=True)
class RankedScore:
    rank: int
    score: ModelScore
    best: bool


def select_optimal(models, data, criterion: str = "adjusted_cd", response=None) -> list[RankedScore]:
    """Score every model and rank best-first; ties keep lexicographic model order."""
    crit = canonical_criterion(criterion)
    models = getattr(models, "models", models)
    models = sorted(set(models))
    if not models:
        raise EmptyClass("cannot rank an empty class")
    scores = [score_model(m, data, response) for m in models]
    sign = -1.0 if crit == "adjusted_cd" else 1.0
    order = sorted(range(len(scores)), key=lambda i: (sign * getattr(scores[i], crit), scores[i].model))
    return [RankedScore(r + 1, scores[i], r == 0) for r, i in enumerate(order)]
