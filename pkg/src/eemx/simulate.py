"""Monte Carlo study of collinearity-class composition under normal designs.

Each trial draws ``n`` rows from ``N_p(0, Phi)``, standardizes them, and
records which variables fall in the collinearity class of the leading
principal component. Trials use a Philox counter-based generator keyed by
``(seed, trial)``, so any trial can be regenerated on its own and the table
does not depend on evaluation order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from eemx.errors import NotPositiveDefinite, UsageError
from eemx.model_space import ControlParams, ModelSubset
from eemx.numerics import as_matrix, cholesky_lower
from eemx.vr_select import lemma42_bounds, pcc_classes, principal_components, standardize, vr_algorithm

U64 = 2**64


@dataclass(frozen=True)
class SimConfig:
    correlation: np.ndarray
    n: int
    trials: int = 1000
    a: float = 0.9
    b: float = 0.4
    seed: int = 0
    names: tuple[str, ...] = ()
    _chol: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        phi = as_matrix(self.correlation, "correlation")
        if phi.shape[0] != phi.shape[1]:
            raise NotPositiveDefinite(f"correlation matrix must be square, got {phi.shape}")
        if not np.allclose(np.diag(phi), 1.0, atol=1e-12):
            raise UsageError("correlation matrix must have a unit diagonal")
        if self.trials < 1:
            raise UsageError("trials must be at least 1")
        if self.n <= phi.shape[0]:
            raise UsageError(f"n must exceed the number of variables ({phi.shape[0]})")
        if not 0 <= self.seed < U64:
            raise UsageError("seed must be an unsigned 64-bit integer")
        if not 0.9 <= self.a <= 1.0 or not 0.0 < self.b < 1.0:
            raise UsageError("a must lie in [0.9, 1] and b in (0, 1)")
        names = tuple(self.names) or tuple(f"v{j + 1}" for j in range(phi.shape[0]))
        if len(names) != phi.shape[0]:
            raise UsageError(f"got {len(names)} names for {phi.shape[0]} variables")
        object.__setattr__(self, "correlation", phi)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_chol", cholesky_lower(phi))

    @property
    def p(self) -> int:
        return self.correlation.shape[0]


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    if not 0 <= trial < U64:
        raise UsageError("trial index must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.Philox(key=seed + (trial << 64)))


def generate_mvn(config: SimConfig, trial: int) -> np.ndarray:
    """``n x p`` draw whose rows are ``L g`` with ``L L' = Phi``."""
    g = trial_generator(config.seed, trial).standard_normal((config.n, config.p))
    return g @ config._chol.T


@dataclass
class FrequencyTable:
    rows: dict[tuple[str, ...], int]
    total: int
    classes_checked: int = 0
    bound_failures: int = 0
    model_rows: dict[tuple[tuple[str, ...], ...], int] = field(default_factory=dict)

    def count(self, labels) -> int:
        return self.rows.get(tuple(sorted(labels)), 0)

    def items(self):
        return list(self.rows.items())


def _sorted_counts(counter: Counter) -> dict:
    return dict(sorted(counter.items(), key=lambda kv: (-kv[1], kv[0])))


def _with_intercept(w: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones(w.shape[0]), w])


def pcc_frequency_study(config: SimConfig, full_vr: bool = False, d_R: float = 0.9) -> FrequencyTable:
    """Tally the leading-component collinearity class over all trials.

    With ``full_vr`` each trial also runs the complete variable-reducing
    selection at the given ``d_R`` (the I-screen is effectively off, since
    simulated columns have mean near zero) and tallies the chosen model sets.
    """
    tally: Counter = Counter()
    models: Counter = Counter()
    checked = failures = 0
    columns = ModelSubset.of(range(1, config.p + 1))
    order = {name: j for j, name in enumerate(config.names)}
    for t in range(config.trials):
        x = _with_intercept(generate_mvn(config, t))
        std = standardize(x, columns)
        eig = principal_components(std)
        classes = pcc_classes(std, config.a, config.b, eig)
        lead = next((c for c in classes if c.component_index == 2), None)
        members = lead.variables if lead is not None else ()
        label = tuple(sorted((config.names[k - 1] for k in members), key=order.__getitem__))
        tally[label] += 1
        for c in classes:
            if len(c) >= 2:
                checked += 1
                failures += sum(not pb.passes for pb in lemma42_bounds(c, std))
        if full_vr:
            params = ControlParams(c_q=0.999999, d_R=d_R, a=config.a, b=config.b)
            chosen = vr_algorithm(x, params)
            models[tuple(tuple(config.names[k - 1] for k in m.variables) for m in chosen)] += 1
    return FrequencyTable(_sorted_counts(tally), config.trials, checked, failures, _sorted_counts(models))
