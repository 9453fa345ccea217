"""Variable-reducing selection through principal-component collinearity classes.

The screened variables are standardized to zero mean and unit norm and the
eigenstructure of their correlation matrix ``Z'Z = P diag(lambda) P'`` is
computed. The identifier ``d(m, k) = |sqrt(lambda_m) p_km|`` is the absolute
correlation between variable ``k`` and the ``m``-th standardized principal
component. Variables with ``d(m, k) >= a`` form the collinearity class of
component ``m``; only components whose share ``lambda_m / (K - 1)`` is at
least ``b`` are inspected.

Members of one class are strongly collinear with each other, so candidate
models take exactly one variable from every multi-member class together with
all unclassified variables. Each candidate is then reduced by repeatedly
deleting its most collinear variable until every CD is at most ``d_R``.

Components are labelled from 2 upward (the first principal component is
component 2, matching the column numbering in which column 1 is the
intercept); ``rank`` gives the 1-based position among components.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from eemx.errors import ClassTooSmall, ConstantColumn, IndexOutOfRange, NumericalError, UsageError
from eemx.indices import collinearity_cd
from eemx.model_space import BOUND_TOL, ControlParams, ModelSubset, design_of, screen_columns
from eemx.numerics import EigenDecomposition, correlation_matrix, sym_eigen

TIE_TOL = 1e-12


@dataclass(frozen=True)
class StandardizedDesign:
    z_matrix: np.ndarray
    source_means: np.ndarray
    source_stds: np.ndarray
    column_map: tuple[int, ...]

    @property
    def n_variables(self) -> int:
        return self.z_matrix.shape[1]

    def position(self, column: int) -> int:
        try:
            return self.column_map.index(column)
        except ValueError:
            raise IndexOutOfRange(f"column {column} is not part of the standardized design") from None


def standardize(data, columns: ModelSubset) -> StandardizedDesign:
    """``z = (x - mean) / (sqrt(N) s)`` for every non-intercept column."""
    x = design_of(data)
    columns.validate(x.shape[1])
    cols = columns.variables
    sub = x[:, cols]
    n = x.shape[0]
    means = sub.mean(axis=0)
    centered = sub - means
    stds = np.sqrt(np.einsum("ij,ij->j", centered, centered) / n)
    for j, s in enumerate(stds):
        if s <= 1e-15 * max(1.0, abs(means[j])):
            raise ConstantColumn(f"column {cols[j]} is constant and cannot be standardized")
    z = centered / (np.sqrt(n) * stds)
    return StandardizedDesign(z, means, stds, tuple(cols))


def principal_components(std: StandardizedDesign) -> EigenDecomposition:
    return sym_eigen(correlation_matrix(std.z_matrix))


def identifier_matrix(eig: EigenDecomposition) -> np.ndarray:
    """``D[m, k] = d(m, k)`` with rows indexed by component position."""
    lam = np.clip(eig.eigenvalues, 0.0, None)
    return np.abs(eig.eigenvectors * np.sqrt(lam)).T


def collinearity_identifier(eig: EigenDecomposition, m: int, k: int) -> float:
    """``|sqrt(lambda_m) p_km|`` for component position ``m`` and variable position ``k``."""
    p = eig.eigenvalues.shape[0]
    if not (0 <= m < p and 0 <= k < p):
        raise IndexOutOfRange(f"(m, k) = ({m}, {k}) outside a {p}-variable decomposition")
    return float(abs(np.sqrt(max(eig.eigenvalues[m], 0.0)) * eig.eigenvectors[k, m]))


@dataclass(frozen=True)
class PccClass:
    component_index: int
    eigenvalue: float
    contribution: float
    members: tuple[tuple[int, float], ...]  # (design column, d(m, k))
    threshold: float

    @property
    def rank(self) -> int:
        return self.component_index - 1

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.members)

    def __len__(self):
        return len(self.members)


def component_cutoff(eigenvalues: np.ndarray, b: float) -> int:
    """Number of leading components whose share ``lambda / p`` is at least ``b``."""
    share = np.asarray(eigenvalues) / len(eigenvalues)
    hits = np.flatnonzero(share >= b)
    return int(hits[-1]) + 1 if hits.size else 0


def pcc_classes(std: StandardizedDesign, a: float, b: float, eig: EigenDecomposition | None = None) -> list[PccClass]:
    """Collinearity classes of the leading components (singletons included)."""
    if not 0.9 <= a <= 1.0:
        raise UsageError(f"a must lie in [0.9, 1], got {a}")
    if not 0.0 < b < 1.0:
        raise UsageError(f"b must lie in (0, 1), got {b}")
    if std.n_variables == 0:
        return []
    if eig is None:
        eig = principal_components(std)
    d = identifier_matrix(eig)
    p = std.n_variables
    out = []
    for m in range(component_cutoff(eig.eigenvalues, b)):
        members = tuple((std.column_map[k], float(d[m, k])) for k in range(p) if d[m, k] >= a)
        out.append(
            PccClass(
                component_index=m + 2,
                eigenvalue=float(eig.eigenvalues[m]),
                contribution=float(eig.eigenvalues[m] / p),
                members=members,
                threshold=a,
            )
        )
    return out


@dataclass(frozen=True)
class PairBound:
    pair: tuple[int, int]
    correlation: float
    lower: float
    upper: float
    floor: float
    passes: bool


def lemma42_bounds(cls: PccClass, std: StandardizedDesign, tol: float = 1e-10) -> list[PairBound]:
    """Check ``dd' - (1 - a^2) <= |z_k'z_j| <= dd' + (1 - a^2)`` and ``2a^2 - 1 <= dd' - (1 - a^2)``."""
    if len(cls) < 2:
        raise ClassTooSmall("bounds need a class with at least two members")
    slack = 1.0 - cls.threshold**2
    floor = 2.0 * cls.threshold**2 - 1.0
    out = []
    for (k, dk), (j, dj) in itertools.combinations(cls.members, 2):
        zk = std.z_matrix[:, std.position(k)]
        zj = std.z_matrix[:, std.position(j)]
        corr = abs(float(zk @ zj))
        lower = dk * dj - slack
        upper = dk * dj + slack
        ok = lower - tol <= corr <= upper + tol and floor <= lower + tol
        out.append(PairBound((k, j), corr, lower, upper, floor, ok))
    return out


def spawn_candidates(full_columns: ModelSubset, classes: list[PccClass]) -> list[ModelSubset]:
    """One variable per multi-member class plus every unclassified variable."""
    multi = [c for c in classes if len(c) >= 2]
    seen: set[int] = set()
    for c in multi:
        if seen & set(c.variables):
            raise UsageError("collinearity classes must be disjoint")
        seen |= set(c.variables)
    rest = [k for k in full_columns.variables if k not in seen]
    if not multi:
        return [ModelSubset.of(full_columns.columns, full_columns.parent_id)]
    out = []
    for pick in itertools.product(*(c.variables for c in multi)):
        out.append(ModelSubset.of(list(pick) + rest, full_columns.parent_id))
    return out


def _cds(model: ModelSubset, x: np.ndarray) -> list[float]:
    sub = x[:, model.columns]
    out = []
    for j in range(1, sub.shape[1]):
        try:
            out.append(collinearity_cd(j, sub))
        except NumericalError:
            out.append(1.0)
    return out


def cd_reduce(candidate: ModelSubset, data, d_R: float) -> ModelSubset:
    """Delete the most collinear variable until every CD is at most ``d_R``.

    Equal maxima are broken in favour of deleting the lowest column index.
    """
    x = design_of(data)
    current = candidate
    while current.column_size >= 2:
        cds = _cds(current, x)
        top = max(cds)
        if top <= d_R + BOUND_TOL:
            break
        worst = next(i for i, v in enumerate(cds) if v >= top - TIE_TOL)
        drop = current.variables[worst]
        current = ModelSubset(tuple(c for c in current.columns if c != drop), candidate.parent_id)
    return current


@dataclass
class VrTrace:
    survivors: ModelSubset
    standardized: StandardizedDesign | None
    eigen: EigenDecomposition | None
    classes: list[PccClass]
    candidates: list[ModelSubset]
    reduced: list[ModelSubset]
    models: list[ModelSubset] = field(default_factory=list)


def vr_trace(data, params: ControlParams, columns: ModelSubset | None = None) -> VrTrace:
    """Run the variable-reducing selection and keep every intermediate."""
    x = design_of(data)
    survivors = screen_columns(x, params.c_q, params.e_norm, columns).survivors
    if survivors.column_size < 2:
        return VrTrace(survivors, None, None, [], [], [], [])
    std = standardize(x, survivors)
    eig = principal_components(std)
    classes = pcc_classes(std, params.a, params.b, eig)
    candidates = spawn_candidates(survivors, classes)
    reduced = [cd_reduce(c, x, params.d_R) for c in candidates]
    models = sorted({m for m in reduced if m.column_size >= 2})
    return VrTrace(survivors, std, eig, classes, candidates, reduced, models)


def vr_algorithm(data, params: ControlParams, columns: ModelSubset | None = None) -> list[ModelSubset]:
    """Distinct reduced candidates, sorted."""
    return vr_trace(data, params, columns).models
