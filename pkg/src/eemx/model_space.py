"""Submodels, the IC-controlled class and ICRI comparison.

A submodel is the sorted tuple of design-column indices it uses; column 0 is
the intercept and every submodel contains it. The IC-controlled class at
control level ``(c, d)`` holds the submodels in which every non-intercept
variable has ``I_k <= c`` and ``C_k <= d`` (and, optionally,
``||x_k|| >= e``).
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from eemx.errors import (
    BudgetExceeded,
    DifferentColumnSizes,
    MixedColumnSizes,
    NumericalError,
    SizeOutOfRange,
    UsageError,
)
from eemx.indices import model_index_report

INTERCEPT = 0
DEFAULT_BUDGET = 2**20
#: absolute slack on q^2 and CD comparisons against their bounds
BOUND_TOL = 1e-12


def design_of(data) -> np.ndarray:
    """Accept a Dataset-like object (with ``.design``) or a raw matrix."""
    return np.asarray(getattr(data, "design", data), dtype=float)


def names_of(data) -> list[str]:
    names = getattr(data, "names", None)
    if names is not None:
        return list(names)
    return [f"x{j}" for j in range(design_of(data).shape[1])]


@dataclass(frozen=True, order=True)
class ModelSubset:
    columns: tuple[int, ...]
    parent_id: str = field(default="", compare=False)

    def __post_init__(self):
        cols = tuple(int(c) for c in self.columns)
        if not cols or cols[0] != INTERCEPT:
            raise UsageError(f"model {cols} must contain the intercept column {INTERCEPT}")
        if any(b <= a for a, b in zip(cols, cols[1:])):
            raise UsageError(f"model columns {cols} must be strictly increasing")
        object.__setattr__(self, "columns", cols)

    @classmethod
    def of(cls, columns, parent_id: str = "") -> "ModelSubset":
        """Canonicalize any iterable of column indices (intercept added)."""
        return cls(tuple(sorted(set(int(c) for c in columns) | {INTERCEPT})), parent_id)

    @property
    def column_size(self) -> int:
        return len(self.columns)

    @property
    def variables(self) -> tuple[int, ...]:
        return self.columns[1:]

    def issubset(self, other: "ModelSubset") -> bool:
        return set(self.columns) <= set(other.columns)

    def __and__(self, other: "ModelSubset") -> "ModelSubset":
        return ModelSubset.of(set(self.columns) & set(other.columns), self.parent_id)

    def labels(self, names: Sequence[str]) -> list[str]:
        return [names[c] for c in self.columns]

    def validate(self, n_columns: int):
        if self.columns[-1] >= n_columns:
            raise UsageError(f"model {self.columns} out of range for {n_columns} columns")


@dataclass(frozen=True)
class ControlParams:
    """Screening and selection thresholds.

    ``c_q``/``d_R`` bound ``q^2`` and the collinearity CD; the equivalent
    index levels are ``c = 1/(1 - c_q)`` and ``d = 1/(1 - d_R)``. ``a`` is
    the PCC identifier threshold, ``b`` the PC contribution cutoff and
    ``e_norm`` an optional lower bound on ``||x_k||``.
    """

    c_q: float = 0.9
    d_R: float = 0.9
    a: float = 0.9
    b: float = 0.4
    e_norm: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.c_q < 1.0:
            raise UsageError(f"c_q must lie in [0, 1), got {self.c_q}")
        if not 0.0 <= self.d_R < 1.0:
            raise UsageError(f"d_R must lie in [0, 1), got {self.d_R}")
        if not 0.9 <= self.a <= 1.0:
            raise UsageError(f"a must lie in [0.9, 1], got {self.a}")
        if not 0.0 < self.b < 1.0:
            raise UsageError(f"b must lie in (0, 1), got {self.b}")
        if self.e_norm is not None and self.e_norm < 0.0:
            raise UsageError(f"e_norm must be non-negative, got {self.e_norm}")

    @property
    def c(self) -> float:
        return 1.0 / (1.0 - self.c_q)

    @property
    def d(self) -> float:
        return 1.0 / (1.0 - self.d_R)

    @staticmethod
    def level_to_bound(level: float) -> float:
        if level < 1.0:
            raise UsageError(f"index levels are at least 1, got {level}")
        return 1.0 - 1.0 / level

    @classmethod
    def resolve(cls, c_q=None, d_R=None, c=None, d=None, **kw) -> "ControlParams":
        """Build from either parameterization; inconsistent pairs are an error."""

        def pick(bound, level, label):
            if level is None:
                return 0.9 if bound is None else bound
            converted = cls.level_to_bound(level)
            if bound is not None and not math.isclose(bound, converted, rel_tol=1e-9, abs_tol=1e-12):
                raise UsageError(f"inconsistent thresholds for {label}: bound {bound} vs level {level}")
            return converted

        return cls(c_q=pick(c_q, c, "c"), d_R=pick(d_R, d, "d"), **kw)


def enumerate_models(total_columns: int, column_size: int) -> Iterator[ModelSubset]:
    """All submodels of one column size, lexicographically."""
    if not 2 <= column_size <= total_columns:
        raise SizeOutOfRange(f"column size {column_size} outside [2, {total_columns}]")
    for rest in itertools.combinations(range(1, total_columns), column_size - 1):
        yield ModelSubset((INTERCEPT,) + rest)


@dataclass(frozen=True)
class Violation:
    column: int
    kind: str  # "I", "C" or "norm"
    value: float
    limit: float


@dataclass(frozen=True)
class MembershipVerdict:
    model: ModelSubset
    member: bool
    violations: list[Violation] = field(default_factory=list)
    reason: str | None = None
    icri: tuple[float, float] | None = None

    def __bool__(self):
        return self.member


def in_class(model: ModelSubset, data, params: ControlParams) -> MembershipVerdict:
    x = design_of(data)
    model.validate(x.shape[1])
    if model.column_size < 2:
        return MembershipVerdict(model, True, icri=(1.0, 1.0))
    try:
        report = model_index_report(x[:, model.columns])
    except NumericalError as exc:
        return MembershipVerdict(model, False, reason=f"{type(exc).__name__}: {exc}")
    tol = 1e-12
    violations = []
    for rep in report.per_variable:
        col = model.columns[rep.variable_index]
        if rep.i_index > params.c * (1 + tol):
            violations.append(Violation(col, "I", rep.i_index, params.c))
        if rep.c_index > params.d * (1 + tol):
            violations.append(Violation(col, "C", rep.c_index, params.d))
        if params.e_norm is not None and rep.norm < params.e_norm:
            violations.append(Violation(col, "norm", rep.norm, params.e_norm))
    return MembershipVerdict(model, not violations, violations, icri=report.icri)


def icri(model: ModelSubset, data) -> tuple[float, float]:
    """``(max_k I_k, max_k C_k)`` over the model's non-intercept variables."""
    x = design_of(data)
    model.validate(x.shape[1])
    if model.column_size < 2:
        return (1.0, 1.0)
    return model_index_report(x[:, model.columns]).icri


class Accommodation(enum.Enum):
    BETTER = "better"
    WORSE = "worse"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def better_accommodates(m1_icri, m2_icri, same_column_size: bool = True) -> Accommodation:
    """Compare two ICRIs; BETTER means the first dominates the second."""
    if not same_column_size:
        raise DifferentColumnSizes("ICRIs are only comparable within one column size")
    c1, d1 = m1_icri
    c2, d2 = m2_icri
    if c1 == c2 and d1 == d2:
        return Accommodation.EQUAL
    if c1 <= c2 and d1 <= d2:
        return Accommodation.BETTER
    if c2 <= c1 and d2 <= d1:
        return Accommodation.WORSE
    return Accommodation.INCOMPARABLE


def admissible_set(models: Sequence[ModelSubset], data=None, icris=None) -> list[ModelSubset]:
    """Models of one column size that no peer better-accommodates."""
    models = list(models)
    if not models:
        return []
    sizes = {m.column_size for m in models}
    if len(sizes) > 1:
        raise MixedColumnSizes(f"models span column sizes {sorted(sizes)}")
    if icris is None:
        icris = [icri(m, data) for m in models]
    keep = []
    for i, m in enumerate(models):
        dominated = any(
            better_accommodates(icris[j], icris[i]) is Accommodation.BETTER
            for j in range(len(models))
            if j != i
        )
        if not dominated:
            keep.append(m)
    return keep


@dataclass(frozen=True)
class ClassMember:
    model: ModelSubset
    icri: tuple[float, float]
    admissible: bool
    maximal: bool
    repaired: bool = False


@dataclass
class SelectionClass:
    """A set of IC-controlled models with admissibility and maximality flags."""

    members: list[ClassMember]

    @property
    def models(self) -> list[ModelSubset]:
        return [m.model for m in self.members]

    def maximal_models(self) -> list[ModelSubset]:
        return [m.model for m in self.members if m.maximal]

    def admissible_models(self) -> list[ModelSubset]:
        return [m.model for m in self.members if m.admissible]

    def __len__(self):
        return len(self.members)

    def __contains__(self, model):
        return any(m.model == model for m in self.members)


def maximal_only(models: Sequence[ModelSubset]) -> list[ModelSubset]:
    """Drop duplicates and any model that is a proper subset of another."""
    uniq = sorted(set(models))
    sets = [set(m.columns) for m in uniq]
    return [m for m, s in zip(uniq, sets) if not any(s < t for t in sets)]


def build_selection_class(models, data, icris=None, repaired=()) -> SelectionClass:
    """Annotate models with ICRI, per-column-size admissibility and maximality."""
    models = sorted(set(models))
    if icris is None:
        icri_of = {m: icri(m, data) for m in models}
    else:
        icri_of = dict(icris)
    maximal = set(maximal_only(models))
    admissible = set()
    for size in sorted({m.column_size for m in models}):
        group = [m for m in models if m.column_size == size]
        admissible.update(admissible_set(group, icris=[icri_of[m] for m in group]))
    repaired = set(repaired)
    return SelectionClass(
        [
            ClassMember(m, icri_of[m], m in admissible, m in maximal, m in repaired)
            for m in models
        ]
    )


def brute_force_dcd(
    data, params: ControlParams, max_column_size: int | None = None, budget: int = DEFAULT_BUDGET
) -> SelectionClass:
    """Exact IC-controlled class by testing every submodel."""
    x = design_of(data)
    k = x.shape[1]
    top = k if max_column_size is None else min(max_column_size, k)
    total = sum(math.comb(k - 1, j - 1) for j in range(2, top + 1))
    if total > budget:
        raise BudgetExceeded(f"{total} submodels exceed the enumeration budget of {budget}")
    found = {}
    for size in range(2, top + 1):
        for model in enumerate_models(k, size):
            verdict = in_class(model, x, params)
            if verdict.member:
                found[model] = verdict.icri
    return build_selection_class(list(found), x, icris=found)


@dataclass(frozen=True)
class ScreenResult:
    survivors: ModelSubset
    dropped: list[tuple[int, str, float]]  # (column, reason, I-index or norm)


def screen_columns(data, c_q: float, e_norm: float | None = None, columns: ModelSubset | None = None) -> ScreenResult:
    """Drop variables with ``q^2 > c_q`` or, if given, ``||x_k|| < e_norm``."""
    x = design_of(data)
    pool = range(1, x.shape[1]) if columns is None else columns.variables
    keep, dropped = [], []
    for k in pool:
        col = x[:, k]
        q2 = float(col.sum()) ** 2 / (col.shape[0] * float(col @ col)) if np.any(col) else 1.0
        if q2 > c_q + BOUND_TOL:
            i_val = math.inf if q2 >= 1.0 else 1.0 / (1.0 - q2)
            dropped.append((k, "I", i_val))
        elif e_norm is not None and float(np.linalg.norm(col)) < e_norm:
            dropped.append((k, "norm", float(np.linalg.norm(col))))
        else:
            keep.append(k)
    return ScreenResult(ModelSubset.of(keep), dropped)
