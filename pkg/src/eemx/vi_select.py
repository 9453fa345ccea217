"""Variable-increasing search for maximal IC-controlled models.

Starting from the intercept, a model grows one variable at a time. A
variable may join the current set ``A`` when its CD on ``A`` is at most
``d_R``; for the first addition (``A = {e}``) that CD is ``q^2`` and the
bound is ``min(c_q, d_R)``. Every admissible addition opens a branch and a
branch ends when nothing more can join. Sets are memoized, so the search
visits each reachable set once and the result does not depend on the order
in which columns are tried.

Adding a variable can raise the CD of variables already in the set, so a
terminal set may violate the collinearity bound for an earlier member. Such
sets are repaired by dropping a variable that could have been the last one
added, and the repaired results are flagged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from eemx.errors import BudgetExceeded, NumericalError, UsageError
from eemx.indices import collinearity_cd, q_squared
from eemx.model_space import BOUND_TOL, INTERCEPT, ModelSubset, design_of, maximal_only
from eemx.numerics import cd_of_regression

DEFAULT_NODE_BUDGET = 2**20


@dataclass(frozen=True)
class ViState:
    selected: ModelSubset
    available: frozenset[int]

    def __post_init__(self):
        if INTERCEPT in self.available or set(self.selected.columns) & self.available:
            raise UsageError("available suffixes must be disjoint from the selected set")

    @property
    def depth(self) -> int:
        return self.selected.column_size


@dataclass
class ViResult:
    models: list[ModelSubset]
    repaired: set[ModelSubset] = field(default_factory=set)
    visited: int = 0
    screened_out: list[int] = field(default_factory=list)


def incremental_cd(candidate: int, selected: ModelSubset, data) -> float:
    """CD of ``x_candidate`` on the columns of ``selected``.

    With only the intercept selected this is ``q^2`` of the candidate.
    """
    x = design_of(data)
    if candidate in selected.columns:
        raise UsageError(f"column {candidate} is already selected")
    if selected.column_size == 1:
        return q_squared(x[:, candidate])
    cols = list(selected.columns) + [candidate]
    return cd_of_regression(len(cols) - 1, x[:, cols])


def max_collinearity_cd(model: ModelSubset, data) -> float:
    """Largest collinearity CD over the model's variables (1 if singular)."""
    if model.column_size < 2:
        return 0.0
    sub = design_of(data)[:, model.columns]
    try:
        return max(collinearity_cd(j, sub) for j in range(1, sub.shape[1]))
    except NumericalError:
        return 1.0


def vi_search(
    data,
    d_R: float,
    c_q: float = 1.0,
    columns: ModelSubset | None = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> ViResult:
    """Run the branching search and report repairs and node counts.

    Columns with ``q^2 > c_q`` (or outside ``columns``) never enter.
    """
    if not 0.0 <= d_R < 1.0:
        raise UsageError(f"d_R must lie in [0, 1), got {d_R}")
    if not 0.0 <= c_q <= 1.0:
        raise UsageError(f"c_q must lie in [0, 1], got {c_q}")
    x = design_of(data)
    pool = range(1, x.shape[1]) if columns is None else columns.variables
    q2 = {k: q_squared(x[:, k]) for k in pool}
    screened_out = [k for k in pool if q2[k] > c_q + BOUND_TOL]
    first_bound = min(c_q, d_R)

    root = ModelSubset((INTERCEPT,))
    candidates = [k for k in pool if q2[k] <= c_q + BOUND_TOL]
    visited: set[ModelSubset] = {root}
    terminal: list[ModelSubset] = []
    stack = [root]
    while stack:
        current = stack.pop()
        grown = []
        for k in candidates:
            if k in current.columns:
                continue
            if current.column_size == 1:
                ok = q2[k] <= first_bound + BOUND_TOL
            else:
                ok = incremental_cd(k, current, x) <= d_R + BOUND_TOL
            if ok:
                grown.append(ModelSubset.of(current.columns + (k,)))
        if not grown:
            terminal.append(current)
            continue
        for child in reversed(grown):
            if child not in visited:
                visited.add(child)
                if len(visited) > node_budget:
                    raise BudgetExceeded(f"search visited more than {node_budget} sets")
                stack.append(child)

    ok_cache: dict[ModelSubset, bool] = {}

    def compliant(m: ModelSubset) -> bool:
        if m not in ok_cache:
            ok_cache[m] = max_collinearity_cd(m, x) <= d_R + BOUND_TOL
        return ok_cache[m]

    results: set[ModelSubset] = set()
    repaired: set[ModelSubset] = set()
    for t in terminal:
        if t.column_size < 2:
            continue
        if compliant(t):
            results.add(t)
            continue
        # drop any variable that could have been the last one admitted
        frontier = {t}
        while frontier:
            nxt = set()
            for s in frontier:
                for k in s.variables:
                    parent = ModelSubset(tuple(c for c in s.columns if c != k))
                    if parent not in visited or parent.column_size < 2:
                        continue
                    if compliant(parent):
                        results.add(parent)
                        repaired.add(parent)
                    else:
                        nxt.add(parent)
            frontier = nxt

    models = maximal_only(list(results))
    direct = set(terminal)
    return ViResult(
        models=models,
        repaired={m for m in models if m in repaired and m not in direct},
        visited=len(visited),
        screened_out=screened_out,
    )


def vi_algorithm(data, d_R: float, c_q: float = 1.0, columns: ModelSubset | None = None) -> list[ModelSubset]:
    """Maximal models found by the variable-increasing search, sorted."""
    return vi_search(data, d_R, c_q, columns).models
