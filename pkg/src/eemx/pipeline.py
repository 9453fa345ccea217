"""End-to-end run: index table, I-screen, X-only selection, optional scoring."""

from __future__ import annotations

from dataclasses import dataclass, field

from eemx.dataset import Dataset
from eemx.errors import BudgetExceeded, NumericalError, UsageError
from eemx.indices import ModelIndexReport, model_index_report
from eemx.model_space import (
    DEFAULT_BUDGET,
    ControlParams,
    ModelSubset,
    SelectionClass,
    brute_force_dcd,
    build_selection_class,
    screen_columns,
)
from eemx.scoring import RankedScore, canonical_criterion, select_optimal
from eemx.vi_select import vi_search
from eemx.vr_select import PccClass, vr_trace

ALGORITHMS = ("vi", "vr", "brute")


@dataclass(frozen=True)
class DroppedColumn:
    column: int
    name: str
    reason: str  # "I" or "norm"
    value: float


@dataclass(frozen=True)
class ScreenReport:
    c_q: float
    survivors: ModelSubset
    dropped: tuple[DroppedColumn, ...]


def i_screen(dataset: Dataset, c_q: float, e_norm: float | None = None) -> ScreenReport:
    """Keep variables with ``q^2 <= c_q`` (and ``||x|| >= e_norm`` when set)."""
    res = screen_columns(dataset, c_q, e_norm)
    dropped = tuple(DroppedColumn(k, dataset.names[k], why, float(v)) for k, why, v in res.dropped)
    return ScreenReport(c_q, res.survivors, dropped)


@dataclass
class RunReport:
    dataset_id: str
    names: tuple[str, ...]
    params: ControlParams
    algorithm: str
    criterion: str
    index_table: ModelIndexReport | None
    screen: ScreenReport
    selection_class: SelectionClass
    pcc_classes: list[PccClass] = field(default_factory=list)
    scores: list[RankedScore] | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def best(self):
        return self.scores[0].score.model if self.scores else None


def _brute_on(dataset: Dataset, survivors: ModelSubset, params: ControlParams, budget: int):
    cols = list(survivors.columns)
    sub = dataset.design[:, cols]
    found = brute_force_dcd(sub, params, budget=budget)
    back = {m.model: ModelSubset(tuple(cols[c] for c in m.model.columns), dataset.id) for m in found.members}
    return [back[m] for m in found.models]


def run_pipeline(
    dataset: Dataset,
    params: ControlParams,
    algorithm: str = "vi",
    criterion: str = "adjusted_cd",
    max_enum: int = DEFAULT_BUDGET,
    score: bool = True,
) -> RunReport:
    if algorithm not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    criterion = canonical_criterion(criterion)
    warnings: list[str] = []
    x = dataset.design

    try:
        index_table = model_index_report(x, list(dataset.names))
    except NumericalError as exc:
        index_table = None
        warnings.append(f"full-model index table unavailable: {exc}")

    screen = i_screen(dataset, params.c_q, params.e_norm)
    classes: list[PccClass] = []
    repaired: set[ModelSubset] = set()
    models: list[ModelSubset] = []
    try:
        if algorithm == "vi":
            res = vi_search(x, params.d_R, params.c_q, screen.survivors, node_budget=max_enum)
            models, repaired = res.models, res.repaired
            if repaired:
                warnings.append(f"{len(repaired)} model(s) repaired after over-admission")
        elif algorithm == "vr":
            trace = vr_trace(x, params, screen.survivors)
            models, classes = trace.models, trace.classes
        else:
            models = _brute_on(dataset, screen.survivors, params, max_enum)
    except BudgetExceeded as exc:
        warnings.append(f"budget exceeded: {exc}")
        models = []

    models = [ModelSubset(m.columns, dataset.id) for m in models]
    repaired = {ModelSubset(m.columns, dataset.id) for m in repaired}
    selection = build_selection_class(models, x, repaired=repaired)
    if not selection.members:
        warnings.append("empty selection class")

    scores = None
    if score and dataset.response is not None and selection.members:
        try:
            scores = select_optimal(selection, dataset, criterion)
        except (NumericalError, UsageError) as exc:
            warnings.append(f"scoring failed: {exc}")
        else:
            if any(r.score.degenerate for r in scores):
                warnings.append("degenerate exact fit (rss = 0) in at least one model")

    return RunReport(
        dataset_id=dataset.id,
        names=tuple(dataset.names),
        params=params,
        algorithm=algorithm,
        criterion=criterion,
        index_table=index_table,
        screen=screen,
        selection_class=selection,
        pcc_classes=classes,
        scores=scores,
        warnings=warnings,
    )
