"""Rendering of run reports as aligned text or strict JSON.

JSON keeps full float precision (non-finite values become the strings
``"inf"``, ``"-inf"`` and ``"nan"``) and reads back into an equal report.
Text output shows four significant digits.
"""

from __future__ import annotations

import json
import math
from typing import Any

from eemx.indices import ModelIndexReport, VariableIndexReport
from eemx.model_space import ClassMember, ControlParams, ModelSubset, SelectionClass
from eemx.pipeline import DroppedColumn, RunReport, ScreenReport
from eemx.scoring import CoefficientScore, ModelScore, RankedScore
from eemx.vr_select import PccClass

FORMAT_VERSION = 1


def _num(v: float) -> float | str:
    v = float(v)
    if math.isfinite(v):
        return v
    return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")


def _unnum(v) -> float:
    return float(v)  # float() accepts "inf", "-inf" and "nan"


def _model(m: ModelSubset, names) -> dict:
    return {"columns": list(m.columns), "labels": m.labels(names), "parent_id": m.parent_id}


def _unmodel(d) -> ModelSubset:
    return ModelSubset(tuple(d["columns"]), d.get("parent_id", ""))


def variable_dict(r: VariableIndexReport) -> dict:
    return {
        "variable_index": r.variable_index,
        "name": r.name,
        **{k: _num(getattr(r, k)) for k in _VAR_FLOATS},
    }


_VAR_FLOATS = (
    "q_squared",
    "i_index",
    "r_check_squared",
    "c_index",
    "h_index",
    "mean",
    "std_dev",
    "norm_squared",
    "regression_cd",
    "vif",
    "eef_squared",
)


def _unvar(d) -> VariableIndexReport:
    return VariableIndexReport(d["variable_index"], d["name"], **{k: _unnum(d[k]) for k in _VAR_FLOATS})


def _score(s: ModelScore, names) -> dict:
    return {
        "model": _model(s.model, names),
        **{k: _num(getattr(s, k)) for k in ("rss", "rse", "cd", "adjusted_cd", "aic", "bic", "mean_h_scaled")},
        "degenerate": s.degenerate,
        "per_coef": [
            {
                "column": c.column,
                "name": names[c.column],
                "coefficient": _num(c.coefficient),
                "se": _num(c.se),
                "pse": None if c.pse is None else _num(c.pse),
            }
            for c in s.per_coef
        ],
    }


def _unscore(d) -> ModelScore:
    return ModelScore(
        model=_unmodel(d["model"]),
        **{k: _unnum(d[k]) for k in ("rss", "rse", "cd", "adjusted_cd", "aic", "bic")},
        per_coef=tuple(
            CoefficientScore(
                c["column"], _unnum(c["coefficient"]), _unnum(c["se"]), None if c["pse"] is None else _unnum(c["pse"])
            )
            for c in d["per_coef"]
        ),
        mean_h_scaled=_unnum(d["mean_h_scaled"]),
        degenerate=d["degenerate"],
    )


def to_dict(report: RunReport) -> dict[str, Any]:
    names = report.names
    p = report.params
    it = report.index_table
    return {
        "format_version": FORMAT_VERSION,
        "dataset_id": report.dataset_id,
        "names": list(names),
        "params": {
            "c_q": _num(p.c_q),
            "d_R": _num(p.d_R),
            "c": _num(p.c),
            "d": _num(p.d),
            "a": _num(p.a),
            "b": _num(p.b),
            "e_norm": None if p.e_norm is None else _num(p.e_norm),
        },
        "algorithm": report.algorithm,
        "criterion": report.criterion,
        "index_table": None
        if it is None
        else {
            "per_variable": [variable_dict(r) for r in it.per_variable],
            "mean_h": _num(it.mean_h),
            "icri": [_num(v) for v in it.icri],
            "column_size": it.column_size,
            "names": list(it.names),
        },
        "screen": {
            "c_q": _num(report.screen.c_q),
            "survivors": _model(report.screen.survivors, names),
            "dropped": [
                {"column": d.column, "name": d.name, "reason": d.reason, "value": _num(d.value)}
                for d in report.screen.dropped
            ],
        },
        "selection_class": [
            {
                "model": _model(m.model, names),
                "column_size": m.model.column_size,
                "icri": [_num(v) for v in m.icri],
                "admissible": m.admissible,
                "maximal": m.maximal,
                "repaired": m.repaired,
            }
            for m in report.selection_class.members
        ],
        "pcc_classes": [
            {
                "component_index": c.component_index,
                "eigenvalue": _num(c.eigenvalue),
                "contribution": _num(c.contribution),
                "members": [{"column": k, "name": names[k], "identifier": _num(v)} for k, v in c.members],
                "threshold": _num(c.threshold),
            }
            for c in report.pcc_classes
        ],
        "scores": None
        if report.scores is None
        else [{"rank": r.rank, "best": r.best, **_score(r.score, names)} for r in report.scores],
        "warnings": list(report.warnings),
    }


def from_dict(d: dict[str, Any]) -> RunReport:
    p = d["params"]
    params = ControlParams(
        c_q=_unnum(p["c_q"]),
        d_R=_unnum(p["d_R"]),
        a=_unnum(p["a"]),
        b=_unnum(p["b"]),
        e_norm=None if p["e_norm"] is None else _unnum(p["e_norm"]),
    )
    it = d["index_table"]
    index_table = (
        None
        if it is None
        else ModelIndexReport(
            per_variable=[_unvar(r) for r in it["per_variable"]],
            mean_h=_unnum(it["mean_h"]),
            icri=tuple(_unnum(v) for v in it["icri"]),
            column_size=it["column_size"],
            names=list(it["names"]),
        )
    )
    s = d["screen"]
    screen = ScreenReport(
        _unnum(s["c_q"]),
        _unmodel(s["survivors"]),
        tuple(DroppedColumn(x["column"], x["name"], x["reason"], _unnum(x["value"])) for x in s["dropped"]),
    )
    selection = SelectionClass(
        [
            ClassMember(
                _unmodel(m["model"]), tuple(_unnum(v) for v in m["icri"]), m["admissible"], m["maximal"], m["repaired"]
            )
            for m in d["selection_class"]
        ]
    )
    classes = [
        PccClass(
            component_index=c["component_index"],
            eigenvalue=_unnum(c["eigenvalue"]),
            contribution=_unnum(c["contribution"]),
            members=tuple((m["column"], _unnum(m["identifier"])) for m in c["members"]),
            threshold=_unnum(c["threshold"]),
        )
        for c in d["pcc_classes"]
    ]
    scores = (
        None
        if d["scores"] is None
        else [RankedScore(r["rank"], _unscore(r), r["best"]) for r in d["scores"]]
    )
    return RunReport(
        dataset_id=d["dataset_id"],
        names=tuple(d["names"]),
        params=params,
        algorithm=d["algorithm"],
        criterion=d["criterion"],
        index_table=index_table,
        screen=screen,
        selection_class=selection,
        pcc_classes=classes,
        scores=scores,
        warnings=list(d["warnings"]),
    )


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def to_json(report: RunReport) -> str:
    return dumps(to_dict(report))


def from_json(text: str) -> RunReport:
    return from_dict(json.loads(text))


def fmt(v) -> str:
    """Four significant digits; integers and non-finite values as-is."""
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if not math.isfinite(v):
        return str(v)
    return f"{v:.4g}"


def table(headers, rows) -> str:
    cells = [[str(h) for h in headers]] + [[c if isinstance(c, str) else fmt(c) for c in r] for r in rows]
    widths = [max(len(r[j]) for r in cells) for j in range(len(headers))]
    lines = []
    for i, r in enumerate(cells):
        lines.append("  ".join(c.rjust(w) if i and j else c.ljust(w) for j, (c, w) in enumerate(zip(r, widths))).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def index_table_text(it: ModelIndexReport) -> str:
    rows = [
        [r.name, r.q_squared, r.i_index, r.r_check_squared, r.c_index, r.h_index, r.std_dev, r.norm]
        for r in it.per_variable
    ]
    body = table(["variable", "q2", "I", "R2", "C", "H", "s", "norm"], rows)
    return f"{body}\nICRI (max I, max C) = ({fmt(it.icri[0])}, {fmt(it.icri[1])}); mean H = {fmt(it.mean_h)}"


def screen_text(screen: ScreenReport, names) -> str:
    kept = ", ".join(names[c] for c in screen.survivors.variables) or "(none)"
    lines = [f"I-screen at c_q = {fmt(screen.c_q)}: kept {kept}"]
    for d in screen.dropped:
        label = "I" if d.reason == "I" else "norm"
        lines.append(f"  dropped {d.name} ({label} = {fmt(d.value)})")
    return "\n".join(lines)


def _labels(m: ModelSubset, names) -> str:
    return "{" + ", ".join(m.labels(names)) + "}"


def render_text(report: RunReport) -> str:
    names = report.names
    p = report.params
    out = [
        f"dataset {report.dataset_id}  algorithm {report.algorithm}  criterion {report.criterion}",
        f"c_q = {fmt(p.c_q)} (c = {fmt(p.c)})  d_R = {fmt(p.d_R)} (d = {fmt(p.d)})  a = {fmt(p.a)}  b = {fmt(p.b)}"
        + (f"  e = {fmt(p.e_norm)}" if p.e_norm is not None else ""),
        "",
    ]
    if report.index_table is not None:
        out += ["Full-model indices", index_table_text(report.index_table), ""]
    out += [screen_text(report.screen, names), ""]
    if report.pcc_classes:
        rows = [
            [str(c.component_index), c.eigenvalue, c.contribution, ", ".join(f"{names[k]} ({fmt(v)})" for k, v in c.members) or "-"]
            for c in report.pcc_classes
        ]
        out += ["Collinearity classes", table(["component", "lambda", "share", "members (d)"], rows), ""]
    rows = [
        [_labels(m.model, names), m.model.column_size, m.icri[0], m.icri[1], m.admissible, m.maximal, m.repaired]
        for m in report.selection_class.members
    ]
    out += ["Selection class", table(["model", "J", "max I", "max C", "admissible", "maximal", "repaired"], rows), ""]
    if report.scores is not None:
        rows = [
            [str(r.rank), _labels(r.score.model, names), r.score.rse, r.score.cd, r.score.adjusted_cd, r.score.aic, r.score.bic]
            for r in report.scores
        ]
        out += ["Scores (best first)", table(["rank", "model", "rse", "cd", "adj cd", "aic", "bic"], rows), ""]
    for w in report.warnings:
        out.append(f"warning: {w}")
    return "\n".join(out).rstrip() + "\n"
