"""Named design matrices and CSV ingestion.

A loaded design always starts with the all-ones intercept column ``_const``.
Missing values are rejected rather than imputed.
"""

from __future__ import annotations

import csv
import hashlib
import io
import os
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from eemx.errors import DataError, DuplicateHeader, NonNumericCell, ParseError, RaggedRows, UsageError

INTERCEPT_NAME = "_const"
DATA_DIR_ENV = "EEMX_DATA_DIR"
_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


@dataclass(frozen=True, eq=False)
class Dataset:
    names: tuple[str, ...]
    design: np.ndarray
    response: np.ndarray | None = None
    response_name: str | None = None
    id: str = ""

    def __post_init__(self):
        x = np.asarray(self.design, dtype=float)
        if x.ndim != 2 or x.shape[1] != len(self.names):
            raise DataError(f"design shape {x.shape} does not match {len(self.names)} names")
        if len(set(self.names)) != len(self.names):
            raise DuplicateHeader("column names must be unique")
        if not np.all(x[:, 0] == 1.0):
            raise DataError("the first design column must be the all-ones intercept")
        if self.response is not None and np.shape(self.response) != (x.shape[0],):
            raise DataError("response length does not match the number of rows")
        object.__setattr__(self, "design", x)
        object.__setattr__(self, "names", tuple(self.names))
        if not self.id:
            object.__setattr__(self, "id", content_hash(self.names, x, self.response, self.response_name))

    @classmethod
    def from_arrays(cls, columns, names=None, response=None, response_name=None) -> "Dataset":
        """Prepend the intercept to raw variable columns."""
        cols = np.asarray(columns, dtype=float)
        if cols.ndim != 2:
            raise DataError("columns must be a 2-D array")
        if names is None:
            names = [f"x{j + 1}" for j in range(cols.shape[1])]
        design = np.column_stack([np.ones(cols.shape[0]), cols])
        resp = None if response is None else np.asarray(response, dtype=float)
        return cls((INTERCEPT_NAME, *names), design, resp, response_name)

    @property
    def n_obs(self) -> int:
        return self.design.shape[0]

    @property
    def n_columns(self) -> int:
        return self.design.shape[1]

    def column(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UsageError(f"no column named {name!r}") from None


def content_hash(names, design, response=None, response_name=None) -> str:
    h = hashlib.sha256()
    h.update("\x1f".join(names).encode())
    h.update(np.ascontiguousarray(design, dtype="<f8").tobytes())
    if response is not None:
        h.update((response_name or "").encode())
        h.update(np.ascontiguousarray(response, dtype="<f8").tobytes())
    return h.hexdigest()[:16]


def _parse_cell(text: str, row: int, col: str) -> float:
    cell = text.strip()
    if not _NUMBER.match(cell):
        what = "blank cell" if not cell else f"non-numeric cell {cell!r}"
        raise NonNumericCell(what, row=row, col=col)
    return float(cell)


def parse_csv(text: str, response_column: str | None = None) -> Dataset:
    rows = list(csv.reader(io.StringIO(text)))
    while rows and not any(c.strip() for c in rows[-1]):
        rows.pop()
    if not rows:
        raise ParseError("file is empty")
    header = [h.strip() for h in rows[0]]
    seen = {INTERCEPT_NAME}
    for j, name in enumerate(header):
        if not name:
            raise ParseError("empty column name", row=1, col=j + 1)
        if name in seen:
            raise DuplicateHeader(f"duplicate column name {name!r}", row=1, col=j + 1)
        seen.add(name)
    if len(rows) < 2:
        raise ParseError("no data rows")
    values = np.empty((len(rows) - 1, len(header)))
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise RaggedRows(f"expected {len(header)} cells, found {len(row)}", row=i)
        for j, cell in enumerate(row):
            values[i - 2, j] = _parse_cell(cell, i, header[j])

    response = None
    if response_column is not None:
        if response_column not in header:
            raise UsageError(f"response column {response_column!r} not in header")
        r = header.index(response_column)
        response = values[:, r].copy()
        values = np.delete(values, r, axis=1)
        header = header[:r] + header[r + 1 :]
    for j, name in enumerate(header):
        if np.all(values[:, j] == 1.0):
            raise DataError(f"column {name!r} duplicates the intercept")
    return Dataset.from_arrays(values, header, response, response_column)


def load_csv(path, response_column: str | None = None) -> Dataset:
    """Read a comma-separated numeric file with a header row."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path} is not valid UTF-8") from exc
    return parse_csv(text, response_column)


def data_dir() -> Path | None:
    """Directory searched for bundled assets (``EEMX_DATA_DIR`` overrides)."""
    env = os.environ.get(DATA_DIR_ENV)
    if env:
        return Path(env)
    try:
        return Path(str(resources.files("eemx") / "data"))
    except (ModuleNotFoundError, TypeError):  # pragma: no cover
        return None


def resolve_path(name) -> Path:
    """An existing path, else a bundled asset of that name (``.csv`` optional)."""
    p = Path(name)
    if p.exists():
        return p
    base = data_dir()
    if base is not None:
        for cand in (base / p.name, base / f"{p.name}.csv"):
            if cand.exists():
                return cand
    return p


def bundled_gasoline() -> Dataset | None:
    """The bundled car gasoline-consumption data, or ``None`` if absent."""
    path = resolve_path("gasoline.csv")
    if not path.exists():
        return None
    return load_csv(path, "Y")
