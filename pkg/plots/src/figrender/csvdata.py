"""Reader for anirabi CLI tables: '#'-comment metadata header plus CSV body."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


class DataError(Exception):
    """Input file missing, malformed, or inconsistent with a recipe."""


@dataclass
class Table:
    meta: dict
    columns: list[str]
    rows: list[list[str]]

    def floats(self, column: str) -> list[float]:
        i = self.columns.index(column)
        return [float(r[i]) for r in self.rows]

    def strings(self, column: str) -> list[str]:
        i = self.columns.index(column)
        return [r[i] for r in self.rows]


def read_table(path) -> Table:
    path = Path(path)
    if not path.exists():
        raise DataError(f"input file {path} does not exist")
    meta: dict = {}
    columns = None
    rows = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep:
                meta[key.strip()] = value.strip()
            continue
        parts = line.split(",")
        if columns is None:
            columns = parts
            continue
        if len(parts) != len(columns):
            raise DataError(f"{path}:{lineno}: expected {len(columns)} fields")
        rows.append(parts)
    if columns is None or not rows:
        raise DataError(f"{path}: no data rows")
    return Table(meta=meta, columns=columns, rows=rows)


def require(table: Table, path, *, command=None, columns=(), epsilon=None):
    """Check a table against a recipe's expectations; DataError on mismatch."""
    if command is not None and table.meta.get("command") != command:
        raise DataError(
            f"{path}: produced by {table.meta.get('command')!r}, "
            f"recipe expects {command!r} output"
        )
    for col in columns:
        if col not in table.columns:
            raise DataError(f"{path}: missing column {col!r}")
    if epsilon == "zero":
        if float(table.meta.get("epsilon", "nan")) != 0.0:
            raise DataError(f"{path}: recipe expects an epsilon = 0 run")
    elif epsilon == "nonzero":
        if not abs(float(table.meta.get("epsilon", "0"))) > 0.0:
            raise DataError(f"{path}: recipe expects an epsilon != 0 run")
