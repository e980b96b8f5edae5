"""Readers for the simulator's CSV outputs.

Every file starts with one ``#`` comment carrying the full resolved
parameter set (self-describing outputs), then a column-name row, then data.
Errors name the offending file and column so batch rendering failures are
diagnosable from the message alone.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RenderInputError",
    "Table",
    "read_table",
]


class RenderInputError(ValueError):
    """A CSV input is empty, malformed, or missing a required column."""


@dataclass(frozen=True)
class Table:
    """One parsed CSV: header parameters, column names, and rows as strings."""

    path: str
    params: dict[str, float]
    columns: tuple[str, ...]
    rows: list[dict[str, str]]

    def column(self, name: str) -> np.ndarray:
        """Numeric values of one column; raises a named error if absent."""
        if name not in self.columns:
            raise RenderInputError(
                f"{self.path}: missing required column {name!r} "
                f"(has {', '.join(self.columns)})")
        return np.array([float(row[name]) for row in self.rows])

    def strings(self, name: str) -> list[str]:
        if name not in self.columns:
            raise RenderInputError(
                f"{self.path}: missing required column {name!r}")
        return [row[name] for row in self.rows]

    def param(self, name: str) -> float:
        if name not in self.params:
            raise RenderInputError(
                f"{self.path}: header does not define parameter {name!r}")
        return self.params[name]


def _parse_header(line: str) -> dict[str, float]:
    params: dict[str, float] = {}
    for token in line.lstrip("#").split():
        key, _, value = token.partition("=")
        if not _:
            continue
        try:
            params[key] = float(value)
        except ValueError:
            pass  # non-numeric metadata such as status=completed
    return params


def read_table(path: str, allow_empty: bool = False) -> Table:
    """Parse one simulator CSV into a :class:`Table`."""
    try:
        with open(path, newline="") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise RenderInputError(f"{path}: {exc}")

    params: dict[str, float] = {}
    body: list[str] = []
    for line in lines:
        if line.startswith("#"):
            params.update(_parse_header(line))
        elif line.strip():
            body.append(line)
    if not body:
        raise RenderInputError(f"{path}: no column header row found")
    reader = csv.DictReader(body)
    columns = tuple(reader.fieldnames or ())
    rows = list(reader)
    if not rows and not allow_empty:
        raise RenderInputError(f"{path}: no data rows")
    return Table(path=path, params=params, columns=columns, rows=rows)
