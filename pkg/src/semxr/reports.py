"""Uniform row-table reports and their CSV/JSON encodings.

Every subcommand's output is one table: a fixed column list plus rows of
scalar values.  CSV and JSON encode the same rows field-for-field (JSON is
an array of objects in column order), so either format parses back to the
same data.  Files are written atomically (temp + rename) so a failing run
never leaves a partial report behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path


@dataclass
class Table:
    columns: list[str]
    rows: list[dict]

    def __post_init__(self):
        for i, row in enumerate(self.rows):
            if set(row) != set(self.columns):
                raise ValueError(f"row {i} keys do not match the declared columns")


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))  # plain-float repr even for numpy scalars
    return str(value)


def to_csv(table: Table) -> str:
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(_csv_cell(row[c]) for c in table.columns))
    return "\n".join(lines) + "\n"


def to_json(table: Table) -> str:
    ordered = [{c: row[c] for c in table.columns} for row in table.rows]
    return json.dumps(ordered, indent=2) + "\n"


def encode(table: Table, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table)
    raise ValueError(f"unknown format {fmt!r}")


def write_atomic(path: str | Path, text: str) -> None:
    """Write the full text or nothing: temp file in place, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
