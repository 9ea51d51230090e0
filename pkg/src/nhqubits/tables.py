"""Result tables and their CSV / JSON serialization.

CSV files carry ``# key: <json>`` metadata lines above a single header row.
Floats are written with 12 significant digits in scientific notation so that
identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

FLOAT_FORMAT = ".11e"


def fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    x = float(value)
    if math.isnan(x):
        return "nan"
    return format(x, FLOAT_FORMAT)


def _json_value(value):
    if isinstance(value, (str, bool, int)) or value is None:
        return value
    x = float(value)
    if not math.isfinite(x):
        return None
    return float(format(x, FLOAT_FORMAT))


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list]
    metadata: dict = field(default_factory=dict)
    name: str = "result"

    def __post_init__(self):
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise ValueError(f"row {i} has {len(row)} fields, expected {len(self.columns)}")

    def column(self, name: str) -> list:
        k = self.columns.index(name)
        return [row[k] for row in self.rows]

    def to_csv(self, include_metadata: bool = True) -> str:
        buf = io.StringIO()
        if include_metadata:
            for key, value in self.metadata.items():
                buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([fmt(v) for v in row])
        return buf.getvalue()

    def to_json_obj(self) -> dict:
        return {
            "name": self.name,
            "metadata": self.metadata,
            "columns": self.columns,
            "rows": [[_json_value(v) for v in row] for row in self.rows],
        }


def render(tables: list[ResultTable], fmt_name: str) -> str:
    """Serialize one or more tables; extra tables follow the first."""
    if fmt_name == "json":
        first = tables[0].to_json_obj()
        for extra in tables[1:]:
            first[extra.name] = {k: v for k, v in extra.to_json_obj().items() if k != "metadata"}
        return json.dumps(first, sort_keys=True, indent=1) + "\n"
    parts = [tables[0].to_csv()]
    for extra in tables[1:]:
        parts.append(f"# table: {json.dumps(extra.name)}\n" + extra.to_csv(include_metadata=False))
    return "\n".join(parts)


def write(tables: list[ResultTable], path: str | Path, fmt_name: str) -> list[Path]:
    """Write tables to ``path``; for CSV, extra tables go to ``<stem>_<name><suffix>``."""
    path = Path(path)
    if fmt_name == "json":
        path.write_text(render(tables, "json"))
        return [path]
    written = [path]
    path.write_text(tables[0].to_csv())
    for extra in tables[1:]:
        side = path.with_name(f"{path.stem}_{extra.name}{path.suffix or '.csv'}")
        side.write_text(extra.to_csv(include_metadata=False))
        written.append(side)
    return written


def read_csv(path_or_text: str | Path) -> ResultTable:
    """Parse a single-table CSV written by :meth:`ResultTable.to_csv`."""
    text = path_or_text
    if isinstance(path_or_text, Path) or "\n" not in str(path_or_text):
        text = Path(path_or_text).read_text()
    metadata, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            metadata[key] = json.loads(value)
        elif line.strip():
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = []
    for raw in reader:
        row = []
        for v in raw:
            try:
                row.append(float(v))
            except ValueError:
                row.append(v)
        rows.append(row)
    return ResultTable(columns, rows, metadata)
