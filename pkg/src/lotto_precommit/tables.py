"""Deterministic delimited output: 9 significant digits, dot decimal, no locale."""

from __future__ import annotations

import io
from typing import Iterable, Mapping


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if value != value:  # NaN
            return ""
        return f"{value:.9g}"
    return str(value)


def render_csv(columns: Iterable[str], rows: Iterable[Mapping]) -> str:
    columns = list(columns)
    out = io.StringIO()
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(format_value(row.get(col)) for col in columns) + "\n")
    return out.getvalue()


def write_csv(path: str, columns: Iterable[str], rows: Iterable[Mapping]) -> None:
    text = render_csv(columns, rows)
    with open(path, "w", newline="") as handle:
        handle.write(text)
