"""Rendering of ranked signal tables as text, CSV or Markdown."""

from __future__ import annotations

import csv
import io
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum

from .detect import SignalRow

HEADER = ("Rank", "Readcodes", "Medical events", "NB", "NA", "R1", "R2", "p")
_NUMERIC = {"Rank", "NB", "NA", "R1", "R2", "p"}


class Format(str, Enum):
    TEXT = "text"
    CSV = "csv"
    MARKDOWN = "markdown"


def fmt2(value: float) -> str:
    """Two decimals, rounding halves away from zero (as printed tables do)."""
    return str(Decimal(repr(float(value))).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def fmt_p(p: float) -> str:
    return f"{p:.2e}"


def row_cells(row: SignalRow) -> list[str]:
    return [
        str(row.rank),
        row.key,
        row.description,
        str(row.NB),
        str(row.NA),
        fmt2(row.R1),
        fmt2(row.R2_percent),
        fmt_p(row.p_value),
    ]


def _render_text(table: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in table) for i in range(len(HEADER))]
    lines = []
    for r in table:
        cells = [
            c.rjust(w) if HEADER[i] in _NUMERIC else c.ljust(w)
            for i, (c, w) in enumerate(zip(r, widths))
        ]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def _md_escape(cell: str) -> str:
    return cell.replace("|", "\\|")


def _render_markdown(table: list[list[str]]) -> str:
    head, *body = table
    align = ["---:" if h in _NUMERIC else ":---" for h in HEADER]
    lines = ["| " + " | ".join(head) + " |", "| " + " | ".join(align) + " |"]
    lines += ["| " + " | ".join(_md_escape(c) for c in r) + " |" for r in body]
    return "\n".join(lines) + "\n"


def render(rows: list[SignalRow], format: Format | str = Format.TEXT) -> str:
    table = [list(HEADER)] + [row_cells(r) for r in rows]
    format = Format(format)
    if format is Format.CSV:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\r\n").writerows(table)
        return buf.getvalue()
    if format is Format.MARKDOWN:
        return _render_markdown(table)
    return _render_text(table)


def parse_csv(text: str) -> list[SignalRow]:
    """Inverse of ``render(rows, "csv")`` to printed precision."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != HEADER:
        raise ValueError(f"unexpected header {header}")
    return [
        SignalRow(int(r[0]), r[1], r[2], int(r[3]), int(r[4]), float(r[5]), float(r[6]), float(r[7]))
        for r in reader
    ]
