"""Loaders for the patients / prescriptions / events tables.

All three are UTF-8 CSV or TSV with a header row; extra columns are ignored
and dates must be ISO ``YYYY-MM-DD``.
"""

from __future__ import annotations

import datetime as dt
import logging
import re
from dataclasses import dataclass
from typing import TextIO

from .errors import BadDate, EmptyToken, MalformedRow, TokenContainsWhitespace
from .readcode import ReadCode, parse_code, read_table

log = logging.getLogger(__name__)

_ISO_DATE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


@dataclass(frozen=True)
class PatientRecord:
    patient_id: str


@dataclass(frozen=True)
class PrescriptionRecord:
    patient_id: str
    drug_code: str
    date: dt.date


@dataclass(frozen=True)
class EventRecord:
    patient_id: str
    readcode: ReadCode
    date: dt.date


@dataclass
class LoadStats:
    """Row accounting for one table: ``parsed + filtered + duplicates == rows``."""

    rows: int = 0
    parsed: int = 0
    filtered: int = 0
    duplicates: int = 0


def parse_date(value: str, line: int) -> dt.date:
    if not _ISO_DATE.match(value):
        raise BadDate(line, value)
    try:
        return dt.date.fromisoformat(value)
    except ValueError:
        raise BadDate(line, value) from None


def _require(row: dict, name: str, line: int) -> str:
    value = row[name]
    if not value:
        raise MalformedRow(line, f"empty {name}")
    return value


def load_patients(stream: TextIO, stats: LoadStats | None = None) -> list[PatientRecord]:
    stats = stats if stats is not None else LoadStats()
    seen: set[str] = set()
    out = []
    for line, row in read_table(stream, ("patient_id",)):
        stats.rows += 1
        pid = _require(row, "patient_id", line)
        if pid in seen:
            stats.duplicates += 1
            continue
        seen.add(pid)
        out.append(PatientRecord(pid))
        stats.parsed += 1
    if stats.duplicates:
        log.warning("%d duplicate patient ids ignored", stats.duplicates)
    return out


def load_prescriptions(
    stream: TextIO, drug_filter: str, stats: LoadStats | None = None
) -> list[PrescriptionRecord]:
    """Prescriptions of exactly ``drug_filter``, sorted by (patient_id, date)."""
    if not drug_filter:
        raise ValueError("drug_filter must be non-empty")
    stats = stats if stats is not None else LoadStats()
    out = []
    for line, row in read_table(stream, ("patient_id", "drug_code", "date")):
        stats.rows += 1
        pid = _require(row, "patient_id", line)
        drug = _require(row, "drug_code", line)
        date = parse_date(row["date"], line)
        if drug != drug_filter:
            stats.filtered += 1
            continue
        out.append(PrescriptionRecord(pid, drug, date))
        stats.parsed += 1
    out.sort(key=lambda r: (r.patient_id, r.date))
    return out


def load_events(stream: TextIO, stats: LoadStats | None = None) -> list[EventRecord]:
    stats = stats if stats is not None else LoadStats()
    out = []
    codes: dict[str, ReadCode] = {}
    for line, row in read_table(stream, ("patient_id", "readcode", "date")):
        stats.rows += 1
        pid = _require(row, "patient_id", line)
        token = row["readcode"]
        code = codes.get(token)
        if code is None:
            try:
                code = parse_code(token)
            except (EmptyToken, TokenContainsWhitespace) as exc:
                raise MalformedRow(line, str(exc)) from None
            codes[token] = code
        out.append(EventRecord(pid, code, parse_date(row["date"], line)))
        stats.parsed += 1
    return out


def count_orphans(events: list[EventRecord], patients: list[PatientRecord]) -> int:
    """Events whose patient is missing from the patients table."""
    known = {p.patient_id for p in patients}
    return sum(1 for e in events if e.patient_id not in known)
