"""Index dates and before/after observation windows."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Iterable

from .ingest import EventRecord, PrescriptionRecord
from .readcode import ReadCode

DEFAULT_WINDOW_DAYS = 60


@dataclass(frozen=True)
class CohortWindows:
    patient_id: str
    index_date: dt.date
    window_days: int = DEFAULT_WINDOW_DAYS

    @property
    def before_start(self) -> dt.date:
        return self.index_date - dt.timedelta(days=self.window_days)

    @property
    def before_end(self) -> dt.date:
        return self.index_date - dt.timedelta(days=1)

    @property
    def after_start(self) -> dt.date:
        return self.index_date + dt.timedelta(days=1)

    @property
    def after_end(self) -> dt.date:
        return self.index_date + dt.timedelta(days=self.window_days)

    def classify(self, date: dt.date) -> str | None:
        """``"before"``, ``"after"`` or None for a date relative to the index."""
        offset = (date - self.index_date).days
        if -self.window_days <= offset <= -1:
            return "before"
        if 1 <= offset <= self.window_days:
            return "after"
        return None


@dataclass
class AssignStats:
    before: int = 0
    after: int = 0
    outside_window: int = 0
    non_cohort: int = 0


def build_cohort(
    prescriptions: Iterable[PrescriptionRecord],
    window_days: int = DEFAULT_WINDOW_DAYS,
    patient_ids: Iterable[str] | None = None,
) -> list[CohortWindows]:
    """One window set per patient, indexed on the earliest prescription.

    Patients come out in order of first appearance in ``prescriptions``. If
    ``patient_ids`` is given, prescriptions for anyone else are skipped.
    """
    if window_days < 1:
        raise ValueError(f"window_days must be >= 1, got {window_days}")
    allowed = set(patient_ids) if patient_ids is not None else None
    first: dict[str, dt.date] = {}
    for rx in prescriptions:
        if allowed is not None and rx.patient_id not in allowed:
            continue
        current = first.get(rx.patient_id)
        if current is None or rx.date < current:
            first[rx.patient_id] = rx.date
    return [CohortWindows(pid, date, window_days) for pid, date in first.items()]


def assign_events(
    cohort: list[CohortWindows],
    events: Iterable[EventRecord],
    stats: AssignStats | None = None,
) -> tuple[list[tuple[str, ReadCode]], list[tuple[str, ReadCode]]]:
    """Split events into (before, after) lists of ``(patient_id, readcode)``."""
    stats = stats if stats is not None else AssignStats()
    by_patient = {w.patient_id: w for w in cohort}
    before: list[tuple[str, ReadCode]] = []
    after: list[tuple[str, ReadCode]] = []
    for ev in events:
        w = by_patient.get(ev.patient_id)
        if w is None:
            stats.non_cohort += 1
            continue
        side = w.classify(ev.date)
        if side == "before":
            before.append((ev.patient_id, ev.readcode))
            stats.before += 1
        elif side == "after":
            after.append((ev.patient_id, ev.readcode))
            stats.after += 1
        else:
            stats.outside_window += 1
    return before, after
