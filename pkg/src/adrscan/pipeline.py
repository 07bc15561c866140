"""End-to-end wiring: records -> cohort -> matrices -> ranked signals."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from .cohort import AssignStats, CohortWindows, assign_events, build_cohort
from .detect import DetectionConfig, SignalRow, detect_signals
from .featmat import (
    GroupedFeatureMatrix,
    build_patient_matrix,
    build_vocabulary,
    group_patients,
)
from .ingest import (
    EventRecord,
    LoadStats,
    PrescriptionRecord,
    load_events,
    load_patients,
    load_prescriptions,
)
from .readcode import CodeDictionary, load_dictionary

log = logging.getLogger(__name__)


@dataclass
class PipelineResult:
    rows: list[SignalRow]
    cohort: list[CohortWindows]
    X: GroupedFeatureMatrix
    Y: GroupedFeatureMatrix
    assign_stats: AssignStats
    load_stats: dict[str, LoadStats] = field(default_factory=dict)


def run_records(
    prescriptions: list[PrescriptionRecord],
    events: list[EventRecord],
    cfg: DetectionConfig,
    dictionary: CodeDictionary | None = None,
    patient_ids: list[str] | None = None,
) -> PipelineResult:
    cohort = build_cohort(prescriptions, cfg.window_days, patient_ids)
    astats = AssignStats()
    before, after = assign_events(cohort, events, astats)
    vocab = build_vocabulary(before, after, cfg.level_mode)
    A = build_patient_matrix(before, cohort, vocab)
    B = build_patient_matrix(after, cohort, vocab)
    X = group_patients(A, cfg.group_size, cfg.shuffle_seed)
    Y = group_patients(B, cfg.group_size, cfg.shuffle_seed)
    log.info(
        "cohort %d patients, vocabulary %d keys, grouped %dx%d (%d dropped)",
        len(cohort), len(vocab), X.n_groups, len(vocab), X.dropped,
    )
    rows = detect_signals(X, Y, dictionary, cfg)
    return PipelineResult(rows, cohort, X, Y, astats)


def run_files(
    prescriptions: str | Path,
    events: str | Path,
    drug: str,
    cfg: DetectionConfig,
    patients: str | Path | None = None,
    dictionary: str | Path | None = None,
) -> PipelineResult:
    stats = {"prescriptions": LoadStats(), "events": LoadStats()}
    patient_ids = None
    if patients is not None:
        stats["patients"] = LoadStats()
        with open(patients, encoding="utf-8", newline="") as fh:
            patient_ids = [p.patient_id for p in load_patients(fh, stats["patients"])]
    with open(prescriptions, encoding="utf-8", newline="") as fh:
        rx = load_prescriptions(fh, drug, stats["prescriptions"])
    with open(events, encoding="utf-8", newline="") as fh:
        ev = load_events(fh, stats["events"])
    code_dict = None
    if dictionary is not None:
        with open(dictionary, encoding="utf-8", newline="") as fh:
            code_dict = load_dictionary(fh)
    result = run_records(rx, ev, cfg, code_dict, patient_ids)
    result.load_stats = stats
    return result
