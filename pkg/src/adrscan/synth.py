"""Synthetic exposed cohorts with planted before/after effects.

Each patient gets a single prescription. For every vocabulary code the
patient has the event in the before window with probability ``baseline``
and in the after window with probability ``min(1, baseline * multiplier)``;
each occurrence becomes one event row on a uniformly drawn window day.
"""

from __future__ import annotations

import csv
import datetime as dt
import string
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidMultiplier, InvalidPrevalence, ValidationError

DEFAULT_DRUG = "simvastatin"
FILENAMES = {
    "patients": "patients.csv",
    "prescriptions": "prescriptions.csv",
    "events": "events.csv",
    "ledger": "ledger.csv",
}


@dataclass
class SynthSpec:
    n_patients: int
    vocabulary: list[tuple[str, float]]
    planted_effects: list[tuple[str, float]] = field(default_factory=list)
    window_days: int = 60
    seed: int = 0
    drug_code: str = DEFAULT_DRUG
    start_date: dt.date = dt.date(2005, 1, 1)
    span_days: int = 5 * 365

    def validate(self) -> None:
        if self.n_patients < 1:
            raise ValidationError(f"n_patients must be >= 1, got {self.n_patients}")
        if self.window_days < 1:
            raise ValidationError(f"window_days must be >= 1, got {self.window_days}")
        if self.span_days < 1:
            raise ValidationError(f"span_days must be >= 1, got {self.span_days}")
        seen = set()
        for code, prev in self.vocabulary:
            if code in seen:
                raise ValidationError(f"duplicate vocabulary code {code!r}")
            seen.add(code)
            if not 0.0 <= prev <= 1.0:
                raise InvalidPrevalence(f"prevalence for {code} must be in [0, 1], got {prev}")
        for code, mult in self.planted_effects:
            if code not in seen:
                raise ValidationError(f"planted effect for unknown code {code!r}")
            if not mult >= 0.0 or not np.isfinite(mult):
                raise InvalidMultiplier(f"multiplier for {code} must be >= 0, got {mult}")

    def multipliers(self) -> dict[str, float]:
        return dict(self.planted_effects)


@dataclass(frozen=True)
class LedgerEntry:
    code: str
    multiplier: float
    true_NB: int
    true_NA: int


@dataclass
class SynthData:
    patients: list[str]
    prescriptions: list[tuple[str, str, dt.date]]
    events: list[tuple[str, str, dt.date]]
    ledger: list[LedgerEntry]


_STEM_CHARS = string.digits + string.ascii_uppercase


def make_codes(n: int, rng: np.random.Generator) -> list[str]:
    """``n`` distinct 7-character level-5 style codes, e.g. ``K3F2A00``."""
    codes: set[str] = set()
    out = []
    while len(out) < n:
        chars = rng.choice(list(_STEM_CHARS), size=5)
        code = "".join(chars) + "00"
        if code not in codes:
            codes.add(code)
            out.append(code)
    return sorted(out)


def random_spec(
    n_patients: int,
    n_codes: int,
    n_planted: int = 0,
    multiplier: float = 1.0,
    baseline_range: tuple[float, float] = (0.001, 0.02),
    planted_baseline_range: tuple[float, float] = (0.01, 0.03),
    window_days: int = 60,
    seed: int = 0,
    drug_code: str = DEFAULT_DRUG,
) -> SynthSpec:
    """Spec with a random vocabulary; the first ``n_planted`` codes (in draw
    order) get baselines from ``planted_baseline_range`` and ``multiplier``."""
    if n_codes < 0 or n_planted < 0 or n_planted > n_codes:
        raise ValidationError("need 0 <= n_planted <= n_codes")
    rng = np.random.default_rng([seed, 1])
    codes = make_codes(n_codes, rng)
    order = rng.permutation(n_codes)
    planted = {codes[i] for i in order[:n_planted]}
    lo, hi = baseline_range
    plo, phi = planted_baseline_range
    vocab = []
    for code in codes:
        if code in planted:
            prev = float(rng.uniform(plo, phi))
        else:
            prev = float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
        vocab.append((code, round(prev, 6)))
    effects = [(c, multiplier) for c in codes if c in planted]
    return SynthSpec(n_patients, vocab, effects, window_days, seed, drug_code)


def generate(spec: SynthSpec) -> SynthData:
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    n = spec.n_patients
    w = spec.window_days
    width = len(str(n))
    patients = [f"P{i:0{width}d}" for i in range(1, n + 1)]
    index_offsets = rng.integers(0, spec.span_days, size=n)
    index_dates = [spec.start_date + dt.timedelta(days=int(o)) for o in index_offsets]
    prescriptions = [(pid, spec.drug_code, d) for pid, d in zip(patients, index_dates)]

    mult = spec.multipliers()
    rows_patient, rows_code, rows_offset = [], [], []
    ledger = []
    for ci, (code, prev) in enumerate(spec.vocabulary):
        m = mult.get(code, 1.0)
        p_after = min(1.0, prev * m)
        before = np.flatnonzero(rng.random(n) < prev)
        after = np.flatnonzero(rng.random(n) < p_after)
        before_days = -rng.integers(1, w + 1, size=before.size)
        after_days = rng.integers(1, w + 1, size=after.size)
        for idx, days in ((before, before_days), (after, after_days)):
            rows_patient.append(idx)
            rows_code.append(np.full(idx.size, ci))
            rows_offset.append(index_offsets[idx] + days)
        ledger.append(LedgerEntry(code, m, int(before.size), int(after.size)))

    if rows_patient:
        pat = np.concatenate(rows_patient)
        cod = np.concatenate(rows_code)
        off = np.concatenate(rows_offset)
    else:
        pat = cod = off = np.empty(0, dtype=np.int64)
    order = np.lexsort((cod, off, pat))
    codes = [c for c, _ in spec.vocabulary]
    events = [
        (patients[p], codes[c], spec.start_date + dt.timedelta(days=int(o)))
        for p, c, o in zip(pat[order].tolist(), cod[order].tolist(), off[order].tolist())
    ]
    return SynthData(patients, prescriptions, events, ledger)


def write_tables(data: SynthData, out_dir: str | Path) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {k: out_dir / v for k, v in FILENAMES.items()}

    def _write(path, header, rows):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)

    _write(paths["patients"], ["patient_id"], ([p] for p in data.patients))
    _write(
        paths["prescriptions"],
        ["patient_id", "drug_code", "date"],
        ((p, d, date.isoformat()) for p, d, date in data.prescriptions),
    )
    _write(
        paths["events"],
        ["patient_id", "readcode", "date"],
        ((p, c, date.isoformat()) for p, c, date in data.events),
    )
    _write(
        paths["ledger"],
        ["code", "multiplier", "true_NB", "true_NA"],
        ((e.code, repr(e.multiplier), e.true_NB, e.true_NA) for e in data.ledger),
    )
    return paths


def tally_events(data: SynthData) -> dict[str, tuple[int, int]]:
    """Recount distinct (patient, code) pairs per window from the event table."""
    index = {p: d for p, _, d in data.prescriptions}
    before: dict[str, set[str]] = {}
    after: dict[str, set[str]] = {}
    for pid, code, date in data.events:
        bucket = before if date < index[pid] else after
        bucket.setdefault(code, set()).add(pid)
    codes = [e.code for e in data.ledger]
    return {c: (len(before.get(c, ())), len(after.get(c, ()))) for c in codes}


def read_spec_file(path: str | Path) -> dict[str, str]:
    """Parse a plain ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value.strip('"').strip("'")
    return out
