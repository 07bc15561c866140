"""Patient-level binary matrices (A, B) and their grouped counts (X, Y)."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np
from scipy import sparse

from .cohort import CohortWindows
from .errors import GroupSizeZero, UnknownKey, VocabularyMismatch
from .readcode import LevelMode, ReadCode, aggregation_key

DEFAULT_GROUP_SIZE = 100

Assignment = tuple[str, ReadCode]


@dataclass(frozen=True)
class EventVocabulary:
    keys: tuple[str, ...]
    level_mode: LevelMode = LevelMode.FULL
    key_index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "key_index", {k: i for i, k in enumerate(self.keys)})

    def __len__(self) -> int:
        return len(self.keys)

    def index(self, key: str) -> int:
        try:
            return self.key_index[key]
        except KeyError:
            raise UnknownKey(key) from None

    def key_for(self, code: ReadCode | str) -> str:
        return aggregation_key(code, self.level_mode)


@dataclass(frozen=True)
class PatientFeatureMatrix:
    patient_ids: tuple[str, ...]
    vocabulary: EventVocabulary
    matrix: sparse.csr_matrix  # n_patients x n_keys, entries in {0, 1}

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


@dataclass(frozen=True)
class GroupedFeatureMatrix:
    vocabulary: EventVocabulary
    counts: np.ndarray  # n_groups x n_keys patient counts
    group_size: int
    dropped: int  # trailing patients not placed in any group

    @property
    def n_groups(self) -> int:
        return self.counts.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    def column(self, key: str) -> np.ndarray:
        return self.counts[:, self.vocabulary.index(key)]


def build_vocabulary(
    before: Iterable[Assignment],
    after: Iterable[Assignment],
    level_mode: LevelMode = LevelMode.FULL,
) -> EventVocabulary:
    keys: set[str] = set()
    seen: set[str] = set()
    for assignments in (before, after):
        for _, code in assignments:
            raw = code.raw
            if raw in seen:
                continue
            seen.add(raw)
            keys.add(aggregation_key(code, level_mode))
    return EventVocabulary(tuple(sorted(keys)), level_mode)


def build_patient_matrix(
    assignments: Iterable[Assignment],
    cohort: list[CohortWindows],
    vocabulary: EventVocabulary,
) -> PatientFeatureMatrix:
    """Sparse binary matrix: 1 where the patient has any event with that key."""
    row_of = {w.patient_id: i for i, w in enumerate(cohort)}
    key_cache: dict[str, int] = {}
    cells: set[tuple[int, int]] = set()
    for pid, code in assignments:
        row = row_of.get(pid)
        if row is None:
            continue
        col = key_cache.get(code.raw)
        if col is None:
            col = vocabulary.index(vocabulary.key_for(code))
            key_cache[code.raw] = col
        cells.add((row, col))
    shape = (len(cohort), len(vocabulary))
    if cells:
        rows, cols = np.array(sorted(cells), dtype=np.int64).T
    else:
        rows = cols = np.empty(0, dtype=np.int64)
    data = np.ones(len(rows), dtype=np.int32)
    matrix = sparse.csr_matrix((data, (rows, cols)), shape=shape)
    return PatientFeatureMatrix(tuple(w.patient_id for w in cohort), vocabulary, matrix)


def group_order(n_patients: int, shuffle_seed: int | None = None) -> np.ndarray:
    """Row order used for grouping; identity unless a shuffle seed is given."""
    if shuffle_seed is None:
        return np.arange(n_patients)
    return np.random.default_rng(shuffle_seed).permutation(n_patients)


def group_patients(
    m: PatientFeatureMatrix,
    group_size: int = DEFAULT_GROUP_SIZE,
    shuffle_seed: int | None = None,
) -> GroupedFeatureMatrix:
    """Sum consecutive blocks of ``group_size`` patients; the remainder is dropped."""
    if group_size < 1:
        raise GroupSizeZero(f"group_size must be >= 1, got {group_size}")
    n_patients, n_keys = m.shape
    n_groups, dropped = divmod(n_patients, group_size)
    kept = group_order(n_patients, shuffle_seed)[: n_groups * group_size]
    indicator = sparse.csr_matrix(
        (
            np.ones(len(kept), dtype=np.int32),
            (np.repeat(np.arange(n_groups), group_size), kept),
        ),
        shape=(n_groups, n_patients),
    )
    counts = np.asarray((indicator @ m.matrix).todense(), dtype=np.int64)
    counts = counts.reshape(n_groups, n_keys)
    return GroupedFeatureMatrix(m.vocabulary, counts, group_size, dropped)


def check_compatible(x: GroupedFeatureMatrix, y: GroupedFeatureMatrix) -> None:
    if x.vocabulary.keys != y.vocabulary.keys:
        raise VocabularyMismatch("before/after matrices use different vocabularies")
    if x.shape != y.shape:
        raise VocabularyMismatch(f"matrix shapes differ: {x.shape} vs {y.shape}")


def column_totals(
    m_before: GroupedFeatureMatrix, m_after: GroupedFeatureMatrix, key: str
) -> tuple[int, int]:
    """(NB, NA): patients with ``key`` before and after, over retained groups."""
    check_compatible(m_before, m_after)
    return int(m_before.column(key).sum()), int(m_after.column(key).sum())


def dump_triplets(m: GroupedFeatureMatrix, out: TextIO) -> None:
    """Write non-zero cells as ``group,key,count`` CSV."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["group", "key", "count"])
    rows, cols = np.nonzero(m.counts)
    for g, c in zip(rows.tolist(), cols.tolist()):
        writer.writerow([g, m.vocabulary.keys[c], int(m.counts[g, c])])
