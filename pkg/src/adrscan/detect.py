"""Per-event significance testing and ranked signal tables."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .errors import TooFewGroups, ValidationError
from .featmat import GroupedFeatureMatrix, check_compatible
from .readcode import CodeDictionary, LevelMode
from .stats import TestMode, ratio_stats, student_t_test


class RankMode(str, Enum):
    BY_P = "p"
    BY_R1 = "r1"


@dataclass(frozen=True)
class SignalRow:
    rank: int
    key: str
    description: str
    NB: int
    NA: int
    R1: float
    R2_percent: float
    p_value: float


@dataclass(frozen=True)
class DetectionConfig:
    window_days: int = 60
    group_size: int = 100
    level_mode: LevelMode = LevelMode.FULL
    alpha: float = 0.05
    rank_mode: RankMode = RankMode.BY_P
    prefix_filter: str | None = None
    top_k: int = 30
    test_mode: TestMode = TestMode.TWO_SAMPLE_POOLED
    min_NA: int = 0
    shuffle_seed: int | None = None
    include_decreases: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.top_k < 1:
            raise ValidationError(f"top_k must be >= 1, got {self.top_k}")
        if self.window_days < 1:
            raise ValidationError(f"window_days must be >= 1, got {self.window_days}")
        if self.group_size < 1:
            raise ValidationError(f"group_size must be >= 1, got {self.group_size}")
        if self.min_NA < 0:
            raise ValidationError(f"min_NA must be >= 0, got {self.min_NA}")


def _sort_key(mode: RankMode):
    if mode is RankMode.BY_R1:
        return lambda r: (-r.R1, r.p_value, r.key)
    return lambda r: (r.p_value, -r.R1, r.key)


def rerank(rows: list[SignalRow]) -> list[SignalRow]:
    return [replace(r, rank=i) for i, r in enumerate(rows, start=1)]


def detect_signals(
    X: GroupedFeatureMatrix,
    Y: GroupedFeatureMatrix,
    dictionary: CodeDictionary | None,
    cfg: DetectionConfig,
) -> list[SignalRow]:
    """Test every vocabulary column of X (before) against Y (after).

    Keeps columns with p < alpha, NA > NB (unless ``include_decreases``) and
    NA >= min_NA, ranks them and truncates to ``top_k``.
    """
    check_compatible(X, Y)
    keys = X.vocabulary.keys
    if not keys:
        return []
    if X.n_groups < 2:
        raise TooFewGroups(
            f"need at least 2 groups for a t-test, got {X.n_groups} "
            f"(group size {X.group_size})"
        )
    population = X.n_groups * X.group_size
    nb_all = X.counts.sum(axis=0)
    na_all = Y.counts.sum(axis=0)
    dictionary = dictionary if dictionary is not None else CodeDictionary()

    kept = []
    for j, key in enumerate(keys):
        nb, na = int(nb_all[j]), int(na_all[j])
        if na < cfg.min_NA:
            continue
        if not cfg.include_decreases and na <= nb:
            continue
        if cfg.prefix_filter and not key.startswith(cfg.prefix_filter):
            continue
        res = student_t_test(X.counts[:, j], Y.counts[:, j], cfg.test_mode)
        if not res.p_value < cfg.alpha:
            continue
        ratios = ratio_stats(nb, na, population)
        kept.append(
            SignalRow(0, key, dictionary.describe(key), nb, na, ratios.R1, ratios.R2_percent, res.p_value)
        )
    kept.sort(key=_sort_key(RankMode(cfg.rank_mode)))
    return rerank(kept[: cfg.top_k])


def filter_by_prefix(rows: list[SignalRow], prefix: str) -> list[SignalRow]:
    return rerank([r for r in rows if r.key.startswith(prefix)])

