"""Before/after feature-matrix signal detection for adverse drug reactions."""

from .cohort import CohortWindows, assign_events, build_cohort
from .detect import DetectionConfig, RankMode, SignalRow, detect_signals, filter_by_prefix
from .featmat import (
    EventVocabulary,
    GroupedFeatureMatrix,
    PatientFeatureMatrix,
    build_patient_matrix,
    build_vocabulary,
    column_totals,
    group_patients,
)
from .readcode import CodeDictionary, LevelMode, ReadCode, key_at_level, load_dictionary, parse_code
from .report import Format, render
from .stats import RatioStats, TestMode, TTestResult, ratio_stats, student_t_test, t_cdf

__version__ = "0.1.0"
