import numpy as np

from adrscan.featmat import EventVocabulary, GroupedFeatureMatrix
from adrscan.readcode import LevelMode


def grouped(keys, counts, group_size=100):
    vocab = EventVocabulary(tuple(keys), LevelMode.FULL)
    return GroupedFeatureMatrix(vocab, np.asarray(counts, dtype=np.int64), group_size, 0)


def spread(total, n_groups, rng):
    """Per-group counts summing to ``total`` (multinomial split)."""
    return rng.multinomial(total, [1 / n_groups] * n_groups)
