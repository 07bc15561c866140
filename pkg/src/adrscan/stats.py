"""Student's t-test, the t distribution CDF and the R1/R2 ratios.

The t CDF goes through the regularized incomplete beta function, evaluated
with a modified-Lentz continued fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    LengthMismatch,
    NonFiniteT,
    NonPositiveDf,
    NonPositivePopulation,
    TooFewGroups,
)

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


class TestMode(str, Enum):
    __test__ = False  # keep pytest from collecting this

    TWO_SAMPLE_POOLED = "pooled"
    PAIRED = "paired"


@dataclass(frozen=True)
class TTestResult:
    t_stat: float
    df: float
    p_value: float
    mean_before: float
    mean_after: float


@dataclass(frozen=True)
class RatioStats:
    NB: int
    NA: int
    N: int
    R1: float
    R2_percent: float


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b), valid for x < (a+1)/(a+b+2)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta failed to converge (a={a}, b={b}, x={x})")


def betainc_reg(a: float, b: float, x: float, one_minus_x: float | None = None) -> float:
    """Regularized incomplete beta I_x(a, b).

    ``one_minus_x`` may be passed when 1-x is known more accurately than the
    subtraction would give.
    """
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    y = 1.0 - x if one_minus_x is None else one_minus_x
    if x == 0.0:
        return 0.0
    if y == 0.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log(y)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, y) / b


def _t_tail(t: float, df: float) -> float:
    """P(T > |t|), computed without cancellation."""
    t2 = t * t
    denom = df + t2
    return 0.5 * betainc_reg(df / 2.0, 0.5, df / denom, t2 / denom)


def _check_t_args(t: float, df: float) -> None:
    if not df > 0 or math.isnan(df):
        raise NonPositiveDf(f"degrees of freedom must be > 0, got {df}")
    if not math.isfinite(t):
        raise NonFiniteT(f"t must be finite, got {t}")


def t_cdf(t: float, df: float) -> float:
    """P(T <= t) for Student's t with ``df`` degrees of freedom."""
    _check_t_args(t, df)
    if t == 0:
        return 0.5
    tail = _t_tail(t, df)
    return tail if t < 0 else 1.0 - tail


def t_two_sided_p(t: float, df: float) -> float:
    """2 * (1 - t_cdf(|t|, df)), evaluated directly on the tail."""
    _check_t_args(t, df)
    if t == 0:
        return 1.0
    return min(1.0, 2.0 * _t_tail(t, df))


def student_t_test(x, y, mode: TestMode = TestMode.TWO_SAMPLE_POOLED) -> TTestResult:
    """Two-sided Student's t-test of ``x`` (before) against ``y`` (after).

    The statistic is oriented as mean(x) - mean(y), so an increase after
    exposure gives t < 0.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"samples must be equal-length vectors, got {x.shape} and {y.shape}")
    g = x.shape[0]
    if g < 2:
        raise TooFewGroups(f"need at least 2 groups per side, got {g}")
    mode = TestMode(mode)
    mx = x.mean()
    my = y.mean()
    if mode is TestMode.PAIRED:
        d = x - y
        md = d.mean()
        df = g - 1
        var = float(np.sum((d - md) ** 2)) / df
        se2 = var / g
        diff = md
    else:
        df = 2 * g - 2
        ss = float(np.sum((x - mx) ** 2) + np.sum((y - my) ** 2))
        var = ss / df
        se2 = var * (2.0 / g)
        diff = mx - my
    if se2 == 0.0:
        p = 1.0 if diff == 0 else 0.0
        t = 0.0 if diff == 0 else math.copysign(math.inf, diff)
        return TTestResult(t, float(df), p, float(mx), float(my))
    t = float(diff / math.sqrt(se2))
    return TTestResult(t, float(df), t_two_sided_p(t, df), float(mx), float(my))


def ratio_stats(NB: int, NA: int, N: int) -> RatioStats:
    """R1 = NA/NB (NA itself when NB is 0); R2 = NA as a percentage of N."""
    if N < 1:
        raise NonPositivePopulation(f"population size must be >= 1, got {N}")
    if NB < 0 or NA < 0:
        raise ValueError("patient counts must be non-negative")
    r1 = NA / max(NB, 1)
    return RatioStats(NB, NA, N, float(r1), 100.0 * NA / N)
