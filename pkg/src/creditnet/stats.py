"""From-scratch statistical verification layer.

Sample moments, the moment-based normality test (chi-square with 2 degrees
of freedom, whose survival function is exactly exp(-x/2)), a Laplace versus
Gaussian maximum-likelihood comparison for growth rates, lagged Pearson
cross-correlations, and extraction of avalanche / growth-rate samples from
run results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .engine import PeriodRecord, RunResult

MIN_HIGHER_MOMENT_N = 8


@dataclass
class Sample:
    """A labeled list of real observations."""

    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass
class TestReport:
    """Outcome of a hypothesis test at the 1% level."""

    statistic: float
    p_value: float
    reject_at_1pct: bool
    n: int


def moments(sample: Sample) -> tuple[float, float, float, float]:
    """(mean, variance, skewness, excess kurtosis) with population-normalized
    higher moments m3/m2^1.5 and m4/m2^2 - 3.

    Raises on degenerate (zero-variance) samples, where the shape moments
    are undefined.
    """
    x = sample.values
    if x.size < 2:
        raise ValueError("moments need at least 2 observations")
    if x.size < MIN_HIGHER_MOMENT_N:
        raise ValueError(
            f"higher moments need at least {MIN_HIGHER_MOMENT_N} observations"
        )
    mean = float(np.mean(x))
    d = x - mean
    m2 = float(np.mean(d * d))
    if m2 <= 0:
        raise ValueError("zero-variance sample: skewness and kurtosis undefined")
    m3 = float(np.mean(d**3))
    m4 = float(np.mean(d**4))
    skew = m3 / m2**1.5
    kurt_excess = m4 / (m2 * m2) - 3.0
    return mean, m2, skew, kurt_excess


def bera_jarque(sample: Sample) -> TestReport:
    """Moment-based normality test: n/6 * (S^2 + K^2/4) against the exact
    chi-square(2) survival function exp(-x/2).
    """
    _, _, skew, kurt_excess = moments(sample)
    n = sample.n
    statistic = n / 6.0 * (skew * skew + kurt_excess * kurt_excess / 4.0)
    p_value = math.exp(-statistic / 2.0)
    return TestReport(
        statistic=float(statistic),
        p_value=float(p_value),
        reject_at_1pct=p_value < 0.01,
        n=n,
    )


@dataclass
class FitComparison:
    """Maximum-likelihood fits under a Laplace and a Gaussian model."""

    laplace_location: float
    laplace_scale: float
    laplace_loglik: float
    normal_mean: float
    normal_sd: float
    normal_loglik: float
    laplace_preferred: bool


def compare_fits(sample: Sample) -> FitComparison:
    """Fit a Laplace (location = median, scale = mean absolute deviation
    from the median) and a Gaussian (mean, population sd) by maximum
    likelihood and compare raw log-likelihoods. Both models have two
    parameters, so the higher log-likelihood wins outright.
    """
    x = sample.values
    if x.size < MIN_HIGHER_MOMENT_N:
        raise ValueError("fit comparison needs at least 8 observations")
    location = float(np.median(x))
    scale = float(np.mean(np.abs(x - location)))
    if scale <= 0:
        raise ValueError("all observations equal: Laplace scale is zero")
    n = x.size
    laplace_loglik = -n * math.log(2 * scale) - float(np.sum(np.abs(x - location))) / scale
    mean = float(np.mean(x))
    var = float(np.mean((x - mean) ** 2))
    sd = math.sqrt(var)
    normal_loglik = -n / 2.0 * math.log(2 * math.pi * var) - n / 2.0
    return FitComparison(
        laplace_location=location,
        laplace_scale=scale,
        laplace_loglik=laplace_loglik,
        normal_mean=mean,
        normal_sd=sd,
        normal_loglik=normal_loglik,
        laplace_preferred=laplace_loglik > normal_loglik,
    )


def cross_correlation(x: Sample, y: Sample, max_lag: int) -> dict[int, float]:
    """Pearson correlation of (x_t, y_{t+lag}) over the overlapping window
    for every lag in [-max_lag, +max_lag]. Lags whose window has zero
    variance on either side come back as nan.
    """
    xv, yv = x.values, y.values
    if xv.size != yv.size:
        raise ValueError("cross-correlation needs equal-length samples")
    if xv.size <= max_lag + MIN_HIGHER_MOMENT_N:
        raise ValueError("sample too short for the requested maximum lag")
    out: dict[int, float] = {}
    for lag in range(-max_lag, max_lag + 1):
        if lag >= 0:
            a, b = xv[: xv.size - lag], yv[lag:]
        else:
            a, b = xv[-lag:], yv[: yv.size + lag]
        out[lag] = _pearson(a, b)
    return out


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    da = a - a.mean()
    db = b - b.mean()
    denom = math.sqrt(float(np.sum(da * da)) * float(np.sum(db * db)))
    if denom <= 0:
        return float("nan")
    return float(np.sum(da * db)) / denom


def avalanche_series(records: Sequence["PeriodRecord"]) -> Sample:
    """Per-period total bankruptcies across all three sectors."""
    if len(records) == 0:
        raise ValueError("no period records")
    totals = np.array(
        [r.bankrupt_d + r.bankrupt_u + r.bankrupt_b for r in records],
        dtype=np.float64,
    )
    return Sample(totals, label="avalanche size")


def pooled_growth_rates(
    history: np.ndarray, replaced: np.ndarray, window: int
) -> np.ndarray:
    """Pool log-differences over the last ``window`` transitions, skipping
    any slot transition adjacent to a replacement (an entrant's reset
    would otherwise inject a spurious jump). ``history`` has one row per
    recorded time (row 0 = initial cross-section), ``replaced`` one row
    per period marking slots refilled at the end of that period.

    Values must be positive wherever used; rows with nonpositive entries
    on either side of a transition are skipped as well.
    """
    n_transitions = history.shape[0] - 1
    window = min(window, n_transitions)
    rates = []
    for s in range(n_transitions - window, n_transitions):
        # transition from history[s] (end of period s) to history[s + 1]
        prev_row = history[s]
        cur_row = history[s + 1]
        valid = ~replaced[s] & (prev_row > 0) & (cur_row > 0)
        if s >= 1:
            valid &= ~replaced[s - 1]
        rates.append(np.log(cur_row[valid]) - np.log(prev_row[valid]))
    if not rates:
        return np.empty(0, dtype=np.float64)
    return np.concatenate(rates)


def growth_rate_sample(result: "RunResult") -> Sample:
    """Pooled downstream net-worth growth rates from a finished run."""
    return Sample(result.growth_networth, label="downstream net-worth growth")
