"""Bank loan pricing, credit supply, proportional rationing, and deposits."""

from __future__ import annotations

import numpy as np

from .core import FloatArray


def interest_rate(
    net_worth: FloatArray | float, median: float, k: float
) -> FloatArray | float:
    """Loan rate k * (A / median)^(-k): the lower the borrower's net worth
    relative to the sector median, the higher the rate. A borrower exactly
    at the median pays k.
    """
    if np.any(np.asarray(net_worth) <= 0):
        raise ValueError("loan pricing requires positive net worth")
    if not median > 0:
        raise ValueError("loan pricing requires a positive sector median")
    if not 0 < k < 1:
        raise ValueError("k must lie strictly inside (0,1)")
    return k * np.power(np.asarray(net_worth, dtype=np.float64) / median, -k)


def sector_median(net_worths: FloatArray) -> float:
    """Sample median of a sector's net worths (mean of the two middle
    order statistics for even length).
    """
    values = np.asarray(net_worths, dtype=np.float64)
    if values.size == 0:
        raise ValueError("median of an empty sector is undefined")
    if np.any(values <= 0):
        raise ValueError("sector medians are taken over positive net worths")
    return float(np.median(values))


def credit_supply(equity: FloatArray | float, alpha: float) -> FloatArray | float:
    """Lendable funds equity/alpha under the prudential cap; a bank with
    nonpositive equity extends no credit.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0,1]")
    return np.maximum(np.asarray(equity, dtype=np.float64), 0.0) / alpha


def ration(demands: FloatArray, supply: float) -> np.ndarray:
    """Allocate ``supply`` across ``demands`` proportionally.

    Every borrower gets demand * min(1, supply/total); allocations sum to
    min(supply, total demand) and never exceed the individual demand.
    """
    demands = np.asarray(demands, dtype=np.float64)
    if np.any(demands < 0) or supply < 0:
        raise ValueError("demands and supply must be nonnegative")
    total = float(demands.sum())
    if total <= 0:
        return np.zeros_like(demands)
    return demands * min(1.0, supply / total)


def residual_deposits(
    loans: FloatArray | float,
    ib_lent: FloatArray | float,
    equity: FloatArray | float,
    ib_borrowed: FloatArray | float,
) -> FloatArray | float:
    """Deposits closing the balance sheet: assets (loans + interbank lent)
    = deposits + interbank borrowed + equity, floored at zero (negative
    household deposits are meaningless; the identity is then slack).
    """
    return np.maximum(
        np.asarray(loans, dtype=np.float64) + ib_lent - equity - ib_borrowed, 0.0
    )
