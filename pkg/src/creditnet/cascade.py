"""Bankruptcy resolution, bank accounting, and one-to-one replacement.

Settlement inside a period runs downstream -> upstream -> banks, which is
exactly the contagion chain: a failed downstream firm's unpaid bills hit
its suppliers and its bank, weakened suppliers may fail onto their banks,
and bank failures propagate along the interbank ring next period.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import Claim, EconomyState, FloatArray, Parameters

log = logging.getLogger(__name__)


@dataclass
class Shortfall:
    """A failed agent's uncovered debt and the claims it is split across."""

    debtor: object
    magnitude: float
    claims: list[Claim]


def resolve_firm_bankruptcy(shortfall: Shortfall) -> list[float]:
    """Allocate a failure's shortfall across creditors pari passu.

    Each creditor absorbs magnitude * claim/total, capped at its claim, so
    total write-offs equal min(magnitude, total claims) and nobody loses
    more than it was owed. Returns write-offs aligned with the claim list.
    """
    if not shortfall.magnitude > 0:
        raise ValueError("shortfall magnitude must be positive")
    amounts = np.array([c.amount for c in shortfall.claims], dtype=np.float64)
    if np.any(amounts < 0):
        raise ValueError("claim amounts must be nonnegative")
    total = float(amounts.sum())
    if total <= 0:
        log.warning(
            "shortfall of %.6g on %r has no claims to absorb it; unallocated",
            shortfall.magnitude,
            shortfall.debtor,
        )
        return [0.0] * len(shortfall.claims)
    write_offs = np.minimum(shortfall.magnitude * amounts / total, amounts)
    return [float(x) for x in write_offs]


def bank_profit(
    rate_d: FloatArray | float,
    wage_bill_d: FloatArray | float,
    rate_u: FloatArray | float,
    wage_bill_u: FloatArray | float,
    r_d: float,
    deposits: FloatArray | float,
) -> FloatArray | float:
    """Interest earned on the wage bills actually financed, net of the
    interest paid on deposits.
    """
    return rate_d * wage_bill_d + rate_u * wage_bill_u - r_d * deposits


def update_bank_equity(
    equity_prev: FloatArray | float,
    profit: FloatArray | float,
    bad_debt: FloatArray | float,
    ib_flow: FloatArray | float,
) -> tuple[FloatArray | float, np.ndarray | bool]:
    """Equity law of motion E + profit - bad debt + interbank flow; a bank
    fails on strictly negative equity.
    """
    new = equity_prev + profit - bad_debt + ib_flow
    return new, new < 0


def aggregate_bad_debt(
    firm_write_offs: FloatArray | float, interbank_write_offs: FloatArray | float
) -> FloatArray | float:
    """Total bad debt charged this period: loan write-offs from failed
    linked firms plus interbank write-offs falling due now.
    """
    firm_write_offs = np.asarray(firm_write_offs, dtype=np.float64)
    interbank_write_offs = np.asarray(interbank_write_offs, dtype=np.float64)
    if np.any(firm_write_offs < 0) or np.any(interbank_write_offs < 0):
        raise ValueError("bad-debt components must be nonnegative")
    out = firm_write_offs + interbank_write_offs
    return out if out.ndim else float(out)


def replace_agents(
    state: EconomyState,
    failed_downstream: np.ndarray,
    failed_upstream: np.ndarray,
    failed_banks: np.ndarray,
    p: Parameters,
) -> list[tuple[str, int]]:
    """Refill every failed slot in place with a fresh entrant.

    New firms start with net worth a0, new banks with equity e0 and no
    open positions or deposits; indices and ring links are untouched, so
    sector populations stay constant. Returns the replacement events
    (sector, slot) for growth-rate masking.
    """
    events: list[tuple[str, int]] = []
    down, up, banks = state.downstream, state.upstream, state.banks
    for i in np.flatnonzero(failed_downstream):
        down.net_worth[i] = p.a0
        down.age[i] = 0
        events.append(("downstream", int(i)))
    for j in np.flatnonzero(failed_upstream):
        up.net_worth[j] = p.a0
        up.age[j] = 0
        events.append(("upstream", int(j)))
    for z in np.flatnonzero(failed_banks):
        banks.equity[z] = p.e0
        banks.age[z] = 0
        banks.deposits[z] = 0.0
        banks.ib_lent_cur[z] = 0.0
        banks.ib_borrowed_cur[z] = 0.0
        state.pending_interbank_bd[z] = 0.0
        events.append(("bank", int(z)))
    return events
