"""Neighbor-ring liquidity matching and interbank settlement.

Banks trade liquidity only with their two ring neighbors. Positions opened
in one period are repaid with interest the next; a borrower's failure
voids the repayment and becomes the lender's bad debt one period later.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FloatArray, Topology


@dataclass(frozen=True)
class InterbankFlow:
    """One interbank loan: ``lender`` funds ``borrower`` at ``opened_at``."""

    lender: int
    borrower: int
    amount: float
    opened_at: int

    def position_for(self, bank: int) -> "InterbankPosition":
        if bank == self.lender:
            return InterbankPosition(self.borrower, self.amount, "lent", self.opened_at)
        if bank == self.borrower:
            return InterbankPosition(self.lender, self.amount, "borrowed", self.opened_at)
        raise ValueError(f"bank {bank} is not a party to this flow")


@dataclass(frozen=True)
class InterbankPosition:
    """One bank's view of an open interbank loan."""

    counterparty: int
    amount: float
    direction: str  # "lent" or "borrowed"
    opened_at: int


def net_positions(
    supply: FloatArray | float, demand: FloatArray | float
) -> FloatArray | float:
    """Signed liquidity position: positive = lendable excess, negative =
    deficit versus the credit demand the bank anticipates.
    """
    supply = np.asarray(supply, dtype=np.float64)
    demand = np.asarray(demand, dtype=np.float64)
    if np.any(supply < 0) or np.any(demand < 0):
        raise ValueError("supply and demand must be nonnegative")
    out = supply - demand
    return out if out.ndim else float(out)


def match_neighbors(positions: FloatArray, topology: Topology, t: int = 0) -> list[InterbankFlow]:
    """Match liquidity deficits against neighbor excesses on the bank ring.

    Single ascending-index sweep: each deficit bank asks half its deficit
    from each of its two neighbors, each leg capped by that neighbor's
    remaining excess. No re-requests and no multi-hop relaying, so a bank
    with excess never ends up borrowing and vice versa.
    """
    positions = np.asarray(positions, dtype=np.float64)
    excess = np.maximum(positions, 0.0)
    flows: list[InterbankFlow] = []
    for z in range(len(positions)):
        deficit = -positions[z]
        if deficit <= 0:
            continue
        ask = deficit / 2
        for neighbor in topology.bank_neighbors[z]:
            take = min(ask, excess[neighbor])
            if take > 0:
                flows.append(InterbankFlow(int(neighbor), z, float(take), t))
                excess[neighbor] -= take
    return flows


def settle_interbank(
    lent_prev: FloatArray | float,
    borrowed_prev: FloatArray | float,
    lent_cur: FloatArray | float,
    borrowed_cur: FloatArray | float,
    r_bb: float,
    counterparty_defaulted: FloatArray | bool = False,
) -> FloatArray | float:
    """Net interbank cash flow for one bank in one period.

    Inbound: last period's lending repaid with interest (zeroed if the
    borrower defaulted; the caller books that as bad debt) plus funds
    borrowed now. Outbound: repayment of last period's borrowing with
    interest plus funds lent now. Covers all four lender/borrower
    combinations across the two periods.
    """
    lent_prev = np.asarray(lent_prev, dtype=np.float64)
    borrowed_prev = np.asarray(borrowed_prev, dtype=np.float64)
    lent_cur = np.asarray(lent_cur, dtype=np.float64)
    borrowed_cur = np.asarray(borrowed_cur, dtype=np.float64)
    if np.any((lent_prev > 0) & (borrowed_prev > 0)):
        raise ValueError("a bank cannot have been both lender and borrower last period")
    if np.any((lent_cur > 0) & (borrowed_cur > 0)):
        raise ValueError("a bank cannot both lend and borrow in the same period")
    repaid = np.where(counterparty_defaulted, 0.0, (1 + r_bb) * lent_prev)
    out = repaid - (1 + r_bb) * borrowed_prev + borrowed_cur - lent_cur
    return out if out.ndim else float(out)


def write_off_interbank(
    failed_banks: set[int] | frozenset[int],
    open_flows: list[InterbankFlow],
    r_bb: float,
    n: int,
) -> tuple[np.ndarray, list[InterbankFlow]]:
    """Resolve open positions against this period's bank failures.

    A failed borrower's repayment becomes bad debt (1+r_bb)*amount for the
    surviving lender, charged next period. Every position touching a
    failed bank (either side) is cancelled; survivors roll forward.
    Returns (bad debt per bank due next period, surviving flows).
    """
    bad_debt_next = np.zeros(n, dtype=np.float64)
    surviving: list[InterbankFlow] = []
    for flow in open_flows:
        lender_failed = flow.lender in failed_banks
        borrower_failed = flow.borrower in failed_banks
        if borrower_failed and not lender_failed:
            bad_debt_next[flow.lender] += (1 + r_bb) * flow.amount
        elif not borrower_failed and not lender_failed:
            surviving.append(flow)
        # any position of a failed bank is cancelled outright
    return bad_debt_next, surviving
