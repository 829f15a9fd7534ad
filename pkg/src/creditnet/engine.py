"""The period scheduler: one deterministic step and full-horizon runs.

Each period runs, in order: loan pricing off start-of-period net worths,
downstream planning, the credit market (interbank matching on anticipated
demand, then downstream rationing, then upstream rationing from the
residual), production and price draws, settlement downstream -> upstream
-> banks with bankruptcy resolution at each stage, one-to-one replacement,
and record keeping. Accounting identities are re-verified every period and
abort the run on violation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import cascade, credit, firms, interbank, stats
from .core import Claim, EconomyState, Parameters, init_economy, validate_params

GROWTH_WINDOW = 100
AUDIT_RTOL = 1e-9


class AccountingAuditError(RuntimeError):
    """An internal accounting identity failed; the run is aborted."""


@dataclass
class RngStream:
    """Deterministic random stream: same seed and draw order give the same
    sequence on every platform. ``counter`` tracks draws consumed.
    """

    seed: int
    counter: int = 0

    def __post_init__(self):
        self._gen = np.random.default_rng(self.seed)

    def uniform_open(self, low: float, high: float, size: int) -> np.ndarray:
        """Draws from the open interval (low, high)."""
        out = self._gen.uniform(low, high, size)
        self.counter += size
        while np.any(out == low):  # pragma: no cover - measure-zero redraw
            redo = out == low
            out[redo] = self._gen.uniform(low, high, int(redo.sum()))
            self.counter += int(redo.sum())
        return out


def draw_price(rng: RngStream) -> float:
    """One output-price draw, uniform on the open interval (0, 2)."""
    return float(rng.uniform_open(0.0, 2.0, 1)[0])


def draw_prices(rng: RngStream, count: int) -> np.ndarray:
    """One period's price draws, consumed in ascending firm index order."""
    return rng.uniform_open(0.0, 2.0, count)


@dataclass
class PeriodRecord:
    """Per-period aggregates.

    ``median_A_d`` / ``median_A_u`` are the start-of-period medians used
    for loan pricing; ``mean_E`` is the post-replacement end-of-period
    mean equity. ``avalanche`` always equals the sum of the three
    bankruptcy counts.
    """

    t: int
    avg_output_d: float
    bankrupt_d: int
    bankrupt_u: int
    bankrupt_b: int
    avalanche: int
    total_loans: float
    total_interbank: float
    mean_rate_d: float
    mean_rate_u: float
    median_A_d: float
    median_A_u: float
    mean_E: float

    CSV_FIELDS = (
        "t", "avg_Y_d", "bankrupt_d", "bankrupt_u", "bankrupt_b", "avalanche",
        "total_loans", "total_interbank", "mean_rate_d", "mean_rate_u",
        "median_A_d", "median_A_u", "mean_E",
    )

    def csv_values(self) -> tuple:
        return (
            self.t, self.avg_output_d, self.bankrupt_d, self.bankrupt_u,
            self.bankrupt_b, self.avalanche, self.total_loans,
            self.total_interbank, self.mean_rate_d, self.mean_rate_u,
            self.median_A_d, self.median_A_u, self.mean_E,
        )


@dataclass
class RunResult:
    """A full simulation's output: the period series, final cross-sections,
    pooled growth rates (net worth, with output-based rates alongside,
    nan where undefined), and the replacement log.
    """

    parameters: Parameters
    records: list[PeriodRecord]
    final_networth_d: np.ndarray
    final_networth_u: np.ndarray
    final_equity_b: np.ndarray
    growth_networth: np.ndarray
    growth_output: np.ndarray
    growth_window: int
    replacements: list[tuple[int, str, int]]  # (period, sector, slot)

    def digest(self) -> str:
        """Canonical hash of everything a run produces; equal digests mean
        bit-identical results.
        """
        import hashlib

        h = hashlib.sha256()
        for r in self.records:
            h.update(repr(r.csv_values()).encode())
        for arr in (
            self.final_networth_d, self.final_networth_u, self.final_equity_b,
            self.growth_networth, self.growth_output,
        ):
            h.update(np.ascontiguousarray(arr).tobytes())
        h.update(repr(self.replacements).encode())
        return h.hexdigest()


def _audit(condition: bool, message: str, t: int):
    if not condition:
        raise AccountingAuditError(f"period {t}: {message}")


def _close(a, b, scale=1.0) -> bool:
    return bool(np.all(np.abs(a - b) <= AUDIT_RTOL * np.maximum(1.0, np.abs(scale))))


def step(state: EconomyState, rng: RngStream, p: Parameters) -> tuple[EconomyState, PeriodRecord]:
    """Execute one full period in place and return the period record."""
    n = state.n
    t = state.t
    top = state.topology
    down, up, banks = state.downstream, state.upstream, state.banks

    # -- stage 1: loan pricing off start-of-period net worths ---------------
    median_d = credit.sector_median(down.net_worth)
    median_u = credit.sector_median(up.net_worth)
    state.median_a_d, state.median_a_u = median_d, median_u
    rate_d = credit.interest_rate(down.net_worth, median_d, p.k)
    rate_u = credit.interest_rate(up.net_worth, median_u, p.k)
    down.rate, up.rate = rate_d, rate_u

    # -- stage 2: downstream plans ------------------------------------------
    plan = firms.plan_downstream(down.net_worth, p)

    # -- stage 3: credit market, interbank matching, downstream rationing ---
    demand_d = p.w * plan.labor
    base_supply = credit.credit_supply(banks.equity, p.alpha)
    banks.supply = base_supply
    # anticipated upstream wage bills from unrationed downstream orders
    anticipated_q = firms.upstream_demand(
        plan.intermediate_order[top.customers[:, 0]],
        plan.intermediate_order[top.customers[:, 1]],
    )
    anticipated = demand_d + p.w * firms.upstream_labor(anticipated_q, p.delta_u)
    positions = interbank.net_positions(base_supply, anticipated)
    flows = interbank.match_neighbors(positions, top, t)
    lent_cur = np.zeros(n)
    borrowed_cur = np.zeros(n)
    for f in flows:
        lent_cur[f.lender] += f.amount
        borrowed_cur[f.borrower] += f.amount
    banks.ib_lent_cur, banks.ib_borrowed_cur = lent_cur, borrowed_cur
    _audit(
        _close(lent_cur.sum(), borrowed_cur.sum(), scale=lent_cur.sum()),
        "interbank flows do not conserve funds", t,
    )
    _audit(
        not np.any((lent_cur > 0) & (borrowed_cur > 0)),
        "a bank both lent and borrowed in the same period", t,
    )

    supply_eff = base_supply + borrowed_cur - lent_cur
    alloc_d = np.minimum(demand_d, supply_eff)  # one borrower per bank
    factor_d = np.where(demand_d > 0, alloc_d / np.maximum(demand_d, 1e-300), 1.0)
    plan = firms.scale_plan(plan, np.minimum(factor_d, 1.0))
    down.plan = plan
    down.loan.principal = alloc_d
    down.loan.rate = rate_d
    down.loan.repayment_due = (1 + rate_d) * alloc_d

    # -- stages 4-5: orders split to suppliers, upstream rationed from residual
    orders = plan.intermediate_order
    demand_q = firms.upstream_demand(
        orders[top.customers[:, 0]], orders[top.customers[:, 1]]
    )
    wage_demand_u = p.w * firms.upstream_labor(demand_q, p.delta_u)
    residual = np.maximum(supply_eff - alloc_d, 0.0)
    alloc_u = np.minimum(wage_demand_u, residual)
    factor_u = np.where(wage_demand_u > 0, alloc_u / np.maximum(wage_demand_u, 1e-300), 1.0)
    factor_u = np.minimum(factor_u, 1.0)
    delivered_u = demand_q * factor_u
    labor_u = firms.upstream_labor(delivered_u, p.delta_u)
    up.demand, up.delivered, up.labor = demand_q, delivered_u, labor_u
    up.loan.principal = alloc_u
    up.loan.rate = rate_u
    up.loan.repayment_due = (1 + rate_u) * alloc_u

    # deliveries back to downstream, per supplier leg
    half = orders / 2.0
    recv_left = half * factor_u[top.suppliers[:, 0]]
    recv_right = half * factor_u[top.suppliers[:, 1]]
    received = recv_left + recv_right

    _audit(
        bool(np.all(alloc_d + alloc_u <= supply_eff * (1 + AUDIT_RTOL) + AUDIT_RTOL)),
        "rationing exceeded lendable supply", t,
    )
    _audit(
        bool(np.all(alloc_d <= demand_d * (1 + AUDIT_RTOL) + AUDIT_RTOL))
        and bool(np.all(alloc_u <= wage_demand_u * (1 + AUDIT_RTOL) + AUDIT_RTOL)),
        "an allocation exceeded its demand", t,
    )
    _audit(
        _close(alloc_d, p.w * plan.labor, scale=alloc_d),
        "downstream credit does not match financed wage bills", t,
    )
    _audit(
        _close(alloc_u, p.w * labor_u, scale=alloc_u),
        "upstream credit does not match financed wage bills", t,
    )

    # -- stage 6: production and price draws ---------------------------------
    y_eff = firms.effective_output(plan, received, p)
    plan.effective_output = y_eff
    prices = draw_prices(rng, n)
    down.price = prices

    # -- stage 7: downstream settlement and failures --------------------------
    intermediates_cost_base = received  # charged (1+r_u) * p per delivered unit
    profit_d = firms.downstream_profit(
        prices, y_eff, rate_d, plan.labor, p.r_u, intermediates_cost_base, p
    )
    networth_d, _ = firms.update_net_worth(down.net_worth, profit_d)
    down.profit = profit_d
    failed_d = networth_d <= 0.0  # zero net worth exits as well

    firm_bd = np.zeros(n)              # bank write-offs from firm failures
    supplier_loss = np.zeros(n)        # commercial write-offs hitting suppliers
    supplier_claim_left = (1 + p.r_u) * p.p * recv_left
    supplier_claim_right = (1 + p.r_u) * p.p * recv_right
    for i in np.flatnonzero(failed_d):
        magnitude = -float(networth_d[i])
        if magnitude <= 0:
            continue
        s_left, s_right = top.suppliers[i]
        claims = [
            Claim(("bank", int(i)), float(down.loan.repayment_due[i])),
            Claim(("upstream", int(s_left)), float(supplier_claim_left[i])),
            Claim(("upstream", int(s_right)), float(supplier_claim_right[i])),
        ]
        write_offs = cascade.resolve_firm_bankruptcy(
            cascade.Shortfall(("downstream", int(i)), magnitude, claims)
        )
        total_claims = sum(c.amount for c in claims)
        _audit(
            _close(sum(write_offs), min(magnitude, total_claims), scale=total_claims),
            "write-offs do not conserve the shortfall", t,
        )
        firm_bd[i] += write_offs[0]
        supplier_loss[s_left] += write_offs[1]
        supplier_loss[s_right] += write_offs[2]

    # -- stage 8: upstream settlement with commercial write-offs --------------
    profit_u = firms.upstream_profit(delivered_u, rate_u, labor_u, p) - supplier_loss
    networth_u, _ = firms.update_net_worth(up.net_worth, profit_u)
    up.profit = profit_u
    failed_u = networth_u <= 0.0
    for j in np.flatnonzero(failed_u):
        magnitude = -float(networth_u[j])
        if magnitude <= 0:
            continue
        claims = [Claim(("bank", int(j)), float(up.loan.repayment_due[j]))]
        write_offs = cascade.resolve_firm_bankruptcy(
            cascade.Shortfall(("upstream", int(j)), magnitude, claims)
        )
        firm_bd[j] += write_offs[0]

    # -- stage 9: bank accounting, interbank settlement, bank failures --------
    loans_total = alloc_d + alloc_u
    deposits = credit.residual_deposits(loans_total, lent_cur, banks.equity, borrowed_cur)
    profit_b = cascade.bank_profit(rate_d, alloc_d, rate_u, alloc_u, p.r_d, deposits)
    bad_debt = cascade.aggregate_bad_debt(firm_bd, state.pending_interbank_bd)

    lent_prev = np.zeros(n)
    borrowed_prev = np.zeros(n)
    for f in state.open_flows:  # survivors only; defaults were pre-filtered
        lent_prev[f.lender] += f.amount
        borrowed_prev[f.borrower] += f.amount
    ib_flow = interbank.settle_interbank(
        lent_prev, borrowed_prev, lent_cur, borrowed_cur, p.r_bb
    )
    equity_new, _ = cascade.update_bank_equity(banks.equity, profit_b, bad_debt, ib_flow)
    failed_b = equity_new <= 0.0  # zero equity exits as well

    _audit(
        _close(equity_new, banks.equity + profit_b - bad_debt + ib_flow,
               scale=np.abs(equity_new) + 1.0),
        "bank equity law violated", t,
    )
    _audit(
        _close(networth_d, down.net_worth + profit_d, scale=np.abs(networth_d) + 1.0)
        and _close(networth_u, up.net_worth + profit_u, scale=np.abs(networth_u) + 1.0),
        "firm net-worth law violated", t,
    )
    _audit(
        bool(np.all(np.isfinite(networth_d)) and np.all(np.isfinite(networth_u))
             and np.all(np.isfinite(equity_new))),
        "non-finite balance detected", t,
    )

    banks.loans_extended = loans_total
    banks.deposits = deposits
    banks.profit = profit_b
    banks.bad_debt = bad_debt
    banks.ib_lent_prev, banks.ib_borrowed_prev = lent_prev, borrowed_prev
    banks.ib_flow = ib_flow

    # new positions resolved against this period's failures
    failed_set = frozenset(int(z) for z in np.flatnonzero(failed_b))
    bd_next, surviving = interbank.write_off_interbank(failed_set, flows, p.r_bb, n)
    state.pending_interbank_bd = bd_next
    state.open_flows = surviving

    # -- stage 10: replacements ----------------------------------------------
    down.net_worth = networth_d
    up.net_worth = networth_u
    banks.equity = equity_new
    down.age += 1
    up.age += 1
    banks.age += 1
    cascade.replace_agents(state, failed_d, failed_u, failed_b, p)

    # -- stage 11: record ------------------------------------------------------
    n_fail_d = int(failed_d.sum())
    n_fail_u = int(failed_u.sum())
    n_fail_b = int(failed_b.sum())
    record = PeriodRecord(
        t=t,
        avg_output_d=float(np.mean(y_eff)),
        bankrupt_d=n_fail_d,
        bankrupt_u=n_fail_u,
        bankrupt_b=n_fail_b,
        avalanche=n_fail_d + n_fail_u + n_fail_b,
        total_loans=float(loans_total.sum()),
        total_interbank=float(lent_cur.sum()),
        mean_rate_d=float(np.mean(rate_d)),
        mean_rate_u=float(np.mean(rate_u)),
        median_A_d=median_d,
        median_A_u=median_u,
        mean_E=float(np.mean(banks.equity)),
    )
    state.t = t + 1
    return state, record


def run(p: Parameters) -> RunResult:
    """Initialize and simulate the full horizon; deterministic given seed."""
    validate_params(p)
    state = init_economy(p)
    rng = RngStream(p.seed)
    n, horizon = p.n_agents, p.horizon

    records: list[PeriodRecord] = []
    replacements: list[tuple[int, str, int]] = []
    networth_hist = np.empty((horizon + 1, n))
    output_hist = np.empty((horizon + 1, n))
    replaced_hist = np.zeros((horizon, n), dtype=bool)
    networth_hist[0] = state.downstream.net_worth
    output_hist[0] = 0.0

    for period in range(1, horizon + 1):
        state, record = step(state, rng, p)
        records.append(record)
        networth_hist[period] = state.downstream.net_worth
        output_hist[period] = state.downstream.plan.effective_output
        # entrants (and only entrants) carry age 0 right after a step
        replaced_hist[period - 1] = state.downstream.age == 0
        for sector, ages in (
            ("downstream", state.downstream.age),
            ("upstream", state.upstream.age),
            ("bank", state.banks.age),
        ):
            for slot in np.flatnonzero(ages == 0):
                replacements.append((period, sector, int(slot)))

    window = min(GROWTH_WINDOW, horizon - 1) if horizon >= 2 else 0
    growth_networth = stats.pooled_growth_rates(networth_hist, replaced_hist, window)
    growth_output = _output_rates_aligned(
        networth_hist, output_hist, replaced_hist, window
    )
    return RunResult(
        parameters=p,
        records=records,
        final_networth_d=state.downstream.net_worth.copy(),
        final_networth_u=state.upstream.net_worth.copy(),
        final_equity_b=state.banks.equity.copy(),
        growth_networth=growth_networth,
        growth_output=growth_output,
        growth_window=window,
        replacements=replacements,
    )


def _output_rates_aligned(
    networth_hist: np.ndarray,
    output_hist: np.ndarray,
    replaced: np.ndarray,
    window: int,
) -> np.ndarray:
    """Output-based growth rates aligned row-for-row with the net-worth
    pool; nan where output was zero on either side of a transition.
    """
    n_transitions = networth_hist.shape[0] - 1
    window = min(window, n_transitions)
    rates = []
    for s in range(n_transitions - window, n_transitions):
        prev_nw, cur_nw = networth_hist[s], networth_hist[s + 1]
        valid = ~replaced[s] & (prev_nw > 0) & (cur_nw > 0)
        if s >= 1:
            valid &= ~replaced[s - 1]
        prev_y, cur_y = output_hist[s][valid], output_hist[s + 1][valid]
        out = np.full(prev_y.shape, np.nan)
        ok = (prev_y > 0) & (cur_y > 0)
        out[ok] = np.log(cur_y[ok]) - np.log(prev_y[ok])
        rates.append(out)
    if not rates:
        return np.empty(0, dtype=np.float64)
    return np.concatenate(rates)
