"""Firm-level equations: planning, rationing revisions, profits, net worth.

Every function is a pure elementwise computation and accepts scalars or
aligned numpy arrays, so the engine can evaluate whole cross-sections at
once while the unit tests pin down single-firm values.
"""

from __future__ import annotations

import numpy as np

from .core import FloatArray, Parameters, Plan

_CHECK_TOL = 1e-9


def plan_downstream(net_worth: FloatArray | float, p: Parameters) -> Plan:
    """Production plan from net worth: output phi * A^beta, inputs in
    fixed proportions (labor delta_d per unit, intermediates gamma per unit).
    """
    if np.any(np.asarray(net_worth) <= 0):
        raise ValueError("cannot plan production for nonpositive net worth")
    output = p.phi * np.power(net_worth, p.beta)
    return Plan(
        output=output,
        labor=p.delta_d * output,
        intermediate_order=p.gamma * output,
        effective_output=np.copy(output) if isinstance(output, np.ndarray) else output,
    )


def scale_plan(plan: Plan, factor: FloatArray | float) -> Plan:
    """Shrink a plan proportionally to the credit actually obtained.

    Input proportions labor/output and intermediates/output are preserved
    for any factor in [0, 1].
    """
    f = np.asarray(factor, dtype=np.float64)
    if np.any(f < 0) or np.any(f > 1):
        raise ValueError("plan scaling factor must lie in [0, 1]")
    factor = f if f.ndim else float(f)
    return Plan(
        output=plan.output * factor,
        labor=plan.labor * factor,
        intermediate_order=plan.intermediate_order * factor,
        effective_output=plan.effective_output * factor,
    )


def upstream_demand(order_left: FloatArray | float, order_right: FloatArray | float) -> FloatArray | float:
    """Demand faced by an upstream firm: half of each ring customer's order."""
    return order_left / 2 + order_right / 2


def upstream_labor(demand: FloatArray | float, delta_u: float) -> FloatArray | float:
    """Labor needed to produce ``demand`` goods with productivity delta_u."""
    return demand / delta_u


def effective_output(plan: Plan, delivered: FloatArray | float, p: Parameters) -> FloatArray | float:
    """Output attainable with the hired labor and the intermediates that
    actually arrived, under fixed proportions. Wages for stranded labor
    are still owed; only output drops.
    """
    delivered = np.asarray(delivered, dtype=np.float64)
    ordered = np.asarray(plan.intermediate_order, dtype=np.float64)
    if np.any(delivered < 0) or np.any(delivered > ordered * (1 + _CHECK_TOL) + _CHECK_TOL):
        raise ValueError("delivered intermediates must lie in [0, ordered]")
    delivered = np.minimum(delivered, ordered)
    out = np.minimum(plan.labor / p.delta_d, delivered / p.gamma)
    return out if out.ndim else float(out)


def downstream_profit(
    price: FloatArray | float,
    output: FloatArray | float,
    loan_rate: FloatArray | float,
    labor: FloatArray | float,
    r_u: float,
    intermediates: FloatArray | float,
    p: Parameters,
) -> FloatArray | float:
    """Sales revenue minus the gross wage bill and the commercial-credit
    bill for delivered intermediates.
    """
    return (
        price * output
        - (1 + loan_rate) * p.w * labor
        - (1 + r_u) * p.p * intermediates
    )


def upstream_profit(
    delivered: FloatArray | float,
    loan_rate: FloatArray | float,
    labor: FloatArray | float,
    p: Parameters,
) -> FloatArray | float:
    """Commercial-credit revenue on delivered goods minus the gross wage bill."""
    return p.p * (1 + p.r_u) * delivered - (1 + loan_rate) * p.w * labor


def update_net_worth(
    net_worth_prev: FloatArray | float, profit: FloatArray | float
) -> tuple[FloatArray | float, np.ndarray | bool]:
    """Accumulate profit into net worth; flag bankruptcy on strictly
    negative net worth (exactly zero survives the law of motion; the
    engine retires that measure-zero case separately).
    """
    new = net_worth_prev + profit
    bankrupt = new < 0
    return new, bankrupt
