"""creditnet: a deterministic three-sector credit-network economy simulator.

Downstream firms sell final goods at a stochastic price, upstream firms
produce intermediates on demand against trade credit, and banks finance
both and trade liquidity with their ring neighbors. Bankruptcies cascade
across the three interlocked rings; the statistics layer verifies the
resulting size, growth-rate, and avalanche distributions.
"""

__version__ = "0.1.0"

from .core import EconomyState, Parameters, build_topology, init_economy, validate_params
from .engine import PeriodRecord, RunResult, run, step

__all__ = [
    "EconomyState",
    "Parameters",
    "PeriodRecord",
    "RunResult",
    "__version__",
    "build_topology",
    "init_economy",
    "run",
    "step",
    "validate_params",
]
