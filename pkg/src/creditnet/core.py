"""Domain types, ring topology, parameter validation, and economy setup.

The economy has three sectors of equal size n: downstream firms selling
final goods at a stochastic price, upstream firms producing intermediates
on demand, and banks financing both. Firms and banks sit on interlocking
rings; all indices are 0-based internally and reported 1-based in
user-facing output.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

import numpy as np

FloatArray = np.ndarray


class ParameterError(ValueError):
    """Raised when a parameter set violates one or more model constraints."""


@dataclass(frozen=True)
class Parameters:
    """Full model constant set. Defaults reproduce the reference experiment.

    Construction is intentionally permissive; call :func:`validate_params`
    (done by every run/config entry point) to enforce the constraints.
    """

    phi: float = 2.5        # downstream output scale, > 1
    beta: float = 0.9       # financial-constraint exponent, in (0, 1)
    gamma: float = 0.5      # intermediate goods per unit of downstream output
    delta_d: float = 0.5    # labor per unit of downstream output
    delta_u: float = 1.0    # upstream goods per unit of labor
    k: float = 0.1          # loan-rate parameter, in (0, 1)
    alpha: float = 0.85     # prudential capital coefficient, in (0, 1]
    r_u: float = 0.05       # commercial-credit rate per period
    r_d: float = 0.01       # deposit rate per period
    r_bb: float = 0.01      # interbank rate per period
    w: float = 1.0          # wage per labor unit
    p: float = 1.0          # intermediate-goods price
    n_agents: int = 250     # agents per sector (equal across sectors)
    horizon: int = 1000     # simulated periods
    a0: float = 100.0       # initial / entrant firm net worth
    e0: float = 100.0       # initial / entrant bank equity
    seed: int = 0           # RNG seed

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def with_overrides(self, **kwargs) -> "Parameters":
        return replace(self, **kwargs)


INT_FIELDS = ("n_agents", "horizon", "seed")
PARAM_FIELDS = tuple(f.name for f in fields(Parameters))


def validate_params(p: Parameters) -> Parameters:
    """Check every model constraint; return ``p`` unchanged if all hold.

    Raises :class:`ParameterError` naming every violated constraint, not
    just the first one found.
    """
    errors = []
    if not p.phi > 1:
        errors.append(f"phi must exceed 1 (got {p.phi})")
    if not 0 < p.beta < 1:
        errors.append(f"beta must lie strictly inside (0,1) (got {p.beta})")
    if not 0 < p.k < 1:
        errors.append(f"k must lie strictly inside (0,1) (got {p.k})")
    if not 0 < p.alpha <= 1:
        errors.append(f"alpha must lie in (0,1] (got {p.alpha})")
    for name in ("gamma", "delta_d", "delta_u", "w", "p"):
        value = getattr(p, name)
        if not value > 0:
            errors.append(f"{name} must be positive (got {value})")
    for name in ("r_u", "r_d", "r_bb"):
        value = getattr(p, name)
        if value < 0:
            errors.append(f"{name} must be nonnegative (got {value})")
    if p.n_agents < 3:
        errors.append(f"n_agents must be at least 3 (got {p.n_agents})")
    if p.horizon < 1:
        errors.append(f"horizon must be at least 1 (got {p.horizon})")
    if not p.a0 > 0:
        errors.append(f"a0 must be positive (got {p.a0})")
    if not p.e0 > 0:
        errors.append(f"e0 must be positive (got {p.e0})")
    if errors:
        raise ParameterError("; ".join(errors))
    return p


@dataclass(frozen=True)
class Topology:
    """Ring maps linking the three sectors, with modular wraparound.

    Downstream firm i buys from upstream firms {i, (i+1) mod n}; upstream
    firm j sells to downstream firms {(j-1) mod n, j}; firm index i banks
    at bank i in both sectors; bank z's interbank neighbors are
    {(z-1) mod n, (z+1) mod n}.
    """

    n: int
    suppliers: np.ndarray       # shape (n, 2): upstream indices per downstream firm
    customers: np.ndarray       # shape (n, 2): downstream indices per upstream firm
    bank_of_firm: np.ndarray    # shape (n,): identity map firm -> bank
    bank_neighbors: np.ndarray  # shape (n, 2): (left, right) ring neighbors per bank


def build_topology(n: int) -> Topology:
    """Construct the ring topology for ``n`` agents per sector."""
    if n < 3:
        raise ValueError(f"topology needs at least 3 agents per sector (got {n})")
    idx = np.arange(n)
    suppliers = np.stack([idx, (idx + 1) % n], axis=1)
    customers = np.stack([(idx - 1) % n, idx], axis=1)
    bank_of_firm = idx.copy()
    bank_neighbors = np.stack([(idx - 1) % n, (idx + 1) % n], axis=1)
    return Topology(n, suppliers, customers, bank_of_firm, bank_neighbors)


@dataclass
class Plan:
    """One downstream firm's intended production for the current period.

    At construction ``labor = delta_d * output`` and
    ``intermediate_order = gamma * output``; rationing rescales all fields
    proportionally and delivery failures lower ``effective_output`` only.
    Fields are scalars or aligned arrays (whole-sector cross sections).
    """

    output: FloatArray | float
    labor: FloatArray | float
    intermediate_order: FloatArray | float
    effective_output: FloatArray | float


@dataclass
class Loan:
    """A one-period bank loan financing a wage bill."""

    borrower: object
    principal: FloatArray | float
    rate: FloatArray | float
    repayment_due: FloatArray | float


@dataclass
class Claim:
    """A creditor's claim on a failing debtor, used in bankruptcy resolution."""

    creditor: object
    amount: float


def _zeros(n: int) -> np.ndarray:
    return np.zeros(n, dtype=np.float64)


def _empty_plan(n: int) -> Plan:
    return Plan(_zeros(n), _zeros(n), _zeros(n), _zeros(n))


def _empty_loan(n: int) -> Loan:
    return Loan(np.arange(n), _zeros(n), _zeros(n), _zeros(n))


@dataclass
class DownstreamFirms:
    """Cross-section of all downstream firms (one array slot per firm).

    ``net_worth`` stays positive for every participant: bankrupt firms are
    replaced before the next period starts.
    """

    net_worth: np.ndarray
    rate: np.ndarray          # bank loan rate priced this period
    price: np.ndarray         # realized output price this period
    profit: np.ndarray
    age: np.ndarray           # periods since entry
    plan: Plan
    loan: Loan

    @property
    def ids(self) -> np.ndarray:
        return np.arange(len(self.net_worth))


@dataclass
class UpstreamFirms:
    """Cross-section of all upstream firms.

    ``delivered <= demand`` and ``labor = delivered / delta_u`` hold every
    period (production is on demand, capped by financed labor).
    """

    net_worth: np.ndarray
    demand: np.ndarray        # goods ordered this period
    delivered: np.ndarray     # goods actually produced
    labor: np.ndarray
    rate: np.ndarray
    profit: np.ndarray
    age: np.ndarray
    loan: Loan

    @property
    def ids(self) -> np.ndarray:
        return np.arange(len(self.net_worth))


@dataclass
class Banks:
    """Cross-section of all banks.

    Within any period at most one of ``ib_lent_cur`` / ``ib_borrowed_cur``
    is nonzero per bank (a bank is a lender or a borrower, never both).
    ``supply`` holds the period's lendable funds equity/alpha as computed
    from start-of-period equity (zero at initialization, like every flow
    field).
    """

    equity: np.ndarray
    supply: np.ndarray
    loans_extended: np.ndarray
    deposits: np.ndarray
    bad_debt: np.ndarray          # charged this period
    ib_lent_prev: np.ndarray      # open from last period, repaid to us now
    ib_borrowed_prev: np.ndarray  # open from last period, repaid by us now
    ib_lent_cur: np.ndarray       # opened this period
    ib_borrowed_cur: np.ndarray
    ib_flow: np.ndarray           # net interbank cash-flow term this period
    profit: np.ndarray
    age: np.ndarray

    @property
    def ids(self) -> np.ndarray:
        return np.arange(len(self.equity))


@dataclass
class EconomyState:
    """The full economy at one point in time; single-owner, engine-mutated.

    ``t`` is the index of the next period to execute (1-based).
    ``open_flows`` are interbank loans opened last period and still due;
    ``pending_interbank_bd`` is bad debt already scheduled against this
    period from interbank defaults.
    """

    t: int
    downstream: DownstreamFirms
    upstream: UpstreamFirms
    banks: Banks
    topology: Topology
    median_a_d: float
    median_a_u: float
    open_flows: list = field(default_factory=list)
    pending_interbank_bd: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.topology.n


def init_economy(p: Parameters) -> EconomyState:
    """Build the period-1 economy: uniform endowments, zero flow fields."""
    validate_params(p)
    n = p.n_agents
    downstream = DownstreamFirms(
        net_worth=np.full(n, p.a0),
        rate=_zeros(n),
        price=_zeros(n),
        profit=_zeros(n),
        age=np.zeros(n, dtype=np.int64),
        plan=_empty_plan(n),
        loan=_empty_loan(n),
    )
    upstream = UpstreamFirms(
        net_worth=np.full(n, p.a0),
        demand=_zeros(n),
        delivered=_zeros(n),
        labor=_zeros(n),
        rate=_zeros(n),
        profit=_zeros(n),
        age=np.zeros(n, dtype=np.int64),
        loan=_empty_loan(n),
    )
    banks = Banks(
        equity=np.full(n, p.e0),
        supply=_zeros(n),
        loans_extended=_zeros(n),
        deposits=_zeros(n),
        bad_debt=_zeros(n),
        ib_lent_prev=_zeros(n),
        ib_borrowed_prev=_zeros(n),
        ib_lent_cur=_zeros(n),
        ib_borrowed_cur=_zeros(n),
        ib_flow=_zeros(n),
        profit=_zeros(n),
        age=np.zeros(n, dtype=np.int64),
    )
    return EconomyState(
        t=1,
        downstream=downstream,
        upstream=upstream,
        banks=banks,
        topology=build_topology(n),
        median_a_d=float(p.a0),
        median_a_u=float(p.a0),
        open_flows=[],
        pending_interbank_bd=_zeros(n),
    )
