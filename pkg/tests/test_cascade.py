import logging

import numpy as np
import pytest

from creditnet.cascade import (
    Shortfall,
    aggregate_bad_debt,
    bank_profit,
    replace_agents,
    resolve_firm_bankruptcy,
    update_bank_equity,
)
from creditnet.core import Claim, Parameters, init_economy


def _claims(amounts):
    return [Claim(creditor=i, amount=a) for i, a in enumerate(amounts)]


class TestResolveFirmBankruptcy:
    def test_pro_rata_split(self):
        write_offs = resolve_firm_bankruptcy(
            Shortfall("firm", 10.0, _claims([110.0, 52.5, 52.5]))
        )
        assert write_offs == pytest.approx(
            [5.116279069767442, 2.441860465116279, 2.441860465116279], rel=1e-12
        )

    def test_sole_creditor_absorbs_all(self):
        assert resolve_firm_bankruptcy(Shortfall("firm", 10.0, _claims([110.0]))) == [10.0]

    def test_write_offs_capped_at_claims(self):
        write_offs = resolve_firm_bankruptcy(
            Shortfall("firm", 300.0, _claims([110.0, 52.5, 52.5]))
        )
        assert write_offs == pytest.approx([110.0, 52.5, 52.5])

    def test_empty_claims_logged_and_unallocated(self, caplog):
        with caplog.at_level(logging.WARNING):
            write_offs = resolve_firm_bankruptcy(Shortfall("firm", 5.0, []))
        assert write_offs == []
        assert "unallocated" in caplog.text

    def test_nonpositive_magnitude_rejected(self):
        with pytest.raises(ValueError):
            resolve_firm_bankruptcy(Shortfall("firm", 0.0, _claims([10.0])))

    def test_conservation_and_caps_random(self):
        rng = np.random.default_rng(19)
        for _ in range(50):
            claims = _claims(rng.uniform(0.0, 100.0, rng.integers(1, 6)))
            magnitude = float(rng.uniform(0.01, 400.0))
            total = sum(c.amount for c in claims)
            if total == 0:
                continue
            write_offs = resolve_firm_bankruptcy(Shortfall("x", magnitude, claims))
            assert sum(write_offs) == pytest.approx(min(magnitude, total), rel=1e-9)
            for wo, claim in zip(write_offs, claims):
                assert wo <= claim.amount + 1e-12


class TestBankProfit:
    def test_reference_value(self):
        profit = bank_profit(0.1, 78.87, 0.1, 78.87, 0.01, 17.65)
        assert profit == pytest.approx(15.5975, rel=1e-12)

    def test_all_zero(self):
        assert bank_profit(0.0, 0.0, 0.0, 0.0, 0.0, 0.0) == 0.0

    def test_pure_deposit_cost(self):
        assert bank_profit(0.0, 0.0, 0.0, 0.0, 0.01, 100.0) == pytest.approx(-1.0)


class TestUpdateBankEquity:
    def test_profit_accumulates(self):
        equity, failed = update_bank_equity(100.0, 15.60, 0.0, 0.0)
        assert equity == pytest.approx(115.60)
        assert not failed

    def test_bad_debt_can_fail_a_bank(self):
        equity, failed = update_bank_equity(100.0, 0.0, 150.0, 0.0)
        assert equity == pytest.approx(-50.0)
        assert failed

    def test_interbank_outflow(self):
        equity, failed = update_bank_equity(100.0, 0.0, 0.0, -15.1)
        assert equity == pytest.approx(84.9)
        assert not failed


class TestAggregateBadDebt:
    def test_firm_write_off_only(self):
        assert aggregate_bad_debt(5.1163, 0.0) == pytest.approx(5.1163)

    def test_nothing_failed(self):
        assert aggregate_bad_debt(0.0, 0.0) == 0.0

    def test_additivity(self):
        assert aggregate_bad_debt(5.1163, 5.05) == pytest.approx(10.1663)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            aggregate_bad_debt(-1.0, 0.0)


class TestReplaceAgents:
    def test_failed_slot_gets_fresh_entrant(self):
        p = Parameters(n_agents=20)
        state = init_economy(p)
        state.downstream.net_worth[:] = 55.0
        state.downstream.age[:] = 9
        failed = np.zeros(20, dtype=bool)
        failed[17] = True
        events = replace_agents(state, failed, np.zeros(20, bool), np.zeros(20, bool), p)
        assert state.downstream.net_worth[17] == p.a0
        assert state.downstream.age[17] == 0
        assert state.downstream.net_worth[16] == 55.0
        assert events == [("downstream", 17)]

    def test_no_failures_no_change(self):
        p = Parameters(n_agents=5)
        state = init_economy(p)
        none = np.zeros(5, dtype=bool)
        assert replace_agents(state, none, none, none, p) == []

    def test_failed_bank_starts_clean(self):
        p = Parameters(n_agents=5)
        state = init_economy(p)
        state.banks.equity[:] = -3.0
        state.banks.deposits[:] = 9.0
        state.banks.ib_lent_cur[:] = 4.0
        state.pending_interbank_bd[:] = 2.0
        failed = np.ones(5, dtype=bool)
        replace_agents(state, np.zeros(5, bool), np.zeros(5, bool), failed, p)
        assert np.all(state.banks.equity == p.e0)
        assert np.all(state.banks.deposits == 0.0)
        assert np.all(state.banks.ib_lent_cur == 0.0)
        assert np.all(state.pending_interbank_bd == 0.0)

    def test_population_conserved(self):
        p = Parameters(n_agents=7)
        state = init_economy(p)
        failed = np.ones(7, dtype=bool)
        replace_agents(state, failed, failed, failed, p)
        assert len(state.downstream.net_worth) == 7
        assert len(state.upstream.net_worth) == 7
        assert len(state.banks.equity) == 7
