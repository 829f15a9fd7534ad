import math

import numpy as np
import pytest

from creditnet.core import Parameters
from creditnet.firms import (
    downstream_profit,
    effective_output,
    plan_downstream,
    scale_plan,
    update_net_worth,
    upstream_demand,
    upstream_labor,
    upstream_profit,
)

P = Parameters()


class TestPlanDownstream:
    def test_reference_plan_at_100(self):
        plan = plan_downstream(100.0, P)
        assert plan.output == pytest.approx(157.73933612004834, rel=1e-12)
        assert plan.labor == pytest.approx(78.86966806002417, rel=1e-12)
        assert plan.intermediate_order == pytest.approx(78.86966806002417, rel=1e-12)
        assert plan.effective_output == pytest.approx(plan.output)

    def test_unit_net_worth_gives_scale_output(self):
        assert plan_downstream(1.0, P).output == pytest.approx(P.phi)

    def test_matches_high_precision_power_oracle(self):
        rng = np.random.default_rng(42)
        for a in rng.uniform(0.5, 5000.0, 10):
            expected = P.phi * math.exp(P.beta * math.log(a))
            assert plan_downstream(float(a), P).output == pytest.approx(expected, rel=1e-12)

    def test_nonpositive_net_worth_rejected(self):
        with pytest.raises(ValueError):
            plan_downstream(0.0, P)
        with pytest.raises(ValueError):
            plan_downstream(np.array([10.0, -1.0]), P)

    def test_strictly_increasing_in_net_worth(self):
        rng = np.random.default_rng(7)
        values = np.sort(rng.uniform(1.0, 1000.0, 50))
        outputs = plan_downstream(values, P).output
        assert np.all(np.diff(outputs) > 0)


class TestScalePlan:
    def test_identity(self):
        plan = plan_downstream(100.0, P)
        scaled = scale_plan(plan, 1.0)
        assert scaled.output == pytest.approx(plan.output)
        assert scaled.labor == pytest.approx(plan.labor)

    def test_half(self):
        plan = plan_downstream(100.0, P)
        scaled = scale_plan(plan, 0.5)
        assert scaled.output == pytest.approx(plan.output / 2)
        assert scaled.labor == pytest.approx(plan.labor / 2)
        assert scaled.intermediate_order == pytest.approx(plan.intermediate_order / 2)

    def test_zero_idles_the_firm(self):
        scaled = scale_plan(plan_downstream(100.0, P), 0.0)
        assert scaled.output == 0.0 and scaled.labor == 0.0

    def test_factor_outside_unit_interval_rejected(self):
        plan = plan_downstream(100.0, P)
        with pytest.raises(ValueError):
            scale_plan(plan, 1.5)
        with pytest.raises(ValueError):
            scale_plan(plan, -0.1)

    def test_proportions_preserved_for_random_factors(self):
        rng = np.random.default_rng(3)
        plan = plan_downstream(rng.uniform(1, 500, 20), P)
        for factor in rng.uniform(0.01, 1.0, 25):
            scaled = scale_plan(plan, float(factor))
            np.testing.assert_allclose(scaled.labor / scaled.output, P.delta_d, rtol=1e-12)
            np.testing.assert_allclose(
                scaled.intermediate_order / scaled.output, P.gamma, rtol=1e-12
            )


class TestUpstreamSide:
    def test_demand_average_of_orders(self):
        assert upstream_demand(10.0, 20.0) == 15.0
        assert upstream_demand(7.0, 7.0) == 7.0
        assert upstream_demand(0.0, 0.0) == 0.0

    def test_labor_requirement(self):
        assert upstream_labor(78.87, 1.0) == pytest.approx(78.87)
        assert upstream_labor(0.0, 1.0) == 0.0
        assert upstream_labor(10.0, 2.0) == 5.0


class TestEffectiveOutput:
    def test_full_delivery_recovers_plan(self):
        plan = plan_downstream(100.0, P)
        assert effective_output(plan, plan.intermediate_order, P) == pytest.approx(plan.output)

    def test_half_delivery_halves_output(self):
        plan = plan_downstream(100.0, P)
        out = effective_output(plan, plan.intermediate_order / 2, P)
        assert out == pytest.approx(plan.output / 2)

    def test_no_delivery_no_output(self):
        plan = plan_downstream(100.0, P)
        assert effective_output(plan, 0.0, P) == 0.0

    def test_over_delivery_rejected(self):
        plan = plan_downstream(100.0, P)
        with pytest.raises(ValueError):
            effective_output(plan, plan.intermediate_order * 1.5, P)


class TestDownstreamProfit:
    def test_reference_loss_at_mean_price(self):
        y = 157.73933612004834
        n = q = 78.86966806002417
        profit = downstream_profit(1.0, y, 0.1, n, 0.05, q, P)
        assert profit == pytest.approx(-11.83045020900363, rel=1e-12)

    def test_zero_price_pure_cost(self):
        y = 157.73933612004834
        n = q = 78.86966806002417
        profit = downstream_profit(0.0, y, 0.1, n, 0.05, q, P)
        assert profit == pytest.approx(-169.56978632905196, rel=1e-12)

    def test_idle_firm_earns_zero(self):
        assert downstream_profit(1.3, 0.0, 0.1, 0.0, 0.05, 0.0, P) == 0.0

    def test_affine_in_price_with_slope_output(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            y, n, q = rng.uniform(1, 300, 3)
            u1, u2 = rng.uniform(0, 2, 2)
            p1 = downstream_profit(u1, y, 0.1, n, 0.05, q, P)
            p2 = downstream_profit(u2, y, 0.1, n, 0.05, q, P)
            assert p2 - p1 == pytest.approx((u2 - u1) * y, rel=1e-9, abs=1e-9)


class TestUpstreamProfit:
    def test_reference_negative_margin(self):
        q = 78.86966806002417
        profit = upstream_profit(q, 0.1, q, P)
        assert profit == pytest.approx(-0.05 * q, rel=1e-9)
        assert profit == pytest.approx(-3.9435, abs=1e-3)

    def test_no_delivery_zero_profit(self):
        assert upstream_profit(0.0, 0.1, 0.0, P) == 0.0

    def test_rate_equality_cancels_margin(self):
        assert upstream_profit(50.0, 0.05, 50.0, P) == pytest.approx(0.0, abs=1e-12)

    def test_sign_tracks_rate_gap(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            q = rng.uniform(0.1, 500)
            rate = rng.uniform(0.0, 0.5)
            profit = upstream_profit(q, rate, q, P)
            assert np.sign(profit) == np.sign(P.r_u - rate)


class TestUpdateNetWorth:
    def test_profit_accumulates(self):
        new, bankrupt = update_net_worth(100.0, -11.83)
        assert new == pytest.approx(88.17)
        assert not bankrupt

    def test_exact_zero_survives(self):
        new, bankrupt = update_net_worth(10.0, -10.0)
        assert new == 0.0 and not bankrupt

    def test_strictly_negative_fails(self):
        new, bankrupt = update_net_worth(10.0, -10.01)
        assert new == pytest.approx(-0.01)
        assert bankrupt

    def test_zero_fixed_point(self):
        plan = scale_plan(plan_downstream(100.0, P), 0.0)
        profit = downstream_profit(1.7, plan.effective_output, 0.1, plan.labor,
                                   P.r_u, 0.0, P)
        new, bankrupt = update_net_worth(100.0, profit)
        assert new == 100.0 and not bankrupt

    def test_vectorized(self):
        new, bankrupt = update_net_worth(np.array([10.0, 5.0]), np.array([-9.0, -6.0]))
        assert np.allclose(new, [1.0, -1.0])
        assert list(bankrupt) == [False, True]
