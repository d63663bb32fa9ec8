import math

import pytest

from rsaccr.curves import CurveSet, InflationCurve, flat_curve
from rsaccr.trades import (
    CashflowKind,
    Direction,
    Fixed,
    Floating,
    InflationCompound,
    InflationFloating,
    Leg,
    ScheduleError,
    Trade,
    compound_factor,
    constant_notional,
    generate_schedule,
    make_fra_strip,
    make_zero_addon_package,
    net_cashflow_map,
    par_rate,
    split_swap,
    swap_pv,
    time_averaged_notional,
    trade_cashflows,
    vanilla_swap,
    zero_coupon_par_rate,
    zero_coupon_swap,
)


class TestSchedules:
    def test_ten_year_quarterly_has_forty_cashflows(self, flat0):
        leg = Leg(Direction.RECEIVE, Floating(0.25), 0.0, 10.0, 0.25, constant_notional(1e8, 10.0))
        assert len(generate_schedule(leg, flat0)) == 40

    def test_fixed_amount_is_notional_accrual_rate(self, flat0):
        leg = Leg(Direction.PAY, Fixed(0.02), 0.0, 1.0, 1.0, constant_notional(100e6, 1.0))
        (cf,) = generate_schedule(leg, flat0)
        assert cf.amount == pytest.approx(2_000_000.0, abs=1e-9)
        assert cf.sign == -1

    def test_floating_on_flat_zero_projects_zero(self, flat0):
        leg = Leg(Direction.RECEIVE, Floating(0.25), 0.0, 10.0, 0.25, constant_notional(1e8, 10.0))
        assert all(cf.amount == 0.0 for cf in generate_schedule(leg, flat0))

    def test_non_integer_period_count_rejected(self, flat0):
        leg = Leg(Direction.PAY, Fixed(0.02), 0.0, 1.1, 0.25, constant_notional(1e8, 1.1))
        with pytest.raises(ScheduleError):
            generate_schedule(leg, flat0)

    def test_stub_free_count_property(self, flat0):
        for n in (1, 7, 40, 80):
            leg = Leg(Direction.PAY, Fixed(0.01), 0.0, n * 0.25, 0.25, constant_notional(1e6, n * 0.25))
            assert len(generate_schedule(leg, flat0)) == n

    def test_amortising_notional_steps(self, flat0):
        steps = ((5.0, 2e8), (10.0, 1e8))
        leg = Leg(Direction.PAY, Fixed(0.01), 0.0, 10.0, 0.25, steps)
        flows = generate_schedule(leg, flat0)
        assert flows[0].notional == 2e8
        assert flows[-1].notional == 1e8
        # segment boundary: period starting at 5.0 belongs to the second step
        at_boundary = [cf for cf in flows if cf.pay_time == pytest.approx(5.25)]
        assert at_boundary[0].notional == 1e8

    def test_leg_validation(self):
        with pytest.raises(ScheduleError):
            Leg(Direction.PAY, Fixed(0.01), 5.0, 5.0, 0.25, constant_notional(1e6, 5.0))
        with pytest.raises(ScheduleError):
            Leg(Direction.PAY, Fixed(0.01), 0.0, 5.0, 0.25, ((2.0, 1e6),))  # does not cover leg

    def test_inflation_legs_need_curve(self, flat0):
        leg = Leg(Direction.PAY, InflationFloating(), 0.0, 2.0, 1.0, constant_notional(1e6, 2.0))
        with pytest.raises(ScheduleError):
            generate_schedule(leg, flat0)

    def test_inflation_schedule_amounts(self):
        infl = InflationCurve(base_index_value=100.0, projection_pillars=((1.0, 102.0), (2.0, 104.04)))
        cs = CurveSet(discount=flat_curve(0.0), inflation=infl)
        leg = Leg(Direction.RECEIVE, InflationFloating(), 0.0, 2.0, 1.0, constant_notional(1e6, 2.0))
        flows = generate_schedule(leg, cs)
        assert [cf.kind for cf in flows] == [CashflowKind.INFLATION_FLOATING] * 2
        assert flows[0].amount == pytest.approx(1e6 * 0.02, rel=1e-12)
        zc = Leg(Direction.RECEIVE, InflationCompound(), 0.0, 2.0, 1.0, constant_notional(1e6, 2.0))
        (cf,) = generate_schedule(zc, cs)
        assert cf.amount == pytest.approx(1e6 * 1.0404, rel=1e-12)


class TestParRate:
    def test_flat_zero_par_is_zero(self, flat0):
        swap = vanilla_swap("s", 1e8, 0.0, 0.0, 10.0, payer=True)
        assert par_rate(swap, flat0) == 0.0

    def test_flat_two_percent_par(self, flat2):
        swap = vanilla_swap("s", 1e8, 0.0, 0.0, 10.0, payer=True)
        rate = par_rate(swap, flat2)
        # equals the (constant) quarterly forward on a flat curve
        assert rate == pytest.approx(0.02005008343760384, rel=1e-9)
        assert abs(rate - 0.02) < 1e-4

    def test_single_period_swap_par_is_forward(self, flat2):
        from rsaccr.curves import forward_rate

        swap = vanilla_swap("s", 1e8, 0.0, 1.0, 1.25, payer=True)
        assert par_rate(swap, flat2) == pytest.approx(forward_rate(flat2.discount, 1.0, 0.25), rel=1e-12)

    def test_swap_prices_to_zero_at_par(self, flat2):
        rate = par_rate(vanilla_swap("p", 1e8, 0.0, 0.0, 10.0, payer=True), flat2)
        swap = vanilla_swap("s", 1e8, rate, 0.0, 10.0, payer=True)
        assert swap_pv(swap, flat2) == pytest.approx(0.0, abs=1e-6)

    def test_amortising_par_prices_to_zero(self, flat2):
        steps = ((5.0, 2e8), (10.0, 1e8))
        rate = par_rate(vanilla_swap("p", steps, 0.0, 0.0, 10.0, payer=True), flat2)
        swap = vanilla_swap("s", steps, rate, 0.0, 10.0, payer=True)
        assert swap_pv(swap, flat2) == pytest.approx(0.0, abs=1e-6)

    def test_zero_coupon_par(self, flat2):
        rate = zero_coupon_par_rate(flat2, 0.0, 10.0)
        swap = zero_coupon_swap("z", 1e8, rate, 0.0, 10.0, payer=True)
        assert swap_pv(swap, flat2) == pytest.approx(0.0, abs=1e-6)
        # roll-up equals the curve's compounding factor
        assert compound_factor(flat2, 0.0, 10.0, 0.25) == pytest.approx(
            1.0 / flat2.discount.discount_factor(10.0), rel=1e-12
        )


class TestFraStrip:
    def test_strip_count(self, flat2):
        swap = vanilla_swap("s", 1e8, 0.015, 0.0, 10.0, payer=True)
        assert len(make_fra_strip(swap)) == 40

    def test_net_cashflows_identical(self, flat2):
        swap = vanilla_swap("s", 1e8, 0.015, 0.0, 10.0, payer=True)
        strip = make_fra_strip(swap)
        swap_map = net_cashflow_map([swap], flat2)
        strip_map = net_cashflow_map(strip, flat2)
        assert swap_map.keys() == strip_map.keys()
        for k in swap_map:
            assert strip_map[k] == pytest.approx(swap_map[k], abs=1e-9)

    def test_single_period_strip_is_same_trade(self, flat2):
        swap = vanilla_swap("s", 1e8, 0.015, 0.0, 0.25, payer=True)
        (fra,) = make_fra_strip(swap)
        assert net_cashflow_map([fra], flat2) == net_cashflow_map([swap], flat2)

    def test_mirrored_flips_directions(self):
        swap = vanilla_swap("s", 1e8, 0.015, 0.0, 1.0, payer=True)
        mirror = swap.mirrored()
        assert [leg.direction for leg in mirror.legs] == [
            leg.direction.flipped() for leg in swap.legs
        ]


class TestSplit:
    def test_split_preserves_cashflows(self, flat2):
        swap = vanilla_swap("s", 1e8, 0.015, 0.0, 10.0, payer=True)
        parts = split_swap(swap, 3.0)
        assert len(parts) == 2
        merged = net_cashflow_map(parts, flat2)
        original = net_cashflow_map([swap], flat2)
        assert merged.keys() == original.keys()
        for k in original:
            assert merged[k] == pytest.approx(original[k], abs=1e-9)

    def test_split_requires_interior_boundary(self):
        swap = vanilla_swap("s", 1e8, 0.015, 0.0, 10.0, payer=True)
        with pytest.raises(ScheduleError):
            split_swap(swap, 3.1)
        with pytest.raises(ScheduleError):
            split_swap(swap, 10.0)


class TestZeroAddonPackage:
    def test_package_shape_and_notionals(self):
        t = 6.0
        trades = make_zero_addon_package(1e8, 0.01, t)
        assert len(trades) == 4
        k = math.exp(0.05 * t) / (math.exp(0.05 * t) - 1.0)
        amort = trades[0]
        assert amort.legs[0].notional_at(0.0) == pytest.approx(3 * k * 1e8, rel=1e-14)
        assert amort.legs[0].notional_at(t) == pytest.approx(k * 1e8, rel=1e-14)
        assert trades[1].legs[0].notional_at(0.0) == pytest.approx(2 * k * 1e8, rel=1e-14)
        assert trades[3].legs[0].notional_at(0.0) == pytest.approx(1e8 / (math.exp(0.05 * t) - 1), rel=1e-14)

    def test_net_cashflows_cancel_beyond_horizon(self, flat2):
        t = 6.0
        trades = make_zero_addon_package(1e8, 0.01, t)
        residual = vanilla_swap("r", 1e8, 0.01, 0.0, t, payer=False)
        net = net_cashflow_map(trades, flat2)
        target = net_cashflow_map([residual], flat2)
        for date, amount in net.items():
            if date > t:
                assert amount == pytest.approx(0.0, abs=1e-4)
            else:
                assert amount == pytest.approx(target[date], abs=1e-4)

    def test_bucket_precondition(self):
        with pytest.raises(ScheduleError):
            make_zero_addon_package(1e8, 0.01, 3.0)  # 3y and 6y straddle buckets
        with pytest.raises(ScheduleError):
            make_zero_addon_package(1e8, 0.01, 0.5)
        make_zero_addon_package(1e8, 0.01, 2.0)  # 2y and 4y share a bucket
        make_zero_addon_package(1e8, 0.01, 6.0)


class TestNotionalAverage:
    def test_equal_segments_average_exactly(self):
        base = 2.85e8 / 3.7  # arbitrary full-precision value
        leg = Leg(
            Direction.PAY,
            Fixed(0.01),
            0.0,
            12.0,
            0.25,
            ((6.0, 3.0 * base), (12.0, base)),
        )
        assert time_averaged_notional(leg) == 2.0 * base

    def test_constant_notional(self):
        leg = Leg(Direction.PAY, Fixed(0.01), 0.0, 5.0, 0.25, constant_notional(7e7, 5.0))
        assert time_averaged_notional(leg) == 7e7


def test_trade_maturity_and_validation():
    swap = vanilla_swap("s", 1e8, 0.01, 0.0, 10.0, payer=True)
    assert swap.maturity == 10.0
    assert swap.earliest_start == 0.0
    with pytest.raises(ScheduleError):
        Trade(id="bad", legs=swap.legs, margined=True, mpor=None)


def test_zero_coupon_trade_shape(flat2):
    zc = zero_coupon_swap("z", 1e8, 0.02, 0.0, 10.0, payer=True)
    flows = trade_cashflows(zc, flat2)
    kinds = sorted(cf.kind.value for cf in flows)
    assert kinds == ["compound", "fixed"]
    fixed = [cf for cf in flows if cf.kind is CashflowKind.FIXED][0]
    assert fixed.amount == pytest.approx(1e8 * (1 + 0.25 * 0.02) ** 40, rel=1e-12)
