import math

import pytest

from rsaccr.saccr import (
    AddOnContribution,
    CollateralTerms,
    SupervisoryConfig,
    aggregate_hedging_set,
    addon_value,
    ead,
    fx_set,
    maturity_bucket,
    maturity_factor,
    maturity_factor_margined,
    maturity_factor_unmargined,
    pfe_multiplier,
    portfolio_saccr_addon,
    rates_set,
    supervisory_duration,
    trade_addon,
)
from rsaccr.trades import Trade, make_fra_strip, make_zero_addon_package, split_swap, vanilla_swap


class TestSupervisoryDuration:
    def test_spot_ten_year(self):
        # (1 - exp(-0.5)) / 0.05
        assert supervisory_duration(0.0, 10.0) == pytest.approx(7.8693868057473315, rel=1e-12)

    def test_degenerate_window(self):
        assert supervisory_duration(4.0, 4.0) == 0.0

    def test_forward_window(self):
        # (exp(-0.15) - exp(-0.5)) / 0.05
        assert supervisory_duration(3.0, 10.0) == pytest.approx(5.083546334248488, rel=1e-12)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            supervisory_duration(5.0, 3.0)

    def test_small_mean_reversion_limit(self):
        for end in (1.0, 7.0, 25.0):
            assert supervisory_duration(0.0, end, a=1e-8) == pytest.approx(end, rel=1e-6)


class TestMaturityFactor:
    def test_capped_at_one(self, cfg):
        assert maturity_factor_unmargined(10.0, cfg) == 1.0

    def test_sub_year_scaling(self, cfg):
        assert maturity_factor_unmargined(0.5, cfg) == pytest.approx(math.sqrt(0.5), rel=1e-12)

    def test_business_day_floor(self, cfg):
        assert maturity_factor_unmargined(0.001, cfg) == pytest.approx(math.sqrt(10 / 250), rel=1e-12)

    def test_margined(self):
        assert maturity_factor_margined(10 / 250) == pytest.approx(0.3, rel=1e-12)

    def test_trade_dispatch(self, cfg):
        swap = vanilla_swap("s", 1e8, 0.01, 0.0, 10.0, payer=True)
        assert maturity_factor(swap, cfg) == 1.0
        margined = Trade(id="m", legs=swap.legs, margined=True, mpor=10 / 250)
        assert maturity_factor(margined, cfg) == pytest.approx(0.3)


class TestBuckets:
    @pytest.mark.parametrize(
        "t,bucket", [(0.0, 1), (0.999, 1), (1.0, 2), (4.999, 2), (5.0, 3), (30.0, 3)]
    )
    def test_boundaries(self, t, bucket):
        assert maturity_bucket(t) == bucket

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            maturity_bucket(-0.1)


class TestTradeAddon:
    def test_atm_ten_year(self, cfg):
        swap = vanilla_swap("atm", 100e6, 0.0, 0.0, 10.0, payer=True)
        contribution = trade_addon(swap, cfg)
        assert contribution.bucket == 3
        assert contribution.delta == 1
        assert addon_value(contribution, cfg) == pytest.approx(3_934_693.4028736656, abs=1.0)

    def test_three_year(self, cfg):
        swap = vanilla_swap("3y", 100e6, 0.0, 0.0, 3.0, payer=True)
        assert addon_value(trade_addon(swap, cfg), cfg) == pytest.approx(1_392_920.236, abs=1.0)

    def test_forward_start(self, cfg):
        swap = vanilla_swap("fwd", 100e6, 0.0, 3.0, 10.0, payer=True)
        assert addon_value(trade_addon(swap, cfg), cfg) == pytest.approx(2_541_773.167, abs=1.0)

    def test_receiver_delta(self, cfg):
        swap = vanilla_swap("r", 100e6, 0.0, 0.0, 10.0, payer=False)
        assert trade_addon(swap, cfg).delta == -1


class TestAggregation:
    def test_split_at_three_years(self, cfg):
        swap = vanilla_swap("atm", 100e6, 0.0, 0.0, 10.0, payer=True)
        total, _ = portfolio_saccr_addon(split_swap(swap, 3.0), cfg)
        assert total == pytest.approx(3_654_794.085460109, abs=1.0)

    def test_fra_strip_regression(self, cfg):
        swap = vanilla_swap("atm", 100e6, 0.0, 0.0, 10.0, payer=True)
        total, _ = portfolio_saccr_addon(make_fra_strip(swap), cfg)
        assert total == pytest.approx(3_431_555.6409274256, rel=1e-9)

    def test_equal_and_opposite_cancel_exactly(self, cfg):
        swap = vanilla_swap("a", 100e6, 0.0, 0.0, 10.0, payer=True)
        total, _ = portfolio_saccr_addon([swap, swap.mirrored()], cfg)
        assert total == 0.0

    def test_package_nets_to_zero(self, cfg):
        total, _ = portfolio_saccr_addon(make_zero_addon_package(100e6, 0.01, 6.0), cfg)
        assert abs(total) < 1e-6

    def test_single_bucket_is_absolute_sum(self, cfg):
        contribs = [
            AddOnContribution(rates_set("USD"), 2, 1e8, 0.0, 3.0, +1, 1.0),
            AddOnContribution(rates_set("USD"), 2, 4e7, 0.0, 2.0, -1, 1.0),
        ]
        assert aggregate_hedging_set(contribs, cfg) == pytest.approx(cfg.sf_ir * 6e7, rel=1e-12)

    def test_mixed_sets_rejected(self, cfg):
        contribs = [
            AddOnContribution(rates_set("USD"), 2, 1e8, 0.0, 3.0, +1, 1.0),
            AddOnContribution(rates_set("EUR"), 2, 1e8, 0.0, 3.0, +1, 1.0),
        ]
        with pytest.raises(ValueError):
            aggregate_hedging_set(contribs, cfg)

    def test_fx_set_nets_absolutely(self, cfg):
        contribs = [
            AddOnContribution(fx_set("EUR", "USD"), 0, 2e6, 0.0, 2.0, +1, 1.0),
            AddOnContribution(fx_set("EUR", "USD"), 0, 5e5, 0.0, 1.0, -1, 1.0),
        ]
        assert aggregate_hedging_set(contribs, cfg) == pytest.approx(cfg.sf_fx * 1.5e6, rel=1e-12)

    def test_cross_bucket_quadratic_form(self, cfg):
        # hand-computed two-bucket aggregate
        c2 = AddOnContribution(rates_set("USD"), 2, 1e8, 0.0, 3.0, +1, 1.0)
        c3 = AddOnContribution(rates_set("USD"), 3, 2e8, 0.0, 9.0, +1, 1.0)
        d2, d3 = cfg.sf_ir * 1e8, cfg.sf_ir * 2e8
        expected = math.sqrt(d2 * d2 + d3 * d3 + 2 * 0.7 * d2 * d3)
        assert aggregate_hedging_set([c2, c3], cfg) == pytest.approx(expected, rel=1e-12)


class TestMultiplier:
    def test_at_zero(self, cfg):
        assert pfe_multiplier(0.0, 0.0, 1e6, cfg) == 1.0

    def test_floor_in_deep_deficit(self, cfg):
        assert pfe_multiplier(-1e18, 0.0, 1e6, cfg) == pytest.approx(0.05, abs=1e-12)

    def test_minus_one_addon(self, cfg):
        # 0.05 + 0.95 * exp(-1 / 1.9), evaluated directly
        got = pfe_multiplier(-1e6, 0.0, 1e6, cfg)
        assert got == pytest.approx(0.6112386382061701, abs=1e-12)

    def test_degenerate_addon(self, cfg):
        assert pfe_multiplier(5.0, 0.0, 0.0, cfg) == 1.0
        assert pfe_multiplier(-5.0, 0.0, 0.0, cfg) == cfg.multiplier_floor

    def test_bounds_and_monotonicity(self, cfg):
        prev = 0.0
        for k in range(-60, 21):
            m = pfe_multiplier(float(k) * 1e5, 0.0, 1e6, cfg)
            assert cfg.multiplier_floor <= m <= 1.0
            assert m >= prev - 1e-15
            prev = m


class TestEad:
    def test_zero_portfolio(self, cfg):
        result = ead([], CollateralTerms(), cfg)
        assert result.ead == 0.0

    def test_uncollateralized_atm(self, cfg):
        swap = vanilla_swap("s", 100e6, 0.0, 0.0, 10.0, payer=True)
        result = ead([swap], CollateralTerms(value=0.0, collateral=0.0), cfg)
        assert result.multiplier == 1.0
        assert result.ead == pytest.approx(1.4 * 3_934_693.4, rel=1e-6)

    def test_margined_capped_at_unmargined(self, cfg):
        legs = vanilla_swap("s", 100e6, 0.0, 0.0, 10.0, payer=True).legs
        unmargined = Trade(id="u", legs=legs)
        margined = Trade(id="m", legs=legs, margined=True, mpor=10 / 250)
        # huge TH+MTA would blow past the unmargined figure without the cap
        terms = CollateralTerms(value=0.0, collateral=0.0, threshold=1e9, mta=1e7)
        capped = ead([margined], terms, cfg)
        reference = ead([unmargined], CollateralTerms(), cfg)
        assert capped.ead <= reference.ead + 1e-9

    def test_margined_usually_below_unmargined(self, cfg):
        legs = vanilla_swap("s", 100e6, 0.0, 0.0, 10.0, payer=True).legs
        margined = Trade(id="m", legs=legs, margined=True, mpor=10 / 250)
        unmargined = Trade(id="u", legs=legs)
        m = ead([margined], CollateralTerms(), cfg)
        u = ead([unmargined], CollateralTerms(), cfg)
        assert m.ead <= u.ead

    def test_rc_floor_at_zero(self, cfg):
        swap = vanilla_swap("s", 100e6, 0.0, 0.0, 10.0, payer=True)
        result = ead([swap], CollateralTerms(value=-5e6), cfg)
        assert result.replacement_cost == 0.0
        assert result.multiplier < 1.0


def test_config_validation():
    with pytest.raises(ValueError):
        SupervisoryConfig(rho1=0.2, rho2=0.7)
    with pytest.raises(ValueError):
        SupervisoryConfig(alpha=-1.0)


def test_contribution_validation():
    with pytest.raises(ValueError):
        AddOnContribution(rates_set("USD"), 2, -1.0, 0.0, 1.0, +1, 1.0)
    with pytest.raises(ValueError):
        AddOnContribution(rates_set("USD"), 2, 1.0, 2.0, 1.0, +1, 1.0)
    with pytest.raises(ValueError):
        AddOnContribution(rates_set("USD"), 2, 1.0, 0.0, 1.0, 2, 1.0)
