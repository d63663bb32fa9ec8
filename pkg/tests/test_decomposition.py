import math

import pytest

from rsaccr.curves import CurveSet, InflationCurve, flat_curve, flat_zero_curve
from rsaccr.decomposition import (
    DecompositionSettings,
    ElementaryCashflow,
    cashflow_contributions,
    cms_contributions,
    compound_contributions,
    contributions_csv_rows,
    decompose,
    floating_contributions,
    fx_contribution,
    inflation_contributions,
    portfolio_rsaccr_addon,
    pv_contribution,
    trade_contributions,
)
from rsaccr.saccr import addon_value, aggregate_addon, supervisory_duration, trade_addon
from rsaccr.trades import (
    CashflowKind,
    DatedCashflow,
    make_fra_strip,
    split_swap,
    vanilla_swap,
    zero_coupon_swap,
)

NODISC = DecompositionSettings(discounting="none")


def _ecf(cf, currency="USD", trade_id="t"):
    return ElementaryCashflow(trade_id=trade_id, currency=currency, cashflow=cf)


def _fixed_cf(amount, pay, sign=+1, notional=1e8):
    return DatedCashflow(pay_time=pay, amount=amount, kind=CashflowKind.FIXED,
                         notional=notional, sign=sign, accrual=0.25)


def _float_cf(fix, tenor=0.25, amount=0.0, sign=+1, notional=1e8):
    return DatedCashflow(pay_time=fix + tenor, amount=amount, kind=CashflowKind.FLOATING,
                         notional=notional, sign=sign, accrual=tenor, fixing=fix, tenor=tenor)


class TestDecompose:
    def test_vanilla_swap_counts(self, flat0, cfg):
        swap = vanilla_swap("s", 1e8, 0.0, 0.0, 10.0, payer=True)
        flows = decompose(swap, flat0, NODISC)
        assert len(flows) == 80
        kinds = {cf.kind.value for cf in flows}
        assert kinds == {"fixed", "floating"}
        paid = [cf for cf in flows if cf.cashflow.sign == -1]
        assert len(paid) == 40  # the fixed leg of a payer

    def test_fra_strip_identical_multiset(self, flat2, cfg):
        swap = vanilla_swap("s", 1e8, 0.018, 0.0, 10.0, payer=True)
        key = lambda e: (e.kind.value, e.cashflow.pay_time, e.cashflow.sign, e.cashflow.amount)
        swap_flows = sorted(decompose(swap, flat2, NODISC), key=key)
        strip_flows = []
        for fra in make_fra_strip(swap):
            strip_flows.extend(decompose(fra, flat2, NODISC))
        strip_flows.sort(key=key)
        assert [key(e) for e in swap_flows] == [key(e) for e in strip_flows]

    def test_zero_coupon_decomposition(self, flat0, cfg):
        zc = zero_coupon_swap("z", 1e8, 0.0, 0.0, 10.0, payer=True)
        flows = decompose(zc, flat0, NODISC)
        assert sorted(e.kind.value for e in flows) == ["compound", "fixed"]


class TestPvContribution:
    def test_received_fixed_row(self, flat0, cfg):
        row = pv_contribution(_ecf(_fixed_cf(2e6, 10.0, sign=+1)), flat0, NODISC, cfg)
        assert row.hedging_set.kind == "rates"
        assert row.bucket == 3
        assert (row.start, row.end) == (0.0, 10.0)
        assert row.delta == -1
        assert row.effective_notional == pytest.approx(2e6 * supervisory_duration(0, 10), rel=1e-12)
        assert row.maturity_factor == 1.0

    def test_paid_flips_delta(self, flat0, cfg):
        row = pv_contribution(_ecf(_fixed_cf(2e6, 10.0, sign=-1)), flat0, NODISC, cfg)
        assert row.delta == +1

    def test_negative_amount_tracks_cash_direction(self, flat0, cfg):
        # paying a negative coupon is receiving money
        row = pv_contribution(_ecf(_fixed_cf(-2e6, 10.0, sign=-1)), flat0, NODISC, cfg)
        assert row.delta == -1
        assert row.effective_notional == pytest.approx(2e6 * supervisory_duration(0, 10), rel=1e-12)

    def test_zero_amount_zero_notional(self, flat0, cfg):
        row = pv_contribution(_ecf(_fixed_cf(0.0, 10.0)), flat0, NODISC, cfg)
        assert row.effective_notional == 0.0

    def test_market_discounting(self, flat2, cfg):
        settings = DecompositionSettings(discounting="market")
        row = pv_contribution(_ecf(_fixed_cf(2e6, 10.0)), flat2, settings, cfg)
        expected = 2e6 * flat2.discount.discount_factor(10.0) * supervisory_duration(0, 10)
        assert row.effective_notional == pytest.approx(expected, rel=1e-12)


class TestFloatingContributions:
    def test_flat_zero_index_rows(self, flat0, cfg):
        rows = floating_contributions(_ecf(_float_cf(fix=1.0)), flat0, NODISC, cfg)
        assert len(rows) == 3
        pv, near, far = rows
        assert pv.effective_notional == 0.0  # zero projected amount
        # (N + CF) = N on the flat zero curve
        assert near.effective_notional == pytest.approx(1e8 * supervisory_duration(0, 1.0), rel=1e-12)
        assert far.effective_notional == pytest.approx(1e8 * supervisory_duration(0, 1.25), rel=1e-12)
        assert (near.bucket, far.bucket) == (2, 2)
        assert (near.delta, far.delta) == (-1, +1)
        assert (near.end, far.end) == (1.0, 1.25)

    def test_paid_orientation_flips_all(self, flat0, cfg):
        # received rows are (-1, -1, +1); paying the cashflow negates each
        rows = floating_contributions(_ecf(_float_cf(fix=1.0, sign=-1)), flat0, NODISC, cfg)
        assert [r.delta for r in rows] == [+1, +1, -1]

    def test_past_fixing_keeps_pv_only(self, flat0, cfg):
        cf = DatedCashflow(pay_time=0.1, amount=5e5, kind=CashflowKind.FLOATING,
                           notional=1e8, sign=+1, accrual=0.25, fixing=-0.15, tenor=0.25)
        rows = floating_contributions(_ecf(cf), flat0, NODISC, cfg)
        assert len(rows) == 1
        assert rows[0].end == 0.1

    def test_same_bucket_rows_net_to_duration_spread(self, flat0, cfg):
        # both legs in one bucket with MF = 1: the pair collapses to the
        # forward window's supervisory duration
        rows = floating_contributions(_ecf(_float_cf(fix=2.0)), flat0, NODISC, cfg)
        total, _ = aggregate_addon(rows, cfg)
        a = cfg.a_supervisory
        direct = cfg.sf_ir * 1e8 * (math.exp(-a * 2.0) - math.exp(-a * 2.25)) / a
        assert total == pytest.approx(direct, rel=1e-12)

    def test_stochastic_basis_adds_mirror_rows(self, flat0, cfg):
        settings = DecompositionSettings(discounting="none", stochastic_basis=True)
        rows = floating_contributions(_ecf(_float_cf(fix=1.0)), flat0, settings, cfg)
        assert len(rows) == 5
        basis_rows = [r for r in rows if r.hedging_set.kind == "basis"]
        assert len(basis_rows) == 2
        assert {r.delta for r in basis_rows} == {-1, +1}
        assert basis_rows[0].hedging_set.currency == "USD"


class TestCompoundContributions:
    def _zc_cf(self, amount=1e8, obs_start=0.0, obs_end=10.0, next_reset=None, sign=+1):
        return DatedCashflow(pay_time=obs_end, amount=amount, kind=CashflowKind.COMPOUND,
                             notional=1e8, sign=sign, fixing=obs_start, tenor=0.25,
                             obs_start=obs_start, obs_end=obs_end,
                             next_reset=obs_start if next_reset is None else next_reset)

    def test_spot_zero_coupon_rows(self, flat0, cfg):
        rows = compound_contributions(_ecf(self._zc_cf()), flat0, NODISC, cfg)
        pv, near, far = rows
        assert (pv.bucket, near.bucket, far.bucket) == (3, 1, 3)
        assert near.end == 0.0  # spot start: zero-duration near leg
        assert near.effective_notional == 0.0
        assert far.effective_notional == pytest.approx(1e8 * supervisory_duration(0, 10), rel=1e-12)

    def test_seasoned_compounding_clamps_to_next_reset(self, flat0, cfg):
        cf = self._zc_cf(obs_start=-0.5, next_reset=0.25)
        rows = compound_contributions(_ecf(cf), flat0, NODISC, cfg)
        near = rows[1]
        assert near.end == 0.25
        assert near.bucket == 1

    def test_fully_realized_keeps_pv_only(self, flat0, cfg):
        cf = DatedCashflow(pay_time=0.5, amount=1.02e8, kind=CashflowKind.COMPOUND,
                           notional=1e8, sign=+1, fixing=-2.0, tenor=0.25,
                           obs_start=-2.0, obs_end=-0.25, next_reset=0.25)
        rows = compound_contributions(_ecf(cf), flat0, NODISC, cfg)
        assert len(rows) == 1


class TestCmsContributions:
    def _cms_cf(self, obs_start, obs_end, tenor=0.25, pay=None, sign=+1, amount=1e5):
        return DatedCashflow(pay_time=pay if pay is not None else obs_start + 0.25,
                             amount=amount, kind=CashflowKind.CMS, notional=1e8, sign=sign,
                             accrual=0.25, fixing=obs_start, tenor=tenor,
                             obs_start=obs_start, obs_end=obs_end)

    def test_middle_bucket_only(self, flat0, cfg):
        rows = cms_contributions(_ecf(self._cms_cf(2.0, 4.0)), flat0, NODISC, cfg)
        buckets = [r.bucket for r in rows[1:]]
        assert buckets == [2]
        assert rows[1].delta == +1
        assert (rows[1].start, rows[1].end) == (2.0, 4.0)

    def test_all_three_buckets(self, flat0, cfg):
        rows = cms_contributions(_ecf(self._cms_cf(0.5, 7.0)), flat0, NODISC, cfg)
        assert [r.bucket for r in rows[1:]] == [1, 2, 3]
        assert [r.delta for r in rows[1:]] == [-1, +1, +1]
        assert (rows[1].start, rows[1].end) == (0.5, 1.0)
        assert (rows[2].start, rows[2].end) == (1.0, 5.0)
        assert (rows[3].start, rows[3].end) == (5.0, 7.0)

    def test_tenor_ratio_scaling(self, flat0, cfg):
        # 3M index on a 5Y underlying: weight 0.25 / 5 = 0.05
        cf = self._cms_cf(2.0, 7.0, tenor=0.25, amount=0.0)
        rows = cms_contributions(_ecf(cf), flat0, NODISC, cfg)
        m2 = [r for r in rows[1:] if r.bucket == 2][0]
        expected = 0.05 * 1e8 * supervisory_duration(2.0, 5.0)
        assert m2.effective_notional == pytest.approx(expected, rel=1e-12)


class TestInflationContributions:
    def _infl_cf(self, kind, obs_start=0.0, obs_end=5.0, next_obs=None, amount=2e6, sign=+1):
        return DatedCashflow(pay_time=obs_end, amount=amount, kind=kind, notional=1e8,
                             sign=sign, obs_start=obs_start, obs_end=obs_end,
                             next_obs=obs_start if next_obs is None else next_obs)

    def test_floating_rows(self, flat0, cfg):
        cf = self._infl_cf(CashflowKind.INFLATION_FLOATING, obs_start=1.0, obs_end=5.0)
        rows = inflation_contributions(_ecf(cf), flat0, NODISC, cfg)
        pv, near, far = rows
        assert pv.hedging_set.kind == "rates"
        assert near.hedging_set.kind == "inflation"
        assert (near.end, far.end) == (1.0, 5.0)
        assert (near.bucket, far.bucket) == (2, 3)
        # floating uses N + CF
        assert near.effective_notional == pytest.approx(
            (1e8 + 2e6) * supervisory_duration(0, 1.0), rel=1e-12
        )

    def test_historical_start_uses_next_observation(self, flat0, cfg):
        cf = self._infl_cf(CashflowKind.INFLATION_FLOATING, obs_start=-0.75, obs_end=5.0, next_obs=0.25)
        rows = inflation_contributions(_ecf(cf), flat0, NODISC, cfg)
        assert rows[1].end == 0.25

    def test_compound_uses_projected_amount_alone(self, flat0, cfg):
        cf = self._infl_cf(CashflowKind.INFLATION_COMPOUND, obs_start=0.0, obs_end=5.0, amount=1.1e8)
        rows = inflation_contributions(_ecf(cf), flat0, NODISC, cfg)
        assert rows[2].effective_notional == pytest.approx(1.1e8 * supervisory_duration(0, 5.0), rel=1e-12)


class TestFxContribution:
    def test_domestic_cashflow_has_no_row(self, flat0, cfg):
        settings = DecompositionSettings(discounting="none", include_fx=True)
        assert fx_contribution(_ecf(_fixed_cf(2e6, 2.0)), flat0, settings, cfg) is None

    def test_foreign_cashflow_converted_at_spot(self, cfg):
        # P(0,2) = 0.99 on this curve; EUR 1M * 0.99 * 1.10 = 1,089,000
        rate = -math.log(0.99) / 2.0
        curves = CurveSet(discount=flat_curve(rate), fx_spots={"EUR": 1.10})
        settings = DecompositionSettings(discounting="market", include_fx=True)
        cf = _fixed_cf(1e6, 2.0, sign=+1, notional=1e6)
        row = fx_contribution(_ecf(cf, currency="EUR"), curves, settings, cfg)
        assert row.hedging_set.kind == "fx"
        assert row.hedging_set.currency == "EUR"
        assert row.bucket == 0
        assert row.effective_notional == pytest.approx(1_089_000.0, rel=1e-9)
        assert row.delta == +1

    def test_missing_spot_is_data_error(self, flat0, cfg):
        from rsaccr.curves import CurveError

        settings = DecompositionSettings(discounting="none", include_fx=True)
        with pytest.raises(CurveError):
            fx_contribution(_ecf(_fixed_cf(1e6, 2.0), currency="EUR"), flat0, settings, cfg)

    def test_opposite_foreign_flows_cancel(self, flat0, cfg):
        curves = CurveSet(discount=flat_zero_curve(), fx_spots={"EUR": 1.10})
        settings = DecompositionSettings(discounting="none", include_fx=True)
        rows = [
            fx_contribution(_ecf(_fixed_cf(1e6, 2.0, sign=+1), currency="EUR"), curves, settings, cfg),
            fx_contribution(_ecf(_fixed_cf(1e6, 2.0, sign=-1), currency="EUR"), curves, settings, cfg),
        ]
        total, _ = aggregate_addon(rows, cfg)
        assert total == 0.0

    def test_cashflow_contributions_appends_fx(self, cfg):
        curves = CurveSet(discount=flat_zero_curve(), fx_spots={"EUR": 1.10})
        settings = DecompositionSettings(discounting="none", include_fx=True)
        rows = cashflow_contributions(_ecf(_float_cf(fix=1.0), currency="EUR"), curves, settings, cfg)
        assert [r.hedging_set.kind for r in rows] == ["rates", "rates", "rates", "fx"]


class TestPortfolioAddon:
    def test_swap_net_of_strip_is_exactly_zero(self, flat2, cfg):
        swap = vanilla_swap("s", 1e8, 0.018, 0.0, 10.0, payer=True)
        hedge = [t.mirrored() for t in make_fra_strip(swap)]
        total, _ = portfolio_rsaccr_addon([swap] + hedge, flat2, DecompositionSettings("market"), cfg)
        assert total == 0.0

    def test_confirmation_invariance(self, flat2, cfg):
        swap = vanilla_swap("s", 1e8, 0.025, 0.0, 10.0, payer=True)
        for settings in (NODISC, DecompositionSettings("market")):
            base, _ = portfolio_rsaccr_addon([swap], flat2, settings, cfg)
            strip, _ = portfolio_rsaccr_addon(make_fra_strip(swap), flat2, settings, cfg)
            split, _ = portfolio_rsaccr_addon(split_swap(swap, 4.0), flat2, settings, cfg)
            assert strip == pytest.approx(base, rel=1e-9)
            assert split == pytest.approx(base, rel=1e-9)

    def test_single_bucket_atm_matches_trade_level(self, flat0, cfg):
        # all dates inside one bucket with MF = 1: decomposition telescopes
        # to the trade-level supervisory formula
        for (s, e) in ((1.5, 4.5), (6.0, 9.0)):
            swap = vanilla_swap("s", 1e8, 0.0, s, e, payer=True)
            rsa, _ = portfolio_rsaccr_addon([swap], flat0, NODISC, cfg)
            sa = addon_value(trade_addon(swap, cfg), cfg)
            assert rsa == pytest.approx(sa, rel=1e-9)

    def test_bucket_of_end_date(self, flat2, cfg):
        from rsaccr.saccr import maturity_bucket

        swap = vanilla_swap("s", 1e8, 0.02, 0.0, 10.0, payer=True)
        for row in trade_contributions(swap, flat2, NODISC, cfg):
            assert row.bucket == maturity_bucket(row.end)

    def test_breakdown_reports_per_set(self, flat2, cfg):
        settings = DecompositionSettings("market", stochastic_basis=True)
        swap = vanilla_swap("s", 1e8, 0.02, 0.0, 10.0, payer=True)
        total, breakdown = portfolio_rsaccr_addon([swap], flat2, settings, cfg)
        kinds = {hs.kind for hs in breakdown}
        assert kinds == {"rates", "basis"}
        assert total == pytest.approx(sum(breakdown.values()), rel=1e-12)


def test_contribution_dump_format(flat2, cfg):
    swap = vanilla_swap("s", 1e8, 0.02, 0.0, 1.0, payer=True)
    rows = contributions_csv_rows(trade_contributions(swap, flat2, NODISC, cfg))
    assert rows[0] == "trade_id,hedging_set,bucket,eff_notional,start,end,delta,mf"
    assert all(line.startswith("s,") for line in rows[1:])
    assert len(rows) == 1 + 4 + 4 * 3  # 4 fixed pv + 4 floating triplets
