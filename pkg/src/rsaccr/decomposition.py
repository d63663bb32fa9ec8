"""Cashflow-level add-ons: decompose linear trades into elementary cashflows
and emit one or more supervisory contributions per cashflow.

Every elementary cashflow contributes the present value of the flow itself
(window [0, T], delta -1 received / +1 paid).  Contributions store the
rate-risk-equivalent notional: the adjusted notional below times the
supervisory duration of the row's [start, end] window, so aggregation only
applies the supervisory factor and maturity factor.  Non-fixed kinds add
index contributions that capture the volatility of their underlying:

- floating: +-(N + CF) * P(0,T) at the fixing date (delta -1) and at
  fixing + tenor (delta +1);
- compound: +-CF * P(0,T) at max(next_reset, obs_start) and at obs_end;
- CMS: the (N + CF) * P(0,T) notional scaled by accrual/swap-tenor, spread
  across the three buckets with the window clamped to each bucket
  (deltas -1/+1/+1, degenerate rows dropped);
- inflation floating / compound: like compound but in the inflation
  hedging set (floating uses N + CF, compound CF alone).

Paid cashflows are the received rows with every delta negated.  Cashflows
whose index fixed strictly before time 0 are fully determined and keep only
the present-value row.  With stochastic basis enabled, floating and
compound index rows are duplicated into the basis hedging set; with FX
enabled, non-domestic cashflows add one unbucketed FX contribution valued
at spot.

Contribution maturity factors use the contribution's own end date as the
maturity (margined trades keep the trade-level 1.5*sqrt(MPOR)), which
reproduces the sub-one-year scaling of short-dated trades.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .curves import CurveSet
from .saccr import (
    AddOnContribution,
    HedgingSet,
    SupervisoryConfig,
    aggregate_addon,
    basis_set,
    fx_set,
    inflation_set,
    maturity_bucket,
    maturity_factor_margined,
    maturity_factor_unmargined,
    rates_set,
    supervisory_duration,
)
from .trades import CashflowKind, ClassificationError, DatedCashflow, Trade, trade_cashflows


@dataclass(frozen=True)
class DecompositionSettings:
    discounting: str = "market"  # "none" pins P(0,T) = 1
    stochastic_basis: bool = False
    include_fx: bool = False
    domestic_currency: str = "USD"

    def __post_init__(self) -> None:
        if self.discounting not in ("none", "market"):
            raise ValueError(f"unknown discounting mode: {self.discounting}")


@dataclass(frozen=True)
class ElementaryCashflow:
    """A dated cashflow tagged with its trade context, ready for add-ons."""

    trade_id: str
    currency: str
    cashflow: DatedCashflow
    margined: bool = False
    mpor: float | None = None

    @property
    def kind(self) -> CashflowKind:
        return self.cashflow.kind


def decompose(trade: Trade, curves: CurveSet, settings: DecompositionSettings) -> list[ElementaryCashflow]:
    """Map every leg cashflow of a linear trade to one elementary cashflow."""
    out = []
    for cf in trade_cashflows(trade, curves):
        out.append(
            ElementaryCashflow(
                trade_id=trade.id,
                currency=trade.currency,
                cashflow=cf,
                margined=trade.margined,
                mpor=trade.mpor,
            )
        )
    return out


def _discount(curves: CurveSet, t: float, settings: DecompositionSettings) -> float:
    if settings.discounting == "none":
        return 1.0
    return curves.discount.discount_factor(t)


def _mf(end: float, ecf: ElementaryCashflow, cfg: SupervisoryConfig) -> float:
    if ecf.margined:
        return maturity_factor_margined(ecf.mpor)
    return maturity_factor_unmargined(end, cfg)


def _cash_direction(cf: DatedCashflow) -> int:
    """+1 when money actually comes in, -1 when it goes out.

    A paid coupon at a negative rate is a receipt; present-value rows key
    off the net cash direction, while index rows keep the leg orientation
    (a received floating coupon is long its index whatever the rate sign).
    """
    if cf.amount == 0.0:
        return cf.sign
    return cf.sign if cf.amount > 0 else -cf.sign


def pv_contribution(
    ecf: ElementaryCashflow,
    curves: CurveSet,
    settings: DecompositionSettings,
    cfg: SupervisoryConfig,
) -> AddOnContribution:
    """Present-value row: notional |CF| * P(0,T) over [0, T], delta -sign.

    The stored effective notional is the rate-risk-equivalent amount, i.e.
    the adjusted notional times the supervisory duration of [start, end];
    aggregation then applies only SF and MF.
    """
    cf = ecf.cashflow
    pv = abs(cf.amount) * _discount(curves, cf.pay_time, settings)
    sd = supervisory_duration(0.0, cf.pay_time, cfg.a_supervisory)
    return AddOnContribution(
        hedging_set=rates_set(ecf.currency),
        bucket=maturity_bucket(cf.pay_time),
        effective_notional=pv * sd,
        start=0.0,
        end=cf.pay_time,
        delta=-_cash_direction(cf),
        maturity_factor=_mf(cf.pay_time, ecf, cfg),
        trade_id=ecf.trade_id,
    )


def _index_pair(
    ecf: ElementaryCashflow,
    notional: float,
    start_end: float,
    end_end: float,
    cfg: SupervisoryConfig,
    hedging_set: HedgingSet,
) -> list[AddOnContribution]:
    """The two-bucket index rows shared by floating and compound kinds:
    delta -1 at the near date, +1 at the far date (received orientation),
    flipped for paid cashflows.  Durations run from 0 to each date."""
    sign = ecf.cashflow.sign
    rows = []
    for end, delta in ((start_end, -1), (end_end, +1)):
        sd = supervisory_duration(0.0, end, cfg.a_supervisory)
        rows.append(
            AddOnContribution(
                hedging_set=hedging_set,
                bucket=maturity_bucket(end),
                effective_notional=notional * sd,
                start=0.0,
                end=end,
                delta=delta * sign,
                maturity_factor=_mf(end, ecf, cfg),
                trade_id=ecf.trade_id,
            )
        )
    return rows


def floating_contributions(
    ecf: ElementaryCashflow,
    curves: CurveSet,
    settings: DecompositionSettings,
    cfg: SupervisoryConfig,
) -> list[AddOnContribution]:
    cf = ecf.cashflow
    rows = [pv_contribution(ecf, curves, settings, cfg)]
    if cf.fixing is None or cf.tenor is None:
        raise ClassificationError("floating cashflow needs fixing and tenor")
    if cf.fixing < 0:
        return rows  # rate already fixed: no index volatility left
    notional = (cf.notional + cf.amount) * _discount(curves, cf.pay_time, settings)
    rows += _index_pair(ecf, notional, cf.fixing, cf.fixing + cf.tenor, cfg, rates_set(ecf.currency))
    if settings.stochastic_basis:
        rows += _index_pair(
            ecf, notional, cf.fixing, cf.fixing + cf.tenor, cfg, basis_set(ecf.currency, cf.tenor)
        )
    return rows


def compound_contributions(
    ecf: ElementaryCashflow,
    curves: CurveSet,
    settings: DecompositionSettings,
    cfg: SupervisoryConfig,
) -> list[AddOnContribution]:
    cf = ecf.cashflow
    rows = [pv_contribution(ecf, curves, settings, cfg)]
    if cf.obs_start is None or cf.obs_end is None:
        raise ClassificationError("compound cashflow needs an observation window")
    if cf.obs_end < 0:
        return rows  # compounding fully realized
    next_reset = cf.next_reset if cf.next_reset is not None else max(cf.obs_start, 0.0)
    near = max(next_reset, cf.obs_start, 0.0)
    notional = abs(cf.amount) * _discount(curves, cf.pay_time, settings)
    rows += _index_pair(ecf, notional, near, cf.obs_end, cfg, rates_set(ecf.currency))
    if settings.stochastic_basis and cf.tenor is not None:
        rows += _index_pair(ecf, notional, near, cf.obs_end, cfg, basis_set(ecf.currency, cf.tenor))
    return rows


_CMS_BUCKET_WINDOWS = (
    (1, -1, lambda s, e: (min(1.0, s), min(1.0, e))),
    (2, +1, lambda s, e: (min(max(1.0, s), 5.0), min(max(1.0, e), 5.0))),
    (3, +1, lambda s, e: (max(5.0, s), max(5.0, e))),
)


def cms_contributions(
    ecf: ElementaryCashflow,
    curves: CurveSet,
    settings: DecompositionSettings,
    cfg: SupervisoryConfig,
) -> list[AddOnContribution]:
    cf = ecf.cashflow
    rows = [pv_contribution(ecf, curves, settings, cfg)]
    if cf.obs_start is None or cf.obs_end is None or cf.tenor is None:
        raise ClassificationError("cms cashflow needs swap window and index tenor")
    if cf.obs_start < 0:
        return rows  # swap rate already fixed
    weight = cf.tenor / (cf.obs_end - cf.obs_start)
    notional = weight * (cf.notional + cf.amount) * _discount(curves, cf.pay_time, settings)
    for bucket, delta, window in _CMS_BUCKET_WINDOWS:
        start, end = window(cf.obs_start, cf.obs_end)
        if start == end:
            continue  # clamped away: zero supervisory duration
        sd = supervisory_duration(start, end, cfg.a_supervisory)
        rows.append(
            AddOnContribution(
                hedging_set=rates_set(ecf.currency),
                bucket=bucket,
                effective_notional=notional * sd,
                start=start,
                end=end,
                delta=delta * cf.sign,
                maturity_factor=_mf(end, ecf, cfg),
                trade_id=ecf.trade_id,
            )
        )
    return rows


def inflation_contributions(
    ecf: ElementaryCashflow,
    curves: CurveSet,
    settings: DecompositionSettings,
    cfg: SupervisoryConfig,
) -> list[AddOnContribution]:
    cf = ecf.cashflow
    rows = [pv_contribution(ecf, curves, settings, cfg)]
    if cf.obs_start is None or cf.obs_end is None:
        raise ClassificationError("inflation cashflow needs an observation window")
    if cf.obs_end < 0:
        return rows
    next_obs = cf.next_obs if cf.next_obs is not None else max(cf.obs_start, 0.0)
    near = max(next_obs, cf.obs_start, 0.0)
    base = cf.amount if cf.kind is CashflowKind.INFLATION_COMPOUND else cf.notional + cf.amount
    notional = abs(base) * _discount(curves, cf.pay_time, settings)
    rows += _index_pair(ecf, notional, near, cf.obs_end, cfg, inflation_set(ecf.currency))
    return rows


def fx_contribution(
    ecf: ElementaryCashflow,
    curves: CurveSet,
    settings: DecompositionSettings,
    cfg: SupervisoryConfig,
) -> AddOnContribution | None:
    """Unbucketed FX row for a non-domestic cashflow: PV converted at spot.

    Delta follows the cash direction: receiving foreign currency is long
    the pair (+1), paying is short (-1).
    """
    if ecf.currency == settings.domestic_currency:
        return None
    cf = ecf.cashflow
    spot = curves.fx_spot(ecf.currency)
    pv_domestic = abs(cf.amount) * _discount(curves, cf.pay_time, settings) * spot
    return AddOnContribution(
        hedging_set=fx_set(ecf.currency, settings.domestic_currency),
        bucket=0,
        effective_notional=pv_domestic,
        start=0.0,
        end=cf.pay_time,
        delta=_cash_direction(cf),
        maturity_factor=_mf(cf.pay_time, ecf, cfg),
        trade_id=ecf.trade_id,
    )


_KIND_DISPATCH = {
    CashflowKind.FIXED: None,  # pv row only
    CashflowKind.FLOATING: floating_contributions,
    CashflowKind.COMPOUND: compound_contributions,
    CashflowKind.CMS: cms_contributions,
    CashflowKind.INFLATION_FLOATING: inflation_contributions,
    CashflowKind.INFLATION_COMPOUND: inflation_contributions,
}


def cashflow_contributions(
    ecf: ElementaryCashflow,
    curves: CurveSet,
    settings: DecompositionSettings,
    cfg: SupervisoryConfig,
) -> list[AddOnContribution]:
    """All supervisory rows for one elementary cashflow."""
    try:
        handler = _KIND_DISPATCH[ecf.kind]
    except KeyError:
        raise ClassificationError(f"unsupported cashflow kind: {ecf.kind}") from None
    if handler is None:
        rows = [pv_contribution(ecf, curves, settings, cfg)]
    else:
        rows = handler(ecf, curves, settings, cfg)
    if settings.include_fx:
        fx_row = fx_contribution(ecf, curves, settings, cfg)
        if fx_row is not None:
            rows.append(fx_row)
    return rows


def trade_contributions(
    trade: Trade,
    curves: CurveSet,
    settings: DecompositionSettings,
    cfg: SupervisoryConfig,
) -> list[AddOnContribution]:
    out: list[AddOnContribution] = []
    for ecf in decompose(trade, curves, settings):
        out.extend(cashflow_contributions(ecf, curves, settings, cfg))
    return out


def portfolio_rsaccr_addon(
    trades: list[Trade],
    curves: CurveSet,
    settings: DecompositionSettings,
    cfg: SupervisoryConfig,
) -> tuple[float, dict[HedgingSet, float]]:
    """Aggregate cashflow-level add-on of a linear portfolio.

    Contributions route to their hedging sets and buckets, aggregate with
    the SA-CCR quadratic form per set, and sets sum (no cross-asset
    diversification).  Depends only on the portfolio's net cashflows, so
    economically identical confirmations price identically.
    """
    contribs: list[AddOnContribution] = []
    for trade in trades:
        contribs.extend(trade_contributions(trade, curves, settings, cfg))
    return aggregate_addon(contribs, cfg)


def contributions_csv_rows(contributions: list[AddOnContribution]) -> list[str]:
    """Dump rows 'trade_id,hedging_set,bucket,eff_notional,start,end,delta,mf'."""
    header = "trade_id,hedging_set,bucket,eff_notional,start,end,delta,mf"
    rows = [header]
    ordered = sorted(
        contributions, key=lambda c: (c.trade_id, c.hedging_set, c.bucket, c.end, c.delta)
    )
    for c in ordered:
        rows.append(
            f"{c.trade_id},{c.hedging_set.label()},{c.bucket or ''},"
            f"{c.effective_notional:.6f},{c.start:g},{c.end:g},{c.delta:+d},{c.maturity_factor:.9f}"
        )
    return rows
