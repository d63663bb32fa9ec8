"""Trade model and cashflow schedule generation for linear rate products.

Legs tile ``[start, end]`` with periods of length ``frequency`` (year
fractions; no stubs).  Floating coupons fix at the period start and pay at
the period end.  Notionals are piecewise constant per period, expressed as
``(segment_end, notional)`` steps, e.g. ``[(5, 2e8), (10, 1e8)]`` for 200M
over the first five years then 100M.

Also provides the adversarial constructions used by the regression suite:
FRA strips, date splits, and the four-swap package whose aggregate SA-CCR
add-on nets to zero while its economics stay a live receiver swap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction

from .curves import CurveSet, forward_rate, inflation_ratio


class ScheduleError(ValueError):
    """Leg dates/frequency cannot produce a stub-free schedule."""


class ClassificationError(ValueError):
    """Product outside the supported linear-trade scope."""


class Direction(Enum):
    PAY = "pay"
    RECEIVE = "receive"

    @property
    def sign(self) -> int:
        return 1 if self is Direction.RECEIVE else -1

    def flipped(self) -> "Direction":
        return Direction.PAY if self is Direction.RECEIVE else Direction.RECEIVE


# --- leg kinds --------------------------------------------------------------


@dataclass(frozen=True)
class Fixed:
    """Periodic fixed coupons N * accrual * rate."""

    rate: float


@dataclass(frozen=True)
class Floating:
    """Periodic money-market coupons fixing at period start.

    ``tenor`` is the index tenor; it equals the leg frequency for the
    standard case generated here (payment at fixing + tenor).
    """

    tenor: float


@dataclass(frozen=True)
class ZeroCouponFixed:
    """Single payment at leg end of N * ((1 + freq*rate)^n_periods).

    Includes the notional exchange so it nets against the compounded
    floating side of a zero-coupon swap.
    """

    rate: float


@dataclass(frozen=True)
class Compound:
    """Single payment at leg end of N * prod(1 + freq * L_k) over all resets.

    ``next_reset`` is the first reset at or after time 0; it defaults to the
    leg start for spot or forward starting trades and only differs for
    seasoned trades whose compounding began in the past.
    """

    tenor: float
    next_reset: float | None = None


@dataclass(frozen=True)
class CMS:
    """Periodic coupons N * accrual * S(T_s, T_s + swap_tenor).

    ``swap_tenor`` is the underlying swap rate's length, ``index_tenor`` the
    money-market tenor of that swap's floating side.
    """

    swap_tenor: float
    index_tenor: float = 0.25


@dataclass(frozen=True)
class InflationFloating:
    """Periodic coupons N * (I(T_e)/I(T_s) - 1) over each period.

    ``next_observation`` is the first index observation at or after 0
    (differs from the period start only for seasoned trades).
    """

    next_observation: float | None = None


@dataclass(frozen=True)
class InflationCompound:
    """Single payment at leg end of N * I(end)/I(start)."""

    next_observation: float | None = None


LegKind = (
    Fixed | Floating | ZeroCouponFixed | Compound | CMS | InflationFloating | InflationCompound
)


@dataclass(frozen=True)
class Leg:
    direction: Direction
    kind: LegKind
    start: float
    end: float
    frequency: float
    notional_steps: tuple[tuple[float, float], ...]  # (segment_end, notional)

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ScheduleError(f"leg start {self.start} must precede end {self.end}")
        if self.frequency <= 0:
            raise ScheduleError("leg frequency must be positive")
        if not self.notional_steps:
            raise ScheduleError("leg needs a notional")
        if any(n < 0 for _, n in self.notional_steps):
            raise ScheduleError("notionals must be nonnegative")
        ends = [e for e, _ in self.notional_steps]
        if any(e1 <= e0 for e0, e1 in zip(ends, ends[1:])):
            raise ScheduleError("notional segment ends must be strictly increasing")
        if ends[-1] < self.end:
            raise ScheduleError("notional segments must cover the leg")

    def notional_at(self, period_start: float) -> float:
        """Notional applying to the period starting at ``period_start``."""
        for seg_end, notional in self.notional_steps:
            if period_start < seg_end:
                return notional
        return self.notional_steps[-1][1]

    def n_periods(self) -> int:
        span = self.end - self.start
        n = round(span / self.frequency)
        if n <= 0 or abs(n * self.frequency - span) > 1e-9:
            raise ScheduleError(
                f"leg span {span} is not an integer multiple of frequency {self.frequency}"
            )
        return n

    def period_boundaries(self) -> list[float]:
        n = self.n_periods()
        return [self.start + k * self.frequency for k in range(n + 1)]


def constant_notional(n: float, end: float) -> tuple[tuple[float, float], ...]:
    return ((end, n),)


@dataclass(frozen=True)
class Trade:
    id: str
    legs: tuple[Leg, ...]
    currency: str = "USD"
    margined: bool = False
    mpor: float | None = None

    def __post_init__(self) -> None:
        if not self.legs:
            raise ScheduleError("trade needs at least one leg")
        if self.margined and (self.mpor is None or self.mpor <= 0):
            raise ScheduleError("margined trade needs a positive MPOR")

    @property
    def maturity(self) -> float:
        return max(leg.end for leg in self.legs)

    @property
    def earliest_start(self) -> float:
        return min(leg.start for leg in self.legs)

    def mirrored(self, new_id: str | None = None) -> "Trade":
        """Same economics with every leg direction flipped."""
        legs = tuple(replace(leg, direction=leg.direction.flipped()) for leg in self.legs)
        return replace(self, id=new_id or f"{self.id}-mirror", legs=legs)


# --- cashflow schedules -----------------------------------------------------


class CashflowKind(Enum):
    FIXED = "fixed"
    FLOATING = "floating"
    COMPOUND = "compound"
    CMS = "cms"
    INFLATION_FLOATING = "inflation_floating"
    INFLATION_COMPOUND = "inflation_compound"


@dataclass(frozen=True)
class DatedCashflow:
    """One scheduled payment with the dates its projection depends on.

    ``amount`` is the projected value seen from time 0; ``sign`` is +1 for
    received, -1 for paid.  Kind-specific dates:

    - floating: ``fixing`` and ``tenor`` (pays at fixing + tenor);
    - compound: ``obs_start``/``obs_end`` bracket the compounding,
      ``next_reset`` is the first reset >= 0, ``tenor`` the reset tenor;
    - cms: ``obs_start``/``obs_end`` bracket the underlying swap,
      ``tenor`` its money-market tenor, ``accrual`` the coupon accrual;
    - inflation: ``obs_start``/``obs_end`` are the index observations and
      ``next_obs`` the first observation >= 0.
    """

    pay_time: float
    amount: float
    kind: CashflowKind
    notional: float
    sign: int
    accrual: float = 0.0
    fixing: float | None = None
    tenor: float | None = None
    obs_start: float | None = None
    obs_end: float | None = None
    next_reset: float | None = None
    next_obs: float | None = None

    def signed_amount(self) -> float:
        return self.sign * self.amount


def _fixed_schedule(leg: Leg) -> list[DatedCashflow]:
    out = []
    bounds = leg.period_boundaries()
    for t0, t1 in zip(bounds, bounds[1:]):
        n = leg.notional_at(t0)
        out.append(
            DatedCashflow(
                pay_time=t1,
                amount=n * leg.frequency * leg.kind.rate,
                kind=CashflowKind.FIXED,
                notional=n,
                sign=leg.direction.sign,
                accrual=leg.frequency,
            )
        )
    return out


def _floating_schedule(leg: Leg, curves: CurveSet) -> list[DatedCashflow]:
    kind: Floating = leg.kind
    if abs(kind.tenor - leg.frequency) > 1e-12:
        raise ScheduleError("floating index tenor must match the leg frequency")
    out = []
    bounds = leg.period_boundaries()
    for t0, t1 in zip(bounds, bounds[1:]):
        n = leg.notional_at(t0)
        rate = forward_rate(curves.projection, max(t0, 0.0), kind.tenor)
        out.append(
            DatedCashflow(
                pay_time=t1,
                amount=n * kind.tenor * rate,
                kind=CashflowKind.FLOATING,
                notional=n,
                sign=leg.direction.sign,
                accrual=kind.tenor,
                fixing=t0,
                tenor=kind.tenor,
            )
        )
    return out


def compound_factor(curves: CurveSet, start: float, end: float, tenor: float) -> float:
    """prod(1 + tenor * L(0, T_k, T_k+tenor)) over resets tiling [start, end]."""
    n = round((end - start) / tenor)
    if n <= 0 or abs(start + n * tenor - end) > 1e-9:
        raise ScheduleError("compounding span is not an integer number of resets")
    factor = 1.0
    for k in range(n):
        t0 = start + k * tenor
        factor *= 1.0 + tenor * forward_rate(curves.projection, max(t0, 0.0), tenor)
    return factor


def _compound_schedule(leg: Leg, curves: CurveSet) -> list[DatedCashflow]:
    kind: Compound = leg.kind
    next_reset = kind.next_reset if kind.next_reset is not None else max(leg.start, 0.0)
    n = leg.notional_at(leg.start)
    amount = n * compound_factor(curves, leg.start, leg.end, kind.tenor)
    return [
        DatedCashflow(
            pay_time=leg.end,
            amount=amount,
            kind=CashflowKind.COMPOUND,
            notional=n,
            sign=leg.direction.sign,
            fixing=leg.start,
            tenor=kind.tenor,
            obs_start=leg.start,
            obs_end=leg.end,
            next_reset=next_reset,
        )
    ]


def _zero_fixed_schedule(leg: Leg) -> list[DatedCashflow]:
    kind: ZeroCouponFixed = leg.kind
    n_comp = leg.n_periods()
    n = leg.notional_at(leg.start)
    amount = n * (1.0 + leg.frequency * kind.rate) ** n_comp
    return [
        DatedCashflow(
            pay_time=leg.end,
            amount=amount,
            kind=CashflowKind.FIXED,
            notional=n,
            sign=leg.direction.sign,
            accrual=leg.end - leg.start,
        )
    ]


def swap_annuity_rate(curves: CurveSet, start: float, end: float, tenor: float) -> float:
    """Forward par swap rate for [start, end] with payments every ``tenor``."""
    n = round((end - start) / tenor)
    if n <= 0:
        raise ScheduleError("swap rate needs at least one period")
    annuity = 0.0
    floating = 0.0
    for k in range(1, n + 1):
        t1 = start + k * tenor
        df = curves.discount.discount_factor(t1)
        annuity += tenor * df
        floating += tenor * df * forward_rate(curves.projection, t1 - tenor, tenor)
    if annuity == 0.0:
        raise ScheduleError("zero annuity in swap rate")
    return floating / annuity


def _cms_schedule(leg: Leg, curves: CurveSet) -> list[DatedCashflow]:
    kind: CMS = leg.kind
    out = []
    bounds = leg.period_boundaries()
    for t0, t1 in zip(bounds, bounds[1:]):
        n = leg.notional_at(t0)
        s = swap_annuity_rate(curves, max(t0, 0.0), max(t0, 0.0) + kind.swap_tenor, kind.index_tenor)
        out.append(
            DatedCashflow(
                pay_time=t1,
                amount=n * leg.frequency * s,
                kind=CashflowKind.CMS,
                notional=n,
                sign=leg.direction.sign,
                accrual=leg.frequency,
                fixing=t0,
                tenor=kind.index_tenor,
                obs_start=t0,
                obs_end=t0 + kind.swap_tenor,
            )
        )
    return out


def _inflation_floating_schedule(leg: Leg, curves: CurveSet) -> list[DatedCashflow]:
    kind: InflationFloating = leg.kind
    if curves.inflation is None:
        raise ScheduleError("inflation leg needs an inflation curve")
    out = []
    bounds = leg.period_boundaries()
    for t0, t1 in zip(bounds, bounds[1:]):
        n = leg.notional_at(t0)
        ratio = inflation_ratio(curves.inflation, t0, t1)
        next_obs = kind.next_observation if kind.next_observation is not None else max(t0, 0.0)
        out.append(
            DatedCashflow(
                pay_time=t1,
                amount=n * (ratio - 1.0),
                kind=CashflowKind.INFLATION_FLOATING,
                notional=n,
                sign=leg.direction.sign,
                obs_start=t0,
                obs_end=t1,
                next_obs=next_obs,
            )
        )
    return out


def _inflation_compound_schedule(leg: Leg, curves: CurveSet) -> list[DatedCashflow]:
    kind: InflationCompound = leg.kind
    if curves.inflation is None:
        raise ScheduleError("inflation leg needs an inflation curve")
    n = leg.notional_at(leg.start)
    ratio = inflation_ratio(curves.inflation, leg.start, leg.end)
    next_obs = kind.next_observation if kind.next_observation is not None else max(leg.start, 0.0)
    return [
        DatedCashflow(
            pay_time=leg.end,
            amount=n * ratio,
            kind=CashflowKind.INFLATION_COMPOUND,
            notional=n,
            sign=leg.direction.sign,
            obs_start=leg.start,
            obs_end=leg.end,
            next_obs=next_obs,
        )
    ]


def generate_schedule(leg: Leg, curves: CurveSet) -> list[DatedCashflow]:
    """Expand a leg into dated cashflows with amounts projected off curves."""
    if isinstance(leg.kind, Fixed):
        return _fixed_schedule(leg)
    if isinstance(leg.kind, Floating):
        return _floating_schedule(leg, curves)
    if isinstance(leg.kind, ZeroCouponFixed):
        return _zero_fixed_schedule(leg)
    if isinstance(leg.kind, Compound):
        return _compound_schedule(leg, curves)
    if isinstance(leg.kind, CMS):
        return _cms_schedule(leg, curves)
    if isinstance(leg.kind, InflationFloating):
        return _inflation_floating_schedule(leg, curves)
    if isinstance(leg.kind, InflationCompound):
        return _inflation_compound_schedule(leg, curves)
    raise ClassificationError(f"unsupported leg kind: {type(leg.kind).__name__}")


def trade_cashflows(trade: Trade, curves: CurveSet) -> list[DatedCashflow]:
    out: list[DatedCashflow] = []
    for leg in trade.legs:
        out.extend(generate_schedule(leg, curves))
    return out


# --- swap constructors & analytics ------------------------------------------


def vanilla_swap(
    trade_id: str,
    notional: float | tuple[tuple[float, float], ...],
    fixed_rate: float,
    start: float,
    end: float,
    payer: bool,
    frequency: float = 0.25,
    currency: str = "USD",
) -> Trade:
    """Fixed-vs-floating swap; ``payer`` means paying the fixed leg."""
    steps = constant_notional(notional, end) if isinstance(notional, (int, float)) else tuple(notional)
    fixed_dir = Direction.PAY if payer else Direction.RECEIVE
    legs = (
        Leg(fixed_dir, Fixed(fixed_rate), start, end, frequency, steps),
        Leg(fixed_dir.flipped(), Floating(frequency), start, end, frequency, steps),
    )
    return Trade(id=trade_id, legs=legs, currency=currency)


def zero_coupon_swap(
    trade_id: str,
    notional: float,
    fixed_rate: float,
    start: float,
    end: float,
    payer: bool,
    frequency: float = 0.25,
    currency: str = "USD",
) -> Trade:
    """Single-exchange swap: compounded fixed vs compounded floating at end."""
    steps = constant_notional(notional, end)
    fixed_dir = Direction.PAY if payer else Direction.RECEIVE
    legs = (
        Leg(fixed_dir, ZeroCouponFixed(fixed_rate), start, end, frequency, steps),
        Leg(fixed_dir.flipped(), Compound(frequency), start, end, frequency, steps),
    )
    return Trade(id=trade_id, legs=legs, currency=currency)


def _swap_legs(trade: Trade) -> tuple[Leg, Leg]:
    fixed = [leg for leg in trade.legs if isinstance(leg.kind, Fixed)]
    floating = [leg for leg in trade.legs if isinstance(leg.kind, Floating)]
    if len(fixed) != 1 or len(floating) != 1 or len(trade.legs) != 2:
        raise ClassificationError(f"trade {trade.id} is not a fixed-vs-floating swap")
    return fixed[0], floating[0]


def par_rate(trade: Trade, curves: CurveSet) -> float:
    """Fixed rate that prices the swap to zero, with notional-weighted annuity."""
    _, float_leg = _swap_legs(trade)
    bounds = float_leg.period_boundaries()
    annuity = 0.0
    floating_pv = 0.0
    for t0, t1 in zip(bounds, bounds[1:]):
        n = float_leg.notional_at(t0)
        df = curves.discount.discount_factor(t1)
        annuity += n * float_leg.frequency * df
        rate = forward_rate(curves.projection, max(t0, 0.0), float_leg.frequency)
        floating_pv += n * float_leg.frequency * df * rate
    if annuity == 0.0:
        raise ScheduleError(f"zero annuity for trade {trade.id}")
    return floating_pv / annuity


def zero_coupon_par_rate(curves: CurveSet, start: float, end: float, frequency: float = 0.25) -> float:
    """Per-period compounded rate matching the floating roll-up at par."""
    factor = compound_factor(curves, start, end, frequency)
    df_ratio = factor  # equals P_f(0,start)/P_f(0,end) by construction
    n = round((end - start) / frequency)
    return (df_ratio ** (1.0 / n) - 1.0) / frequency


def swap_pv(trade: Trade, curves: CurveSet) -> float:
    """Sum of discounted signed projected cashflows (time-0 value)."""
    return sum(
        cf.signed_amount() * curves.discount.discount_factor(cf.pay_time)
        for cf in trade_cashflows(trade, curves)
    )


def make_fra_strip(swap: Trade, curves: CurveSet | None = None) -> list[Trade]:
    """One single-period swap per floating period, same strike and notional.

    The strip's net cashflows equal the parent swap's datewise because each
    FRA reuses the parent's period boundaries and notionals verbatim.
    """
    fixed_leg, float_leg = _swap_legs(swap)
    if fixed_leg.period_boundaries() != float_leg.period_boundaries():
        raise ClassificationError("FRA strip needs aligned fixed and floating periods")
    out = []
    bounds = float_leg.period_boundaries()
    for i, (t0, t1) in enumerate(zip(bounds, bounds[1:]), start=1):
        n = float_leg.notional_at(t0)
        steps = ((t1, n),)
        legs = (
            Leg(fixed_leg.direction, fixed_leg.kind, t0, t1, fixed_leg.frequency, steps),
            Leg(float_leg.direction, float_leg.kind, t0, t1, float_leg.frequency, steps),
        )
        out.append(Trade(id=f"{swap.id}-fra{i}", legs=legs, currency=swap.currency,
                         margined=swap.margined, mpor=swap.mpor))
    return out


def split_swap(swap: Trade, split_time: float) -> list[Trade]:
    """Split a swap at an interior period boundary into two swaps."""
    fixed_leg, float_leg = _swap_legs(swap)
    bounds = float_leg.period_boundaries()
    if split_time not in bounds[1:-1]:
        raise ScheduleError(f"split time {split_time} is not an interior period boundary")
    out = []
    for j, (s, e) in enumerate(((swap.legs[0].start, split_time), (split_time, swap.legs[0].end))):
        legs = tuple(
            Leg(leg.direction, leg.kind, s, e, leg.frequency, leg.notional_steps)
            for leg in (fixed_leg, float_leg)
        )
        out.append(Trade(id=f"{swap.id}-part{j + 1}", legs=legs, currency=swap.currency,
                         margined=swap.margined, mpor=swap.mpor))
    return out


def make_zero_addon_package(
    notional: float, rate: float, horizon: float, frequency: float = 0.25, currency: str = "USD"
) -> list[Trade]:
    """Four swaps whose aggregate SA-CCR add-on nets to zero.

    With ``k = exp(0.05*T) / (exp(0.05*T) - 1)``:

    1. receiver amortising over [0, 2T], notional 3kN then kN after T;
    2. payer over [0, 2T], notional 2kN;
    3. forward-start receiver over [T, 2T], notional kN;
    4. payer over [0, T], notional N / (exp(0.05*T) - 1).

    Pairs (1,2) and (3,4) cancel in adjusted supervisory notional while the
    net economics remain a receiver swap of notional N over [0, T].  Needs
    T >= 1 with T and 2T in the same maturity bucket so the cancellations
    happen inside one bucket.
    """
    t = horizon
    if t < 1.0:
        raise ScheduleError("package needs horizon >= 1 year")
    same_bucket = (1 <= t < 5 and 1 <= 2 * t < 5) or (t >= 5)
    if not same_bucket:
        raise ScheduleError(f"horizon {t} and {2 * t} fall in different maturity buckets")
    k = math.exp(0.05 * t) / (math.exp(0.05 * t) - 1.0)
    base = k * notional
    amortising = vanilla_swap(
        "pkg-amortising-receiver",
        (((t, 3.0 * base)), ((2 * t, base))),
        rate,
        0.0,
        2 * t,
        payer=False,
        frequency=frequency,
        currency=currency,
    )
    payer_long = vanilla_swap(
        "pkg-payer-2t", 2.0 * base, rate, 0.0, 2 * t, payer=True, frequency=frequency, currency=currency
    )
    fwd_receiver = vanilla_swap(
        "pkg-fwd-receiver", base, rate, t, 2 * t, payer=False, frequency=frequency, currency=currency
    )
    payer_short = vanilla_swap(
        "pkg-payer-t",
        notional / (math.exp(0.05 * t) - 1.0),
        rate,
        0.0,
        t,
        payer=True,
        frequency=frequency,
        currency=currency,
    )
    return [amortising, payer_long, fwd_receiver, payer_short]


def time_averaged_notional(leg: Leg) -> float:
    """Accrual-weighted average notional, computed in exact rationals.

    Exactness matters: SA-CCR cancellation constructions rely on the average
    of equal-length segments (3k, k) being bitwise 2k.
    """
    bounds = leg.period_boundaries()
    total = Fraction(0)
    accrual = Fraction(0)
    for t0, t1 in zip(bounds, bounds[1:]):
        dt = Fraction(t1) - Fraction(t0)
        total += Fraction(leg.notional_at(t0)) * dt
        accrual += dt
    return float(total / accrual)


def net_cashflow_map(trades: list[Trade], curves: CurveSet, ndigits: int = 12) -> dict[float, float]:
    """Net signed projected amount per payment date, for replication checks."""
    out: dict[float, float] = {}
    for trade in trades:
        for cf in trade_cashflows(trade, curves):
            key = round(cf.pay_time, ndigits)
            out[key] = out.get(key, 0.0) + cf.signed_amount()
    return out
