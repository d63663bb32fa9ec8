"""Gaussian rate models and the Monte Carlo exposure oracle.

Model identification ties the regulatory interest-rate factor to a
mean-reverting Gaussian short rate: a trade with value volatility sigma has
theoretical add-on ``(2/3) * sigma * sqrt(T / 2pi)`` at horizon T, so the
0.5% supervisory factor corresponds to a short-rate volatility of
``1.5 * sqrt(2pi) * 0.005 ~= 0.0188``.

Two simulators share one streaming interface:

- ``simulate_hw1f``: one-factor Hull-White with the short rate sampled from
  its exact transition and bonds from the affine reconstruction formula, so
  the only error is Monte Carlo noise.  The bank-account integral is sampled
  jointly with the rate (exact OU integral), making discounted bonds
  martingales in distribution.
- ``simulate_gmm3f``: zero-coupon bonds evolved by a log-Euler step with
  Hull-White-shaped volatility, each bond driven by the Brownian motion of
  its maturity bucket ([0,1), [1,5), [5,inf)); bucket correlations 0.7
  adjacent / 0.3 outer.  The drift uses the shortest live bond's
  continuously-compounded yield.  Setting both correlations to 1 collapses
  the drivers to a single factor and recovers the one-factor dynamics.

Exposure is undiscounted: ``epe(t) = E[(V(t) - V(0))^+]`` on a weekly grid
over one year, and the scalar add-on is the time average of that profile
(trapezoidal).  Profiles are reduced in a single pass over simulation nodes,
so many portfolios can share one scenario sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import Curve, CurveSet
from .trades import (
    CashflowKind,
    ClassificationError,
    Fixed,
    Floating,
    Trade,
    trade_cashflows,
)

TWO_PI = 2.0 * math.pi


def identify_sigma_hw(sf_ir: float, rounded: bool = False) -> float:
    """Short-rate volatility equivalent to an interest-rate supervisory
    factor: 1.5 * sqrt(2pi) * SF.  ``rounded`` reproduces the two-decimal
    basis-point convention (0.0189 for SF = 0.5%) instead of the exact
    value 0.0187997 used internally."""
    if sf_ir < 0:
        raise ValueError("supervisory factor must be nonnegative")
    sigma = 1.5 * math.sqrt(TWO_PI) * sf_ir
    return round(sigma, 4) if rounded else sigma


def theoretical_addon(sigma_v: float, horizon: float) -> float:
    """(2/3) * sigma * sqrt(T / 2pi): the time-averaged expected positive
    drift-free Gaussian exposure over [0, T]."""
    if sigma_v < 0:
        raise ValueError("value volatility must be nonnegative")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    return (2.0 / 3.0) * sigma_v * math.sqrt(horizon / TWO_PI)


@dataclass(frozen=True)
class HWParams:
    a: float = 0.05
    sigma: float = 0.018799712059732503  # identify_sigma_hw(0.005)

    def __post_init__(self) -> None:
        if self.a <= 0 or self.sigma < 0:
            raise ValueError("need a > 0 and sigma >= 0")


@dataclass(frozen=True)
class GMM3FParams:
    a: float = 0.05
    sigma: float = 0.018799712059732503
    rho_adjacent: float = 0.7
    rho_outer: float = 0.3

    def correlation(self) -> np.ndarray:
        r1, r2 = self.rho_adjacent, self.rho_outer
        return np.array([[1.0, r1, r2], [r1, 1.0, r1], [r2, r1, 1.0]])

    def factor(self) -> np.ndarray:
        """Square root of the bucket correlation matrix (eigen-based, so the
        perfectly-correlated degenerate case factors too)."""
        corr = self.correlation()
        vals, vecs = np.linalg.eigh(corr)
        if vals.min() < -1e-10:
            raise ValueError(f"bucket correlation matrix is not PSD: eigenvalues {vals}")
        return vecs @ np.diag(np.sqrt(np.clip(vals, 0.0, None)))


@dataclass(frozen=True)
class SwapVolDecomposition:
    """Instantaneous value-volatility split of a forward-starting payer swap:
    the index-roll term, the floating-weight term, and the fixed-coupon
    term.  On a flat zero curve an ATM swap keeps only the first."""

    atm: float
    floating: float
    fixed: float

    @property
    def total(self) -> float:
        return self.atm + self.floating + self.fixed


def swap_vol_decomposition(
    trade: Trade, curves: CurveSet, params: HWParams, t: float = 0.0
) -> SwapVolDecomposition:
    """Evaluate the three volatility sums on today's curves.

    Valid in the forward-start region t <= swap start; discount factors and
    forwards are frozen at their time-0 values, while the mean-reversion
    exponentials use T - t.
    """
    fixed_legs = [leg for leg in trade.legs if isinstance(leg.kind, Fixed)]
    float_legs = [leg for leg in trade.legs if isinstance(leg.kind, Floating)]
    if len(fixed_legs) != 1 or len(float_legs) != 1:
        raise ClassificationError("volatility decomposition needs a fixed-vs-floating swap")
    fixed_leg, float_leg = fixed_legs[0], float_legs[0]
    if t > float_leg.start:
        raise ValueError("decomposition requires t <= swap start")
    a, sig = params.a, params.sigma
    rate = fixed_leg.kind.rate
    df = curves.discount.discount_factor
    atm = floating = fixed = 0.0
    bounds = float_leg.period_boundaries()
    from .curves import forward_rate as fwd

    for t0, t1 in zip(bounds, bounds[1:]):
        n = float_leg.notional_at(t0)
        delta = float_leg.frequency
        lfwd = fwd(curves.projection, max(t0, 0.0), delta)
        atm += n * df(t0) * (sig / a) * (math.exp(-a * (t0 - t)) - math.exp(-a * (t1 - t)))
        floating -= n * df(t1) * (sig / a) * (1.0 - math.exp(-a * (t0 - t))) * delta * lfwd
        fixed += n * df(t1) * (sig / a) * (1.0 - math.exp(-a * (t1 - t))) * delta * rate
    return SwapVolDecomposition(atm=atm, floating=floating, fixed=fixed)


# ---------------------------------------------------------------------------
# Time grids
# ---------------------------------------------------------------------------


def weekly_grid(horizon: float = 1.0, points: int = 52) -> tuple[float, ...]:
    """Exposure grid: `points` equally spaced times in (0, horizon]."""
    return tuple(horizon * k / points for k in range(1, points + 1))


def daily_grid(horizon: float = 1.0) -> tuple[float, ...]:
    return weekly_grid(horizon, points=250)


def _leg_event_times(trade: Trade, horizon: float) -> set[float]:
    """Fixing/reset/payment times at or before the horizon; these must be
    simulation nodes so fixings can be recorded when they happen."""
    events: set[float] = set()
    for leg in trade.legs:
        for b in leg.period_boundaries():
            if 0.0 < b <= horizon:
                events.add(b)
    return events


def simulation_grid(
    trades: list[Trade], exposure_times: tuple[float, ...], horizon: float | None = None
) -> tuple[float, ...]:
    """Union of the exposure grid, time 0, and trade event times."""
    h = horizon if horizon is not None else max(exposure_times)
    times: set[float] = {0.0}
    times.update(t for t in exposure_times if t <= h)
    for trade in trades:
        times.update(_leg_event_times(trade, h))
    return tuple(sorted(times))


# ---------------------------------------------------------------------------
# Portfolio valuation on simulated bonds
# ---------------------------------------------------------------------------


class PortfolioValuer:
    """Values a netted portfolio of linear trades on simulated bond prices.

    The valuer is compiled once against a curve set (for projected amounts
    and static coefficients) and consumed by a single scenario sweep; it
    keeps per-path fixing state, so build a fresh one per sweep.
    """

    def __init__(self, trades: list[Trade], curves: CurveSet):
        self.trades = list(trades)
        self._static: list[tuple[float, float]] = []  # (pay_time, signed amount coeff)
        self._floating: list[dict] = []
        self._compound: list[dict] = []
        self._cms: list[dict] = []
        dates: set[float] = set()
        for trade in trades:
            for cf in trade_cashflows(trade, curves):
                if cf.kind is CashflowKind.FIXED:
                    self._static.append((cf.pay_time, cf.sign * cf.amount))
                    dates.add(cf.pay_time)
                elif cf.kind is CashflowKind.FLOATING:
                    if abs(cf.pay_time - (cf.fixing + cf.tenor)) > 1e-9:
                        raise ClassificationError(
                            "Monte Carlo valuation supports payment at fixing + tenor only"
                        )
                    if cf.fixing < 0:
                        raise ClassificationError("seasoned fixings need externally supplied rates")
                    self._floating.append(
                        dict(fix=cf.fixing, pay=cf.pay_time, n=cf.notional, tenor=cf.tenor,
                             sign=cf.sign, rate=None)
                    )
                    dates.update((cf.fixing, cf.pay_time))
                elif cf.kind is CashflowKind.COMPOUND:
                    if cf.obs_start < 0:
                        raise ClassificationError("seasoned compounding needs externally supplied rates")
                    resets = _reset_times(cf.obs_start, cf.obs_end, cf.tenor)
                    self._compound.append(
                        dict(resets=resets, tenor=cf.tenor, n=cf.notional, sign=cf.sign,
                             pay=cf.pay_time, factor=None)
                    )
                    dates.update(resets)
                    dates.add(cf.pay_time)
                elif cf.kind is CashflowKind.CMS:
                    if cf.obs_start < 0:
                        raise ClassificationError("seasoned CMS fixings need externally supplied rates")
                    ann = _reset_times(cf.obs_start, cf.obs_end, cf.tenor)[1:]
                    self._cms.append(
                        dict(fix=cf.obs_start, s=cf.obs_start, e=cf.obs_end, ann=ann,
                             tenor=cf.tenor, accrual=cf.accrual, n=cf.notional,
                             pay=cf.pay_time, sign=cf.sign, rate=None)
                    )
                    dates.update(ann)
                    dates.update((cf.obs_start, cf.obs_end, cf.pay_time))
                else:
                    raise ClassificationError(
                        f"{cf.kind.value} cashflows are not supported by the Monte Carlo oracle"
                    )
        self.required_dates: tuple[float, ...] = tuple(sorted(d for d in dates if d > 0))
        self._col: dict[float, int] = {}
        self._coeffs_cache: dict[int, tuple[np.ndarray, float]] = {}

    # -- sweep protocol ------------------------------------------------------

    def bind(self, dates: tuple[float, ...], paths: int) -> None:
        self._col = {d: i for i, d in enumerate(dates)}
        missing = [d for d in self.required_dates if d not in self._col]
        if missing:
            raise ValueError(f"scenario set lacks bond dates {missing[:3]}...")
        self._coeffs_cache.clear()
        for item in self._floating + self._cms:
            item["rate"] = None
        for item in self._compound:
            item["factor"] = np.ones(paths)

    def _static_coeffs(self, k: int, t: float, n_dates: int) -> tuple[np.ndarray, float]:
        """Per-node bond-price coefficients plus a constant, both deterministic."""
        cached = self._coeffs_cache.get(k)
        if cached is not None:
            return cached
        coeffs = np.zeros(n_dates)
        const = 0.0
        for pay, amount in self._static:
            if pay > t:
                coeffs[self._col[pay]] += amount
        for item in self._floating:
            if item["pay"] > t and item["fix"] >= t:
                # Unfixed period: N * (P(t, T_fix) - P(t, T_pay)).
                add = item["sign"] * item["n"]
                if item["fix"] == t:
                    const += add
                else:
                    coeffs[self._col[item["fix"]]] += add
                coeffs[self._col[item["pay"]]] -= add
        self._coeffs_cache[k] = (coeffs, const)
        return coeffs, const

    def record_fixings(self, t: float, bonds: np.ndarray) -> None:
        """Capture index fixings happening at this node (call before value)."""
        for item in self._floating:
            if item["rate"] is None and item["fix"] == t:
                tau = item["tenor"]
                item["rate"] = (1.0 / bonds[:, self._col[item["pay"]]] - 1.0) / tau
        for item in self._compound:
            resets = item["resets"]
            tau = item["tenor"]
            for j, reset in enumerate(resets[:-1]):
                if reset == t:
                    lrate = (1.0 / bonds[:, self._col[resets[j + 1]]] - 1.0) / tau
                    item["factor"] = item["factor"] * (1.0 + tau * lrate)
        for item in self._cms:
            if item["rate"] is None and item["fix"] == t:
                item["rate"] = self._cms_rate(item, bonds)

    def _cms_rate(self, item: dict, bonds: np.ndarray) -> np.ndarray:
        ps = 1.0 if item["s"] == 0 else bonds[:, self._col[item["s"]]]
        pe = bonds[:, self._col[item["e"]]]
        annuity = item["tenor"] * sum(bonds[:, self._col[d]] for d in item["ann"])
        return (ps - pe) / annuity

    def value(self, k: int, t: float, bonds: np.ndarray) -> np.ndarray:
        """Portfolio value per path at node k (time t)."""
        coeffs, const = self._static_coeffs(k, t, bonds.shape[1])
        v = bonds @ coeffs
        if const:
            v = v + const
        for item in self._floating:
            if item["fix"] < t < item["pay"]:
                v = v + item["sign"] * item["n"] * item["tenor"] * item["rate"] * bonds[:, self._col[item["pay"]]]
        for item in self._compound:
            if item["pay"] > t:
                roll = next(r for r in item["resets"] if r > t)
                v = v + item["sign"] * item["n"] * item["factor"] * bonds[:, self._col[roll]]
        for item in self._cms:
            if item["pay"] > t:
                rate = self._cms_rate(item, bonds) if item["fix"] >= t else item["rate"]
                v = v + item["sign"] * item["n"] * item["accrual"] * rate * bonds[:, self._col[item["pay"]]]
        return v


def _reset_times(start: float, end: float, tenor: float) -> tuple[float, ...]:
    n = round((end - start) / tenor)
    return tuple(start + j * tenor for j in range(n + 1))


# ---------------------------------------------------------------------------
# Scenario sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExposureProfile:
    """Expected positive exposure per grid time, with Monte Carlo errors.

    ``addon`` / ``addon_stderr`` come from per-path trapezoidal integrals of
    the exposure over [0, horizon]; the mean equals the trapezoid of ``epe``.
    """

    times: tuple[float, ...]
    epe: tuple[float, ...]
    stderr: tuple[float, ...]
    paths: int
    seed: int
    value0: float
    addon: float
    addon_stderr: float
    horizon: float = 1.0


def addon_from_profile(profile: ExposureProfile, horizon: float = 1.0) -> float:
    """Time-averaged EPE: trapezoid of the profile over [0, horizon] / horizon.

    The profile starts implicitly at (0, 0) since V(0) - V(0) = 0.
    """
    times = (0.0,) + tuple(profile.times)
    if times[-1] < horizon - 1e-12:
        raise ValueError(f"profile grid ends at {times[-1]}, does not cover horizon {horizon}")
    epe = (0.0,) + tuple(profile.epe)
    total = 0.0
    for (t0, e0), (t1, e1) in zip(zip(times, epe), zip(times[1:], epe[1:])):
        if t0 >= horizon:
            break
        total += 0.5 * (e0 + e1) * (min(t1, horizon) - t0)
    return total / horizon


class _ExposureAccumulator:
    """Streams one portfolio's exposure statistics through a scenario sweep."""

    def __init__(self, valuer: PortfolioValuer, exposure_times: tuple[float, ...], horizon: float):
        self.valuer = valuer
        self.exposure_times = set(exposure_times)
        self.sorted_times = tuple(sorted(self.exposure_times))
        self.horizon = horizon
        self.value0 = 0.0
        self.epe: list[float] = []
        self.stderr: list[float] = []
        self._trap: np.ndarray | None = None
        self._prev_e: np.ndarray | None = None
        self._prev_t = 0.0

    def begin(self, dates: tuple[float, ...], paths: int) -> None:
        self.valuer.bind(dates, paths)
        self._trap = np.zeros(paths)
        self._prev_e = np.zeros(paths)
        self._prev_t = 0.0

    def node(self, k: int, t: float, bonds: np.ndarray) -> None:
        self.valuer.record_fixings(t, bonds)
        if k == 0:
            v0 = self.valuer.value(k, t, bonds)
            self.value0 = float(v0[0])
            return
        if t not in self.exposure_times:
            return
        v = self.valuer.value(k, t, bonds)
        e = np.maximum(v - self.value0, 0.0)
        self.epe.append(float(e.mean()))
        self.stderr.append(float(e.std(ddof=1) / math.sqrt(e.size)))
        self._trap += 0.5 * (self._prev_e + e) * (t - self._prev_t)
        self._prev_e = e
        self._prev_t = t

    def finish(self, paths: int, seed: int) -> ExposureProfile:
        integrals = self._trap / self.horizon
        return ExposureProfile(
            times=self.sorted_times,
            epe=tuple(self.epe),
            stderr=tuple(self.stderr),
            paths=paths,
            seed=seed,
            value0=self.value0,
            addon=float(integrals.mean()),
            addon_stderr=float(integrals.std(ddof=1) / math.sqrt(paths)),
            horizon=self.horizon,
        )


class ScenarioSet:
    """Base: a seeded simulation that can sweep consumers over its nodes.

    Subclasses implement ``_bond_nodes`` yielding (k, t, bonds) with bonds a
    (paths, n_dates) matrix of P(t, date); entries for dates <= t are dead
    and must not be read.
    """

    def __init__(self, times: tuple[float, ...], dates: tuple[float, ...], paths: int, seed: int):
        if paths <= 0:
            raise ValueError("need at least one path")
        if not times or times[0] != 0.0:
            raise ValueError("simulation grid must start at 0")
        self.times = times
        self.dates = dates
        self.paths = paths
        self.seed = seed

    def _bond_nodes(self):  # pragma: no cover - abstract
        raise NotImplementedError

    def sweep(self, accumulators: list[_ExposureAccumulator]) -> None:
        for acc in accumulators:
            acc.begin(self.dates, self.paths)
        for k, t, bonds in self._bond_nodes():
            for acc in accumulators:
                acc.node(k, t, bonds)


def exposure_profile(
    scenarios: ScenarioSet,
    valuer: PortfolioValuer,
    exposure_times: tuple[float, ...],
    horizon: float = 1.0,
) -> ExposureProfile:
    """Exposure profile of one portfolio on a scenario set."""
    return exposure_profiles(scenarios, [valuer], exposure_times, horizon)[0]


def exposure_profiles(
    scenarios: ScenarioSet,
    valuers: list[PortfolioValuer],
    exposure_times: tuple[float, ...],
    horizon: float = 1.0,
) -> list[ExposureProfile]:
    """Profiles for several portfolios sharing a single scenario sweep."""
    missing = [t for t in exposure_times if t not in scenarios.times]
    if missing:
        raise ValueError(f"exposure times {missing[:3]}... not on the simulation grid")
    accs = [_ExposureAccumulator(v, exposure_times, horizon) for v in valuers]
    scenarios.sweep(accs)
    return [acc.finish(scenarios.paths, scenarios.seed) for acc in accs]


class HW1FScenarioSet(ScenarioSet):
    """Exact-transition Hull-White short-rate scenarios.

    The state is the zero-mean factor x with r = x + alpha(t); bonds follow
    the affine reconstruction off the initial curve, so node-0 bonds equal
    the curve's discount factors.  The running integral of x is sampled
    jointly (exact OU integral) to support an unbiased bank account.
    """

    def __init__(
        self,
        times: tuple[float, ...],
        dates: tuple[float, ...],
        paths: int,
        seed: int,
        curve: Curve,
        params: HWParams,
    ):
        super().__init__(times, dates, paths, seed)
        self.curve = curve
        self.params = params
        self._simulate()

    def _simulate(self) -> None:
        a, sig = self.params.a, self.params.sigma
        rng = np.random.default_rng(self.seed)
        n = len(self.times)
        x = np.zeros((n, self.paths))
        ix = np.zeros((n, self.paths))  # integral of x over [0, t_k]
        for k in range(1, n):
            dt = self.times[k] - self.times[k - 1]
            ead = math.exp(-a * dt)
            var_x = sig * sig * (1.0 - math.exp(-2.0 * a * dt)) / (2.0 * a)
            var_i = (sig * sig / (a * a)) * (
                dt - 2.0 * (1.0 - ead) / a + (1.0 - math.exp(-2.0 * a * dt)) / (2.0 * a)
            )
            cov = (sig * sig / (2.0 * a * a)) * (1.0 - ead) ** 2
            z = rng.standard_normal((self.paths, 2))
            sx = math.sqrt(var_x)
            x[k] = x[k - 1] * ead + sx * z[:, 0]
            mean_i = x[k - 1] * (1.0 - ead) / a
            if sx > 0.0:
                beta = cov / sx
                resid = math.sqrt(max(var_i - beta * beta, 0.0))
            else:
                beta = resid = 0.0
            ix[k] = ix[k - 1] + mean_i + beta * z[:, 0] + resid * z[:, 1]
        self._x = x
        self._ix = ix

    def alpha(self, t: float) -> float:
        a, sig = self.params.a, self.params.sigma
        return self.curve.instantaneous_forward(t) + (sig * sig / (2.0 * a * a)) * (
            1.0 - math.exp(-a * t)
        ) ** 2

    def short_rate(self, k: int) -> np.ndarray:
        return self._x[k] + self.alpha(self.times[k])

    def log_bank_account(self, k: int) -> np.ndarray:
        """log B(t_k) = integral of r over [0, t_k], exact in distribution."""
        a, sig = self.params.a, self.params.sigma
        t = self.times[k]
        det = -math.log(self.curve.discount_factor(t)) + (sig * sig / (2.0 * a * a)) * (
            t - 2.0 * (1.0 - math.exp(-a * t)) / a + (1.0 - math.exp(-2.0 * a * t)) / (2.0 * a)
        )
        return self._ix[k] + det

    def bonds_at(self, k: int) -> np.ndarray:
        """P(t_k, date) for every registered date (dead columns garbage)."""
        a, sig = self.params.a, self.params.sigma
        t = self.times[k]
        dates = np.asarray(self.dates)
        b = (1.0 - np.exp(-a * np.maximum(dates - t, 0.0))) / a
        ln_ratio = np.array(
            [
                math.log(self.curve.discount_factor(d) / self.curve.discount_factor(t))
                if d > t
                else 0.0
                for d in dates
            ]
        )
        # log P(t,T) = ln(P0(T)/P0(t)) - phi1(t)*B - phi2(t)*B^2 - B*x_t, the
        # affine reconstruction written in terms of the zero-mean factor.
        phi1 = (sig * sig / (2.0 * a * a)) * (1.0 - math.exp(-a * t)) ** 2
        phi2 = (sig * sig / (4.0 * a)) * (1.0 - math.exp(-2.0 * a * t))
        ln_det = ln_ratio - phi1 * b - phi2 * b * b
        return np.exp(ln_det[None, :] - np.outer(self._x[k], b))

    def _bond_nodes(self):
        for k, t in enumerate(self.times):
            yield k, t, self.bonds_at(k)


class GMM3FScenarioSet(ScenarioSet):
    """Log-Euler bucketed zero-coupon-bond scenarios.

    Bonds exist for every requested valuation date plus every simulation
    node (the latter keep a short bond alive for the drift proxy).  A bond's
    driving factor is fixed by the bucket of its expiry.
    """

    def __init__(
        self,
        times: tuple[float, ...],
        dates: tuple[float, ...],
        paths: int,
        seed: int,
        curve: Curve,
        params: GMM3FParams,
    ):
        super().__init__(times, dates, paths, seed)
        self.curve = curve
        self.params = params
        self._factor = params.factor()
        self._expiries = tuple(sorted(set(dates) | {t for t in times if t > 0.0}))
        from .saccr import maturity_bucket

        self._buckets = np.array([maturity_bucket(T) - 1 for T in self._expiries])
        self._date_cols = np.array([self._expiries.index(d) for d in dates], dtype=int)

    def _bond_nodes(self):
        a, sig = self.params.a, self.params.sigma
        rng = np.random.default_rng(self.seed)
        expiries = np.asarray(self._expiries)
        log_p = np.tile(
            np.array([math.log(self.curve.discount_factor(T)) for T in expiries]),
            (self.paths, 1),
        )
        yield 0, 0.0, np.exp(log_p[:, self._date_cols])
        for k in range(1, len(self.times)):
            t0, t1 = self.times[k - 1], self.times[k]
            dt = t1 - t0
            alive = expiries > t0
            idx_short = int(np.argmax(alive))  # shortest bond still alive at t0
            ttm_short = expiries[idx_short] - t0
            r = -log_p[:, idx_short] / ttm_short
            vol = np.where(alive, (sig / a) * (1.0 - np.exp(-a * (expiries - t0))), 0.0)
            z = rng.standard_normal((self.paths, 3)) @ self._factor.T
            shocks = z[:, self._buckets]
            log_p[:, alive] += (
                (r[:, None] - 0.5 * vol[alive] ** 2) * dt - vol[alive] * math.sqrt(dt) * shocks[:, alive]
            )
            yield k, t1, np.exp(log_p[:, self._date_cols])


def simulate_hw1f(
    paths: int,
    grid: tuple[float, ...],
    curves: CurveSet,
    params: HWParams,
    seed: int,
    dates: tuple[float, ...] = (),
) -> HW1FScenarioSet:
    """Hull-White scenario set over the given simulation grid.

    ``dates`` are the bond expiries consumers will read; they default to the
    grid itself.
    """
    bond_dates = tuple(sorted(set(dates))) or tuple(t for t in grid if t > 0)
    return HW1FScenarioSet(tuple(grid), bond_dates, paths, seed, curves.discount, params)


def simulate_gmm3f(
    paths: int,
    grid: tuple[float, ...],
    curves: CurveSet,
    params: GMM3FParams,
    seed: int,
    dates: tuple[float, ...] = (),
) -> GMM3FScenarioSet:
    """Three-factor bucketed scenario set (lazily generated per sweep)."""
    bond_dates = tuple(sorted(set(dates))) or tuple(t for t in grid if t > 0)
    return GMM3FScenarioSet(tuple(grid), bond_dates, paths, seed, curves.discount, params)


class _SnapshotAccumulator:
    """Collects raw portfolio value vectors at chosen node times."""

    def __init__(self, valuer: PortfolioValuer, snapshot_times: tuple[float, ...]):
        self.valuer = valuer
        self.snapshot_times = set(snapshot_times) | {0.0}
        self.values: dict[float, np.ndarray] = {}

    def begin(self, dates: tuple[float, ...], paths: int) -> None:
        self.valuer.bind(dates, paths)
        self.values.clear()

    def node(self, k: int, t: float, bonds: np.ndarray) -> None:
        self.valuer.record_fixings(t, bonds)
        if t in self.snapshot_times:
            self.values[t] = self.valuer.value(k, t, bonds)


def value_snapshots(
    scenarios: ScenarioSet, valuer: PortfolioValuer, times: tuple[float, ...]
) -> dict[float, np.ndarray]:
    """Per-path portfolio values at the requested node times (and at 0)."""
    missing = [t for t in times if t not in scenarios.times]
    if missing:
        raise ValueError(f"snapshot times {missing[:3]}... not on the simulation grid")
    acc = _SnapshotAccumulator(valuer, times)
    scenarios.sweep([acc])
    return acc.values


def mc_value_volatility(
    scenarios: ScenarioSet, valuer: PortfolioValuer, node_time: float
) -> tuple[float, float]:
    """Annualized volatility of the portfolio value from the first increment.

    Returns (sigma_hat, stderr); sigma_hat estimates the instantaneous value
    volatility at time 0, so ``theoretical_addon(sigma_hat, 1)`` is the
    Monte Carlo counterpart of the frozen-volatility add-on identity.
    """
    snaps = value_snapshots(scenarios, valuer, (node_time,))
    dv = snaps[node_time] - snaps[0.0]
    var = float(dv.var(ddof=1)) / node_time
    sigma = math.sqrt(var)
    # relative stderr of a Gaussian sd estimate: 1 / sqrt(2 (N - 1))
    return sigma, sigma / math.sqrt(2.0 * (dv.size - 1))


# ---------------------------------------------------------------------------
# Direct driftless-Brownian value process (validation of the add-on formula)
# ---------------------------------------------------------------------------


def brownian_value_profile(
    paths: int, exposure_times: tuple[float, ...], sigma: float, seed: int, horizon: float = 1.0
) -> ExposureProfile:
    """Exposure profile of dV = sigma dW simulated exactly on the grid."""
    rng = np.random.default_rng(seed)
    times = (0.0,) + tuple(exposure_times)
    v = np.zeros(paths)
    trap = np.zeros(paths)
    prev_e = np.zeros(paths)
    epe, stderr = [], []
    for t0, t1 in zip(times, times[1:]):
        v = v + sigma * math.sqrt(t1 - t0) * rng.standard_normal(paths)
        e = np.maximum(v, 0.0)
        epe.append(float(e.mean()))
        stderr.append(float(e.std(ddof=1) / math.sqrt(paths)))
        trap += 0.5 * (prev_e + e) * (t1 - t0)
        prev_e = e
    integrals = trap / horizon
    return ExposureProfile(
        times=tuple(exposure_times),
        epe=tuple(epe),
        stderr=tuple(stderr),
        paths=paths,
        seed=seed,
        value0=0.0,
        addon=float(integrals.mean()),
        addon_stderr=float(integrals.std(ddof=1) / math.sqrt(paths)),
        horizon=horizon,
    )


# ---------------------------------------------------------------------------
# Oracle driver
# ---------------------------------------------------------------------------


def oracle_addons(
    portfolios: list[list[Trade]],
    curves: CurveSet,
    model: str = "gmm3f",
    paths: int = 50_000,
    seed: int = 42,
    exposure_times: tuple[float, ...] | None = None,
    hw_params: HWParams | None = None,
    gmm_params: GMM3FParams | None = None,
) -> list[tuple[float, float]]:
    """Monte Carlo (add-on, stderr) for each portfolio, sharing one sweep."""
    ets = exposure_times or weekly_grid()
    all_trades = [t for pf in portfolios for t in pf]
    grid = simulation_grid(all_trades, ets)
    valuers = [PortfolioValuer(pf, curves) for pf in portfolios]
    dates = tuple(sorted({d for v in valuers for d in v.required_dates}))
    if model == "hw1f":
        scen = simulate_hw1f(paths, grid, curves, hw_params or HWParams(), seed, dates)
    elif model == "gmm3f":
        scen = simulate_gmm3f(paths, grid, curves, gmm_params or GMM3FParams(), seed, dates)
    else:
        raise ValueError(f"unknown model: {model}")
    profiles = exposure_profiles(scen, valuers, ets)
    return [(p.addon, p.addon_stderr) for p in profiles]
