"""Market data layer: discount, forward-projection, basis and inflation curves.

Conventions used throughout the package:

- All times are **year fractions** from the valuation date (ACT/365-fixed;
  a quarter is exactly 0.25).
- Zero rates are **continuously compounded**: ``df(t) = exp(-z(t) * t)``.
- Interpolation is **linear on zero rates** with flat extrapolation past the
  last pillar, which is the simplest scheme that keeps discount factors
  positive and reproducible.
- The reserved curve name ``FLAT0`` denotes the flat zero-rate curve, for
  which ``df == 1`` and all forwards are 0.  Several engine identities hold
  exactly only in that mode.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path


class CurveError(ValueError):
    """Bad curve construction or evaluation outside the curve's domain."""


FLAT0_NAME = "FLAT0"


def _interp_flat_ends(t: float, xs: tuple[float, ...], ys: tuple[float, ...]) -> float:
    """Piecewise-linear interpolation with flat extrapolation at both ends."""
    if t <= xs[0]:
        return ys[0]
    if t >= xs[-1]:
        return ys[-1]
    # Curves have a handful of pillars; a linear scan is fine.
    for i in range(len(xs) - 1):
        if xs[i] <= t <= xs[i + 1]:
            w = (t - xs[i]) / (xs[i + 1] - xs[i])
            return ys[i] + w * (ys[i + 1] - ys[i])
    return ys[-1]


@dataclass(frozen=True)
class Curve:
    """Zero-rate discount curve, linear in continuously-compounded zeros.

    Immutable after construction; safe for concurrent reads.
    """

    pillars: tuple[tuple[float, float], ...]
    asof: date | None = None
    interpolation: str = "linear_zero"
    name: str = ""

    def __post_init__(self) -> None:
        if self.interpolation != "linear_zero":
            raise CurveError(f"unsupported interpolation: {self.interpolation}")
        if not self.pillars:
            raise CurveError("curve needs at least one pillar")
        times = [t for t, _ in self.pillars]
        if any(t < 0 for t in times):
            raise CurveError("pillar times must be nonnegative")
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise CurveError("pillar times must be strictly increasing")

    def zero_rate(self, t: float) -> float:
        """Continuously-compounded zero rate z(t); flat beyond the pillars."""
        xs = tuple(p[0] for p in self.pillars)
        ys = tuple(p[1] for p in self.pillars)
        return _interp_flat_ends(t, xs, ys)

    def discount_factor(self, t: float) -> float:
        """P(0,t) = exp(-z(t) * t).  Requires t >= 0."""
        if t < 0:
            raise CurveError(f"discount factor needs t >= 0, got {t}")
        if t == 0.0:
            return 1.0
        return math.exp(-self.zero_rate(t) * t)

    def instantaneous_forward(self, t: float) -> float:
        """f(0,t) = z(t) + t * z'(t), with z' from the right of t.

        Piecewise-linear zeros make f piecewise linear with jumps at pillars;
        the right-sided convention keeps the curve reproducing exactly.
        """
        if t < 0:
            raise CurveError(f"instantaneous forward needs t >= 0, got {t}")
        xs = [p[0] for p in self.pillars]
        ys = [p[1] for p in self.pillars]
        if len(xs) == 1 or t >= xs[-1]:
            return ys[-1]
        for i in range(len(xs) - 1):
            if xs[i] <= t < xs[i + 1] or (t < xs[0] and i == 0):
                slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
                if t < xs[0]:
                    slope = 0.0  # flat extrapolation below the first pillar
                return self.zero_rate(t) + t * slope
        return ys[-1]


def flat_curve(rate: float, name: str = "") -> Curve:
    """Flat continuously-compounded curve at the given zero rate."""
    return Curve(pillars=((0.0, rate),), name=name or f"FLAT{rate:g}")


def flat_zero_curve() -> Curve:
    """The FLAT0 curve: df == 1 everywhere, all forwards 0."""
    return flat_curve(0.0, name=FLAT0_NAME)


@dataclass(frozen=True)
class BasisCurve:
    """Projection curve defined as base discounting plus a zero-rate spread.

    ``P_f(0,t) = P_b(0,t) * P(0,t)`` with ``P_b(0,t) = exp(-s(t) * t)``,
    s linearly interpolated on spread pillars.  A zero spread makes the
    projection curve identical to the base.
    """

    base: Curve
    spread_pillars: tuple[tuple[float, float], ...] = ((0.0, 0.0),)
    name: str = ""

    def __post_init__(self) -> None:
        times = [t for t, _ in self.spread_pillars]
        if not times:
            raise CurveError("basis curve needs at least one spread pillar")
        if any(t < 0 for t in times):
            raise CurveError("spread pillar times must be nonnegative")
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise CurveError("spread pillar times must be strictly increasing")

    def spread(self, t: float) -> float:
        xs = tuple(p[0] for p in self.spread_pillars)
        ys = tuple(p[1] for p in self.spread_pillars)
        return _interp_flat_ends(t, xs, ys)

    def discount_factor(self, t: float) -> float:
        """P_f(0,t), positive by construction."""
        if t < 0:
            raise CurveError(f"discount factor needs t >= 0, got {t}")
        if t == 0.0:
            return 1.0
        return math.exp(-self.spread(t) * t) * self.base.discount_factor(t)


def forward_rate(curve, t_fix: float, tenor: float) -> float:
    """Simply-compounded money-market forward L(0, t_fix, t_fix + tenor).

    ``(P_f(0,t_fix) / P_f(0,t_fix + tenor) - 1) / tenor`` where the day-count
    fraction is the tenor itself (year fractions everywhere).  Accepts any
    object with a ``discount_factor`` method (Curve or BasisCurve).
    """
    if t_fix < 0:
        raise CurveError(f"forward fixing time must be >= 0, got {t_fix}")
    if tenor <= 0:
        raise CurveError(f"forward tenor must be > 0, got {tenor}")
    p0 = curve.discount_factor(t_fix)
    p1 = curve.discount_factor(t_fix + tenor)
    return (p0 / p1 - 1.0) / tenor


@dataclass(frozen=True)
class InflationCurve:
    """Inflation index levels by time; historical fixings carry t < 0.

    Levels are linearly interpolated between pillars and flat beyond the
    last one.  Requests before the first pillar are missing historical
    fixings and raise.
    """

    base_index_value: float
    projection_pillars: tuple[tuple[float, float], ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        if self.base_index_value <= 0:
            raise CurveError("base index value must be positive")
        times = [t for t, _ in self.projection_pillars]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise CurveError("index pillar times must be strictly increasing")
        if any(v <= 0 for _, v in self.projection_pillars):
            raise CurveError("index levels must be positive")

    def _pillars_with_base(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        pts = list(self.projection_pillars)
        if not any(t == 0.0 for t, _ in pts):
            pts.append((0.0, self.base_index_value))
            pts.sort()
        return tuple(t for t, _ in pts), tuple(v for _, v in pts)

    def index_level(self, t: float) -> float:
        xs, ys = self._pillars_with_base()
        if t < xs[0]:
            raise CurveError(f"missing historical index fixing at t={t}")
        return _interp_flat_ends(t, xs, ys)


def inflation_ratio(curve: InflationCurve, t_start: float, t_end: float) -> float:
    """I(t_end) / I(t_start); t_start may lie in the past."""
    if t_start == t_end:
        return 1.0
    return curve.index_level(t_end) / curve.index_level(t_start)


@dataclass(frozen=True)
class CurveSet:
    """Bundle of curves a valuation needs: discounting, projection, extras.

    ``forward`` defaults to the discount curve (zero index basis).  FX spots
    are units of domestic currency per unit of foreign.
    """

    discount: Curve
    forward: Curve | BasisCurve | None = None
    inflation: InflationCurve | None = None
    fx_spots: dict[str, float] = field(default_factory=dict)

    @property
    def projection(self) -> Curve | BasisCurve:
        return self.forward if self.forward is not None else self.discount

    def fx_spot(self, ccy: str) -> float:
        try:
            return self.fx_spots[ccy]
        except KeyError:
            raise CurveError(f"missing FX spot for {ccy}") from None


def flat_zero_curve_set() -> CurveSet:
    return CurveSet(discount=flat_zero_curve())


# ---------------------------------------------------------------------------
# CSV I/O
#
# Discount / projection curves: header "time_years,zero_rate".
# Basis spreads:                header "time_years,zero_spread".
# Inflation:                    header "time_years,index_level" and must
#                               include a row at time 0 (the base level);
#                               negative times are historical fixings.
# ---------------------------------------------------------------------------


def _read_two_column_csv(path: Path, expected: tuple[str, str]) -> list[tuple[float, float]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != list(expected):
            raise CurveError(f"{path}: expected header '{expected[0]},{expected[1]}'")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or not row[0].strip():
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                raise CurveError(f"{path}:{lineno}: malformed row {row!r}") from None
    if not rows:
        raise CurveError(f"{path}: no data rows")
    return rows


def load_curve_csv(path: str | Path, name: str = "") -> Curve:
    """Load a zero-rate curve from 'time_years,zero_rate' CSV."""
    p = Path(path)
    rows = _read_two_column_csv(p, ("time_years", "zero_rate"))
    return Curve(pillars=tuple(rows), name=name or p.stem)


def load_basis_csv(path: str | Path, base: Curve) -> BasisCurve:
    """Load a basis projection curve from 'time_years,zero_spread' CSV."""
    rows = _read_two_column_csv(Path(path), ("time_years", "zero_spread"))
    return BasisCurve(base=base, spread_pillars=tuple(rows))


def load_inflation_csv(path: str | Path) -> InflationCurve:
    """Load an inflation index curve from 'time_years,index_level' CSV."""
    rows = _read_two_column_csv(Path(path), ("time_years", "index_level"))
    base = [v for t, v in rows if t == 0.0]
    if not base:
        raise CurveError(f"{path}: inflation curve needs a row at time_years=0")
    return InflationCurve(base_index_value=base[0], projection_pillars=tuple(rows))


def load_curve_set(spec: str | Path) -> CurveSet:
    """Resolve a curve location into a CurveSet.

    ``spec`` is either the reserved name ``FLAT0``, a single discount-curve
    CSV file, or a directory containing ``discount.csv`` and optionally
    ``basis.csv`` (spreads over discount) and ``inflation.csv``.
    """
    if str(spec) == FLAT0_NAME:
        return flat_zero_curve_set()
    p = Path(spec)
    if p.is_file():
        return CurveSet(discount=load_curve_csv(p))
    if p.is_dir():
        disc_path = p / "discount.csv"
        if not disc_path.exists():
            raise CurveError(f"{p}: curve directory needs discount.csv")
        discount = load_curve_csv(disc_path, name="discount")
        forward = None
        if (p / "basis.csv").exists():
            forward = load_basis_csv(p / "basis.csv", base=discount)
        inflation = None
        if (p / "inflation.csv").exists():
            inflation = load_inflation_csv(p / "inflation.csv")
        return CurveSet(discount=discount, forward=forward, inflation=inflation)
    raise CurveError(f"no such curve file or directory: {spec}")
