"""Builtin comparison scenarios: named portfolio families for regressions.

Each scenario is a list of rows; a row holds a display label, the portfolio
priced by the deterministic methods, and the pay/receive portfolio pair
whose Monte Carlo add-ons average into the oracle column (the closed-form
methods are direction-independent, the simulated exposure is not).

``table2`` and ``table3`` run on the flat-zero curve where the closed-form
regression values are exact.  The market-curve families use a synthetic
upward-sloping USD curve: the historical curve behind the published
experiments is not available, so absolute oracle values are fixture-specific
while the percentage structure carries over.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .curves import Curve, CurveSet, flat_zero_curve_set
from .trades import (
    Trade,
    make_fra_strip,
    make_zero_addon_package,
    par_rate,
    split_swap,
    vanilla_swap,
    zero_coupon_par_rate,
    zero_coupon_swap,
)


def market_curve_set() -> CurveSet:
    """Synthetic late-2018-style USD curve (continuously compounded zeros)."""
    pillars = (
        (0.25, 0.0240),
        (0.5, 0.0247),
        (1.0, 0.0256),
        (2.0, 0.0262),
        (3.0, 0.0264),
        (5.0, 0.0266),
        (7.0, 0.0269),
        (10.0, 0.0272),
        (15.0, 0.0276),
        (20.0, 0.0278),
        (30.0, 0.0280),
    )
    return CurveSet(discount=Curve(pillars=pillars, name="usd-synthetic"))


NOTIONAL = 100e6
MONEYNESS_BUMPS = (("+500bps", 0.05), ("+100bps", 0.01), ("", 0.0), ("-100bps", -0.01), ("-500bps", -0.05))


@dataclass(frozen=True)
class ScenarioRow:
    label: str
    portfolio: list[Trade]
    oracle_portfolios: tuple[list[Trade], list[Trade]] | None = None

    def oracle_pair(self) -> tuple[list[Trade], list[Trade]]:
        if self.oracle_portfolios is not None:
            return self.oracle_portfolios
        mirrored = [t.mirrored() for t in self.portfolio]
        return self.portfolio, mirrored


@dataclass(frozen=True)
class ScenarioDef:
    name: str
    description: str
    curves: CurveSet
    rows: list[ScenarioRow] = field(default_factory=list)

    def all_trades(self) -> list[Trade]:
        out = []
        for row in self.rows:
            out.extend(row.portfolio)
            pair = row.oracle_pair()
            out.extend(pair[0])
            out.extend(pair[1])
        return out


def _pay_receive_pair(make) -> tuple[list[Trade], list[Trade]]:
    return make(payer=True), make(payer=False)


def scenario_table2(curves: CurveSet | None = None) -> ScenarioDef:
    """Economically equivalent confirmations of one ATM 10Y swap."""
    cs = curves or flat_zero_curve_set()
    atm_rate = par_rate(vanilla_swap("probe", NOTIONAL, 0.0, 0.0, 10.0, payer=True), cs)
    swap = vanilla_swap("atm-10y", NOTIONAL, atm_rate, 0.0, 10.0, payer=True)
    rows = [
        ScenarioRow("ATM Swap", [swap]),
        ScenarioRow("FRA replication", make_fra_strip(swap)),
        ScenarioRow("Split at 3Y", split_swap(swap, 3.0)),
    ]
    return ScenarioDef("table2", "equivalent confirmations, one economics", cs, rows)


def scenario_table3(curves: CurveSet | None = None) -> ScenarioDef:
    """Zero economic position: ATM swap hedged by its own FRA strip."""
    cs = curves or flat_zero_curve_set()
    atm_rate = par_rate(vanilla_swap("probe", NOTIONAL, 0.0, 0.0, 10.0, payer=True), cs)
    swap = vanilla_swap("atm-10y", NOTIONAL, atm_rate, 0.0, 10.0, payer=True)
    hedge = [t.mirrored() for t in make_fra_strip(swap)]
    return ScenarioDef(
        "table3",
        "material add-on for a zero position under trade-level rules",
        cs,
        [ScenarioRow("ATM net of FRA replication", [swap] + hedge)],
    )


def scenario_moneyness(curves: CurveSet | None = None) -> ScenarioDef:
    cs = curves or market_curve_set()
    atm_rate = par_rate(vanilla_swap("probe", NOTIONAL, 0.0, 0.0, 10.0, payer=True), cs)
    rows = []
    for suffix, bump in MONEYNESS_BUMPS:
        label = f"ATM{suffix} Swap" if suffix else "ATM Swap"
        payer, receiver = _pay_receive_pair(
            lambda payer, b=bump, s=suffix: [
                vanilla_swap(
                    f"mny{s or '-atm'}-{'pay' if payer else 'rcv'}",
                    NOTIONAL,
                    atm_rate + b,
                    0.0,
                    10.0,
                    payer=payer,
                )
            ]
        )
        rows.append(ScenarioRow(label, payer, (payer, receiver)))
    return ScenarioDef("moneyness", "vanilla swaps across strikes", cs, rows)


def scenario_replications(curves: CurveSet | None = None) -> ScenarioDef:
    cs = curves or market_curve_set()
    atm_rate = par_rate(vanilla_swap("probe", NOTIONAL, 0.0, 0.0, 10.0, payer=True), cs)

    def swap(payer: bool, tag: str) -> Trade:
        return vanilla_swap(f"rep-{tag}", NOTIONAL, atm_rate, 0.0, 10.0, payer=payer)

    rows = [
        ScenarioRow("ATM Swap", [swap(True, "atm")], ([swap(True, "p")], [swap(False, "r")])),
        ScenarioRow(
            "FRA Replication",
            make_fra_strip(swap(True, "strip")),
            (make_fra_strip(swap(True, "sp")), make_fra_strip(swap(False, "sr"))),
        ),
        ScenarioRow(
            "ATM - FRAs",
            [swap(True, "net")] + [t.mirrored() for t in make_fra_strip(swap(True, "nets"))],
        ),
        ScenarioRow(
            "Split at 3Y",
            split_swap(swap(True, "split"), 3.0),
            (split_swap(swap(True, "spp"), 3.0), split_swap(swap(False, "spr"), 3.0)),
        ),
    ]
    return ScenarioDef("replications", "equivalent confirmations on a market curve", cs, rows)


def scenario_amortising(curves: CurveSet | None = None) -> ScenarioDef:
    """Accreting-to-amortising notional family sharing one fixed rate."""
    cs = curves or market_curve_set()
    steps = ((5.0, 2 * NOTIONAL), (10.0, NOTIONAL))  # 200M first five years, then 100M
    rate = par_rate(vanilla_swap("probe", steps, 0.0, 0.0, 10.0, payer=True), cs)

    def amort(payer: bool, tag: str) -> Trade:
        return vanilla_swap(f"amort-{tag}", steps, rate, 0.0, 10.0, payer=payer)

    def combo_5y_fwd(payer: bool, tag: str) -> list[Trade]:
        return [
            vanilla_swap(f"c5-{tag}", 2 * NOTIONAL, rate, 0.0, 5.0, payer=payer),
            vanilla_swap(f"c5f-{tag}", NOTIONAL, rate, 5.0, 10.0, payer=payer),
        ]

    def combo_10_5(payer: bool, tag: str) -> list[Trade]:
        return [
            vanilla_swap(f"c10-{tag}", NOTIONAL, rate, 0.0, 10.0, payer=payer),
            vanilla_swap(f"c5b-{tag}", NOTIONAL, rate, 0.0, 5.0, payer=payer),
        ]

    def hedged(payer: bool, tag: str) -> list[Trade]:
        return [
            amort(payer, f"h-{tag}"),
            vanilla_swap(f"hedge-{tag}", 1.5 * NOTIONAL, rate, 0.0, 10.0, payer=not payer),
        ]

    rows = [
        ScenarioRow(
            "Amortising 10Y:5Y/100M;5Y/200M",
            [amort(True, "base")],
            ([amort(True, "p")], [amort(False, "r")]),
        ),
        ScenarioRow(
            "FRA replication",
            make_fra_strip(amort(True, "strip")),
            (make_fra_strip(amort(True, "sp")), make_fra_strip(amort(False, "sr"))),
        ),
        ScenarioRow(
            "5Y/200M and forward start 5Y5Y/100M",
            combo_5y_fwd(True, "base"),
            (combo_5y_fwd(True, "p"), combo_5y_fwd(False, "r")),
        ),
        ScenarioRow(
            "10Y/100M and 5Y/100M",
            combo_10_5(True, "base"),
            (combo_10_5(True, "p"), combo_10_5(False, "r")),
        ),
        ScenarioRow(
            "Amortising minus 10Y/150M",
            hedged(True, "base"),
            (hedged(True, "p"), hedged(False, "r")),
        ),
    ]
    return ScenarioDef("amortising", "amortising swap vs equivalent combinations", cs, rows)


def scenario_zero_coupon(curves: CurveSet | None = None) -> ScenarioDef:
    cs = curves or market_curve_set()
    atm_rate = zero_coupon_par_rate(cs, 0.0, 10.0)
    rows = []
    for suffix, bump in MONEYNESS_BUMPS:
        label = f"Zero Coupon ATM{suffix} 10y" if suffix else "Zero Coupon ATM 10y"
        payer, receiver = _pay_receive_pair(
            lambda payer, b=bump, s=suffix: [
                zero_coupon_swap(
                    f"zc{s or '-atm'}-{'pay' if payer else 'rcv'}",
                    NOTIONAL,
                    atm_rate + b,
                    0.0,
                    10.0,
                    payer=payer,
                )
            ]
        )
        rows.append(ScenarioRow(label, payer, (payer, receiver)))
    return ScenarioDef("zero_coupon", "zero coupon swaps across strikes", cs, rows)


def scenario_forward_start(curves: CurveSet | None = None) -> ScenarioDef:
    cs = curves or market_curve_set()
    atm_rate = par_rate(vanilla_swap("probe", NOTIONAL, 0.0, 1.0, 10.0, payer=True), cs)
    rows = []
    for suffix, bump in MONEYNESS_BUMPS:
        label = f"Fwd Start ATM 1y-10y {suffix}".strip()
        payer, receiver = _pay_receive_pair(
            lambda payer, b=bump, s=suffix: [
                vanilla_swap(
                    f"fwd{s or '-atm'}-{'pay' if payer else 'rcv'}",
                    NOTIONAL,
                    atm_rate + b,
                    1.0,
                    10.0,
                    payer=payer,
                )
            ]
        )
        rows.append(ScenarioRow(label, payer, (payer, receiver)))
    return ScenarioDef("forward_start", "forward starting swaps across strikes", cs, rows)


def scenario_zero_addon(curves: CurveSet | None = None, horizon: float = 6.0) -> ScenarioDef:
    """The four-swap package whose trade-level add-ons cancel."""
    cs = curves or flat_zero_curve_set()
    rate = par_rate(
        vanilla_swap("probe", NOTIONAL, 0.0, 0.0, 2 * horizon, payer=True), cs
    )
    package = make_zero_addon_package(NOTIONAL, rate, horizon)
    residual = vanilla_swap("residual-receiver", NOTIONAL, rate, 0.0, horizon, payer=False)
    rows = [
        ScenarioRow(f"Zero add-on package T={horizon:g}", package),
        ScenarioRow("Residual receiver swap", [residual]),
    ]
    return ScenarioDef("zero_addon", "package with zero trade-level add-on", cs, rows)


BUILTIN_SCENARIOS = {
    "table2": scenario_table2,
    "table3": scenario_table3,
    "moneyness": scenario_moneyness,
    "replications": scenario_replications,
    "amortising": scenario_amortising,
    "zero_coupon": scenario_zero_coupon,
    "forward_start": scenario_forward_start,
    "zero_addon": scenario_zero_addon,
}


def builtin_scenarios() -> dict:
    """Name -> generator returning a ScenarioDef on its default curve."""
    return dict(BUILTIN_SCENARIOS)
