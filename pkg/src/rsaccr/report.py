"""Comparison reports: run selected methods over a scenario and render rows.

Percentage differences are ``method / oracle - 1`` where the oracle is the
simulated add-on (average of the pay and receive portfolio exposures); a
positive method value against a zero oracle renders as ``inf%``.  Pretty
output rounds to whole currency units and whole percents; CSV and JSON keep
full precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .decomposition import DecompositionSettings, portfolio_rsaccr_addon
from .gmm import GMM3FParams, HWParams, identify_sigma_hw, oracle_addons, weekly_grid
from .saccr import SupervisoryConfig, portfolio_saccr_addon
from .scenarios import ScenarioDef

METHOD_NAMES = ("saccr", "rsaccr", "mc")


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    saccr: float | None = None
    rsaccr_nodisc: float | None = None
    rsaccr_market: float | None = None
    oracle: float | None = None
    oracle_stderr: float | None = None

    def pct_diff(self, value: float | None) -> float | None:
        """method/oracle - 1; inf when the oracle is zero but the method is
        not; None when either side was not computed."""
        if value is None or self.oracle is None:
            return None
        if self.oracle == 0.0:
            return 0.0 if value == 0.0 else math.inf
        return value / self.oracle - 1.0

    @property
    def pct_diffs(self) -> dict[str, float | None]:
        return {
            "saccr": self.pct_diff(self.saccr),
            "rsaccr_nodisc": self.pct_diff(self.rsaccr_nodisc),
            "rsaccr_market": self.pct_diff(self.rsaccr_market),
        }


@dataclass(frozen=True)
class McOptions:
    model: str = "gmm3f"
    paths: int = 50_000
    seed: int = 42
    grid: str = "weekly"
    sigma: float | None = None  # defaults to the supervisory identification
    mean_reversion: float = 0.05

    def exposure_times(self) -> tuple[float, ...]:
        return weekly_grid(points=250 if self.grid == "daily" else 52)


def build_comparison(
    scenario: ScenarioDef,
    methods: tuple[str, ...] = METHOD_NAMES,
    cfg: SupervisoryConfig | None = None,
    mc: McOptions | None = None,
    stochastic_basis: bool = False,
    include_fx: bool = False,
) -> list[ComparisonRow]:
    cfg = cfg or SupervisoryConfig()
    mc = mc or McOptions()
    unknown = [m for m in methods if m not in METHOD_NAMES]
    if unknown:
        raise ValueError(f"unknown methods: {unknown}")
    curves = scenario.curves

    oracle_values: list[tuple[float, float]] | None = None
    if "mc" in methods:
        sigma = mc.sigma if mc.sigma is not None else identify_sigma_hw(cfg.sf_ir)
        portfolios = []
        for row in scenario.rows:
            pay, receive = row.oracle_pair()
            portfolios.extend((pay, receive))
        if mc.model == "hw1f":
            params = dict(hw_params=HWParams(a=mc.mean_reversion, sigma=sigma))
        else:
            params = dict(gmm_params=GMM3FParams(a=mc.mean_reversion, sigma=sigma))
        results = oracle_addons(
            portfolios,
            curves,
            model=mc.model,
            paths=mc.paths,
            seed=mc.seed,
            exposure_times=mc.exposure_times(),
            **params,
        )
        oracle_values = []
        for i in range(0, len(results), 2):
            (a_pay, se_pay), (a_rcv, se_rcv) = results[i], results[i + 1]
            oracle_values.append(
                (0.5 * (a_pay + a_rcv), 0.5 * math.hypot(se_pay, se_rcv))
            )

    rows = []
    for i, row in enumerate(scenario.rows):
        saccr_value = rsa_nodisc = rsa_market = oracle = oracle_se = None
        if "saccr" in methods:
            saccr_value, _ = portfolio_saccr_addon(row.portfolio, cfg)
        if "rsaccr" in methods:
            common = dict(stochastic_basis=stochastic_basis, include_fx=include_fx)
            rsa_nodisc, _ = portfolio_rsaccr_addon(
                row.portfolio, curves, DecompositionSettings("none", **common), cfg
            )
            rsa_market, _ = portfolio_rsaccr_addon(
                row.portfolio, curves, DecompositionSettings("market", **common), cfg
            )
        if oracle_values is not None:
            oracle, oracle_se = oracle_values[i]
        rows.append(
            ComparisonRow(
                label=row.label,
                saccr=saccr_value,
                rsaccr_nodisc=rsa_nodisc,
                rsaccr_market=rsa_market,
                oracle=oracle,
                oracle_stderr=oracle_se,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_COLUMNS = (
    ("saccr", "SA-CCR"),
    ("rsaccr_nodisc", "RSA-CCR nodisc"),
    ("rsaccr_market", "RSA-CCR market"),
    ("oracle", "MC oracle"),
)


def _fmt_pct(x: float | None) -> str:
    if x is None:
        return ""
    if math.isinf(x):
        return "inf%"
    return f"{round(100 * x):d}%"


def render_pretty(rows: list[ComparisonRow], title: str = "") -> str:
    headers = ["Instrument"] + [h for _, h in _COLUMNS] + [
        "SA-CCR %",
        "RSA nodisc %",
        "RSA market %",
    ]
    table = []
    for row in rows:
        cells = [row.label]
        for attr, _ in _COLUMNS:
            value = getattr(row, attr)
            cells.append("" if value is None else f"{value:,.0f}")
        pct = row.pct_diffs
        cells += [_fmt_pct(pct["saccr"]), _fmt_pct(pct["rsaccr_nodisc"]), _fmt_pct(pct["rsaccr_market"])]
        table.append(cells)
    widths = [max(len(r[i]) for r in [headers] + table) for i in range(len(headers))]
    lines = []
    if title:
        lines.append(title)
    lines.append("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    lines.append("  ".join("-" * w for w in widths))
    for cells in table:
        lines.append(
            "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(cells, widths)))
        )
    return "\n".join(lines) + "\n"


def render_csv(rows: list[ComparisonRow]) -> str:
    header = (
        "instrument,saccr,rsaccr_nodisc,rsaccr_market,oracle,oracle_stderr,"
        "pct_saccr,pct_rsaccr_nodisc,pct_rsaccr_market"
    )
    out = [header]
    for row in rows:
        pct = row.pct_diffs

        def cell(x: float | None) -> str:
            if x is None:
                return ""
            return repr(x) if not math.isinf(x) else "inf"

        out.append(
            ",".join(
                [
                    f'"{row.label}"',
                    cell(row.saccr),
                    cell(row.rsaccr_nodisc),
                    cell(row.rsaccr_market),
                    cell(row.oracle),
                    cell(row.oracle_stderr),
                    cell(pct["saccr"]),
                    cell(pct["rsaccr_nodisc"]),
                    cell(pct["rsaccr_market"]),
                ]
            )
        )
    return "\n".join(out) + "\n"


def render_json(rows: list[ComparisonRow]) -> str:
    def jsonable(x):
        if x is None:
            return None
        if isinstance(x, float) and math.isinf(x):
            return "inf"
        return x

    payload = [
        {
            "instrument": row.label,
            "saccr": jsonable(row.saccr),
            "rsaccr_nodisc": jsonable(row.rsaccr_nodisc),
            "rsaccr_market": jsonable(row.rsaccr_market),
            "oracle": jsonable(row.oracle),
            "oracle_stderr": jsonable(row.oracle_stderr),
            "pct_diffs": {k: jsonable(v) for k, v in row.pct_diffs.items()},
        }
        for row in rows
    ]
    return json.dumps(payload, indent=2) + "\n"


RENDERERS = {"pretty": render_pretty, "csv": lambda rows: render_csv(rows), "json": lambda rows: render_json(rows)}


def render(rows: list[ComparisonRow], fmt: str, title: str = "") -> str:
    if fmt == "pretty":
        return render_pretty(rows, title)
    if fmt == "csv":
        return render_csv(rows)
    if fmt == "json":
        return render_json(rows)
    raise ValueError(f"unknown output format: {fmt}")
