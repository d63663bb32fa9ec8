"""Command-line entry point.

Two subcommands:

``rsaccr run``       price a portfolio file against curves with any of the
                     methods saccr, rsaccr, mc and report add-ons (and EAD
                     for the trade-level route).
``rsaccr scenario``  run a named builtin scenario and emit the comparison
                     table.

Exit codes: 0 success, 2 input/validation error, 3 unsupported product.
"""

from __future__ import annotations

import argparse
import json
import sys

from .curves import CurveError, load_curve_set
from .decomposition import (
    DecompositionSettings,
    contributions_csv_rows,
    portfolio_rsaccr_addon,
    trade_contributions,
)
from .gmm import oracle_addons
from .portfolio import InputError, load_portfolio
from .report import McOptions, build_comparison, render
from .saccr import CollateralTerms, SupervisoryConfig, ead, portfolio_saccr_addon
from .scenarios import BUILTIN_SCENARIOS
from .trades import ClassificationError, ScheduleError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNSUPPORTED = 3


def _add_supervisory_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=1.4, help="regulatory multiplier")
    parser.add_argument("--sf-ir", type=float, default=0.005, help="interest-rate supervisory factor")
    parser.add_argument("--mf-floor-days", type=int, default=10, choices=(10, 20),
                        help="maturity-factor floor in business days")
    parser.add_argument("--multiplier-floor", type=float, default=0.05, help="PFE multiplier floor")
    parser.add_argument("--sf-basis", type=float, default=0.0025,
                        help="basis hedging-set factor (assumption; no published value)")
    parser.add_argument("--sf-fx", type=float, default=0.04, help="FX hedging-set factor")


def _add_mc_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mc-paths", type=int, default=50_000, help="Monte Carlo paths")
    parser.add_argument("--seed", type=int, default=42, help="Monte Carlo seed")
    parser.add_argument("--model", choices=("hw1f", "gmm3f"), default="gmm3f")
    parser.add_argument("--grid", choices=("weekly", "daily"), default="weekly")


def _add_method_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--method", default="saccr,rsaccr",
                        help="comma-separated subset of saccr,rsaccr,mc")
    parser.add_argument("--discounting", choices=("none", "market"), default="market")
    parser.add_argument("--stochastic-basis", action="store_true")
    parser.add_argument("--include-fx", action="store_true")
    parser.add_argument("--domestic-ccy", default="USD")


def _supervisory_config(args) -> SupervisoryConfig:
    return SupervisoryConfig(
        alpha=args.alpha,
        sf_ir=args.sf_ir,
        mf_floor_business_days=args.mf_floor_days,
        multiplier_floor=args.multiplier_floor,
        sf_basis=args.sf_basis,
        sf_fx=args.sf_fx,
    )


def _parse_methods(spec: str) -> tuple[str, ...]:
    methods = tuple(m.strip() for m in spec.split(",") if m.strip())
    bad = [m for m in methods if m not in ("saccr", "rsaccr", "mc")]
    if bad:
        raise InputError(f"unknown method(s): {', '.join(bad)}")
    if not methods:
        raise InputError("at least one method must be selected")
    return methods


def _write_out(text: str, out: str) -> None:
    if out == "-" or not out:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _cmd_run(args) -> int:
    methods = _parse_methods(args.method)
    cfg = _supervisory_config(args)
    trades = load_portfolio(args.portfolio)
    curves = load_curve_set(args.curves)
    settings = DecompositionSettings(
        discounting=args.discounting,
        stochastic_basis=args.stochastic_basis,
        include_fx=args.include_fx,
        domestic_currency=args.domestic_ccy,
    )
    result: dict = {"portfolio": args.portfolio, "trades": len(trades)}
    if "saccr" in methods:
        total, breakdown = portfolio_saccr_addon(trades, cfg)
        collateral = CollateralTerms(
            value=args.value, collateral=args.collateral_held,
            threshold=args.threshold, mta=args.mta, nica=args.nica,
        )
        ead_result = ead(trades, collateral, cfg)
        result["saccr"] = {
            "addon": total,
            "by_hedging_set": {hs.label(): v for hs, v in breakdown.items()},
            "replacement_cost": ead_result.replacement_cost,
            "pfe_multiplier": ead_result.multiplier,
            "pfe": ead_result.pfe,
            "ead": ead_result.ead,
        }
    if "rsaccr" in methods:
        total, breakdown = portfolio_rsaccr_addon(trades, curves, settings, cfg)
        result["rsaccr"] = {
            "addon": total,
            "discounting": settings.discounting,
            "by_hedging_set": {hs.label(): v for hs, v in breakdown.items()},
        }
        if args.dump_contributions:
            contribs = []
            for trade in trades:
                contribs.extend(trade_contributions(trade, curves, settings, cfg))
            _write_out("\n".join(contributions_csv_rows(contribs)) + "\n", args.dump_contributions)
    if "mc" in methods:
        mc = McOptions(model=args.model, paths=args.mc_paths, seed=args.seed, grid=args.grid)
        (addon, stderr) = oracle_addons(
            [trades], curves, model=mc.model, paths=mc.paths, seed=mc.seed,
            exposure_times=mc.exposure_times(),
        )[0]
        result["mc"] = {
            "addon": addon,
            "stderr": stderr,
            "model": mc.model,
            "paths": mc.paths,
            "seed": mc.seed,
        }

    if args.format == "json":
        _write_out(json.dumps(result, indent=2) + "\n", args.out)
    elif args.format == "csv":
        lines = ["metric,value"]
        for method, payload in result.items():
            if isinstance(payload, dict):
                for key, value in payload.items():
                    if isinstance(value, dict):
                        for sub, v in value.items():
                            lines.append(f"{method}.{key}.{sub},{v!r}")
                    else:
                        lines.append(f"{method}.{key},{value!r}")
        _write_out("\n".join(lines) + "\n", args.out)
    else:
        lines = []
        for method in ("saccr", "rsaccr", "mc"):
            if method in result:
                payload = result[method]
                lines.append(f"{method}:")
                for key, value in payload.items():
                    if isinstance(value, dict):
                        for sub, v in value.items():
                            lines.append(f"  {key}.{sub}: {v:,.2f}" if isinstance(v, float) else f"  {key}.{sub}: {v}")
                    elif isinstance(value, float):
                        lines.append(f"  {key}: {value:,.2f}")
                    else:
                        lines.append(f"  {key}: {value}")
        _write_out("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_scenario(args) -> int:
    try:
        generator = BUILTIN_SCENARIOS[args.name]
    except KeyError:
        raise InputError(
            f"unknown scenario '{args.name}'; available: {', '.join(sorted(BUILTIN_SCENARIOS))}"
        ) from None
    curves = load_curve_set(args.curves) if args.curves else None
    if args.name == "zero_addon":
        scenario = generator(curves, horizon=args.horizon)
    else:
        scenario = generator(curves)
    methods = _parse_methods(args.method)
    mc = McOptions(model=args.model, paths=args.mc_paths, seed=args.seed, grid=args.grid)
    rows = build_comparison(
        scenario,
        methods=methods,
        cfg=_supervisory_config(args),
        mc=mc,
        stochastic_basis=args.stochastic_basis,
        include_fx=args.include_fx,
    )
    _write_out(render(rows, args.format, title=f"scenario {scenario.name}: {scenario.description}"), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rsaccr",
        description="Counterparty exposure add-ons: trade-level SA-CCR, cashflow-decomposition RSA-CCR, Monte Carlo oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="price a portfolio file")
    run.add_argument("--portfolio", required=True, help="portfolio JSON (schema rsaccr-1)")
    run.add_argument("--curves", required=True, help="curve CSV file, directory, or FLAT0")
    _add_method_args(run)
    _add_supervisory_args(run)
    _add_mc_args(run)
    run.add_argument("--value", type=float, default=0.0, help="portfolio value V")
    run.add_argument("--collateral-held", type=float, default=0.0, help="haircut collateral C")
    run.add_argument("--threshold", type=float, default=0.0)
    run.add_argument("--mta", type=float, default=0.0)
    run.add_argument("--nica", type=float, default=0.0)
    run.add_argument("--dump-contributions", default="", help="write cashflow contribution CSV here")
    run.add_argument("--format", choices=("pretty", "csv", "json"), default="pretty")
    run.add_argument("--out", default="-", help="output path or - for stdout")
    run.set_defaults(func=_cmd_run)

    scen = sub.add_parser("scenario", help="run a builtin comparison scenario")
    scen.add_argument("name", help=f"one of: {', '.join(sorted(BUILTIN_SCENARIOS))}")
    scen.add_argument("--curves", default="", help="override the scenario's default curves")
    scen.add_argument("--horizon", type=float, default=6.0, help="zero_addon package horizon")
    _add_method_args(scen)
    _add_supervisory_args(scen)
    _add_mc_args(scen)
    scen.add_argument("--format", choices=("pretty", "csv", "json"), default="pretty")
    scen.add_argument("--out", default="-", help="output path or - for stdout")
    scen.set_defaults(func=_cmd_scenario)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ClassificationError as exc:
        print(f"unsupported product: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (InputError, CurveError, ScheduleError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
