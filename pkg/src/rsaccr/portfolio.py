"""Portfolio JSON schema (``"schema": "rsaccr-1"``): parsing and writing.

A portfolio file is an object with a ``schema`` tag and a ``trades`` array.
Each trade carries ``id``, ``currency``, optional ``margined``/``mpor`` and
a ``legs`` array.  Every leg has ``direction`` (pay|receive), ``kind``,
``start``, ``end``, ``frequency`` and either a scalar ``notional`` or a
``notional_schedule`` of ``[segment_end, amount]`` steps.  Kind-specific
fields:

    fixed               rate
    floating            tenor
    zero_coupon_fixed   rate
    compound            tenor, next_reset (optional)
    cms                 swap_tenor, index_tenor
    inflation_floating  next_observation (optional)
    inflation_compound  next_observation (optional)
"""

from __future__ import annotations

import json
from pathlib import Path

from .trades import (
    CMS,
    Compound,
    Direction,
    Fixed,
    Floating,
    InflationCompound,
    InflationFloating,
    Leg,
    LegKind,
    ScheduleError,
    Trade,
    ZeroCouponFixed,
)

SCHEMA = "rsaccr-1"


class InputError(ValueError):
    """Malformed portfolio file or record."""


def _require(record: dict, field: str, context: str):
    try:
        return record[field]
    except KeyError:
        raise InputError(f"{context}: missing field '{field}'") from None


def _parse_kind(record: dict, context: str) -> LegKind:
    kind = _require(record, "kind", context)
    if kind == "fixed":
        return Fixed(rate=float(_require(record, "rate", context)))
    if kind == "floating":
        return Floating(tenor=float(_require(record, "tenor", context)))
    if kind == "zero_coupon_fixed":
        return ZeroCouponFixed(rate=float(_require(record, "rate", context)))
    if kind == "compound":
        next_reset = record.get("next_reset")
        return Compound(
            tenor=float(_require(record, "tenor", context)),
            next_reset=None if next_reset is None else float(next_reset),
        )
    if kind == "cms":
        return CMS(
            swap_tenor=float(_require(record, "swap_tenor", context)),
            index_tenor=float(_require(record, "index_tenor", context)),
        )
    if kind == "inflation_floating":
        obs = record.get("next_observation")
        return InflationFloating(next_observation=None if obs is None else float(obs))
    if kind == "inflation_compound":
        obs = record.get("next_observation")
        return InflationCompound(next_observation=None if obs is None else float(obs))
    raise InputError(f"{context}: unknown leg kind '{kind}'")


def _kind_to_json(kind: LegKind) -> dict:
    if isinstance(kind, Fixed):
        return {"kind": "fixed", "rate": kind.rate}
    if isinstance(kind, Floating):
        return {"kind": "floating", "tenor": kind.tenor}
    if isinstance(kind, ZeroCouponFixed):
        return {"kind": "zero_coupon_fixed", "rate": kind.rate}
    if isinstance(kind, Compound):
        out = {"kind": "compound", "tenor": kind.tenor}
        if kind.next_reset is not None:
            out["next_reset"] = kind.next_reset
        return out
    if isinstance(kind, CMS):
        return {"kind": "cms", "swap_tenor": kind.swap_tenor, "index_tenor": kind.index_tenor}
    if isinstance(kind, InflationFloating):
        out = {"kind": "inflation_floating"}
        if kind.next_observation is not None:
            out["next_observation"] = kind.next_observation
        return out
    if isinstance(kind, InflationCompound):
        out = {"kind": "inflation_compound"}
        if kind.next_observation is not None:
            out["next_observation"] = kind.next_observation
        return out
    raise InputError(f"cannot serialize leg kind {type(kind).__name__}")


def _parse_leg(record: dict, context: str) -> Leg:
    direction = _require(record, "direction", context)
    try:
        d = Direction(direction)
    except ValueError:
        raise InputError(f"{context}: direction must be 'pay' or 'receive'") from None
    if "notional_schedule" in record:
        steps = tuple((float(e), float(n)) for e, n in record["notional_schedule"])
    elif "notional" in record:
        steps = ((float(_require(record, "end", context)), float(record["notional"])),)
    else:
        raise InputError(f"{context}: needs 'notional' or 'notional_schedule'")
    try:
        return Leg(
            direction=d,
            kind=_parse_kind(record, context),
            start=float(_require(record, "start", context)),
            end=float(_require(record, "end", context)),
            frequency=float(_require(record, "frequency", context)),
            notional_steps=steps,
        )
    except ScheduleError as exc:
        raise InputError(f"{context}: {exc}") from None


def parse_portfolio(data: dict) -> list[Trade]:
    if not isinstance(data, dict):
        raise InputError("portfolio must be a JSON object")
    schema = data.get("schema")
    if schema != SCHEMA:
        raise InputError(f"unsupported portfolio schema {schema!r}; expected '{SCHEMA}'")
    records = data.get("trades")
    if not isinstance(records, list):
        raise InputError("portfolio needs a 'trades' array")
    trades = []
    for i, record in enumerate(records):
        context = f"trade[{i}]"
        trade_id = str(_require(record, "id", context))
        legs = tuple(
            _parse_leg(leg, f"{context}.legs[{j}]")
            for j, leg in enumerate(_require(record, "legs", context))
        )
        mpor = record.get("mpor")
        try:
            trades.append(
                Trade(
                    id=trade_id,
                    legs=legs,
                    currency=str(record.get("currency", "USD")),
                    margined=bool(record.get("margined", False)),
                    mpor=None if mpor is None else float(mpor),
                )
            )
        except ScheduleError as exc:
            raise InputError(f"{context}: {exc}") from None
    return trades


def load_portfolio(path: str | Path) -> list[Trade]:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"no such portfolio file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    return parse_portfolio(data)


def portfolio_to_json(trades: list[Trade]) -> dict:
    records = []
    for trade in trades:
        legs = []
        for leg in trade.legs:
            rec = {
                "direction": leg.direction.value,
                **_kind_to_json(leg.kind),
                "start": leg.start,
                "end": leg.end,
                "frequency": leg.frequency,
            }
            if len(leg.notional_steps) == 1:
                rec["notional"] = leg.notional_steps[0][1]
            else:
                rec["notional_schedule"] = [[e, n] for e, n in leg.notional_steps]
            legs.append(rec)
        record = {"id": trade.id, "currency": trade.currency, "legs": legs}
        if trade.margined:
            record["margined"] = True
            record["mpor"] = trade.mpor
        records.append(record)
    return {"schema": SCHEMA, "trades": records}


def save_portfolio(trades: list[Trade], path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(portfolio_to_json(trades), fh, indent=2)
        fh.write("\n")
