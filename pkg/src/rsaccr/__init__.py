"""Counterparty credit exposure engine.

Three routes to an interest-rate add-on:

- trade-level SA-CCR (supervisory durations, hedging sets, bucket
  correlations, PFE multiplier, EAD);
- RSA-CCR: the same aggregation fed by elementary-cashflow decomposition,
  which makes add-ons depend only on net cashflows;
- a Monte Carlo oracle (Hull-White one factor, or three correlated
  maturity-bucket factors) producing expected-positive-exposure profiles
  and their time-averaged add-on.
"""

from .curves import (
    BasisCurve,
    Curve,
    CurveError,
    CurveSet,
    InflationCurve,
    flat_curve,
    flat_zero_curve,
    flat_zero_curve_set,
    forward_rate,
    inflation_ratio,
    load_curve_set,
)
from .decomposition import (
    DecompositionSettings,
    ElementaryCashflow,
    decompose,
    portfolio_rsaccr_addon,
)
from .gmm import (
    ExposureProfile,
    GMM3FParams,
    HWParams,
    addon_from_profile,
    exposure_profile,
    identify_sigma_hw,
    oracle_addons,
    simulate_gmm3f,
    simulate_hw1f,
    swap_vol_decomposition,
    theoretical_addon,
    weekly_grid,
)
from .portfolio import InputError, load_portfolio, parse_portfolio, portfolio_to_json
from .saccr import (
    AddOnContribution,
    CollateralTerms,
    HedgingSet,
    SupervisoryConfig,
    aggregate_hedging_set,
    ead,
    maturity_bucket,
    maturity_factor,
    pfe_multiplier,
    portfolio_saccr_addon,
    supervisory_duration,
    trade_addon,
)
from .scenarios import builtin_scenarios, market_curve_set
from .trades import (
    ClassificationError,
    DatedCashflow,
    Direction,
    Leg,
    ScheduleError,
    Trade,
    generate_schedule,
    make_fra_strip,
    make_zero_addon_package,
    par_rate,
    split_swap,
    vanilla_swap,
    zero_coupon_swap,
)

__version__ = "0.1.0"
