"""Three-period paths of the credit economy and Monte Carlo runs over them.

One path: t=1 market clearing and allocation, t=2 sentiment shock, forced liquidation and
new investment, t=3 settlement. Each path owns its BankState and its random generator, so
paths can run in any order or in separate processes.
"""

import itertools
import logging
from collections.abc import Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np
import pandas as pd

from bank import (
    BankState,
    capital_ratio_cap,
    fire_sale_cascade,
    settle_period3,
)
from errors import ConfigValidationError, InsolventBankError, NegativePriceError
from instruments import expected_project_value
from market import MarketState, Regime, classify_regime, clear_market
from scenario_config import ScenarioConfig
from strategy import Action, choose_allocation, plan_period

logger = logging.getLogger(__name__)

__all__ = [
    "PathOutcome",
    "PathResult",
    "RunSummary",
    "ScenarioConfig",
    "compare_scenarios",
    "path_rng",
    "run_monte_carlo",
    "run_path",
    "sweep",
]

SUMMARY_METRICS = (
    "x",
    "cyclicity",
    "projects_1",
    "projects_2",
    "projects_financed",
    "output_proxy",
    "price_1",
    "price_2",
    "psi_2",
    "securities_sold",
    "securities_bought",
    "liquidation_S",
    "cds_sold",
    "cds_naked",
    "E_3",
    "dividends",
    "bonuses",
    "retained",
    "settlement_pnl",
)
COMPARE_METRICS = ("x", "cyclicity", "projects_financed", "output_proxy", "liquidation_S", "cds_naked", "E_3")
QUANTILES = {"q05": 0.05, "q50": 0.5, "q95": 0.95}


class PathOutcome(StrEnum):
    OK = "ok"
    NEGATIVE_PRICE = "negative-price"
    WIPEOUT = "wipeout"
    INSOLVENT = "insolvent"


@dataclass(frozen=True)
class PathResult:
    path_index: int
    x: float
    cyclicity: float
    projects_1: float
    projects_2: float
    output_proxy: float
    price_1: float
    price_2: float
    psi_1: float
    psi_2: float
    regime_1: str
    regime_2: str
    lending_capital_1: float
    lending_capital_2: float
    securities_sold: float
    securities_bought: float
    liquidation_S: float
    fire_sale_rounds: int
    cds_sold: float
    cds_hedged: float
    cds_naked: float
    E_3: float
    dividends: float
    bonuses: float
    retained: float
    settlement_pnl: float
    outcome: PathOutcome = PathOutcome.OK
    actions: tuple[str, ...] = ()

    @property
    def projects_financed(self) -> float:
        return self.projects_1 + self.projects_2

    @property
    def insolvent(self) -> bool:
        return self.outcome is PathOutcome.INSOLVENT

    def to_record(self) -> dict[str, Any]:
        """One flat CSV row."""
        record = asdict(self)
        record["projects_financed"] = self.projects_financed
        record["outcome"] = self.outcome.value
        record["actions"] = ";".join(self.actions)
        return record


@dataclass(frozen=True)
class RunSummary:
    n_paths: int
    seed: int
    stats: pd.DataFrame
    outcomes: dict[str, int]
    records: pd.DataFrame = field(repr=False)

    def metric(self, name: str, stat: str = "mean") -> float:
        return float(self.stats.at[name, stat])

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_paths": self.n_paths,
            "seed": self.seed,
            "outcomes": dict(self.outcomes),
            "metrics": {name: {k: float(v) for k, v in row.items()} for name, row in self.stats.iterrows()},
        }


def path_rng(seed: int, path_index: int) -> np.random.Generator:
    """Independent generator for one path; adding paths never changes earlier paths' draws."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(path_index,)))


class _PathSimulation:
    def __init__(self, config: ScenarioConfig, rng: np.random.Generator, path_index: int) -> None:
        self.config = config
        self.rng = rng
        self.path_index = path_index
        self.flags = config.flags
        self.P = config.fundamental
        self.f = config.fee
        self.d = config.d
        self.terms = config.terms
        self.h = config.regulatory.h
        self.haircut = self.h if self.flags.leverage else None
        self.state = BankState(cash=config.E0)
        self.outcome = PathOutcome.OK
        self.actions: list[str] = []
        self.projects = {1: 0.0, 2: 0.0}
        self.lending_capital = {1: 0.0, 2: 0.0}
        self.deployed_capital = {1: 0.0, 2: 0.0}
        # security units held by investors other than this bank
        self.market_float = 0.0
        self.securities_sold = 0.0
        self.securities_bought = 0.0
        self.liquidation_S = 0.0
        self.fire_sale_rounds = 0

    def flag(self, outcome: PathOutcome, detail: str) -> None:
        self.outcome = outcome
        logger.warning(f"path {self.path_index}: {outcome.value}, {detail}")

    def run(self) -> PathResult:
        sentiment_2 = self.config.sentiment.evolve(self.rng, self.config.sentiment_shift)
        psi_1, psi_2 = self.config.sentiment.psi, sentiment_2.psi

        market_1 = clear_market(self.P, psi_1, 0.0, 0.0)
        regime_1 = classify_regime(market_1.cleared_price, self.P, self.config.eps)
        foreseen = classify_regime(self.P - psi_2, self.P, self.config.eps) if self.flags.foresight else None
        plan = choose_allocation(
            regime_1,
            foreseen,
            self.f,
            self.flags.foresight,
            policy=self.flags.indifference_policy,
            securitization=self.flags.securitization,
        )
        logger.debug(f"path {self.path_index}: t=1 {regime_1.tag.value} at {market_1.cleared_price:.6g}, x={plan.x}")

        steps = plan.trade_plan.get(1) or self.plan(regime_1, market_1)
        self.execute(steps, 1, market_1, plan.x * self.config.E0)
        payout_1 = self.state.close_period(self.config.regulatory.g_1, self.config.regulatory.payout_split)

        budget_2 = min((1.0 - plan.x) * self.config.E0 + payout_1.retained, self.state.cash)
        market_2, regime_2 = self.period2(psi_2, market_1, max(budget_2, 0.0), plan.trade_plan.get(2))
        self.state.close_period(self.config.regulatory.g_2, self.config.regulatory.payout_split)
        self.state.sweep_cash()

        try:
            settled = settle_period3(self.state, self.config.project, self.terms, self.flags.settlement, self.rng)
        except InsolventBankError as e:
            settled = e.state
            self.flag(PathOutcome.INSOLVENT, f"final equity {e.equity:.6g}")

        return self.result(market_1, market_2, regime_1, regime_2, psi_1, psi_2, settled)

    def plan(self, regime: Regime, market: MarketState, has_float: bool = False) -> list[tuple[Action, float]]:
        return plan_period(
            regime,
            market,
            self.config.project,
            self.terms,
            self.f,
            self.d,
            self.flags,
            has_float=has_float,
            haircut=self.haircut,
        )

    def period2(
        self,
        psi_2: float,
        market_1: MarketState,
        budget: float,
        planned: tuple[tuple[Action, float], ...] | None,
    ) -> tuple[MarketState | None, Regime | None]:
        inventory = self.state.loans_held * (1.0 - self.d) if self.flags.securitization else 0.0
        try:
            market = clear_market(self.P, psi_2, 0.0, inventory)
        except NegativePriceError as e:
            self.flag(PathOutcome.NEGATIVE_PRICE, f"t=2 price {e.price:.6g} at psi={psi_2:.6g}, no t=2 trading")
            return None, None

        if market.units_traded > 0.0 and market.deployed_capital < 0.0:
            # held loans securitized into the rally
            loans = market.units_traded / (1.0 - self.d)
            self.securities_sold += self.state.securitize(loans, market.cleared_price, self.P, self.d)
            self.market_float += market.units_traded
            self.actions.append("t2:securitize-held")

        if self.state.borrowing > 0.0 and market.cleared_price < market_1.cleared_price:
            market = self.deleverage(market, market_1)
        else:
            regime = classify_regime(market.cleared_price, self.P, self.config.eps)
            steps = self.plan(regime, market, has_float=self.market_float > 0.0)
            if steps[0][0] is Action.BUY_SECURITIZED and budget > 0.0:
                market, spent = self.buy_distressed(psi_2, budget)
                budget -= spent

        regime = classify_regime(market.cleared_price, self.P, self.config.eps)
        if planned and not regime.underpriced:
            steps = list(planned)
        else:
            steps = self.plan(regime, market)
        self.execute(steps, 2, market, budget)
        return market, regime

    def deleverage(self, market: MarketState, market_1: MarketState) -> MarketState:
        """Sell retained securities until the haircut covenant holds at the t=2 price."""
        relative = market.cleared_price / market_1.cleared_price
        outcome = fire_sale_cascade(
            self.state.securities_held,
            self.h,
            relative,
            impact=self.config.fire_sale_impact,
            debt=self.state.borrowing,
        )
        if outcome.units_sold > 0.0:
            price = market_1.cleared_price * outcome.price_ratio
            average_price = market_1.cleared_price * outcome.proceeds / outcome.units_sold
            self.state.sell_securities(outcome.units_sold, average_price, self.P)
            self.state.repay(min(self.state.borrowing - outcome.debt_remaining, max(self.state.cash, 0.0)))
            self.market_float += outcome.units_sold
            self.liquidation_S = outcome.units_sold
            self.fire_sale_rounds = outcome.rounds
            self.actions.append("t2:fire-sale")
            market = MarketState(self.P, price, market.psi, market.deployed_capital, market.units_traded)
        if outcome.wipeout:
            self.flag(PathOutcome.WIPEOUT, f"collateral sold out at relative price {outcome.price_ratio:.6g}")
        return market

    def buy_distressed(self, psi_2: float, budget: float) -> tuple[MarketState, float]:
        """Lean against pessimism with up to budget, never buying more than the float."""
        capacity = budget
        if self.market_float < 1.0:
            # units bought A / (P - psi + A) stay within the float
            capacity = min(capacity, self.market_float * (self.P - psi_2) / (1.0 - self.market_float))
        market = clear_market(self.P, psi_2, capacity, 0.0)
        units = min(market.units_traded, self.market_float)
        self.state.buy_securities(units, market.cleared_price, self.P)
        self.market_float -= units
        self.securities_bought += units
        self.deployed_capital[2] += market.deployed_capital
        self.actions.append(f"t2:{Action.BUY_SECURITIZED.value}")
        return market, market.deployed_capital

    def execute(self, steps: Sequence[tuple[Action, float]], period: int, market: MarketState, budget: float) -> None:
        remaining = budget
        for action, share in steps:
            spent = self.deploy(action, remaining * share, period, market)
            remaining -= spent

    def deploy(self, action: Action, capital: float, period: int, market: MarketState) -> float:
        """Put capital into one action, respecting the capital-ratio cap. Returns capital used."""
        if capital <= 0.0 or action is Action.HOLD_CASH:
            return 0.0
        state = self.state
        room = max(capital_ratio_cap(state.equity, self.config.regulatory.e_req(period)) - state.on_book_exposure, 0.0)
        s = self.terms.market_spread

        match action:
            case Action.LEND_HOLD:
                loans = min(capital, room)
                state.originate(loans, self.f)
                used = loans
            case Action.LEND_SECURITIZE:
                per_loan = self.d * self.h if self.flags.leverage else self.d
                loans = min(capital / per_loan, room / self.d)
                state.originate(loans, self.f)
                sold = state.securitize(loans, market.cleared_price, self.P, self.d)
                self.market_float += sold
                self.securities_sold += sold
                if self.flags.leverage:
                    state.borrow((1.0 - self.h) * self.d * loans)
                used = loans * per_loan
            case Action.LEND_HEDGE:
                loans = min(capital / (1.0 + s), room)
                state.hedge(loans, self.f, s)
                used = loans * (1.0 + s)
            case Action.SELL_CDS:
                state.sell_protection(capital, s)
                used = capital
            case Action.BUY_NAKED_CDS:
                state.buy_naked_protection(capital, s)
                used = capital
            case _:
                msg = f"{action} is not deployed through a capital budget"
                raise ValueError(msg)

        if action.is_lending:
            self.projects[period] += loans
            self.lending_capital[period] += used
        self.deployed_capital[period] += used
        if used > 0.0:
            self.actions.append(f"t{period}:{action.value}")
        return used

    def lending_share(self) -> float:
        for totals in (self.lending_capital, self.deployed_capital):
            total = totals[1] + totals[2]
            if total > 0.0:
                return totals[1] / total
        return 0.5

    def result(
        self,
        market_1: MarketState,
        market_2: MarketState | None,
        regime_1: Regime,
        regime_2: Regime | None,
        psi_1: float,
        psi_2: float,
        settled: BankState,
    ) -> PathResult:
        x = self.lending_share()
        projects = self.projects[1] + self.projects[2]
        return PathResult(
            path_index=self.path_index,
            x=x,
            cyclicity=abs(2.0 * x - 1.0),
            projects_1=self.projects[1],
            projects_2=self.projects[2],
            output_proxy=expected_project_value(self.config.project) * projects,
            price_1=market_1.cleared_price,
            price_2=market_2.cleared_price if market_2 is not None else 0.0,
            psi_1=psi_1,
            psi_2=psi_2,
            regime_1=regime_1.tag.value,
            regime_2=regime_2.tag.value if regime_2 is not None else "unknown",
            lending_capital_1=self.lending_capital[1],
            lending_capital_2=self.lending_capital[2],
            securities_sold=self.securities_sold,
            securities_bought=self.securities_bought,
            liquidation_S=self.liquidation_S,
            fire_sale_rounds=self.fire_sale_rounds,
            cds_sold=self.state.cds_sold,
            cds_hedged=self.state.cds_hedge,
            cds_naked=self.state.cds_naked,
            E_3=settled.cash,
            dividends=settled.dividends,
            bonuses=settled.bonuses,
            retained=settled.retained,
            settlement_pnl=settled.settlement_pnl,
            outcome=self.outcome,
            actions=tuple(self.actions),
        )


def run_path(config: ScenarioConfig, rng: np.random.Generator, path_index: int = 0) -> PathResult:
    """Simulate one path. Deterministic given the config and the generator state."""
    return _PathSimulation(config, rng, path_index).run()


def _run_indexed(config: ScenarioConfig, seed: int, path_index: int) -> PathResult:
    return run_path(config, path_rng(seed, path_index), path_index)


def paths_frame(results: Sequence[PathResult]) -> pd.DataFrame:
    return pd.DataFrame.from_records([r.to_record() for r in results])


def summarize(results: Sequence[PathResult], seed: int) -> RunSummary:
    """Aggregate in path-index order so sums are reproducible bit for bit."""
    ordered = sorted(results, key=lambda r: r.path_index)
    records = paths_frame(ordered)
    rows = {}
    for name in SUMMARY_METRICS:
        values = records[name].to_numpy(dtype=float)
        rows[name] = {
            "mean": float(np.mean(values)),
            "std": float(np.std(values)),
            **{label: float(np.quantile(values, q)) for label, q in QUANTILES.items()},
        }
    stats = pd.DataFrame.from_dict(rows, orient="index")
    outcomes = {o.value: int((records["outcome"] == o.value).sum()) for o in PathOutcome}
    return RunSummary(len(ordered), seed, stats, outcomes, records)


def run_monte_carlo(config: ScenarioConfig, n_paths: int, seed: int, workers: int = 1) -> RunSummary:
    """Run n_paths independent paths; the summary is identical for any worker count."""
    if n_paths < 1:
        raise ConfigValidationError(f"n_paths must be at least 1, got {n_paths}", field="paths")
    if workers < 1:
        raise ConfigValidationError(f"workers must be at least 1, got {workers}", field="workers")

    logger.info(f"Running {n_paths} paths with seed {seed} on {workers} worker(s)")
    indices = range(n_paths)
    if workers == 1 or n_paths == 1:
        results = [_run_indexed(config, seed, i) for i in indices]
    else:
        chunksize = max(1, n_paths // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(
                executor.map(
                    _run_indexed, itertools.repeat(config), itertools.repeat(seed), indices, chunksize=chunksize
                )
            )

    summary = summarize(results, seed)
    flagged = n_paths - summary.outcomes[PathOutcome.OK.value]
    if flagged:
        logger.info(f"{flagged} of {n_paths} paths ended with a flagged outcome: {summary.outcomes}")
    return summary


def _metric_columns(metrics: Sequence[str]) -> list[str]:
    columns = [m for m in metrics if m]
    unknown = [m for m in columns if m not in SUMMARY_METRICS]
    if unknown:
        msg = f"Unknown metric(s): {', '.join(unknown)}. Known: {', '.join(SUMMARY_METRICS)}"
        raise ValueError(msg)
    return columns


def compare_scenarios(
    configs: Mapping[str, ScenarioConfig] | Sequence[tuple[str, ScenarioConfig]],
    n_paths: int = 1,
    seed: int = 0,
    metrics: Sequence[str] = COMPARE_METRICS,
    workers: int = 1,
) -> pd.DataFrame:
    """One row of metric means per scenario, every scenario run on the same seeds."""
    items = list(configs.items()) if isinstance(configs, Mapping) else list(configs)
    if not items:
        msg = "compare_scenarios needs at least one scenario"
        raise ValueError(msg)
    columns = _metric_columns(metrics)

    rows = []
    for scenario_id, config in items:
        summary = run_monte_carlo(config, n_paths, seed, workers)
        rows.append({"scenario": scenario_id, **{m: summary.metric(m) for m in columns}})
    return pd.DataFrame(rows, columns=["scenario", *columns]).set_index("scenario")


def sweep(
    config: ScenarioConfig,
    grid: Mapping[str, Sequence[float]],
    n_paths: int = 1,
    seed: int = 0,
    metrics: Sequence[str] = COMPARE_METRICS,
    workers: int = 1,
) -> pd.DataFrame:
    """Comparative statics over one or two config keys, one row per grid point.

    Grid points the config rejects are kept as rows with ``valid`` False and empty metrics.
    """
    if not 1 <= len(grid) <= 2:
        msg = f"sweep takes one or two grid keys, got {len(grid)}"
        raise ValueError(msg)
    keys = list(grid)
    columns = _metric_columns(metrics)

    rows = []
    for point in itertools.product(*(grid[k] for k in keys)):
        updates = dict(zip(keys, (float(v) for v in point), strict=True))
        row: dict[str, Any] = dict(updates)
        try:
            summary = run_monte_carlo(config.replace_keys(updates), n_paths, seed, workers)
        except ConfigValidationError as e:
            logger.warning(f"sweep point {updates} skipped: {e}")
            row.update({"valid": False, **dict.fromkeys(columns, float("nan"))})
        else:
            row.update({"valid": True, **{m: summary.metric(m) for m in columns}})
        rows.append(row)
    return pd.DataFrame(rows, columns=[*keys, "valid", *columns])
