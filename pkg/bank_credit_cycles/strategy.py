"""The bank's decision rules: what to do with each euro of capital and when to deploy it."""

from dataclasses import dataclass, field
from enum import StrEnum

from bank import SettlementMode
from errors import ConfigValidationError, ZeroSpreadError
from instruments import CdsTerms, Project
from market import MarketState, Regime

TIE_TOLERANCE = 1e-12


class Action(StrEnum):
    LEND_HOLD = "lend-hold"
    LEND_SECURITIZE = "lend-securitize"
    LEND_HEDGE = "lend-hedge"
    SELL_CDS = "sell-cds"
    BUY_NAKED_CDS = "buy-naked-cds"
    BUY_SECURITIZED = "buy-securitized"
    HOLD_CASH = "hold-cash"

    @property
    def is_lending(self) -> bool:
        return self in LENDING_ACTIONS


LENDING_ACTIONS = frozenset({Action.LEND_HOLD, Action.LEND_SECURITIZE, Action.LEND_HEDGE})

# Equal quotes resolve to real lending first, cash last.
TIE_PRIORITY = (
    Action.LEND_HOLD,
    Action.LEND_SECURITIZE,
    Action.LEND_HEDGE,
    Action.SELL_CDS,
    Action.BUY_SECURITIZED,
    Action.BUY_NAKED_CDS,
    Action.HOLD_CASH,
)


class IndifferencePolicy(StrEnum):
    EVEN_SPLIT = "even-split"
    FRONT_LOAD = "front-load"
    BACK_LOAD = "back-load"

    @property
    def share(self) -> float:
        return {"even-split": 0.5, "front-load": 1.0, "back-load": 0.0}[self.value]


@dataclass(frozen=True)
class ModeFlags:
    leverage: bool = False
    securitization: bool = False
    cds: bool = False
    naked_cds: bool = False
    foresight: bool = False
    settlement: SettlementMode = SettlementMode.EXPECTATION
    indifference_policy: IndifferencePolicy = IndifferencePolicy.EVEN_SPLIT

    def __post_init__(self) -> None:
        if self.leverage and not self.securitization:
            raise ConfigValidationError(
                "leverage borrows against retained securities and requires securitization = true", field="leverage"
            )
        if self.naked_cds and not self.cds:
            raise ConfigValidationError("naked_cds requires cds = true", field="naked_cds")


@dataclass(frozen=True)
class StrategyQuote:
    action: Action
    expected_profit: float
    capital_required: float
    notes: str = ""

    def __post_init__(self) -> None:
        if self.action is not Action.HOLD_CASH and self.capital_required <= 0.0:
            msg = f"{self.action} must consume positive capital, got {self.capital_required}"
            raise ValueError(msg)


@dataclass(frozen=True)
class AllocationPlan:
    x: float
    foresight: bool = False
    # period -> ((action, share of the remaining budget), ...); empty means decide at the period
    trade_plan: dict[int, tuple[tuple[Action, float], ...]] = field(default_factory=dict)
    reason: str = ""

    def __post_init__(self) -> None:
        if not 0.0 <= self.x <= 1.0:
            msg = f"x must be in [0,1], got {self.x}"
            raise ValueError(msg)


def securitization_profitable(P_t: float, P: float, f: float) -> bool:
    """Selling at P_t beats the origination cost net of the fee."""
    return (P_t - P) > (1.0 - f)


def quote_actions(
    market: MarketState,
    p: Project,
    terms: CdsTerms,
    f: float,
    d: float,
    *,
    include_naked: bool = False,
    haircut: float | None = None,
) -> list[StrategyQuote]:
    """Expected profit of every action available at the cleared market price.

    Raises:
        ZeroSpreadError: if naked protection is requested at a zero spread.
    """
    s = terms.market_spread
    w = terms.lgd
    P, P_t = market.fundamental, market.cleared_price
    retained_capital = d if haircut is None else d * haircut

    quotes = [
        StrategyQuote(Action.LEND_HOLD, f - p.theta * w, 1.0, "fee less expected loss"),
        StrategyQuote(
            Action.LEND_SECURITIZE,
            f - 1.0 + P_t * (1.0 - d) + (1.0 - p.theta) * d,
            retained_capital,
            "fee plus sale proceeds plus retained payoff less cost",
        ),
        StrategyQuote(Action.LEND_HEDGE, f - s, 1.0 + s, "fee less protection premium, the hedged loan repays 1"),
        StrategyQuote(Action.SELL_CDS, s - p.theta * w, 1.0, "premium less expected payout, fully collateralized"),
        StrategyQuote(Action.BUY_SECURITIZED, P - P_t, max(P_t, TIE_TOLERANCE), "fundamental less price paid"),
    ]
    if include_naked:
        if s <= 0.0:
            raise ZeroSpreadError("naked CDS quote needs a positive spread")
        quotes.append(
            StrategyQuote(Action.BUY_NAKED_CDS, (p.theta * w - s) / s, 1.0, "expected payout per premium, 1/s contracts")
        )
    quotes.append(StrategyQuote(Action.HOLD_CASH, 0.0, 0.0, "idle"))
    return quotes


def rank_quotes(quotes: list[StrategyQuote]) -> StrategyQuote:
    if not quotes:
        msg = "no quotes to rank"
        raise ValueError(msg)
    best = max(q.expected_profit for q in quotes)
    tied = [q for q in quotes if best - q.expected_profit <= TIE_TOLERANCE]
    return min(tied, key=lambda q: TIE_PRIORITY.index(q.action))


def hedge_or_securitize(P_2: float, P: float, d: float, s: float, lgd: float = 1.0) -> Action:
    """Keep and hedge the loan unless the securitization gain beats the hedged payoff.

    The sale gain (P_2 - P)(1 - d) is compared with 1 - s / lgd, i.e. 1 - theta at a fair spread.
    """
    if (P_2 - P) * (1.0 - d) <= 1.0 - s / lgd:
        return Action.LEND_HEDGE
    return Action.LEND_SECURITIZE


def choose_allocation(
    regime_t1: Regime,
    expected_regime_t2: Regime | None,
    f: float,
    foresight: bool,
    *,
    policy: IndifferencePolicy = IndifferencePolicy.EVEN_SPLIT,
    securitization: bool = True,
) -> AllocationPlan:
    """Decide the share x of funds deployed at t=1.

    A period whose overpricing makes originate-and-distribute profitable takes all capital.
    The t=2 regime only counts with foresight. Otherwise the indifference policy decides.
    """
    gap_t1 = regime_t1.magnitude if securitization and regime_t1.overpriced and regime_t1.magnitude > 1.0 - f else None
    gap_t2 = None
    if foresight and securitization and expected_regime_t2 is not None and expected_regime_t2.overpriced:
        if expected_regime_t2.magnitude > 1.0 - f:
            gap_t2 = expected_regime_t2.magnitude

    distribute = ((Action.LEND_SECURITIZE, 1.0),)
    if gap_t1 is not None and (gap_t2 is None or gap_t1 >= gap_t2):
        return AllocationPlan(1.0, foresight, {1: distribute}, "overpricing at t=1 pays for origination")
    if gap_t2 is not None:
        return AllocationPlan(0.0, foresight, {2: distribute}, "foreseen overpricing at t=2 pays for origination")
    return AllocationPlan(policy.share, foresight, {}, f"indifferent, {policy.value}")


def lending_action(regime: Regime, market: MarketState, terms: CdsTerms, d: float, flags: ModeFlags) -> Action:
    """How the bank lends this period: never sells into underpricing, hedges an overpriced loan unless selling it gains more."""
    if flags.securitization and not regime.underpriced:
        if flags.cds and regime.overpriced:
            return hedge_or_securitize(market.cleared_price, market.fundamental, d, terms.market_spread, terms.lgd)
        return Action.LEND_SECURITIZE
    return Action.LEND_HOLD


def plan_period(
    regime: Regime,
    market: MarketState,
    project: Project,
    terms: CdsTerms,
    f: float,
    d: float,
    flags: ModeFlags,
    has_float: bool = False,
    haircut: float | None = None,
) -> list[tuple[Action, float]]:
    """Ordered (action, share of remaining budget) steps for one period.

    Distressed securities are bought first when the discount beats the lending fee and
    securities are outstanding; whatever budget is left goes to the best-quoted use.
    """
    steps: list[tuple[Action, float]] = []
    if has_float and regime.underpriced and market.fundamental - market.cleared_price > f:
        steps.append((Action.BUY_SECURITIZED, 1.0))

    lend = lending_action(regime, market, terms, d, flags)
    allowed = {lend, Action.HOLD_CASH}
    if flags.cds:
        allowed.add(Action.SELL_CDS)
        if lend is Action.LEND_HOLD:
            allowed.add(Action.LEND_HEDGE)
    quotes = quote_actions(market, project, terms, f, d, include_naked=flags.naked_cds, haircut=haircut)
    if flags.naked_cds:
        allowed.add(Action.BUY_NAKED_CDS)
    steps.append((rank_quotes([q for q in quotes if q.action in allowed]).action, 1.0))
    return steps
