"""Bank balance-sheet mechanics.

Capital ratio, haircut-constrained borrowing, forced liquidation and profit distribution,
plus the BankState ledger a simulation path mutates from t=1 to settlement at t=3.

Book equity is never stored. It is derived from the ledger as
cash + reserves + collateral + position basis - borrowing - payables.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import StrEnum
from typing import NamedTuple

import numpy as np

from errors import ConfigValidationError, FullWipeoutError, InsolventBankError, ZeroSpreadError
from instruments import CdsTerms, Project

logger = logging.getLogger(__name__)

# A single round of forced selling moves the price by at most half.
MAX_ROUND_IMPACT = 0.5
SOLVENCY_TOLERANCE = 1e-9


class FundingMode(StrEnum):
    HOLD = "hold"
    SECURITIZE = "securitize"
    SECURITIZE_LEVERED = "securitize-levered"


class SettlementMode(StrEnum):
    EXPECTATION = "expectation"
    REALIZED = "realized"


@dataclass(frozen=True)
class RegulatoryParams:
    e_req_1: float = 0.1
    e_req_2: float = 0.1
    g_1: float = 1.0
    g_2: float = 1.0
    payout_split: float = 0.5
    h: float = 0.2

    def __post_init__(self) -> None:
        for name in ("e_req_1", "e_req_2"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ConfigValidationError(f"{name} out of (0,1]: {value}", field=name)
        for name in ("g_1", "g_2", "payout_split"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigValidationError(f"{name} out of [0,1]: {value}", field=name)
        if not 0.0 < self.h <= 1.0:
            raise ConfigValidationError(f"h out of (0,1]: {self.h}", field="h")

    def e_req(self, period: int) -> float:
        return self.e_req_1 if period == 1 else self.e_req_2

    def g(self, period: int) -> float:
        return self.g_1 if period == 1 else self.g_2


class Payout(NamedTuple):
    dividends: float
    bonuses: float
    retained: float


@dataclass(frozen=True)
class LiquidationOutcome:
    units_sold: float
    price_ratio: float
    rounds: int
    wipeout: bool
    debt_remaining: float
    # sale value in units of the relative price
    proceeds: float = 0.0


@dataclass
class BankState:
    """Ledger of one bank along one path. Quantities are in unit loans or unit contracts."""

    cash: float
    period: int = 1
    reserves: float = 0.0
    collateral: float = 0.0
    loans_held: float = 0.0
    loans_basis: float = 0.0
    hedged_loans: float = 0.0
    hedged_basis: float = 0.0
    securities_held: float = 0.0
    securities_basis: float = 0.0
    borrowing: float = 0.0
    cds_sold: float = 0.0
    cds_hedge: float = 0.0
    cds_naked: float = 0.0
    protection_basis: float = 0.0
    payables: float = 0.0
    booked_fees: float = 0.0
    booked_gains: float = 0.0
    dividends: float = 0.0
    bonuses: float = 0.0
    retained: float = 0.0
    settlement_pnl: float = 0.0

    @property
    def basis(self) -> float:
        return self.loans_basis + self.hedged_basis + self.securities_basis + self.protection_basis

    @property
    def equity(self) -> float:
        return self.cash + self.reserves + self.collateral + self.basis - self.borrowing - self.payables

    @property
    def cds_bought(self) -> float:
        return self.cds_hedge + self.cds_naked

    @property
    def on_book_exposure(self) -> float:
        return self.loans_held + self.hedged_loans + self.securities_held

    def originate(self, loans: float, fee: float) -> None:
        self.cash -= loans * (1.0 - fee)
        self.loans_held += loans
        self.loans_basis += loans
        self.booked_fees += loans * fee

    def securitize(self, loans: float, price: float, fundamental: float, d: float) -> float:
        """Sell the 1 - d share of held loans at price and keep d as retained securities.

        Returns the number of security units sold into the market.
        """
        if loans > self.loans_held + SOLVENCY_TOLERANCE:
            msg = f"cannot securitize {loans} loans with only {self.loans_held} on book"
            raise ValueError(msg)
        sold = loans * (1.0 - d)
        self.cash += sold * price
        self.loans_held -= loans
        self.loans_basis -= loans
        self.securities_held += loans * d
        self.securities_basis += loans - sold * fundamental
        self.booked_gains += sold * (price - fundamental)
        return sold

    def hedge(self, loans: float, fee: float, spread: float) -> None:
        self.cash -= loans * (1.0 - fee + spread)
        self.hedged_loans += loans
        self.hedged_basis += loans
        self.cds_hedge += loans
        self.protection_basis += loans * spread
        self.booked_fees += loans * fee

    def sell_protection(self, contracts: float, spread: float) -> None:
        self.cash -= contracts * (1.0 - spread)
        self.collateral += contracts
        self.cds_sold += contracts
        self.booked_gains += contracts * spread

    def buy_naked_protection(self, capital: float, spread: float) -> float:
        if spread <= 0.0:
            raise ZeroSpreadError("naked protection cannot be sized at a zero spread")
        contracts = capital / spread
        self.cash -= capital
        self.cds_naked += contracts
        self.protection_basis += capital
        return contracts

    def buy_securities(self, units: float, price: float, fundamental: float) -> None:
        self.cash -= units * price
        self.securities_held += units
        self.securities_basis += units * fundamental
        self.booked_gains += units * (fundamental - price)

    def sell_securities(self, units: float, price: float, fundamental: float) -> None:
        units = min(units, self.securities_held)
        self.cash += units * price
        self.securities_held -= units
        self.securities_basis -= units * fundamental
        self.booked_gains += units * (price - fundamental)

    def borrow(self, amount: float) -> None:
        self.cash += amount
        self.borrowing += amount

    def repay(self, amount: float) -> float:
        amount = min(amount, self.borrowing)
        self.cash -= amount
        self.borrowing -= amount
        return amount

    def close_period(self, g: float, split: float) -> Payout:
        """Declare this period's distributions; they are paid at settlement."""
        result = payout(self.booked_gains, self.booked_fees, g, split)
        self.payables += result.dividends + result.bonuses
        self.dividends += result.dividends
        self.bonuses += result.bonuses
        self.retained += result.retained
        self.booked_fees = 0.0
        self.booked_gains = 0.0
        self.period += 1
        return result

    def sweep_cash(self) -> None:
        self.reserves += self.cash
        self.cash = 0.0


def max_borrowing(collateral_value: float, h: float) -> float:
    if not 0.0 < h <= 1.0:
        msg = f"haircut h must be in (0,1], got {h}"
        raise ValueError(msg)
    return (1.0 - h) * collateral_value


def max_projects(E0: float, d: float, h: float, mode: FundingMode) -> float:
    """Number of unit projects equity E0 can finance.

    Securitizing needs only the retained share d per loan; borrowing (1 - h) of that
    against the retained securities shrinks it to d * h.
    """
    if not 0.0 < d <= 1.0:
        msg = f"skin in the game d must be in (0,1], got {d}"
        raise ValueError(msg)
    if not 0.0 < h <= 1.0:
        msg = f"haircut h must be in (0,1], got {h}"
        raise ValueError(msg)
    match mode:
        case FundingMode.HOLD:
            return E0
        case FundingMode.SECURITIZE:
            return E0 / d
        case FundingMode.SECURITIZE_LEVERED:
            return E0 / (d * h)
    msg = f"Unknown funding mode: {mode}"
    raise ValueError(msg)


def capital_ratio_cap(E: float, e_req: float) -> float:
    if e_req <= 0.0:
        msg = f"e_req must be positive, got {e_req}"
        raise ValueError(msg)
    return max(E, 0.0) / e_req


def required_liquidation(J1: float, h: float, P2: float) -> float:
    """Units S of collateral to sell at P2 so the haircut is h again.

    S = J1 * Q with Q = ((1 - P2) / P2) * ((1 - h) / h), clamped to [0, J1].

    Raises:
        FullWipeoutError: if P2 < 1 - h, where the collateral cannot carry any debt.
    """
    if not 0.0 < h <= 1.0:
        msg = f"haircut h must be in (0,1], got {h}"
        raise ValueError(msg)
    if not 0.0 < P2 <= 1.0:
        msg = f"relative price P2 must be in (0,1], got {P2}"
        raise ValueError(msg)
    if P2 < 1.0 - h:
        raise FullWipeoutError(P2, h)
    if P2 == 1.0 - h:
        return J1
    q = ((1.0 - P2) / P2) * ((1.0 - h) / h)
    return min(max(J1 * q, 0.0), J1)


def haircut_ratio(J1: float, h: float, P2: float, S: float) -> float:
    """Equity over collateral value after selling S units at P2 on a book struck at par."""
    value = (J1 - S) * P2
    if value <= 0.0:
        return 0.0
    debt = (1.0 - h) * J1 - S * P2
    return (value - debt) / value


def solve_liquidation_numerically(J1: float, h: float, P2: float, tol: float = 1e-13, max_iter: int = 200) -> float:
    """Bisection search for the sale that restores the haircut."""
    if P2 < 1.0 - h:
        raise FullWipeoutError(P2, h)
    if haircut_ratio(J1, h, P2, 0.0) >= h:
        return 0.0
    lo, hi = 0.0, J1
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if haircut_ratio(J1, h, P2, mid) < h:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def fire_sale_cascade(
    J1: float,
    h: float,
    P2: float,
    impact: float = 0.0,
    max_rounds: int = 100,
    debt: float | None = None,
) -> LiquidationOutcome:
    """Repeat forced sales while each sale depresses the price further.

    Every round sells the S that restores the haircut at the current relative price, then
    the price falls by impact * S (at most MAX_ROUND_IMPACT per round). With impact 0
    this is a single application of required_liquidation.
    """
    if impact < 0.0:
        msg = f"fire-sale impact must be nonnegative, got {impact}"
        raise ValueError(msg)
    if P2 <= 0.0:
        msg = f"relative price must be positive, got {P2}"
        raise ValueError(msg)

    units, price = J1, P2
    owed = (1.0 - h) * J1 if debt is None else debt
    sold, proceeds, rounds, wipeout = 0.0, 0.0, 0, False

    while rounds < max_rounds and units > 0.0 and owed > 0.0:
        if owed >= units * price:
            wipeout = owed > units * price + SOLVENCY_TOLERANCE
            sale = units
        else:
            sale = min(max((owed - (1.0 - h) * units * price) / (h * price), 0.0), units)
        if sale <= SOLVENCY_TOLERANCE:
            break
        rounds += 1
        sold += sale
        proceeds += sale * price
        owed = max(owed - sale * price, 0.0)
        units -= sale
        logger.debug(f"fire sale round {rounds}: sold {sale:.6g} at {price:.6g}, debt left {owed:.6g}")
        if impact == 0.0 or units <= 0.0:
            break
        price *= 1.0 - min(impact * sale, MAX_ROUND_IMPACT)

    return LiquidationOutcome(sold, price, rounds, wipeout, owed, proceeds)


def payout(B: float, fee_income: float, g: float, split: float) -> Payout:
    """Split booked income into dividends, bonuses and retained earnings.

    Losses are retained in full and nothing is distributed.
    """
    if not 0.0 <= g <= 1.0 or not 0.0 <= split <= 1.0:
        msg = f"g and split must be in [0,1], got g={g}, split={split}"
        raise ValueError(msg)
    base = B + fee_income
    if base <= 0.0:
        return Payout(0.0, 0.0, base)
    distributed = base * g
    dividends = distributed * split
    return Payout(dividends, distributed - dividends, base - distributed)


def shareholder_value(B: float, fee_income: float, g: float, split: float) -> float:
    """Dividends plus retained earnings, the part of income that accrues to shareholders."""
    result = payout(B, fee_income, g, split)
    return result.dividends + result.retained


def _defaulted_mass(units: float, theta: float, rng: np.random.Generator) -> float:
    # whole units default independently, a fractional remainder defaults as one block
    whole = math.floor(units)
    defaulted = float(rng.binomial(whole, theta)) if whole > 0 else 0.0
    remainder = units - whole
    if remainder > 0.0 and rng.random() < theta:
        defaulted += remainder
    return defaulted


def settle_period3(
    state: BankState,
    project: Project,
    terms: CdsTerms,
    mode: SettlementMode = SettlementMode.EXPECTATION,
    rng: np.random.Generator | None = None,
) -> BankState:
    """Pay out every position, repay debt and distributions, and return the t=3 state.

    A defaulted loan or security unit recovers 1 - lgd; a CDS contract pays lgd on default.

    Raises:
        InsolventBankError: if final equity is negative. The settled state is attached.
    """
    w = terms.lgd
    if mode is SettlementMode.REALIZED:
        if rng is None:
            msg = "realized settlement needs a random generator"
            raise ValueError(msg)
        loan_defaults = _defaulted_mass(state.loans_held, project.theta, rng)
        security_defaults = _defaulted_mass(state.securities_held, project.theta, rng)
        sold_defaults = _defaulted_mass(state.cds_sold, project.theta, rng)
        naked_defaults = _defaulted_mass(state.cds_naked, project.theta, rng)
    else:
        loan_defaults = state.loans_held * project.theta
        security_defaults = state.securities_held * project.theta
        sold_defaults = state.cds_sold * project.theta
        naked_defaults = state.cds_naked * project.theta

    payoff = (
        state.loans_held - loan_defaults * w
        + state.securities_held - security_defaults * w
        # each hedged loan's own protection covers its default loss exactly
        + state.hedged_loans
        + state.collateral - sold_defaults * w
        + naked_defaults * w
    )
    position_cost = state.collateral + state.basis

    settled = replace(
        state,
        period=3,
        cash=state.cash + state.reserves + payoff - state.borrowing - state.payables,
        reserves=0.0,
        collateral=0.0,
        loans_held=0.0,
        loans_basis=0.0,
        hedged_loans=0.0,
        hedged_basis=0.0,
        securities_held=0.0,
        securities_basis=0.0,
        borrowing=0.0,
        cds_sold=0.0,
        cds_hedge=0.0,
        cds_naked=0.0,
        protection_basis=0.0,
        payables=0.0,
        settlement_pnl=payoff - position_cost,
    )
    if settled.cash < -SOLVENCY_TOLERANCE:
        raise InsolventBankError(settled.cash, state=settled)
    return settled
