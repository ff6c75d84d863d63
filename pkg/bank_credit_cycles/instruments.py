"""Closed-form valuation of projects, loans, securitized assets and CDS contracts.

Every function here is a pure function of its arguments.
"""

from dataclasses import dataclass, replace
from enum import StrEnum

from errors import ConfigValidationError, FeeTooLargeError

PROJECT_COST = 1.0


class FeeMode(StrEnum):
    EXPECTED_LOSS = "expected-loss"
    SURPLUS_SHARE = "surplus-share"


@dataclass(frozen=True)
class Project:
    """A unit-cost investment opportunity that pays payoff_good or payoff_bad at t=3."""

    theta: float = 0.2
    payoff_good: float = 1.5
    payoff_bad: float = 0.0
    cost: float = PROJECT_COST

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= 1.0:
            raise ConfigValidationError(f"theta out of [0,1]: {self.theta}", field="theta")
        if self.cost != PROJECT_COST:
            raise ConfigValidationError(f"project cost must be 1, got {self.cost}", field="cost")
        if self.payoff_good < self.cost:
            raise ConfigValidationError(
                f"payoff_good must be at least the project cost: {self.payoff_good}", field="payoff_good"
            )
        if self.payoff_bad > self.payoff_good:
            raise ConfigValidationError(
                f"payoff_bad {self.payoff_bad} exceeds payoff_good {self.payoff_good}", field="payoff_bad"
            )


@dataclass(frozen=True)
class FeeModel:
    alpha: float = 0.0
    mode: FeeMode = FeeMode.EXPECTED_LOSS

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigValidationError(f"alpha out of [0,1]: {self.alpha}", field="alpha")


@dataclass(frozen=True)
class SkinModel:
    """Retention schedule d(theta) = clamp(d0 + d1 * theta, d_floor, 1)."""

    d0: float = 0.1
    d1: float = 0.5
    d_floor: float = 0.05

    def __post_init__(self) -> None:
        if not 0.0 <= self.d0 <= 1.0:
            raise ConfigValidationError(f"d0 out of [0,1]: {self.d0}", field="d0")
        if self.d1 < 0.0:
            raise ConfigValidationError(f"d1 must be nonnegative: {self.d1}", field="d1")
        if not 0.0 < self.d_floor <= 1.0:
            raise ConfigValidationError(f"d_floor out of (0,1]: {self.d_floor}", field="d_floor")


@dataclass(frozen=True)
class CdsTerms:
    lgd: float = 1.0
    market_spread: float = 0.0
    notional: float = 1.0
    fully_collateralized: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.lgd <= 1.0:
            raise ConfigValidationError(f"lgd out of (0,1]: {self.lgd}", field="lgd")
        if self.market_spread < 0.0:
            raise ConfigValidationError(f"market_spread must be nonnegative: {self.market_spread}", field="market_spread")
        if self.notional != 1.0:
            raise ConfigValidationError(f"CDS notional must be 1, got {self.notional}", field="notional")
        if not self.fully_collateralized:
            raise ConfigValidationError("CDS contracts are always fully collateralized", field="fully_collateralized")

    def with_spread(self, spread: float) -> "CdsTerms":
        return replace(self, market_spread=spread)


def expected_project_value(p: Project) -> float:
    return (1.0 - p.theta) * p.payoff_good + p.theta * p.payoff_bad


def origination_fee(p: Project, m: FeeModel) -> float:
    """Fee charged upfront to the entrepreneur for financing project p.

    ExpectedLoss charges exposure * LGD * default probability, i.e. theta on a unit loan.
    SurplusShare adds a share alpha of the expected surplus (1 - theta) * (Z_g - 1).

    Raises:
        FeeTooLargeError: if the fee is not below the project cost.
    """
    if m.mode is FeeMode.EXPECTED_LOSS:
        fee = p.theta
    else:
        fee = p.theta + m.alpha * (1.0 - p.theta) * (p.payoff_good - p.cost)
    if fee >= p.cost:
        raise FeeTooLargeError(f"fee {fee:.6g} is not below the project cost for theta={p.theta}")
    return fee


def fundamental_price(p: Project) -> float:
    return 1.0 - p.theta


def fair_cds_spread(p: Project, t: CdsTerms) -> float:
    return p.theta * t.lgd


def market_cds_spread(p: Project, t: CdsTerms, shock: float) -> float:
    """Fair spread moved by a signed mispricing shock, kept inside [0, lgd]."""
    return min(max(fair_cds_spread(p, t) + shock, 0.0), t.lgd)


def cds_basis(t: CdsTerms, fee: float) -> float:
    # positive in normal times, negative under stress
    return t.market_spread - fee


def skin_in_game(p: Project, m: SkinModel) -> float:
    return min(max(m.d0 + m.d1 * p.theta, m.d_floor), 1.0)


def expected_loan_payoff(p: Project, t: CdsTerms) -> float:
    """Expected t=3 repayment of a unit loan that recovers 1 - lgd on default."""
    return 1.0 - p.theta * t.lgd


def hedged_loan_payoff(p: Project, t: CdsTerms) -> float:
    """Expected t=3 cash from a loan protected by one CDS contract.

    On default the loan recovers 1 - lgd and the contract pays lgd, so the loan always repays 1.
    """
    return expected_loan_payoff(p, t) + p.theta * t.lgd
