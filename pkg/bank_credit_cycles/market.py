"""Securitized-asset price formation under noise-trader sentiment.

Noise traders demand (P - psi) / P_t units; the bank demands deployed / P_t units and can
only lean against pessimism with free capital or against optimism with inventory it already
holds. Supply is one unit.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import StrEnum

import numpy as np

from errors import ConfigValidationError, NegativePriceError, ZeroPriceError

logger = logging.getLogger(__name__)

SUPPLY = 1.0
DEFAULT_EPS = 1e-9


class ShockDistribution(StrEnum):
    NORMAL = "normal"
    UNIFORM = "uniform"
    TWO_POINT = "two-point"


class RegimeTag(StrEnum):
    OVERPRICED = "overpriced"
    FAIR = "fair"
    UNDERPRICED = "underpriced"


@dataclass(frozen=True)
class SentimentState:
    """Noise-trader sentiment for one period.

    psi > 0 is pessimism, psi < 0 optimism. Only the increment between periods is random.
    """

    psi: float = 0.0
    sigma: float = 0.1
    distribution: ShockDistribution = ShockDistribution.NORMAL

    def __post_init__(self) -> None:
        if not math.isfinite(self.psi):
            raise ConfigValidationError(f"psi must be finite: {self.psi}", field="psi_1")
        if not self.sigma >= 0.0:
            raise ConfigValidationError(f"sigma must be nonnegative: {self.sigma}", field="sigma")

    @property
    def mood(self) -> str:
        if self.psi > 0.0:
            return "pessimistic"
        if self.psi < 0.0:
            return "optimistic"
        return "neutral"

    def draw_increment(self, rng: np.random.Generator) -> float:
        """Draw one zero-mean shock with standard deviation sigma.

        A draw is consumed even when sigma is zero so the stream layout does not depend on it.
        """
        match self.distribution:
            case ShockDistribution.NORMAL:
                return float(rng.normal(0.0, self.sigma))
            case ShockDistribution.UNIFORM:
                half_width = self.sigma * math.sqrt(3.0)
                return float(rng.uniform(-half_width, half_width))
            case ShockDistribution.TWO_POINT:
                return self.sigma if rng.integers(0, 2) == 1 else -self.sigma
        msg = f"Unknown shock distribution: {self.distribution}"
        raise ValueError(msg)

    def evolve(self, rng: np.random.Generator, shift: float = 0.0) -> "SentimentState":
        """Return next period's sentiment, psi + shift + a random increment."""
        return replace(self, psi=self.psi + shift + self.draw_increment(rng))


@dataclass(frozen=True)
class MarketState:
    fundamental: float
    cleared_price: float
    psi: float
    # positive when the bank buys against pessimism, negative when it sells against optimism
    deployed_capital: float = 0.0
    units_traded: float = 0.0
    supply: float = SUPPLY

    @property
    def gap(self) -> float:
        return self.cleared_price - self.fundamental


@dataclass(frozen=True)
class Regime:
    tag: RegimeTag
    magnitude: float

    @property
    def overpriced(self) -> bool:
        return self.tag is RegimeTag.OVERPRICED

    @property
    def underpriced(self) -> bool:
        return self.tag is RegimeTag.UNDERPRICED


def noise_trader_demand(P: float, psi: float, P_t: float) -> float:
    if P_t <= 0.0:
        raise ZeroPriceError(f"noise-trader demand is undefined at price {P_t}")
    return (P - psi) / P_t


def bank_demand(deployed: float, P_t: float) -> float:
    """Units demanded by the bank; negative deployed capital means the bank is selling."""
    if P_t <= 0.0:
        raise ZeroPriceError(f"bank demand is undefined at price {P_t}")
    return deployed / P_t


def clear_market(P: float, psi: float, capacity: float, inventory: float) -> MarketState:
    """Clear the unit supply against noise-trader and bank demand.

    Under pessimism the bank deploys A = min(capacity, psi). Under optimism it sells
    inventory worth V, at most |psi| and at most the inventory valued at the cleared price.
    Either way the price moves towards P and never past it.

    Raises:
        NegativePriceError: if the cleared price is not positive.
    """
    if capacity < 0.0:
        msg = f"capacity must be nonnegative, got {capacity}"
        raise ValueError(msg)
    if inventory < 0.0:
        msg = f"inventory must be nonnegative, got {inventory}"
        raise ValueError(msg)

    if psi > 0.0:
        deployed = min(capacity, psi)
        price = P - psi + deployed
        if price <= 0.0:
            raise NegativePriceError(price, psi)
        logger.debug(f"pessimism {psi:.6g}: bank deploys {deployed:.6g}, price {price:.6g}")
        return MarketState(P, price, psi, deployed_capital=deployed, units_traded=deployed / price)

    if psi < 0.0:
        pre_trade = P - psi
        # V <= inventory * (pre_trade - V) keeps the units sold within inventory
        sold_value = min(-psi, inventory * pre_trade / (1.0 + inventory))
        price = pre_trade - sold_value
        logger.debug(f"optimism {psi:.6g}: bank sells {sold_value:.6g} of inventory, price {price:.6g}")
        return MarketState(P, price, psi, deployed_capital=-sold_value, units_traded=sold_value / price)

    return MarketState(P, P, psi)


def classify_regime(P_t: float, P: float, eps: float = DEFAULT_EPS) -> Regime:
    if eps <= 0.0:
        msg = f"eps must be positive, got {eps}"
        raise ValueError(msg)
    gap = P_t - P
    if gap > eps:
        tag = RegimeTag.OVERPRICED
    elif -gap > eps:
        tag = RegimeTag.UNDERPRICED
    else:
        tag = RegimeTag.FAIR
    return Regime(tag, abs(gap))
