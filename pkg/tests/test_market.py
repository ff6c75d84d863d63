import logging

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import ConfigValidationError, NegativePriceError, ZeroPriceError
from market import (
    RegimeTag,
    SentimentState,
    ShockDistribution,
    bank_demand,
    classify_regime,
    clear_market,
    noise_trader_demand,
)


def total_demand(P, psi, market):
    return noise_trader_demand(P, psi, market.cleared_price) + bank_demand(
        market.deployed_capital, market.cleared_price
    )


class TestDemand:
    def test_noise_trader_demand(self):
        assert noise_trader_demand(0.8, 0.3, 0.5) == pytest.approx(1.0)
        assert noise_trader_demand(0.8, -0.2, 0.8) == pytest.approx(1.25)

    def test_bank_demand(self):
        assert bank_demand(0.1, 0.5) == pytest.approx(0.2)
        assert bank_demand(0.6, 0.6) == pytest.approx(1.0)
        assert bank_demand(-0.3, 0.6) == pytest.approx(-0.5)

    @pytest.mark.parametrize("price", [0.0, -0.1])
    def test_demand_undefined_at_non_positive_price(self, price):
        with pytest.raises(ZeroPriceError):
            noise_trader_demand(0.8, 0.0, price)
        with pytest.raises(ZeroPriceError):
            bank_demand(0.1, price)


class TestClearMarket:
    def test_neutral_sentiment_clears_at_fundamental(self):
        market = clear_market(0.8, 0.0, 5.0, 5.0)
        assert market.cleared_price == 0.8
        assert market.units_traded == 0.0

    def test_pessimism_persists_when_capacity_is_short(self):
        market = clear_market(0.8, 0.3, 0.1, 0.0)
        assert market.cleared_price == pytest.approx(0.6)
        assert market.deployed_capital == pytest.approx(0.1)

    def test_deployment_capped_at_mispricing(self):
        market = clear_market(0.8, 0.3, 0.5, 0.0)
        assert market.deployed_capital == pytest.approx(0.3)
        assert market.cleared_price == pytest.approx(0.8)

    def test_optimism_without_inventory_is_not_corrected(self):
        market = clear_market(0.8, -0.85, 10.0, 0.0)
        assert market.cleared_price == pytest.approx(1.65)
        assert market.deployed_capital == 0.0

    def test_optimism_sells_inventory_within_units_held(self):
        market = clear_market(0.8, -0.5, 0.0, 0.2)
        assert market.deployed_capital < 0.0
        assert market.units_traded <= 0.2 + 1e-12
        assert 0.8 < market.cleared_price < 1.3

    def test_bank_trades_are_logged(self, caplog):
        with caplog.at_level(logging.DEBUG, logger="market"):
            clear_market(0.8, 0.3, 0.1, 0.0)
            clear_market(0.8, -0.5, 0.0, 0.2)
        messages = [r.getMessage() for r in caplog.records if r.name == "market"]
        assert any(m.startswith("pessimism 0.3: bank deploys 0.1") for m in messages)
        assert any(m.startswith("optimism -0.5: bank sells") for m in messages)

    def test_negative_price_is_reported(self):
        with pytest.raises(NegativePriceError) as excinfo:
            clear_market(0.8, 1.0, 0.0, 0.0)
        assert excinfo.value.price == pytest.approx(-0.2)

    def test_negative_capacity_is_rejected(self):
        with pytest.raises(ValueError):
            clear_market(0.8, 0.1, -1.0, 0.0)

    def test_random_cases_clear_and_never_overshoot(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            P = rng.uniform(0.05, 1.0)
            psi = rng.uniform(-2.0, 0.999 * P)
            capacity = rng.uniform(0.0, 1.0)
            inventory = rng.uniform(0.0, 3.0)
            market = clear_market(P, psi, capacity, inventory)

            assert abs(total_demand(P, psi, market) - 1.0) <= 1e-12
            assert abs(market.cleared_price - P) <= abs(psi) + 1e-15
            if psi > 0.0:
                assert market.cleared_price <= P + 1e-15
            elif psi < 0.0:
                assert market.cleared_price >= P - 1e-15

    @given(
        psi=st.floats(min_value=0.01, max_value=0.7),
        low=st.floats(min_value=0.0, max_value=1.0),
        high=st.floats(min_value=0.0, max_value=1.0),
    )
    def test_more_capacity_never_widens_the_gap(self, psi, low, high):
        low, high = sorted((low, high))
        assert abs(clear_market(0.8, psi, high, 0.0).gap) <= abs(clear_market(0.8, psi, low, 0.0).gap) + 1e-15

    @given(
        psi=st.floats(min_value=-2.0, max_value=-0.01),
        low=st.floats(min_value=0.0, max_value=5.0),
        high=st.floats(min_value=0.0, max_value=5.0),
    )
    def test_more_inventory_never_widens_the_gap(self, psi, low, high):
        low, high = sorted((low, high))
        assert abs(clear_market(0.8, psi, 0.0, high).gap) <= abs(clear_market(0.8, psi, 0.0, low).gap) + 1e-12


class TestClassifyRegime:
    def test_tags(self):
        assert classify_regime(0.9, 0.8).tag is RegimeTag.OVERPRICED
        assert classify_regime(0.8, 0.8).tag is RegimeTag.FAIR
        regime = classify_regime(0.5, 0.8)
        assert regime.tag is RegimeTag.UNDERPRICED
        assert regime.magnitude == pytest.approx(0.3)

    def test_machine_noise_reads_fair(self):
        assert classify_regime(0.8 + 1e-13, 0.8).tag is RegimeTag.FAIR

    def test_eps_must_be_positive(self):
        with pytest.raises(ValueError):
            classify_regime(0.8, 0.8, eps=0.0)


class TestSentiment:
    def test_mood_follows_sign(self):
        assert SentimentState(psi=0.3).mood == "pessimistic"
        assert SentimentState(psi=-0.3).mood == "optimistic"
        assert SentimentState().mood == "neutral"

    def test_negative_sigma_rejected(self):
        with pytest.raises(ConfigValidationError):
            SentimentState(sigma=-0.1)

    def test_zero_sigma_only_shifts(self, rng):
        state = SentimentState(psi=0.1, sigma=0.0)
        assert state.evolve(rng, 0.25).psi == pytest.approx(0.35)

    def test_two_point_increments(self, rng):
        state = SentimentState(sigma=0.05, distribution=ShockDistribution.TWO_POINT)
        draws = {state.draw_increment(rng) for _ in range(50)}
        assert draws == {0.05, -0.05}

    @pytest.mark.parametrize("distribution", list(ShockDistribution))
    def test_increments_are_centred(self, distribution):
        rng = np.random.default_rng(7)
        state = SentimentState(sigma=0.2, distribution=distribution)
        n = 20_000
        draws = np.array([state.draw_increment(rng) for _ in range(n)])
        assert abs(draws.mean()) <= 4 * 0.2 / np.sqrt(n)
        assert draws.std() == pytest.approx(0.2, rel=0.05)
