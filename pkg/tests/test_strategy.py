import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bank import BankState, settle_period3
from errors import ConfigValidationError, ZeroSpreadError
from instruments import CdsTerms, Project
from market import MarketState, classify_regime, clear_market
from strategy import (
    TIE_PRIORITY,
    Action,
    AllocationPlan,
    IndifferencePolicy,
    ModeFlags,
    StrategyQuote,
    choose_allocation,
    hedge_or_securitize,
    lending_action,
    plan_period,
    quote_actions,
    rank_quotes,
    securitization_profitable,
)


def quotes_by_action(quotes):
    return {q.action: q.expected_profit for q in quotes}


def fair_market(theta):
    P = 1.0 - theta
    return MarketState(P, P, 0.0)


class TestSecuritizationProfitable:
    def test_fair_price_never_clears_the_bar(self):
        assert not securitization_profitable(0.8, 0.8, 0.2)

    def test_threshold(self):
        assert securitization_profitable(1.65, 0.8, 0.2)
        assert not securitization_profitable(1.55, 0.8, 0.2)


class TestQuotes:
    @pytest.mark.parametrize("theta", [0.01, *np.round(np.arange(0.1, 1.0, 0.1), 2)])
    def test_fair_prices_make_every_use_of_capital_equal(self, theta):
        project = Project(theta=theta)
        terms = CdsTerms(market_spread=theta)
        quotes = quote_actions(fair_market(theta), project, terms, theta, 0.2, include_naked=True)
        for quote in quotes:
            assert quote.expected_profit == pytest.approx(0.0, abs=1e-12), quote.action

    def test_underpriced_security_beats_protection_sales(self):
        market = MarketState(0.8, 0.7, 0.1)
        quotes = quotes_by_action(quote_actions(market, Project(theta=0.2), CdsTerms(market_spread=0.2), 0.2, 0.2))
        assert quotes[Action.BUY_SECURITIZED] == pytest.approx(0.1)
        assert quotes[Action.SELL_CDS] == pytest.approx(0.0)

    def test_protection_premium_beats_discount_for_risky_projects(self):
        for theta in np.round(np.arange(0.05, 0.96, 0.05), 2):
            project, terms = Project(theta=theta), CdsTerms(market_spread=theta)
            P = 1.0 - theta
            if theta > 0.5:
                for P2 in np.arange(0.0, P + 1e-9, 0.01):
                    market = MarketState(P, max(P2, 1e-9), theta)
                    discount = quotes_by_action(quote_actions(market, project, terms, theta, 0.2))[
                        Action.BUY_SECURITIZED
                    ]
                    assert terms.market_spread > discount
            elif theta < 0.5:
                # the discount matches the premium at P_2 = 1 - 2 theta
                market = MarketState(P, 1.0 - 2.0 * theta, theta)
                discount = quotes_by_action(quote_actions(market, project, terms, theta, 0.2))[Action.BUY_SECURITIZED]
                assert discount == pytest.approx(terms.market_spread, abs=1e-12)

    def test_positive_basis_favours_protection_sales(self):
        quotes = quotes_by_action(
            quote_actions(fair_market(0.2), Project(theta=0.2), CdsTerms(market_spread=0.25), 0.2, 0.2)
        )
        assert quotes[Action.SELL_CDS] > quotes[Action.LEND_HOLD]

    @given(
        theta=st.floats(min_value=0.05, max_value=0.9),
        gap=st.floats(min_value=0.001, max_value=0.04),
    )
    def test_negative_basis_makes_naked_protection_profitable(self, theta, gap):
        spread = theta - gap
        quotes = quotes_by_action(
            quote_actions(
                fair_market(theta), Project(theta=theta), CdsTerms(market_spread=spread), theta, 0.2, include_naked=True
            )
        )
        assert quotes[Action.BUY_NAKED_CDS] > 0.0
        assert quotes[Action.BUY_NAKED_CDS] == pytest.approx((theta - spread) / spread)

    def test_naked_quote_needs_a_spread(self):
        with pytest.raises(ZeroSpreadError):
            quote_actions(fair_market(0.2), Project(theta=0.2), CdsTerms(), 0.2, 0.2, include_naked=True)

    def test_levered_securitization_needs_less_capital(self):
        quotes = quote_actions(fair_market(0.2), Project(theta=0.2), CdsTerms(), 0.2, 0.2, haircut=0.2)
        levered = next(q for q in quotes if q.action is Action.LEND_SECURITIZE)
        assert levered.capital_required == pytest.approx(0.04)

    @pytest.mark.parametrize("lgd", [0.6, 0.8, 1.0])
    def test_hedge_quote_matches_the_settled_ledger(self, lgd):
        project, terms, f = Project(theta=0.5), CdsTerms(market_spread=0.3, lgd=lgd), 0.5
        quote = quotes_by_action(quote_actions(fair_market(0.5), project, terms, f, 0.2))[Action.LEND_HEDGE]

        state = BankState(cash=1.0)
        state.hedge(1.0, f, terms.market_spread)
        settled = settle_period3(state, project, terms)
        assert quote == pytest.approx(settled.cash - 1.0, abs=1e-12)
        assert quote == pytest.approx(0.2)

    def test_quote_capital_must_be_positive(self):
        with pytest.raises(ValueError):
            StrategyQuote(Action.LEND_HOLD, 0.1, 0.0)


class TestRanking:
    def test_highest_profit_wins(self):
        quotes = [StrategyQuote(Action.LEND_HOLD, 0.1, 1.0), StrategyQuote(Action.SELL_CDS, 0.2, 1.0)]
        assert rank_quotes(quotes).action is Action.SELL_CDS

    def test_ties_prefer_real_lending(self):
        quotes = [
            StrategyQuote(Action.HOLD_CASH, 0.0, 0.0),
            StrategyQuote(Action.SELL_CDS, 0.0, 1.0),
            StrategyQuote(Action.LEND_HEDGE, 0.0, 1.2),
            StrategyQuote(Action.LEND_HOLD, 1e-14, 1.0),
        ]
        assert rank_quotes(quotes).action is Action.LEND_HOLD

    def test_priority_covers_every_action(self):
        assert set(TIE_PRIORITY) == set(Action)

    def test_empty_quotes(self):
        with pytest.raises(ValueError):
            rank_quotes([])


class TestHedgeOrSecuritize:
    def test_small_overpricing_keeps_and_hedges(self):
        gain = 0.1 * (1.0 - 0.1)
        assert gain == pytest.approx(0.09)
        assert gain < 1.0 - 0.2
        assert hedge_or_securitize(0.9, 0.8, 0.1, 0.2) is Action.LEND_HEDGE

    def test_tie_keeps_the_loan(self):
        assert hedge_or_securitize(1.5, 0.5, 0.5, 0.5) is Action.LEND_HEDGE

    def test_large_overpricing_securitizes(self):
        assert hedge_or_securitize(0.8 + 1.9, 0.8, 0.5, 0.2) is Action.LEND_SECURITIZE


class TestAllocation:
    f = 0.2

    def test_overpricing_at_t1_commits_everything(self):
        plan = choose_allocation(classify_regime(1.65, 0.8), None, self.f, False)
        assert plan.x == 1.0
        assert plan.trade_plan[1] == ((Action.LEND_SECURITIZE, 1.0),)

    def test_small_overpricing_falls_back_to_policy(self):
        plan = choose_allocation(classify_regime(0.9, 0.8), None, self.f, False)
        assert plan.x == 0.5

    def test_foreseen_overpricing_waits(self):
        plan = choose_allocation(classify_regime(0.8, 0.8), classify_regime(1.65, 0.8), self.f, True)
        assert plan.x == 0.0
        assert 2 in plan.trade_plan

    def test_unforeseen_overpricing_is_ignored(self):
        plan = choose_allocation(classify_regime(0.8, 0.8), classify_regime(1.65, 0.8), self.f, False)
        assert plan.x == 0.5

    def test_bigger_gap_wins_when_both_periods_pay(self):
        plan = choose_allocation(classify_regime(1.9, 0.8), classify_regime(1.65, 0.8), self.f, True)
        assert plan.x == 1.0

    def test_no_securitization_no_extremes(self):
        plan = choose_allocation(classify_regime(1.65, 0.8), None, self.f, False, securitization=False)
        assert plan.x == 0.5

    @pytest.mark.parametrize(
        ("policy", "x"),
        [(IndifferencePolicy.EVEN_SPLIT, 0.5), (IndifferencePolicy.FRONT_LOAD, 1.0), (IndifferencePolicy.BACK_LOAD, 0.0)],
    )
    def test_indifference_policies(self, policy, x):
        plan = choose_allocation(classify_regime(0.5, 0.8), None, self.f, False, policy=policy)
        assert plan.x == x

    def test_x_must_be_a_fraction(self):
        with pytest.raises(ValueError):
            AllocationPlan(1.5)


class TestPlanPeriod:
    project = Project(theta=0.2)

    def test_mode_flag_dependencies(self):
        with pytest.raises(ConfigValidationError):
            ModeFlags(leverage=True)
        with pytest.raises(ConfigValidationError):
            ModeFlags(naked_cds=True)

    def test_never_securitize_into_underpricing(self):
        market = clear_market(0.8, 0.3, 0.0, 0.0)
        regime = classify_regime(market.cleared_price, 0.8)
        assert lending_action(regime, market, CdsTerms(), 0.2, ModeFlags(securitization=True)) is Action.LEND_HOLD

    def test_fair_market_lends_and_holds(self):
        market = clear_market(0.8, 0.0, 0.0, 0.0)
        steps = plan_period(classify_regime(0.8, 0.8), market, self.project, CdsTerms(), 0.2, 0.2, ModeFlags())
        assert steps == [(Action.LEND_HOLD, 1.0)]

    def test_distressed_purchases_come_first(self):
        market = clear_market(0.8, 0.3, 0.0, 0.0)
        regime = classify_regime(market.cleared_price, 0.8)
        steps = plan_period(
            regime, market, self.project, CdsTerms(), 0.2, 0.2, ModeFlags(securitization=True), has_float=True
        )
        assert steps[0] == (Action.BUY_SECURITIZED, 1.0)
        assert steps[1][0] is Action.LEND_HOLD

    def test_negative_basis_buys_naked_protection(self):
        market = clear_market(0.8, 0.0, 0.0, 0.0)
        flags = ModeFlags(cds=True, naked_cds=True)
        steps = plan_period(
            classify_regime(0.8, 0.8), market, self.project, CdsTerms(market_spread=0.1), 0.2, 0.2, flags
        )
        assert steps == [(Action.BUY_NAKED_CDS, 1.0)]

    def test_overpriced_high_quality_loan_is_hedged(self):
        market = clear_market(0.8, -0.1, 0.0, 0.0)
        regime = classify_regime(market.cleared_price, 0.8)
        flags = ModeFlags(securitization=True, cds=True)
        steps = plan_period(regime, market, self.project, CdsTerms(market_spread=0.2), 0.2, 0.1, flags)
        assert steps == [(Action.LEND_HEDGE, 1.0)]
