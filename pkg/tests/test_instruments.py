import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import ConfigValidationError, FeeTooLargeError
from instruments import (
    CdsTerms,
    FeeMode,
    FeeModel,
    Project,
    SkinModel,
    cds_basis,
    expected_loan_payoff,
    expected_project_value,
    fair_cds_spread,
    fundamental_price,
    hedged_loan_payoff,
    market_cds_spread,
    origination_fee,
    skin_in_game,
)

probability = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
interior_probability = st.floats(min_value=0.001, max_value=0.998, allow_nan=False)


@pytest.mark.parametrize(
    ("theta", "payoff_good", "expected"),
    [(0.0, 1.2, 1.2), (1.0, 1.2, 0.0), (0.2, 1.5, 1.2)],
)
def test_expected_project_value(theta, payoff_good, expected):
    assert expected_project_value(Project(theta=theta, payoff_good=payoff_good)) == pytest.approx(expected)


def test_expected_loss_fee_equals_default_probability():
    assert origination_fee(Project(theta=0.2), FeeModel()) == pytest.approx(0.2)
    assert origination_fee(Project(theta=0.0), FeeModel()) == 0.0
    assert origination_fee(Project(theta=0.0), FeeModel(alpha=0.0, mode=FeeMode.SURPLUS_SHARE)) == 0.0


def test_surplus_share_fee():
    fee = origination_fee(Project(theta=0.1, payoff_good=1.4), FeeModel(alpha=0.5, mode=FeeMode.SURPLUS_SHARE))
    assert fee == pytest.approx(0.1 + 0.5 * 0.9 * 0.4)


def test_fee_at_project_cost_is_rejected():
    with pytest.raises(FeeTooLargeError):
        origination_fee(Project(theta=1.0), FeeModel())


@pytest.mark.parametrize(("theta", "price"), [(0.0, 1.0), (0.01, 0.99), (0.9, 0.1)])
def test_fundamental_price(theta, price):
    assert fundamental_price(Project(theta=theta)) == pytest.approx(price)


@given(theta=probability)
def test_price_and_default_probability_sum_to_one(theta):
    assert fundamental_price(Project(theta=theta)) + theta == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize(("theta", "lgd", "spread"), [(0.0, 1.0, 0.0), (0.2, 1.0, 0.2), (0.5, 0.6, 0.3)])
def test_fair_cds_spread(theta, lgd, spread):
    assert fair_cds_spread(Project(theta=theta), CdsTerms(lgd=lgd)) == pytest.approx(spread)


@pytest.mark.parametrize(("spread", "fee", "basis"), [(0.2, 0.2, 0.0), (0.25, 0.2, 0.05), (0.10, 0.2, -0.10)])
def test_cds_basis_sign(spread, fee, basis):
    assert cds_basis(CdsTerms(market_spread=spread), fee) == pytest.approx(basis)


@given(theta=interior_probability)
def test_fair_spread_has_zero_basis_against_expected_loss_fee(theta):
    project = Project(theta=theta)
    terms = CdsTerms().with_spread(fair_cds_spread(project, CdsTerms()))
    assert cds_basis(terms, origination_fee(project, FeeModel())) == pytest.approx(0.0, abs=1e-15)


@given(theta=probability, shock=st.floats(min_value=-2.0, max_value=2.0, allow_nan=False))
def test_market_spread_stays_within_lgd(theta, shock):
    terms = CdsTerms(lgd=0.6)
    spread = market_cds_spread(Project(theta=theta), terms, shock)
    assert 0.0 <= spread <= 0.6


def test_skin_in_game_schedule():
    assert skin_in_game(Project(theta=0.0), SkinModel()) == pytest.approx(0.1)
    assert skin_in_game(Project(theta=0.2), SkinModel()) == pytest.approx(0.2)
    assert skin_in_game(Project(theta=1.0), SkinModel(d0=0.9, d1=0.5)) == 1.0
    assert skin_in_game(Project(theta=0.0), SkinModel(d0=0.0, d1=0.5)) == pytest.approx(0.05)


@given(a=interior_probability, b=interior_probability)
def test_monotone_in_default_probability(a, b):
    lo, hi = sorted((a, b))
    if hi - lo < 1e-9:
        return
    low, high = Project(theta=lo), Project(theta=hi)
    assert expected_project_value(high) < expected_project_value(low)
    assert origination_fee(high, FeeModel()) > origination_fee(low, FeeModel())
    assert fair_cds_spread(high, CdsTerms()) > fair_cds_spread(low, CdsTerms())
    assert skin_in_game(high, SkinModel()) >= skin_in_game(low, SkinModel())


def test_hedged_loan_repays_in_full():
    project, terms = Project(theta=0.3), CdsTerms(lgd=0.6)
    assert expected_loan_payoff(project, terms) == pytest.approx(1.0 - 0.18)
    assert hedged_loan_payoff(project, terms) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "build",
    [
        lambda: Project(theta=1.2),
        lambda: Project(payoff_good=0.9),
        lambda: Project(payoff_bad=2.0),
        lambda: FeeModel(alpha=1.5),
        lambda: SkinModel(d_floor=0.0),
        lambda: CdsTerms(lgd=0.0),
        lambda: CdsTerms(fully_collateralized=False),
    ],
)
def test_invalid_instruments_are_rejected(build):
    with pytest.raises(ConfigValidationError):
        build()
