import pytest

from engine import PathOutcome, path_rng, run_path
from errors import ConfigValidationError
from presets import PRESETS, get_preset, preset_config


def first_path(name, seed=0):
    return run_path(preset_config(name), path_rng(seed, 0))


@pytest.mark.parametrize("name", list(PRESETS))
def test_every_preset_builds_and_runs(name):
    preset = get_preset(name)
    assert preset.situation
    assert preset.expected
    assert first_path(name).outcome is PathOutcome.OK


def test_unknown_preset():
    with pytest.raises(ConfigValidationError) as excinfo:
        get_preset("golden-age")
    assert excinfo.value.field == "preset"


@pytest.mark.parametrize(
    ("name", "x"),
    [
        ("baseline", 0.5),
        ("securitization-fair", 0.5),
        ("overpricing-t1", 1.0),
        ("overpricing-t2", 0.0),
        ("overpricing-both", 1.0),
        ("underpricing-t1", 0.5),
        ("underpricing-t2-a", 1.0),
        ("underpricing-t2-c", 0.0),
        ("underpricing-both-a", 1.0),
        ("underpricing-both-b", 0.5),
        ("underpricing-both-c", 0.0),
        ("boom-bust", 1.0),
        ("bust-boom", 0.5),
        ("bust-boom-foreseen", 0.0),
    ],
)
def test_lending_share_by_situation(name, x):
    result = first_path(name)
    assert result.x == pytest.approx(x)
    assert result.cyclicity == pytest.approx(abs(2.0 * x - 1.0))


def test_securitization_multiplies_funding():
    assert first_path("baseline").projects_financed == pytest.approx(1.0)
    assert first_path("securitization-fair").projects_financed == pytest.approx(5.0)


def test_pessimism_at_t1_sells_nothing():
    assert first_path("underpricing-t1").securities_sold == 0.0
    assert first_path("underpricing-both-b").securities_bought == 0.0


def test_kept_funds_buy_distressed_securities():
    result = first_path("underpricing-t2-b")
    assert result.securities_bought > 0.0
    assert "t2:buy-securitized" in result.actions
    assert 0.5 < result.x < 1.0


def test_foreseen_overpricing_originates_at_t2():
    result = first_path("overpricing-t2")
    assert result.projects_1 == 0.0
    assert result.projects_2 == pytest.approx(5.0)


def test_boom_then_bust():
    result = first_path("boom-bust")
    assert result.projects_2 == 0.0
    assert result.lending_capital_2 == 0.0
    assert result.securities_sold > 0.0
    assert result.price_1 > result.price_2


def test_bust_then_boom_sells_held_loans_into_the_rally():
    result = first_path("bust-boom")
    assert result.regime_1 == "underpriced"
    assert result.regime_2 == "overpriced"
    assert "t1:lend-hold" in result.actions
    assert "t2:securitize-held" in result.actions
    assert result.securities_sold > 0.0


def test_foreseen_boom_after_a_bust_waits_for_t2():
    result = first_path("bust-boom-foreseen")
    assert result.projects_1 == 0.0
    assert result.projects_2 == pytest.approx(5.0)
    assert result.price_2 == pytest.approx(1.65)


@pytest.mark.parametrize("seed", range(5))
def test_levered_book_is_sold_down(seed):
    result = first_path("leverage-firesale", seed)
    config = preset_config("leverage-firesale")
    assert result.projects_1 == pytest.approx(25.0)
    assert result.liquidation_S > 0.0
    assert result.price_2 < config.fundamental
    assert "t2:fire-sale" in result.actions


@pytest.mark.parametrize("seed", range(100))
def test_negative_basis_crowds_out_lending(seed):
    config = preset_config("cds-negative-basis")
    stressed = run_path(config, path_rng(seed, 0))
    fair = run_path(preset_config("cds-fair"), path_rng(seed, 0))
    assert stressed.projects_financed < fair.projects_financed
    assert stressed.projects_financed == 0.0
    assert stressed.cds_naked == pytest.approx(config.E0 / config.spread, abs=1e-12)


def test_fair_cds_keeps_baseline_funding():
    assert first_path("cds-fair").projects_financed == pytest.approx(first_path("baseline").projects_financed)


def test_positive_basis_moves_capital_into_protection():
    result = first_path("cds-positive-basis")
    assert result.cds_sold > 0.0
    assert result.projects_financed < first_path("cds-fair").projects_financed


def test_mild_overpricing_is_hedged_not_sold():
    result = first_path("hedge-vs-securitize")
    assert "t1:lend-hedge" in result.actions
    assert "t2:lend-hedge" in result.actions
    assert result.securities_sold == 0.0
    assert result.cds_hedged > 0.0
