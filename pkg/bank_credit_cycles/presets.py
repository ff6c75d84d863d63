"""Named scenarios, each reproducing one situation of the credit-cycle model."""

from dataclasses import dataclass, field
from typing import Any

from errors import ConfigValidationError
from scenario_config import ScenarioConfig, from_flat


@dataclass(frozen=True)
class Preset:
    name: str
    situation: str
    expected: str
    overrides: dict[str, Any] = field(default_factory=dict)

    def config(self) -> ScenarioConfig:
        return from_flat(dict(self.overrides))


_CALM = {"sigma": 0.0}

PRESETS: dict[str, Preset] = {
    p.name: p
    for p in (
        Preset(
            "baseline",
            "Fairly priced markets in both periods, loans held to maturity",
            "x = 0.5, cyclicity 0, N = E0",
            {**_CALM},
        ),
        Preset(
            "securitization-fair",
            "Originate and distribute at fair prices",
            "x = 0.5, N = E0 / d",
            {**_CALM, "securitization": True},
        ),
        Preset(
            "overpricing-t1",
            "Optimistic noise traders overprice securitized loans at t=1 only",
            "x = 1, cyclicity 1",
            {**_CALM, "securitization": True, "psi_1": -0.85, "sentiment_shift": 0.85},
        ),
        Preset(
            "overpricing-t2",
            "Overpricing at t=2 only, foreseen by the bank",
            "x = 0, all origination at t=2",
            {**_CALM, "securitization": True, "sentiment_shift": -0.85, "foresight": True},
        ),
        Preset(
            "overpricing-both",
            "Overpricing in both periods without foresight",
            "x = 1",
            {**_CALM, "securitization": True, "psi_1": -0.85},
        ),
        Preset(
            "underpricing-t1",
            "Pessimism at t=1 that fades by t=2",
            "x = 0.5, no securities sold",
            {**_CALM, "psi_1": 0.3, "sentiment_shift": -0.3},
        ),
        Preset(
            "underpricing-t2-a",
            "Pessimism arrives at t=2; the bank lent everything at t=1",
            "x = 1",
            {**_CALM, "sentiment_shift": 0.3, "indifference_policy": "front-load"},
        ),
        Preset(
            "underpricing-t2-b",
            "Pessimism arrives at t=2; the bank kept half its funds and buys distressed securities",
            "distressed purchases at t=2, 0.5 < x < 1",
            {**_CALM, "securitization": True, "sentiment_shift": 0.3, "indifference_policy": "even-split"},
        ),
        Preset(
            "underpricing-t2-c",
            "Pessimism arrives at t=2; the bank waited and lends everything then",
            "x = 0",
            {**_CALM, "sentiment_shift": 0.3, "indifference_policy": "back-load"},
        ),
        Preset(
            "underpricing-both-a",
            "Persistent pessimism, the bank lends everything at t=1",
            "x = 1",
            {**_CALM, "psi_1": 0.3, "indifference_policy": "front-load"},
        ),
        Preset(
            "underpricing-both-b",
            "Persistent pessimism with nothing outstanding to buy back",
            "x = 0.5, no purchases",
            {**_CALM, "securitization": True, "psi_1": 0.3, "indifference_policy": "even-split"},
        ),
        Preset(
            "underpricing-both-c",
            "Persistent pessimism, the bank lends everything at t=2",
            "x = 0",
            {**_CALM, "psi_1": 0.3, "indifference_policy": "back-load"},
        ),
        Preset(
            "boom-bust",
            "Overvaluation at t=1 followed by undervaluation at t=2",
            "x = 1, all origination and sales at t=1, no lending at t=2",
            {**_CALM, "securitization": True, "psi_1": -0.85, "sentiment_shift": 1.15},
        ),
        Preset(
            "bust-boom",
            "Undervaluation at t=1 followed by overvaluation at t=2, not foreseen",
            "x = 0.5, loans held at t=1 are securitized into the t=2 rally",
            {**_CALM, "securitization": True, "psi_1": 0.3, "sentiment_shift": -1.15},
        ),
        Preset(
            "bust-boom-foreseen",
            "Undervaluation at t=1 followed by a foreseen overvaluation at t=2",
            "x = 0, all origination and sales at t=2",
            {**_CALM, "securitization": True, "psi_1": 0.3, "sentiment_shift": -1.15, "foresight": True},
        ),
        Preset(
            "leverage-firesale",
            "Levered securitization at t=1, then a price fall forces collateral sales",
            "N = 25 E0 at t=1, S > 0, P_2 < P",
            {
                "theta": 0.1,
                "d0": 0.15,
                "securitization": True,
                "leverage": True,
                "h": 0.2,
                "g_1": 0.0,
                "g_2": 0.0,
                "indifference_policy": "front-load",
                "sentiment_shift": 0.12,
                "sigma": 0.02,
                "distribution": "two-point",
            },
        ),
        Preset(
            "cds-fair",
            "Fairly priced CDS: lending and selling protection earn the same",
            "same funding to entrepreneurs as the baseline",
            {"cds": True},
        ),
        Preset(
            "cds-positive-basis",
            "CDS spread above the loan fee, as in normal times",
            "capital moves into protection sales, funding falls",
            {"cds": True, "cds_mispricing_shock": 0.05},
        ),
        Preset(
            "cds-negative-basis",
            "CDS spread below the loan fee, as under stress, with naked protection allowed",
            "E0 / s naked contracts, no projects financed",
            {"cds": True, "naked_cds": True, "cds_mispricing_shock": -0.1},
        ),
        Preset(
            "naked-cds-stress",
            "Deep negative basis while sentiment turns pessimistic",
            "naked protection, no projects financed",
            {
                "cds": True,
                "naked_cds": True,
                "cds_mispricing_shock": -0.15,
                "sentiment_shift": 0.3,
                "sigma": 0.05,
            },
        ),
        Preset(
            "hedge-vs-securitize",
            "Mild overpricing of a high-quality loan with fairly priced CDS",
            "loans kept and hedged in both periods, N per period = budget / (1 + s)",
            {**_CALM, "cds": True, "securitization": True, "d0": 0.1, "d1": 0.0, "psi_1": -0.1},
        ),
    )
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(PRESETS)
        raise ConfigValidationError(f"unknown preset '{name}'; choose one of {known}", field="preset") from None


def preset_config(name: str) -> ScenarioConfig:
    return get_preset(name).config()
