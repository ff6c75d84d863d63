"""Scenario configuration: the typed config tree and its flat ``key = value`` text format.

A config file looks like::

    # overpriced securitization market at t=1
    securitization = true
    psi_1 = -0.85
    sentiment_shift = 0.85
    sigma = 0.0

Every key is optional and unknown keys are rejected, so a typo never silently falls back to
a default. Configs can be read from a local path or fetched from an http(s) URL.
"""

import logging
import math
from dataclasses import dataclass, field, fields
from enum import StrEnum
from pathlib import Path
from typing import Any

import httpx

from bank import RegulatoryParams, SettlementMode
from errors import ConfigParseError, ConfigValidationError, FeeTooLargeError
from instruments import (
    CdsTerms,
    FeeMode,
    FeeModel,
    Project,
    SkinModel,
    cds_basis,
    fundamental_price,
    market_cds_spread,
    origination_fee,
    skin_in_game,
)
from market import DEFAULT_EPS, SentimentState, ShockDistribution
from strategy import IndifferencePolicy, ModeFlags

logger = logging.getLogger(__name__)

FETCH_TIMEOUT_SECONDS = 10.0


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one simulated economy needs. Validated as a whole on construction."""

    project: Project = field(default_factory=Project)
    fee_model: FeeModel = field(default_factory=FeeModel)
    skin_model: SkinModel = field(default_factory=SkinModel)
    cds_terms: CdsTerms = field(default_factory=CdsTerms)
    regulatory: RegulatoryParams = field(default_factory=RegulatoryParams)
    sentiment: SentimentState = field(default_factory=SentimentState)
    flags: ModeFlags = field(default_factory=ModeFlags)
    E0: float = 1.0
    cds_mispricing_shock: float = 0.0
    sentiment_shift: float = 0.0
    fire_sale_impact: float = 0.0
    eps: float = DEFAULT_EPS

    def __post_init__(self) -> None:
        if not self.E0 > 0.0:
            raise ConfigValidationError(f"E0 must be positive: {self.E0}", field="E0")
        if not self.eps > 0.0:
            raise ConfigValidationError(f"eps must be positive: {self.eps}", field="eps")
        if self.fire_sale_impact < 0.0:
            raise ConfigValidationError(
                f"fire_sale_impact must be nonnegative: {self.fire_sale_impact}", field="fire_sale_impact"
            )
        if self.flags.leverage and self.regulatory.h <= self.project.theta:
            raise ConfigValidationError(
                f"leverage requires h > θ (haircut above the default probability): "
                f"h={self.regulatory.h}, theta={self.project.theta}",
                field="h",
            )
        try:
            origination_fee(self.project, self.fee_model)
        except FeeTooLargeError as e:
            raise ConfigValidationError(str(e), field="theta") from e
        if self.sentiment.psi >= self.fundamental:
            raise ConfigValidationError(
                f"psi_1 = {self.sentiment.psi} would clear the t=1 market at a non-positive price "
                f"(fundamental {self.fundamental})",
                field="psi_1",
            )
        if self.flags.naked_cds and self.spread <= 0.0:
            raise ConfigValidationError(
                "naked_cds needs a positive traded spread; raise cds_mispricing_shock", field="cds_mispricing_shock"
            )

    @property
    def fee(self) -> float:
        return origination_fee(self.project, self.fee_model)

    @property
    def d(self) -> float:
        return skin_in_game(self.project, self.skin_model)

    @property
    def fundamental(self) -> float:
        return fundamental_price(self.project)

    @property
    def spread(self) -> float:
        return market_cds_spread(self.project, self.cds_terms, self.cds_mispricing_shock)

    @property
    def terms(self) -> CdsTerms:
        """CDS terms at the traded spread."""
        return self.cds_terms.with_spread(self.spread)

    def to_flat(self) -> dict[str, Any]:
        values = {}
        for key, (component, attr, _) in CONFIG_FIELDS.items():
            owner = self if component is None else getattr(self, component)
            values[key] = getattr(owner, attr)
        return values

    def replace_keys(self, updates: dict[str, Any]) -> "ScenarioConfig":
        return from_flat({**self.to_flat(), **updates})


# key -> (component attribute on ScenarioConfig or None for top level, field name, value type)
CONFIG_FIELDS: dict[str, tuple[str | None, str, type]] = {
    "theta": ("project", "theta", float),
    "payoff_good": ("project", "payoff_good", float),
    "payoff_bad": ("project", "payoff_bad", float),
    "alpha": ("fee_model", "alpha", float),
    "fee_mode": ("fee_model", "mode", FeeMode),
    "d0": ("skin_model", "d0", float),
    "d1": ("skin_model", "d1", float),
    "d_floor": ("skin_model", "d_floor", float),
    "lgd": ("cds_terms", "lgd", float),
    "cds_mispricing_shock": (None, "cds_mispricing_shock", float),
    "e_req_1": ("regulatory", "e_req_1", float),
    "e_req_2": ("regulatory", "e_req_2", float),
    "g_1": ("regulatory", "g_1", float),
    "g_2": ("regulatory", "g_2", float),
    "payout_split": ("regulatory", "payout_split", float),
    "h": ("regulatory", "h", float),
    "psi_1": ("sentiment", "psi", float),
    "sigma": ("sentiment", "sigma", float),
    "distribution": ("sentiment", "distribution", ShockDistribution),
    "sentiment_shift": (None, "sentiment_shift", float),
    "E0": (None, "E0", float),
    "leverage": ("flags", "leverage", bool),
    "securitization": ("flags", "securitization", bool),
    "cds": ("flags", "cds", bool),
    "naked_cds": ("flags", "naked_cds", bool),
    "foresight": ("flags", "foresight", bool),
    "settlement": ("flags", "settlement", SettlementMode),
    "indifference_policy": ("flags", "indifference_policy", IndifferencePolicy),
    "fire_sale_impact": (None, "fire_sale_impact", float),
    "eps": (None, "eps", float),
}

_COMPONENT_TYPES = {f.name: f.default_factory for f in fields(ScenarioConfig) if callable(f.default_factory)}


def _typed(key: str, value: Any) -> Any:
    kind = CONFIG_FIELDS[key][2]
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigValidationError(f"{key} must be true or false, got {value!r}", field=key)
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, int | float):
            raise ConfigValidationError(f"{key} must be a number, got {value!r}", field=key)
        return float(value)
    try:
        return kind(value)
    except ValueError as e:
        choices = ", ".join(member.value for member in kind)
        raise ConfigValidationError(f"{key} must be one of {choices}, got {value!r}", field=key) from e


def from_flat(values: dict[str, Any]) -> ScenarioConfig:
    """Build a validated ScenarioConfig from flat keys; missing keys take their defaults."""
    unknown = sorted(set(values) - set(CONFIG_FIELDS))
    if unknown:
        raise ConfigValidationError(f"unknown config key '{unknown[0]}'", field=unknown[0])

    grouped: dict[str | None, dict[str, Any]] = {}
    for key, value in values.items():
        component, attr, _ = CONFIG_FIELDS[key]
        grouped.setdefault(component, {})[attr] = _typed(key, value)

    top = grouped.pop(None, {})
    components = {name: factory(**grouped.get(name, {})) for name, factory in _COMPONENT_TYPES.items()}
    return ScenarioConfig(**components, **top)


def coerce_value(key: str, raw: str, line: int | None = None) -> Any:
    """Turn the text of one value into the type its key expects."""
    if key not in CONFIG_FIELDS:
        raise ConfigParseError(f"unknown key '{key}'", line=line, field=key)
    kind = CONFIG_FIELDS[key][2]
    text = raw.strip()
    if kind is bool:
        lowered = text.lower()
        if lowered not in ("true", "false"):
            raise ConfigParseError(f"{key} expects true or false, got '{text}'", line=line, field=key)
        return lowered == "true"
    if kind is float:
        try:
            number = float(text)
        except ValueError:
            raise ConfigParseError(f"{key} expects a number, got '{text}'", line=line, field=key) from None
        if not math.isfinite(number):
            raise ConfigParseError(f"{key} must be finite, got '{text}'", line=line, field=key)
        return number
    try:
        return kind(text)
    except ValueError:
        choices = ", ".join(member.value for member in kind)
        raise ConfigParseError(f"{key} expects one of {choices}, got '{text}'", line=line, field=key) from None


def _split_assignment(text: str, line: int | None) -> tuple[str, str]:
    key, sep, raw = text.partition("=")
    if not sep or not key.strip():
        raise ConfigParseError(f"expected 'key = value', got '{text.strip()}'", line=line)
    return key.strip(), raw


def parse_config_text(text: str) -> dict[str, Any]:
    """Read flat config text into typed values, without filling defaults."""
    values: dict[str, Any] = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        content = raw_line.split("#", 1)[0].strip()
        if not content:
            continue
        key, raw = _split_assignment(content, number)
        if key in values:
            raise ConfigParseError(f"duplicate key '{key}'", line=number, field=key)
        values[key] = coerce_value(key, raw, number)
    return values


def parse_overrides(assignments: list[str] | None) -> dict[str, Any]:
    """Typed values from repeated ``key=value`` command-line assignments; later ones win."""
    values: dict[str, Any] = {}
    for assignment in assignments or []:
        key, raw = _split_assignment(assignment, None)
        values[key] = coerce_value(key, raw)
    return values


def read_config_source(source: str | Path) -> str:
    """Config text from a local path or an http(s) URL."""
    location = str(source)
    if location.startswith(("http://", "https://")):
        logger.info(f"Fetching scenario config from {location}")
        try:
            response = httpx.get(location, timeout=FETCH_TIMEOUT_SECONDS, follow_redirects=True)
            response.raise_for_status()
        except httpx.HTTPError as e:
            msg = f"could not fetch config from {location}: {e}"
            raise OSError(msg) from e
        return response.text
    return Path(location).read_text(encoding="utf-8")


def parse_config(
    source: str | Path | None = None,
    overrides: list[str] | dict[str, Any] | None = None,
    base: ScenarioConfig | None = None,
) -> ScenarioConfig:
    """Load, override and validate a scenario.

    Args:
        source: Local path or http(s) URL of a config file; None starts from ``base`` alone.
        overrides: ``key=value`` strings, or already-typed values, applied after the file.
        base: Config whose values fill every key the file leaves out (defaults if None).

    Returns:
        A fully validated ScenarioConfig.
    """
    values = (base or ScenarioConfig()).to_flat()
    if source is not None:
        values.update(parse_config_text(read_config_source(source)))
    if isinstance(overrides, dict):
        values.update(overrides)
    else:
        values.update(parse_overrides(overrides))
    return from_flat(values)


def config_from_text(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Validated config from config-file text already in memory."""
    values = (base or ScenarioConfig()).to_flat()
    values.update(parse_config_text(text))
    return from_flat(values)


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, StrEnum):
        return value.value
    return repr(float(value))


def emit_config(config: ScenarioConfig) -> str:
    """Canonical text for a config; parsing it back yields an equal config."""
    lines = ["# bank credit cycles scenario"]
    lines.extend(f"{key} = {_format_value(value)}" for key, value in config.to_flat().items())
    return "\n".join(lines) + "\n"


def describe_config(config: ScenarioConfig) -> dict[str, float]:
    """Derived quantities a reader wants next to the raw keys."""
    return {
        "fee": config.fee,
        "skin_in_game": config.d,
        "fundamental_price": config.fundamental,
        "cds_spread": config.spread,
        "cds_basis": cds_basis(config.terms, config.fee),
    }
