from typing import Any

from base_credit_node import BaseCreditNode
from griptape_nodes.exe_types.core_types import (
    NodeMessageResult,
    Parameter,
    ParameterGroup,
    ParameterMessage,
    ParameterMode,
)
from griptape_nodes.retained_mode.griptape_nodes import logger
from griptape_nodes.traits.button import Button, ButtonDetailsMessagePayload, OnClickMessageResultPayload
from griptape_nodes.traits.options import Options

from errors import CreditCycleError
from presets import PRESETS, get_preset
from scenario_config import ScenarioConfig, config_from_text, describe_config, emit_config, parse_config

NO_PRESET_CHOICE = "defaults"
PRESET_CHOICES = [NO_PRESET_CHOICE, *PRESETS]


class CreditScenarioConfiguration(BaseCreditNode):
    """Builds and validates a credit-cycle scenario from a preset, a config file and overrides."""

    def __init__(self, **kwargs) -> None:
        super().__init__(**kwargs)

        # Step 1: starting point
        with ParameterGroup(name="Step_1_Preset") as preset_group:
            Parameter(
                name="preset",
                type="str",
                default_value=NO_PRESET_CHOICE,
                tooltip="Named scenario to start from",
                allowed_modes={ParameterMode.PROPERTY},
                traits={Options(choices=PRESET_CHOICES)},
            )
            Parameter(
                name="preset_description",
                type="str",
                default_value="",
                tooltip="What the selected preset reproduces",
                allowed_modes={ParameterMode.PROPERTY},
                ui_options={"multiline": True, "is_full_width": True},
            )
        self.add_node_element(preset_group)

        # Step 2: config file and overrides
        with ParameterGroup(name="Step_2_Config_And_Overrides") as overrides_group:
            ParameterMessage(
                name="step2_message",
                value="Optionally load a config file (local path or http(s) URL), then override single keys.\n\n"
                "Write one 'key = value' per line, for example:\n"
                "psi_1 = -0.85\nsecuritization = true\n\nUnknown keys are rejected.",
                variant="none",
            )
            Parameter(
                name="config_source",
                type="str",
                default_value="",
                tooltip="Path or http(s) URL of a config file applied over the preset",
                allowed_modes={ParameterMode.INPUT, ParameterMode.PROPERTY},
                ui_options={"placeholder_text": "scenarios/boom.txt"},
            )
            Parameter(
                name="overrides",
                type="str",
                default_value="",
                tooltip="key = value lines applied last",
                allowed_modes={ParameterMode.INPUT, ParameterMode.PROPERTY},
                ui_options={"multiline": True, "placeholder_text": "sigma = 0.0"},
            )
        self.add_node_element(overrides_group)

        # Step 3: Check Configuration
        with ParameterGroup(name="Step_3_Check_Configuration") as check_config_group:
            ParameterMessage(
                name="step3_message",
                value="Click the button below to validate the scenario and see its derived prices.",
                button_text="Check Configuration",
                variant="none",
                button_icon="check-circle",
                traits={
                    Button(
                        label="Check Configuration",
                        icon="check-circle",
                        on_click=self._check_configuration,
                        full_width=True,
                    )
                },
            )
            Parameter(
                name="configuration_status",
                type="str",
                default_value="",
                tooltip="Validation result for the scenario",
                allowed_modes={ParameterMode.PROPERTY, ParameterMode.OUTPUT},
                ui_options={"multiline": True, "is_full_width": True, "placeholder_text": "Configuration status..."},
            )
        self.add_node_element(check_config_group)

        self.add_parameter(
            Parameter(
                name="scenario_name",
                type="str",
                default_value="",
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Name used for run bundles",
            )
        )
        self.add_parameter(
            Parameter(
                name="scenario_config",
                type="str",
                default_value="",
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Canonical config text of the validated scenario",
                ui_options={"multiline": True},
            )
        )
        self.add_parameter(
            Parameter(
                name="derived",
                type="json",
                default_value={},
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Fee, skin in the game, fundamental price, CDS spread and basis",
                ui_options={"hide_property": True},
            )
        )

    def after_value_set(self, parameter: Parameter, value: Any) -> None:
        if parameter.name == "preset":
            description = ""
            if value and value != NO_PRESET_CHOICE:
                preset = PRESETS.get(value)
                if preset is not None:
                    description = f"{preset.situation}\nExpected: {preset.expected}"
            self.set_parameter_value("preset_description", description)
            self.publish_update_to_parameter("preset_description", description)
        return super().after_value_set(parameter, value)

    def _build_scenario(self) -> tuple[str, ScenarioConfig]:
        preset_name = self.get_parameter_value("preset") or NO_PRESET_CHOICE
        source = (self.get_parameter_value("config_source") or "").strip() or None
        overrides = self.get_parameter_value("overrides") or ""

        base = None if preset_name == NO_PRESET_CHOICE else get_preset(preset_name).config()
        config = parse_config(source, None, base=base)
        if overrides.strip():
            config = config_from_text(overrides, base=config)

        name = preset_name if preset_name != NO_PRESET_CHOICE else "custom"
        if overrides.strip() or source:
            name = f"{name}-custom"
        return name, config

    def _check_configuration(self, button: Button, button_details: ButtonDetailsMessagePayload) -> NodeMessageResult:  # noqa: ARG002
        """Validate the scenario when the button is clicked."""
        try:
            name, config = self._build_scenario()
        except (CreditCycleError, OSError) as e:
            status_message = f"❌ Scenario is invalid: {e!s}\n\n"
            field = getattr(e, "field", None)
            if field:
                status_message += f"• Check the '{field}' key\n"
            status_message += "• Keys and allowed values are listed in the README"

            self.set_parameter_value("configuration_status", status_message)
            response = OnClickMessageResultPayload(button_details=button_details)
            return NodeMessageResult(success=False, details=f"Scenario invalid: {e!s}", response=response)

        derived = describe_config(config)
        status_message = f"✅ Scenario '{name}' is valid!\n\n"
        status_message += f"• Fee f = {derived['fee']:.6g}\n"
        status_message += f"• Skin in the game d = {derived['skin_in_game']:.6g}\n"
        status_message += f"• Fundamental price P = {derived['fundamental_price']:.6g}\n"
        status_message += f"• CDS spread s = {derived['cds_spread']:.6g} (basis {derived['cds_basis']:+.6g})\n"
        status_message += f"• t=1 sentiment psi = {config.sentiment.psi:.6g} ({config.sentiment.mood})"

        self.set_parameter_value("configuration_status", status_message)
        response = OnClickMessageResultPayload(button_details=button_details)
        return NodeMessageResult(success=True, details="Scenario is valid", response=response)

    def process(self) -> None:
        try:
            name, config = self._build_scenario()
        except (CreditCycleError, OSError) as e:
            logger.error(f"{self.name}: Invalid scenario: {e}")
            self._set_outputs({"configuration_status": f"❌ {e!s}"})
            return

        logger.info(f"{self.name}: Scenario '{name}' ready")
        self._set_outputs(
            {
                "scenario_name": name,
                "scenario_config": emit_config(config),
                "derived": describe_config(config),
                "configuration_status": f"✅ Scenario '{name}' is valid",
            }
        )

