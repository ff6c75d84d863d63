from typing import Any

from base_credit_node import BaseCreditNode
from griptape_nodes.exe_types.core_types import Parameter, ParameterMode
from griptape_nodes.exe_types.param_types.parameter_string import ParameterString
from griptape_nodes.retained_mode.griptape_nodes import logger
from griptape_nodes.traits.options import Options

from presets import PRESETS, get_preset
from scenario_config import describe_config, emit_config

PRESET_CHOICES = list(PRESETS)


class CreditListPresets(BaseCreditNode):
    def __init__(self, **kwargs) -> None:
        super().__init__(**kwargs)

        self.add_parameter(
            Parameter(
                name="all_presets",
                type="json",
                default_value=[],
                tooltip="Every named scenario with the situation it reproduces.",
                allowed_modes={ParameterMode.PROPERTY, ParameterMode.OUTPUT},
                ui_options={"hide_property": True},
            )
        )
        self.add_parameter(
            Parameter(
                name="preset",
                type="string",
                default_value=PRESET_CHOICES[0],
                tooltip="Select a preset from the list.",
                allowed_modes={ParameterMode.PROPERTY},
                traits={Options(choices=PRESET_CHOICES)},
            )
        )
        self.add_parameter(
            ParameterString(
                name="preset_description",
                default_value=None,
                allow_input=False,
                allow_property=False,
                tooltip="Situation and expected outcome of the selected preset",
                placeholder_text="Description of the selected preset",
                multiline=True,
            )
        )
        self.add_parameter(
            Parameter(
                name="scenario_name",
                type="str",
                default_value="",
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Name of the selected preset",
            )
        )
        self.add_parameter(
            Parameter(
                name="scenario_config",
                type="str",
                default_value="",
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Config text of the selected preset",
                ui_options={"multiline": True},
            )
        )
        self.add_parameter(
            Parameter(
                name="preset_data",
                type="json",
                default_value={},
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Overrides and derived prices of the selected preset",
                ui_options={"hide_property": True},
            )
        )

    def after_value_set(self, parameter: Parameter, value: Any) -> None:
        if parameter.name == "preset" and value in PRESETS:
            preset = PRESETS[value]
            description = f"{preset.situation}\nExpected: {preset.expected}"
            self.publish_update_to_parameter("preset_description", description)
        return super().after_value_set(parameter, value)

    def process(self) -> None:
        try:
            all_presets = [
                {"name": p.name, "situation": p.situation, "expected": p.expected} for p in PRESETS.values()
            ]
            preset = get_preset(self.get_parameter_value("preset") or PRESET_CHOICES[0])
            config = preset.config()

            self._set_outputs(
                {
                    "all_presets": all_presets,
                    "preset_description": f"{preset.situation}\nExpected: {preset.expected}",
                    "scenario_name": preset.name,
                    "scenario_config": emit_config(config),
                    "preset_data": {"overrides": dict(preset.overrides), "derived": describe_config(config)},
                }
            )
            logger.info(f"{self.name}: Selected preset '{preset.name}' of {len(all_presets)}")
        except Exception as e:
            logger.error(f"{self.name}: Failed to list presets: {e}")
