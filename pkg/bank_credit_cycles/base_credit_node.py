from typing import Any

from griptape_nodes.exe_types.core_types import Parameter, ParameterMode
from griptape_nodes.exe_types.node_types import ControlNode
from griptape_nodes.retained_mode.events.parameter_events import SetParameterValueRequest
from griptape_nodes.retained_mode.griptape_nodes import GriptapeNodes, logger

from scenario_config import ScenarioConfig, config_from_text

DEFAULT_OUTPUT_DIR = "runs"
DEFAULT_SEED = 0


class BaseCreditNode(ControlNode):
    """Base class for credit-cycle nodes: library settings and the scenario input."""

    SERVICE = "CreditCycles"
    OUTPUT_DIR_VAR = "CREDIT_CYCLES_OUTPUT_DIR"
    DEFAULT_SEED_VAR = "CREDIT_CYCLES_DEFAULT_SEED"

    def _get_credit_settings(self) -> dict:
        """Output directory and default seed from the library settings."""
        output_dir = GriptapeNodes.SecretsManager().get_secret(self.OUTPUT_DIR_VAR) or DEFAULT_OUTPUT_DIR
        raw_seed = GriptapeNodes.SecretsManager().get_secret(self.DEFAULT_SEED_VAR)

        seed = DEFAULT_SEED
        if raw_seed:
            try:
                seed = int(raw_seed)
            except ValueError:
                logger.warning(f"{self.DEFAULT_SEED_VAR} is not an integer ('{raw_seed}'), using {DEFAULT_SEED}")

        return {
            "output_dir": output_dir,
            "seed": seed,
        }

    def _add_scenario_input(self) -> None:
        self.add_parameter(
            Parameter(
                name="scenario_config",
                type="str",
                default_value="",
                tooltip="Scenario config text from a Scenario Configuration or List Presets node. Empty means defaults.",
                allowed_modes={ParameterMode.INPUT, ParameterMode.PROPERTY},
                ui_options={"multiline": True, "placeholder_text": "theta = 0.2\nsecuritization = true"},
            )
        )

    def _get_scenario(self) -> ScenarioConfig:
        """Validated scenario from the scenario_config input."""
        text = self.get_parameter_value("scenario_config") or ""
        return config_from_text(text)

    def _set_outputs(self, values: dict[str, Any]) -> None:
        for param_name, value in values.items():
            GriptapeNodes.handle_request(
                SetParameterValueRequest(parameter_name=param_name, value=value, node_name=self.name)
            )
            self.parameter_output_values[param_name] = value
            self.publish_update_to_parameter(param_name, value)
