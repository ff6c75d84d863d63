from base_credit_node import BaseCreditNode
from griptape_nodes.exe_types.core_types import Parameter, ParameterMode
from griptape_nodes.retained_mode.griptape_nodes import logger

from engine import COMPARE_METRICS, compare_scenarios
from errors import CreditCycleError
from output_utils import format_table
from presets import get_preset
from scenario_config import ScenarioConfig, config_from_text


class CreditCompareScenarios(BaseCreditNode):
    """Runs several scenarios on the same seeds and tabulates their headline metrics."""

    def __init__(self, **kwargs) -> None:
        super().__init__(**kwargs)

        self.add_parameter(
            Parameter(
                name="presets",
                type="str",
                default_value="baseline, securitization-fair",
                tooltip="Comma-separated preset names to compare",
                allowed_modes={ParameterMode.INPUT, ParameterMode.PROPERTY},
            )
        )
        self.add_parameter(
            Parameter(
                name="scenarios",
                type="json",
                default_value={},
                tooltip="Extra scenarios as {name: config text}, compared after the presets",
                allowed_modes={ParameterMode.INPUT},
            )
        )
        self.add_parameter(
            Parameter(
                name="n_paths",
                type="int",
                default_value=100,
                tooltip="Paths per scenario",
                allowed_modes={ParameterMode.INPUT, ParameterMode.PROPERTY},
            )
        )
        self.add_parameter(
            Parameter(
                name="seed",
                type="int",
                default_value=self._get_credit_settings()["seed"],
                tooltip="Master seed shared by every scenario",
                allowed_modes={ParameterMode.INPUT, ParameterMode.PROPERTY},
            )
        )
        self.add_parameter(
            Parameter(
                name="metrics",
                type="str",
                default_value=", ".join(COMPARE_METRICS),
                tooltip="Comma-separated metrics to tabulate",
                allowed_modes={ParameterMode.PROPERTY},
            )
        )
        self.add_parameter(
            Parameter(
                name="comparison",
                type="json",
                default_value=[],
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="One record of metric means per scenario",
                ui_options={"hide_property": True},
            )
        )
        self.add_parameter(
            Parameter(
                name="comparison_text",
                type="str",
                default_value="",
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="The comparison as an aligned table",
                ui_options={"multiline": True},
            )
        )

    def _collect_scenarios(self) -> list[tuple[str, ScenarioConfig]]:
        names = [n.strip() for n in (self.get_parameter_value("presets") or "").split(",") if n.strip()]
        items = [(name, get_preset(name).config()) for name in names]
        extra = self.get_parameter_value("scenarios") or {}
        items.extend((str(name), config_from_text(text)) for name, text in extra.items())
        return items

    def process(self) -> None:
        n_paths = int(self.get_parameter_value("n_paths") or 1)
        seed = int(self.get_parameter_value("seed") or 0)
        metrics = [m.strip() for m in (self.get_parameter_value("metrics") or "").split(",")]

        try:
            scenarios = self._collect_scenarios()
            table = compare_scenarios(scenarios, n_paths=n_paths, seed=seed, metrics=metrics)
        except (CreditCycleError, ValueError) as e:
            logger.error(f"{self.name}: Comparison failed: {e}")
            return

        self._set_outputs(
            {
                "comparison": table.reset_index().to_dict(orient="records"),
                "comparison_text": format_table(table),
            }
        )
        logger.info(f"{self.name}: Compared {len(table)} scenario(s) over {n_paths} path(s)")
