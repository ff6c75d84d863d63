from base_credit_node import BaseCreditNode
from griptape_nodes.exe_types.core_types import Parameter, ParameterMode
from griptape_nodes.retained_mode.griptape_nodes import logger

from engine import path_rng, run_path
from errors import CreditCycleError


class CreditRunPath(BaseCreditNode):
    """Simulates one three-period path and shows every decision the bank took on it."""

    def __init__(self, **kwargs) -> None:
        super().__init__(**kwargs)
        self._add_scenario_input()

        self.add_parameter(
            Parameter(
                name="seed",
                type="int",
                default_value=self._get_credit_settings()["seed"],
                tooltip="Master seed; the path draws from its own stream of this seed",
                allowed_modes={ParameterMode.INPUT, ParameterMode.PROPERTY},
            )
        )
        self.add_parameter(
            Parameter(
                name="path_index",
                type="int",
                default_value=0,
                tooltip="Which path of a Monte Carlo run to reproduce",
                allowed_modes={ParameterMode.INPUT, ParameterMode.PROPERTY},
            )
        )
        self.add_parameter(
            Parameter(
                name="path_result",
                type="json",
                default_value={},
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Every recorded quantity of the path",
                ui_options={"hide_property": True},
            )
        )
        self.add_parameter(
            Parameter(
                name="x",
                type="float",
                default_value=0.0,
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Share of lending capital committed at t=1",
            )
        )
        self.add_parameter(
            Parameter(
                name="projects_financed",
                type="float",
                default_value=0.0,
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Projects financed at t=1 and t=2",
            )
        )
        self.add_parameter(
            Parameter(
                name="outcome",
                type="str",
                default_value="",
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="ok, negative-price, wipeout or insolvent",
            )
        )
        self.add_parameter(
            Parameter(
                name="actions",
                type="str",
                default_value="",
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Actions taken, one per line",
                ui_options={"multiline": True},
            )
        )

    def process(self) -> None:
        seed = int(self.get_parameter_value("seed") or 0)
        path_index = int(self.get_parameter_value("path_index") or 0)
        if path_index < 0:
            logger.error(f"{self.name}: path_index must be nonnegative, got {path_index}")
            return

        try:
            config = self._get_scenario()
            result = run_path(config, path_rng(seed, path_index), path_index)
        except CreditCycleError as e:
            logger.error(f"{self.name}: Path simulation failed: {e}")
            return

        self._set_outputs(
            {
                "path_result": result.to_record(),
                "x": result.x,
                "projects_financed": result.projects_financed,
                "outcome": result.outcome.value,
                "actions": "\n".join(result.actions),
            }
        )
        logger.info(f"{self.name}: path {path_index} {result.outcome.value}, x={result.x:.4g}")
