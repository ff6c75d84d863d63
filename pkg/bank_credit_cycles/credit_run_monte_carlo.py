from base_credit_node import BaseCreditNode
from griptape_nodes.exe_types.core_types import Parameter, ParameterMode
from griptape_nodes.exe_types.node_types import AsyncResult
from griptape_nodes.exe_types.param_components.progress_bar_component import ProgressBarComponent
from griptape_nodes.exe_types.param_types.parameter_bool import ParameterBool
from griptape_nodes.exe_types.param_types.parameter_string import ParameterString
from griptape_nodes.retained_mode.griptape_nodes import logger

from engine import COMPARE_METRICS, run_monte_carlo
from errors import ConfigValidationError
from output_utils import format_summary, write_bundle

DEFAULT_PATHS = 1000


class CreditRunMonteCarlo(BaseCreditNode):
    """Runs many independent paths of a scenario and writes a reproducible run bundle."""

    def __init__(self, **kwargs) -> None:
        super().__init__(**kwargs)
        settings = self._get_credit_settings()
        self._add_scenario_input()

        self.add_parameter(
            ParameterString(
                name="scenario_name",
                default_value="custom",
                tooltip="Name of the scenario, used for the bundle directory",
            )
        )
        self.add_parameter(
            Parameter(
                name="n_paths",
                type="int",
                default_value=DEFAULT_PATHS,
                tooltip="Number of independent paths",
                allowed_modes={ParameterMode.INPUT, ParameterMode.PROPERTY},
            )
        )
        self.add_parameter(
            Parameter(
                name="seed",
                type="int",
                default_value=settings["seed"],
                tooltip="Master seed; the same seed and config give identical results",
                allowed_modes={ParameterMode.INPUT, ParameterMode.PROPERTY},
            )
        )
        self.add_parameter(
            Parameter(
                name="workers",
                type="int",
                default_value=1,
                tooltip="Worker processes; results do not depend on it",
                allowed_modes={ParameterMode.PROPERTY},
            )
        )
        self.add_parameter(
            ParameterBool(
                name="write_bundle",
                default_value=True,
                tooltip="Write paths, summary, manifest and config to the output directory",
            )
        )
        self.add_parameter(
            ParameterString(
                name="output_dir",
                default_value=settings["output_dir"],
                tooltip="Directory that receives run bundles",
            )
        )

        self.progress_bar_component = ProgressBarComponent(self)
        self.progress_bar_component.add_property_parameters()

        self.add_parameter(
            ParameterString(
                name="run_status",
                default_value="",
                tooltip="Status of the run",
                allowed_modes={ParameterMode.OUTPUT},
            )
        )
        self.add_parameter(
            ParameterString(
                name="summary_text",
                default_value="",
                tooltip="Summary table of the run",
                allowed_modes={ParameterMode.OUTPUT},
                multiline=True,
            )
        )
        self.add_parameter(
            Parameter(
                name="summary",
                type="json",
                default_value={},
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Outcome counts and mean, std and quantiles of every metric",
                ui_options={"hide_property": True},
            )
        )
        self.add_parameter(
            Parameter(
                name="metric_means",
                type="json",
                default_value={},
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Means of the headline metrics",
                ui_options={"hide_property": True},
            )
        )
        self.add_parameter(
            ParameterString(
                name="bundle_dir",
                default_value="",
                tooltip="Directory of the written bundle",
                allowed_modes={ParameterMode.OUTPUT},
            )
        )

    def process(self) -> AsyncResult[None]:
        """Validate, simulate, then write the bundle, with progress tracking."""
        try:
            n_paths = int(self.get_parameter_value("n_paths") or 0)
            seed = int(self.get_parameter_value("seed") or 0)
            workers = int(self.get_parameter_value("workers") or 1)
            name = (self.get_parameter_value("scenario_name") or "custom").strip() or "custom"

            self.progress_bar_component.initialize(total_steps=3)

            def _validate() -> None:
                self.progress_bar_component.increment()
                self.publish_update_to_parameter("run_status", "Validating scenario...")
                if n_paths < 1:
                    raise ConfigValidationError(f"n_paths must be at least 1, got {n_paths}", field="paths")
                self._config = self._get_scenario()

            yield _validate

            def _simulate() -> None:
                self.progress_bar_component.increment()
                self.publish_update_to_parameter("run_status", f"Simulating {n_paths} paths...")
                logger.info(f"{self.name}: Running '{name}' for {n_paths} paths, seed {seed}")
                self._summary = run_monte_carlo(self._config, n_paths, seed, workers)

            yield _simulate

            def _finalize() -> None:
                self.progress_bar_component.increment()
                summary = self._summary
                bundle_dir = ""
                if self.get_parameter_value("write_bundle"):
                    self.publish_update_to_parameter("run_status", "Writing bundle...")
                    output_dir = self.get_parameter_value("output_dir") or self._get_credit_settings()["output_dir"]
                    bundle_dir = str(write_bundle(output_dir, name, self._config, summary))

                self._set_outputs(
                    {
                        "summary_text": format_summary(summary, name),
                        "summary": {"name": name, **summary.to_dict()},
                        "metric_means": {m: summary.metric(m) for m in COMPARE_METRICS},
                        "bundle_dir": bundle_dir,
                        "run_status": "Success",
                    }
                )
                logger.info(f"{self.name}: Finished '{name}', outcomes {summary.outcomes}")

            yield _finalize

        except Exception as e:
            error_msg = f"Error running scenario: {e}"
            logger.error(f"{self.name}: {error_msg}")
            self._set_outputs({"run_status": error_msg})
