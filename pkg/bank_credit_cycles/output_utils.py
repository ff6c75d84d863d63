"""Output bundles: writing a run to disk and reading runs back for reports.

A bundle is one directory named ``<scenario>-<stamp>`` where the stamp is a hash of the run
manifest, so repeating a run rewrites identical files in the same place.
"""

import hashlib
import json
import logging
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any

import pandas as pd

from engine import RunSummary
from errors import OutputBundleError
from scenario_config import ScenarioConfig, config_from_text, emit_config

logger = logging.getLogger(__name__)

PATHS_FILE = "paths.csv"
SUMMARY_JSON = "summary.json"
SUMMARY_TEXT = "summary.txt"
MANIFEST_FILE = "manifest.json"
CONFIG_FILE = "config.txt"

REPORT_COLUMNS = {
    "x": "x",
    "cyclicity": "cyclicity",
    "projects_financed": "funding to entrepreneurs",
    "output_proxy": "output",
    "liquidation_S": "liquidation S",
    "cds_naked": "naked CDS",
    "E_3": "final equity",
}


def package_version() -> str:
    try:
        return version("bank_credit_cycles")
    except PackageNotFoundError:
        return "0+unknown"


def build_manifest(name: str, config: ScenarioConfig, seed: int, n_paths: int) -> dict[str, Any]:
    """Everything needed to reproduce a run exactly."""
    return {
        "name": name,
        "config": emit_config(config),
        "seed": seed,
        "n_paths": n_paths,
        "version": package_version(),
    }


def run_stamp(manifest: dict[str, Any]) -> str:
    canonical = json.dumps(manifest, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:10]


def format_summary(summary: RunSummary, name: str) -> str:
    """Aligned text table of the run statistics."""
    header = f"{name}: {summary.n_paths} path(s), seed {summary.seed}"
    outcomes = ", ".join(f"{k}={v}" for k, v in summary.outcomes.items())
    table = summary.stats.to_string(float_format=lambda v: f"{v:.6g}")
    return f"{header}\noutcomes: {outcomes}\n\n{table}\n"


def write_bundle(out_dir: str | Path, name: str, config: ScenarioConfig, summary: RunSummary) -> Path:
    """Write every file of a run and return its directory.

    Raises:
        OutputBundleError: if the directory or a file cannot be written.
    """
    manifest = build_manifest(name, config, summary.seed, summary.n_paths)
    run_dir = Path(out_dir) / f"{name}-{run_stamp(manifest)}"
    try:
        run_dir.mkdir(parents=True, exist_ok=True)
        summary.records.to_csv(run_dir / PATHS_FILE, index=False, lineterminator="\n")
        (run_dir / SUMMARY_JSON).write_text(
            json.dumps({"name": name, **summary.to_dict()}, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        (run_dir / SUMMARY_TEXT).write_text(format_summary(summary, name), encoding="utf-8")
        (run_dir / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        (run_dir / CONFIG_FILE).write_text(manifest["config"], encoding="utf-8")
    except OSError as e:
        raise OutputBundleError(f"could not write bundle {run_dir}: {e}") from e

    logger.info(f"Wrote run bundle to {run_dir}")
    return run_dir


def _read_json(bundle: Path, filename: str) -> dict[str, Any]:
    path = bundle / filename
    if not path.is_file():
        raise OutputBundleError(f"{bundle}: missing {filename}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise OutputBundleError(f"{path}: not valid JSON ({e})") from e


def read_summary(bundle: str | Path) -> dict[str, Any]:
    return _read_json(Path(bundle), SUMMARY_JSON)


def load_manifest(bundle: str | Path) -> tuple[str, ScenarioConfig, int, int]:
    """(name, config, seed, n_paths) recorded for a bundle."""
    manifest = _read_json(Path(bundle), MANIFEST_FILE)
    try:
        return manifest["name"], config_from_text(manifest["config"]), int(manifest["seed"]), int(manifest["n_paths"])
    except KeyError as e:
        raise OutputBundleError(f"{bundle}: manifest has no '{e.args[0]}' entry") from e


def report_frame(bundles: list[str | Path]) -> pd.DataFrame:
    """One row of metric means per bundle, in the order given."""
    if not bundles:
        msg = "report needs at least one bundle"
        raise ValueError(msg)
    rows = []
    for bundle in bundles:
        summary = read_summary(bundle)
        metrics = summary.get("metrics", {})
        row: dict[str, Any] = {"scenario": summary.get("name", Path(bundle).name), "paths": summary.get("n_paths")}
        for metric, column in REPORT_COLUMNS.items():
            if metric in metrics:
                row[column] = metrics[metric]["mean"]
        rows.append(row)
    return pd.DataFrame(rows).set_index("scenario")


def format_table(frame: pd.DataFrame) -> str:
    return frame.to_string(float_format=lambda v: f"{v:.6g}") + "\n"
