import json

import pandas as pd
import pytest

from engine import run_monte_carlo
from errors import OutputBundleError
from output_utils import (
    CONFIG_FILE,
    MANIFEST_FILE,
    PATHS_FILE,
    SUMMARY_JSON,
    SUMMARY_TEXT,
    format_summary,
    load_manifest,
    read_summary,
    report_frame,
    write_bundle,
)
from presets import preset_config


@pytest.fixture
def bundle(tmp_path):
    config = preset_config("securitization-fair")
    summary = run_monte_carlo(config, 5, seed=11)
    return write_bundle(tmp_path, "securitization-fair", config, summary), config, summary


def test_bundle_files(bundle):
    run_dir, _, summary = bundle
    for name in (PATHS_FILE, SUMMARY_JSON, SUMMARY_TEXT, MANIFEST_FILE, CONFIG_FILE):
        assert (run_dir / name).is_file(), name
    assert run_dir.name.startswith("securitization-fair-")
    paths = pd.read_csv(run_dir / PATHS_FILE)
    assert len(paths) == 5
    assert paths["projects_financed"].tolist() == pytest.approx([5.0] * 5)
    assert read_summary(run_dir)["metrics"]["x"]["mean"] == pytest.approx(summary.metric("x"))


def test_same_run_rewrites_the_same_bytes(bundle, tmp_path):
    run_dir, config, _ = bundle
    before = {p.name: p.read_bytes() for p in run_dir.iterdir()}
    again = write_bundle(tmp_path, "securitization-fair", config, run_monte_carlo(config, 5, seed=11))
    assert again == run_dir
    assert {p.name: p.read_bytes() for p in again.iterdir()} == before


def test_different_seed_gets_its_own_directory(bundle, tmp_path):
    run_dir, config, _ = bundle
    other = write_bundle(tmp_path, "securitization-fair", config, run_monte_carlo(config, 5, seed=12))
    assert other != run_dir


def test_manifest_reproduces_the_run(bundle):
    run_dir, config, _ = bundle
    name, loaded, seed, n_paths = load_manifest(run_dir)
    assert (name, seed, n_paths) == ("securitization-fair", 11, 5)
    assert loaded == config


def test_broken_manifest(tmp_path):
    (tmp_path / MANIFEST_FILE).write_text(json.dumps({"name": "x"}), encoding="utf-8")
    with pytest.raises(OutputBundleError, match="config"):
        load_manifest(tmp_path)
    (tmp_path / MANIFEST_FILE).write_text("{not json", encoding="utf-8")
    with pytest.raises(OutputBundleError, match="not valid JSON"):
        load_manifest(tmp_path)


def test_missing_summary(tmp_path):
    with pytest.raises(OutputBundleError, match="missing"):
        read_summary(tmp_path)


def test_report_frame(tmp_path):
    bundles = []
    for name in ("baseline", "securitization-fair"):
        config = preset_config(name)
        bundles.append(write_bundle(tmp_path, name, config, run_monte_carlo(config, 2, seed=0)))
    frame = report_frame(bundles)
    assert list(frame.index) == ["baseline", "securitization-fair"]
    assert frame.loc["baseline", "funding to entrepreneurs"] == pytest.approx(1.0)
    assert frame.loc["securitization-fair", "funding to entrepreneurs"] == pytest.approx(5.0)
    assert frame.loc["baseline", "paths"] == 2


def test_report_needs_bundles():
    with pytest.raises(ValueError):
        report_frame([])


def test_summary_text_mentions_outcomes(bundle):
    _, _, summary = bundle
    text = format_summary(summary, "securitization-fair")
    assert text.startswith("securitization-fair: 5 path(s), seed 11")
    assert "ok=5" in text
