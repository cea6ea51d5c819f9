"""Tests for experiment configuration and the ranking experiment."""

import json

import numpy as np
import pytest

from core.experiment import ExperimentConfig, run_experiment
from core.measures import Measure
from core.path_data import PathDataset
from pathrank_logging.errors import ConfigError, SplitError


def _identity_split(ds, spec):
    return ds, ds


def _corpus() -> PathDataset:
    rng = np.random.default_rng(42)
    nodes = list("ABCDEFG")
    counts = {}
    for _ in range(300):
        length = int(rng.integers(1, 6))
        path = tuple(str(n) for n in rng.choice(nodes, size=length))
        counts[path] = counts.get(path, 0) + 1
    return PathDataset(counts)


def test_config_defaults_and_normalisation():
    cfg = ExperimentConfig.from_mapping({"models": ["P", "m2", "N", "M2"], "measures": "end"})
    assert cfg.models == ["N", "M2", "P"]
    assert cfg.measures == [Measure.END_PROBABILITY]
    assert cfg.train_fraction == 0.3
    assert cfg.top_fraction == 0.1
    assert cfg.repetitions == 5
    assert cfg.ground_truth_orders == [1]
    default = ExperimentConfig()
    assert default.models == ["N", "M1", "M2", "M3", "M4", "M5", "P"]
    assert default.measures == list(Measure)


@pytest.mark.parametrize(
    "data",
    [
        {"unknown": 1},
        {"train_fraction": 1.0},
        {"top_fraction": 0},
        {"repetitions": 0},
        {"models": ["M0"]},
        {"measures": ["pagerank"]},
        {"ground_truth_orders": [0]},
        {"subsample_size": 0},
    ],
)
def test_config_rejects_invalid_values(data):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping(data)


def test_self_ranking_scores_perfectly(ranked_paths):
    cfg = ExperimentConfig(models=["M4", "P"], repetitions=2, seed=1)
    report = run_experiment(ranked_paths, cfg, splitter=_identity_split)
    assert len(report.cells) == 2 * 5 * 2
    assert all(cell.valid for cell in report.cells)
    assert all(cell.auc == 1.0 for cell in report.cells if cell.model == "P")
    assert all(cell.auc == 1.0 for cell in report.cells)
    assert report.invalid_repetitions == ()


def test_network_cells_only_for_network_measures(ranked_paths):
    cfg = ExperimentConfig(models=["N", "P"], repetitions=1)
    report = run_experiment(ranked_paths, cfg, splitter=_identity_split)
    network = {cell.measure for cell in report.cells if cell.model == "N"}
    assert network == {"betweenness", "closeness"}
    assert report.mean_auc("end", "N") is None


def test_report_is_deterministic_and_thread_independent():
    ds = _corpus()
    cfg = ExperimentConfig(models=["N", "M1", "M2", "P"], repetitions=3, seed=99,
                           ground_truth_orders=[1, 2])
    serial = run_experiment(ds, cfg, threads=1).to_dict()
    again = run_experiment(ds, cfg, threads=1).to_dict()
    parallel = run_experiment(ds, cfg, threads=3).to_dict()
    assert json.dumps(serial, sort_keys=True) == json.dumps(again, sort_keys=True)
    assert json.dumps(serial, sort_keys=True) == json.dumps(parallel, sort_keys=True)


def test_cell_count_and_summary_are_recomputable():
    ds = _corpus()
    cfg = ExperimentConfig(models=["M2", "P"], repetitions=3, seed=5)
    report = run_experiment(ds, cfg)
    assert len(report.cells) == 2 * 5 * 3
    for row in report.summary():
        values = [
            c.auc for c in report.cells
            if (c.measure, c.model, c.order) == (row.measure, row.model, row.order) and c.valid
        ]
        assert row.valid == len(values)
        assert row.mean == float(np.mean(values))
        assert row.std == float(np.std(values))
        assert 0.0 <= row.mean <= 1.0


def test_failed_split_marks_repetition_invalid(ranked_paths):
    def flaky(ds, spec):
        if spec.repetition_index == 1:
            raise SplitError("empty test set")
        return ds, ds

    cfg = ExperimentConfig(models=["P"], repetitions=3)
    report = run_experiment(ranked_paths, cfg, splitter=flaky)
    assert report.invalid_repetitions == (1,)
    assert not report.all_invalid
    broken = [c for c in report.cells if c.repetition == 1]
    assert broken and all(not c.valid and c.reason == "empty test set" for c in broken)
    assert report.mean_auc(Measure.BETWEENNESS, "P") == 1.0


def test_degenerate_labels_are_invalid_cells():
    single = PathDataset({("A",): 3})
    cfg = ExperimentConfig(models=["P"], repetitions=2, measures=["end_probability"])
    report = run_experiment(single, cfg, splitter=_identity_split)
    assert report.all_invalid
    assert all(c.auc is None for c in report.cells)


def test_subsample_and_run_records(tmp_path):
    ds = _corpus()
    cfg = ExperimentConfig(models=["P"], repetitions=2, subsample_size=100, measures=["reach"])
    record = tmp_path / "runs" / "cells.jsonl"
    report = run_experiment(ds, cfg, record_path=record)
    lines = record.read_text(encoding="utf-8").splitlines()
    assert len(lines) == len(report.cells) == 2
    assert json.loads(lines[0])["model"] == "P"


def test_config_echo_round_trips():
    cfg = ExperimentConfig(models=["M2", "P"], measures=["closeness", "reach"], train_fraction=0.3)
    echo = cfg.echo()
    assert echo["train_fraction"] == 0.3
    assert echo["measures"] == ["closeness", "reach"]
    assert ExperimentConfig.from_mapping(echo) == cfg
