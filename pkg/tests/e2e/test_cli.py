"""End-to-end runs of the ``pathrank`` command line."""

import io
import json
from pathlib import Path

import numpy as np
import pytest

from app.main import main
from core.centrality import compute
from core.measures import Measure
from core.path_data import parse_path_file
from output.model_io import dumps_model, load_model


def _run(*argv: str) -> tuple[int, str]:
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def _write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


def _random_corpus(seed: int = 7, size: int = 200) -> str:
    rng = np.random.default_rng(seed)
    nodes = list("ABCDEFGH")
    lines = []
    for _ in range(size):
        length = int(rng.integers(1, 6))
        lines.append(",".join(str(n) for n in rng.choice(nodes, size=length)))
    return "\n".join(lines) + "\n"


def test_extract_chain(tmp_path):
    temporal = _write(tmp_path / "edges.csv", "source,target,timestamp\nA,B,1\nB,C,2\n")
    code, out = _run("extract", "--temporal", str(temporal), "--delta", "1")
    assert code == 0
    assert out == "A,B,C\n"


def test_extract_to_file_reports_statistics(tmp_path):
    temporal = _write(tmp_path / "edges.csv", "source,target,timestamp\nA,B,1\nB,C,5\n")
    target = tmp_path / "out" / "paths.txt"
    code, out = _run("extract", "--temporal", str(temporal), "--delta", "1", "--output", str(target))
    assert code == 0
    assert target.read_text(encoding="utf-8") == "A,B\nB,C\n"
    assert json.loads(out)["total_paths"] == 2


def test_extract_empty_input_is_bad_input(tmp_path, capsys):
    temporal = _write(tmp_path / "edges.csv", "")
    code, out = _run("extract", "--temporal", str(temporal), "--delta", "1")
    assert code == 2
    assert out == ""
    assert "error:" in capsys.readouterr().err


def test_extract_limit_exceeded(tmp_path):
    temporal = _write(tmp_path / "edges.csv", "source,target,timestamp\nA,B,1\nA,C,1\n")
    code, _ = _run("extract", "--temporal", str(temporal), "--delta", "1", "--max-paths", "1")
    assert code == 3


def test_fit_writes_model_and_summary(tmp_path, toy_text):
    paths = _write(tmp_path / "paths.txt", toy_text)
    model_out = tmp_path / "model.json"
    code, out = _run("fit", "--paths", str(paths), "--order", "2", "--model-out", str(model_out))
    assert code == 0
    summary = json.loads(out)
    assert summary["K"] == 2
    assert summary["states"] == 7
    document = json.loads(model_out.read_text(encoding="utf-8"))
    assert document["K"] == 2
    assert document["S"] == {"A": 0.5, "B": 0.5}


def test_fit_rejects_zero_order(tmp_path, toy_text):
    paths = _write(tmp_path / "paths.txt", toy_text)
    code, _ = _run("fit", "--paths", str(paths), "--order", "0", "--model-out", str(tmp_path / "m.json"))
    assert code == 2


def test_saved_model_round_trips_byte_identically(tmp_path, toy_text):
    paths = _write(tmp_path / "paths.txt", toy_text)
    model_out = tmp_path / "model.json"
    _run("fit", "--paths", str(paths), "--order", "3", "--model-out", str(model_out))
    assert dumps_model(load_model(model_out)) == model_out.read_text(encoding="utf-8")


def test_centrality_path_betweenness(tmp_path, toy_text):
    paths = _write(tmp_path / "paths.txt", toy_text)
    code, out = _run("centrality", "--paths", str(paths), "--model", "path", "--measure", "betweenness")
    assert code == 0
    assert out == "A\t0\nB\t0\nC\t1\nD\t1\nE\t0\nF\t0\n"


def test_centrality_json_envelope(tmp_path, toy_text):
    paths = _write(tmp_path / "paths.txt", toy_text)
    code, out = _run(
        "centrality", "--paths", str(paths), "--model", "network", "--measure", "closeness",
        "--format", "json",
    )
    assert code == 0
    envelope = json.loads(out)
    assert envelope["model"] == "N"
    assert envelope["payload"].startswith("A\t")


def test_centrality_network_end_probability_is_unsupported(tmp_path, toy_text):
    paths = _write(tmp_path / "paths.txt", toy_text)
    code, out = _run("centrality", "--paths", str(paths), "--model", "network", "--measure", "end")
    assert code == 4
    assert out == ""


def test_centrality_maximum_order_reach_matches_path_model(tmp_path, toy_text):
    paths = _write(tmp_path / "paths.txt", toy_text)
    code, out = _run(
        "centrality", "--paths", str(paths), "--model", "mogen", "--order", "4", "--measure", "reach",
    )
    assert code == 0
    scores = {}
    for line in out.splitlines():
        state, value = line.split("\t")
        scores[state] = float(value)
    expected = compute(Measure.REACH, parse_path_file(toy_text)).scores
    assert scores.keys() == expected.keys()
    for state, value in expected.items():
        assert scores[state] == pytest.approx(value, abs=1e-9)


def test_centrality_from_saved_model(tmp_path, toy_text):
    paths = _write(tmp_path / "paths.txt", toy_text)
    model_out = tmp_path / "model.json"
    _run("fit", "--paths", str(paths), "--order", "2", "--model-out", str(model_out))
    code, out = _run(
        "centrality", "--paths", str(paths), "--model", "mogen", "--model-in", str(model_out),
        "--measure", "end", "--gt-order", "2",
    )
    assert code == 0
    assert "D|E\t0.5\n" in out


def test_paths_and_temporal_are_exclusive(tmp_path, toy_text):
    paths = _write(tmp_path / "paths.txt", toy_text)
    temporal = _write(tmp_path / "edges.csv", "source,target,timestamp\nA,B,1\n")
    with pytest.raises(SystemExit) as exit_info:
        main(["centrality", "--paths", str(paths), "--temporal", str(temporal),
              "--model", "path", "--measure", "reach"])
    assert exit_info.value.code == 2


def test_experiment_echoes_config_file(tmp_path):
    paths = _write(tmp_path / "paths.txt", _random_corpus())
    config = _write(tmp_path / "config.json", json.dumps({"train_fraction": 0.3, "repetitions": 2}))
    code, out = _run(
        "experiment", "--paths", str(paths), "--config", str(config), "--models", "N", "M2", "P",
        "--format", "json", "--seed", "11",
    )
    assert code == 0
    report = json.loads(out)
    assert report["config"]["train_fraction"] == 0.3
    assert report["config"]["repetitions"] == 2
    assert report["config"]["models"] == ["N", "M2", "P"]
    assert report["summary"]


def test_experiment_matrix_is_reproducible(tmp_path):
    paths = _write(tmp_path / "paths.txt", _random_corpus(seed=3))
    argv = ("experiment", "--paths", str(paths), "--models", "N", "M1", "P", "--repetitions", "2",
            "--measures", "betweenness", "end", "--seed", "5")
    first = _run(*argv, "--matrix-out", str(tmp_path / "matrix.tsv"))
    second = _run(*argv)
    assert first == second
    code, matrix = first
    assert code == 0
    header, *rows = matrix.splitlines()
    assert header == "order\tmeasure\tN\tM1\tP"
    assert rows[1].split("\t")[2] == "-"
    assert (tmp_path / "matrix.tsv").read_text(encoding="utf-8") == matrix


def test_experiment_rejects_unknown_config_keys(tmp_path):
    paths = _write(tmp_path / "paths.txt", _random_corpus())
    config = _write(tmp_path / "config.json", json.dumps({"train_share": 0.3}))
    code, _ = _run("experiment", "--paths", str(paths), "--config", str(config))
    assert code == 2


def test_experiment_with_only_invalid_repetitions_fails(tmp_path):
    paths = _write(tmp_path / "paths.txt", "A\t3\n")
    code, _ = _run("experiment", "--paths", str(paths), "--models", "P", "--repetitions", "1")
    assert code == 1


@pytest.mark.parametrize("command", ["centrality", "fit", "extract", "experiment"])
def test_undecodable_input_is_bad_input(tmp_path, command):
    bad = tmp_path / "bad.txt"
    bad.write_bytes(b"A,\xff\xfe,C\n")
    argv = {
        "centrality": ("--paths", str(bad), "--model", "path", "--measure", "betweenness"),
        "fit": ("--paths", str(bad), "--order", "1", "--model-out", str(tmp_path / "m.json")),
        "extract": ("--temporal", str(bad), "--delta", "1"),
        "experiment": ("--paths", str(bad), "--models", "P"),
    }[command]
    code, out = _run(command, *argv)
    assert code == 2
    assert out == ""


def test_undecodable_model_file_is_bad_input(tmp_path, toy_text):
    paths = _write(tmp_path / "paths.txt", toy_text)
    model_in = tmp_path / "model.json"
    model_in.write_bytes(b'{"K": 2, "\xff": 1}')
    code, _ = _run(
        "centrality", "--paths", str(paths), "--model", "mogen", "--model-in", str(model_in),
        "--measure", "end",
    )
    assert code == 2


def test_seed_does_not_change_deterministic_commands(tmp_path, toy_text):
    paths = _write(tmp_path / "paths.txt", toy_text)
    argv = ("centrality", "--paths", str(paths), "--model", "mogen", "--order", "2", "--measure", "betweenness")
    assert _run(*argv, "--seed", "1") == _run(*argv, "--seed", "99") == _run(*argv)


def test_extract_help_describes_where_statistics_go(capsys):
    with pytest.raises(SystemExit) as exit_info:
        main(["extract", "--help"])
    assert exit_info.value.code == 0
    assert "statistics" in capsys.readouterr().out
