from __future__ import annotations

from pathlib import Path
import sys

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from config.settings import SETTINGS
from core.path_data import PathDataset, parse_path_file


@pytest.fixture(autouse=True)
def _temporary_settings_dirs(tmp_path: Path, monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setattr(SETTINGS, "root_dir", tmp_path)
    monkeypatch.setattr(SETTINGS, "logs_dir", tmp_path / "logs")
    monkeypatch.setattr(SETTINGS, "runs_dir", tmp_path / "logs" / "runs")
    monkeypatch.setattr(SETTINGS, "record_runs", False)
    monkeypatch.setattr(SETTINGS, "threads", 1)
    yield


TOY_TEXT = "A,C,D,E\nB,C,D,F\n"


@pytest.fixture
def toy_text() -> str:
    return TOY_TEXT


@pytest.fixture
def toy_paths() -> PathDataset:
    """Two paths through the shared corridor C -> D."""
    return parse_path_file(TOY_TEXT)


@pytest.fixture
def ranked_paths() -> PathDataset:
    """Small corpus in which every measure has a unique top node."""
    return PathDataset(
        {
            ("A", "B", "C"): 4,
            ("A", "B"): 2,
            ("A",): 1,
            ("A", "B", "C", "D"): 1,
        }
    )
