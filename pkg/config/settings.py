"""Centralised runtime configuration for path centrality analyses."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

_logger = logging.getLogger(__name__)


def _default_root() -> Path:
    project_root = os.environ.get("PROJECT_ROOT")
    if project_root:
        return Path(project_root).expanduser()
    return Path(__file__).resolve().parent.parent


# A ``.env`` next to the project root may provide defaults; real environment
# variables always win.
load_dotenv(_default_root() / ".env", override=False)


def _bool_env(name: str, default: bool) -> bool:
    value = os.environ.get(name)
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "on"}


def _int_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw.strip())
    except ValueError:
        _logger.warning("Invalid integer for %s=%r; using default %d", name, raw, default)
        return default


def _optional_int_env(name: str) -> Optional[int]:
    raw = os.environ.get(name)
    if not raw or not raw.strip():
        return None
    try:
        return int(raw.strip())
    except ValueError:
        _logger.warning("Invalid integer for %s=%r; ignoring", name, raw)
        return None


def _float_env(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return float(raw.strip())
    except ValueError:
        _logger.warning("Invalid float for %s=%r; using default %s", name, raw, default)
        return default


@dataclass
class Settings:
    root_dir: Path = field(default_factory=_default_root)
    logs_dir: Path = field(init=False)
    runs_dir: Path = field(init=False)

    seed: int = field(default_factory=lambda: _int_env("PATHRANK_SEED", 0))
    threads: int = field(default_factory=lambda: _int_env("PATHRANK_THREADS", 1))

    dense_solve_limit: int = field(
        default_factory=lambda: _int_env("DENSE_SOLVE_LIMIT", 500)
    )
    residual_tolerance: float = field(
        default_factory=lambda: _float_env("RESIDUAL_TOLERANCE", 1e-9)
    )
    max_paths: Optional[int] = field(default_factory=lambda: _optional_int_env("MAX_PATHS"))
    sample_block_size: int = field(
        default_factory=lambda: _int_env("SAMPLE_BLOCK_SIZE", 10_000)
    )

    train_fraction: float = field(
        default_factory=lambda: _float_env("TRAIN_FRACTION", 0.3)
    )
    top_fraction: float = field(default_factory=lambda: _float_env("TOP_FRACTION", 0.1))
    repetitions: int = field(default_factory=lambda: _int_env("REPETITIONS", 5))
    max_order: int = field(default_factory=lambda: _int_env("MAX_ORDER", 5))

    record_runs: bool = field(default_factory=lambda: _bool_env("RECORD_RUNS", False))

    run_id: str = field(default_factory=lambda: os.environ.get("RUN_ID", ""))
    stage: str = field(default_factory=lambda: os.environ.get("STAGE", ""))
    log_level: str = field(default_factory=lambda: os.environ.get("LOG_LEVEL", "INFO"))

    def __post_init__(self) -> None:
        self.root_dir = self._resolve_root(self.root_dir)
        self.logs_dir = self._resolve_path(os.environ.get("LOGS_DIR", "logs"))

        runs_override = os.environ.get("RUNS_DIR")
        if runs_override:
            self.runs_dir = self._resolve_path(runs_override)
        else:
            subdir = os.environ.get("RUNS_SUBDIR", "runs")
            self.runs_dir = self.logs_dir / subdir

        if self.threads < 1:
            _logger.warning("PATHRANK_THREADS=%d is below 1; using 1", self.threads)
            self.threads = 1
        if self.sample_block_size < 1:
            self.sample_block_size = 10_000

    def _resolve_root(self, value: Path) -> Path:
        value = value.expanduser()
        if not value.is_absolute():
            value = (Path(__file__).resolve().parent.parent / value).resolve()
        return value

    def _resolve_path(self, value: str | Path) -> Path:
        candidate = Path(value).expanduser()
        if not candidate.is_absolute():
            candidate = (self.root_dir / candidate).resolve()
        return candidate


SETTINGS = Settings()

__all__ = ["SETTINGS", "Settings"]
