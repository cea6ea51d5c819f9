"""Out-of-sample ranking experiment.

For every repetition the corpus is split into train and test paths.  Each
configured model is fitted on train, every measure is computed at every
ground-truth order ``h``, predictions are projected onto the states observed
in the test windows and scored by top-fraction AUC against the path-model
ranking of the test data.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from config.settings import SETTINGS
from pathrank_logging import jsonl_sink
from pathrank_logging.errors import (
    ConfigError,
    EvaluationError,
    NumericalError,
    SplitError,
)
from pathrank_logging.logger import log_step, run_context

from .centrality import compute
from .evaluation import auc, ground_truth, project_prediction, top_labels
from .measures import Measure, ModelKind, ModelSpec, parse_measure, parse_model_label, supports
from .mogen_model import FundamentalMatrix, fit, fundamental_matrix
from .network_model import build_network
from .path_data import PathDataset, SplitSpec, split, subsample

Splitter = Callable[[PathDataset, SplitSpec], Tuple[PathDataset, PathDataset]]


def _default_models() -> List[str]:
    return ["N", *(f"M{k}" for k in range(1, SETTINGS.max_order + 1)), "P"]


class ExperimentConfig(BaseModel):
    """Validated experiment configuration; unknown fields are rejected."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    measures: List[Measure] = Field(default_factory=lambda: list(Measure))
    models: List[str] = Field(default_factory=_default_models)
    train_fraction: float = Field(default_factory=lambda: SETTINGS.train_fraction, gt=0.0, lt=1.0)
    ground_truth_orders: List[int] = Field(default_factory=lambda: [1], min_length=1)
    repetitions: int = Field(default_factory=lambda: SETTINGS.repetitions, ge=1)
    top_fraction: float = Field(default_factory=lambda: SETTINGS.top_fraction, gt=0.0, lt=1.0)
    seed: int = Field(default_factory=lambda: SETTINGS.seed)
    subsample_size: Optional[int] = Field(default=None, ge=1)

    @field_validator("measures", mode="before")
    @classmethod
    def _parse_measures(cls, value: Any) -> List[Measure]:
        if isinstance(value, (str, Measure)):
            value = [value]
        try:
            parsed = [parse_measure(v) for v in value]
        except ConfigError as exc:
            raise ValueError(str(exc)) from None
        if not parsed:
            raise ValueError("at least one measure is required")
        return list(dict.fromkeys(parsed))

    @field_validator("models", mode="before")
    @classmethod
    def _parse_models(cls, value: Any) -> List[str]:
        if isinstance(value, (str, ModelSpec)):
            value = [value]
        try:
            specs = {parse_model_label(v) for v in value}
        except ConfigError as exc:
            raise ValueError(str(exc)) from None
        if not specs:
            raise ValueError("at least one model is required")
        return [s.label for s in sorted(specs, key=lambda s: s.sort_key)]

    @field_validator("ground_truth_orders")
    @classmethod
    def _check_orders(cls, value: List[int]) -> List[int]:
        if any(h < 1 for h in value):
            raise ValueError("ground-truth orders must be at least 1")
        return sorted(set(value))

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        try:
            return cls.model_validate(dict(data))
        except ValidationError as exc:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
                for err in exc.errors()
            )
            raise ConfigError(f"invalid experiment config: {problems}") from None

    @property
    def model_specs(self) -> List[ModelSpec]:
        return [parse_model_label(label) for label in self.models]

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


@dataclass(frozen=True)
class RankingCell:
    measure: str
    model: str
    order: int
    repetition: int
    auc: Optional[float]
    valid: bool
    evaluated: int = 0
    positives: int = 0
    unmatched: int = 0
    reason: Optional[str] = None

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class CellSummary:
    measure: str
    model: str
    order: int
    mean: Optional[float]
    std: Optional[float]
    valid: int
    invalid: int

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class RankingReport:
    config: ExperimentConfig
    cells: Tuple[RankingCell, ...]
    invalid_repetitions: Tuple[int, ...] = field(default=())

    @property
    def all_invalid(self) -> bool:
        return len(self.invalid_repetitions) == self.config.repetitions

    def summary(self) -> List[CellSummary]:
        """Mean and population standard deviation of the valid AUCs per (order, measure, model)."""

        grouped: Dict[Tuple[int, str, str], List[RankingCell]] = {}
        for cell in self.cells:
            grouped.setdefault((cell.order, cell.measure, cell.model), []).append(cell)
        rows = []
        for (order, measure, model), cells in grouped.items():
            values = np.array([c.auc for c in cells if c.valid], dtype=float)
            rows.append(
                CellSummary(
                    measure=measure,
                    model=model,
                    order=order,
                    mean=float(values.mean()) if values.size else None,
                    std=float(values.std()) if values.size else None,
                    valid=int(values.size),
                    invalid=len(cells) - int(values.size),
                )
            )
        return rows

    def mean_auc(self, measure: Measure | str, model: str, order: int = 1) -> Optional[float]:
        name = parse_measure(measure).value
        for row in self.summary():
            if (row.measure, row.model, row.order) == (name, model, order):
                return row.mean
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.echo(),
            "cells": [c.as_dict() for c in self.cells],
            "summary": [s.as_dict() for s in self.summary()],
            "invalid_repetitions": list(self.invalid_repetitions),
        }


@dataclass(frozen=True)
class _FittedModel:
    spec: ModelSpec
    model: Any
    fundamental: Optional[FundamentalMatrix] = None


def _fit_models(train: PathDataset, specs: Iterable[ModelSpec]) -> Tuple[List[_FittedModel], Dict[str, str]]:
    fitted: List[_FittedModel] = []
    failures: Dict[str, str] = {}
    for spec in specs:
        try:
            if spec.kind is ModelKind.NETWORK:
                fitted.append(_FittedModel(spec, build_network(train)))
            elif spec.kind is ModelKind.PATH:
                fitted.append(_FittedModel(spec, train))
            else:
                model = fit(train, int(spec.order))
                fitted.append(_FittedModel(spec, model, fundamental_matrix(model)))
        except NumericalError as exc:
            log_step("experiment", "model_failed", {"model": spec.label, "error": str(exc)}, severity="warning")
            failures[spec.label] = str(exc)
    return fitted, failures


def _invalid_cells(
    cfg: ExperimentConfig, repetition: int, reason: str
) -> List[RankingCell]:
    return [
        RankingCell(m.value, spec.label, h, repetition, None, False, reason=reason)
        for h in cfg.ground_truth_orders
        for m in cfg.measures
        for spec in cfg.model_specs
        if supports(spec.kind, m)
    ]


def _run_repetition(
    ds: PathDataset, cfg: ExperimentConfig, repetition: int, splitter: Splitter
) -> List[RankingCell]:
    with run_context(repetition=repetition):
        try:
            train, test = splitter(ds, SplitSpec(cfg.train_fraction, cfg.seed, repetition))
        except SplitError as exc:
            log_step("experiment", "split_failed", {"error": str(exc)}, severity="warning")
            return _invalid_cells(cfg, repetition, str(exc))

        fitted, failures = _fit_models(train, cfg.model_specs)
        cells: List[RankingCell] = []
        for h in cfg.ground_truth_orders:
            for measure in cfg.measures:
                truth = ground_truth(test, measure, h)
                try:
                    labels = top_labels(truth, cfg.top_fraction)
                except EvaluationError as exc:
                    labels, label_error = {}, str(exc)
                else:
                    label_error = None
                positives = sum(labels.values())
                for spec in cfg.model_specs:
                    if not supports(spec.kind, measure):
                        continue
                    if spec.label in failures:
                        cells.append(
                            RankingCell(measure.value, spec.label, h, repetition, None, False,
                                        evaluated=len(truth), reason=failures[spec.label])
                        )
                        continue
                    entry = next(f for f in fitted if f.spec == spec)
                    with run_context(model=spec.label, measure=measure.value, order=h):
                        cells.append(
                            _score_cell(entry, measure, h, truth.scores.keys(), labels,
                                        positives, repetition, label_error)
                        )
        log_step(
            "experiment",
            "repetition_finished",
            {"train": train.total, "test": test.total, "valid_cells": sum(c.valid for c in cells)},
        )
        return cells


def _score_cell(
    entry: _FittedModel,
    measure: Measure,
    h: int,
    truth_keys: Iterable[str],
    labels: Mapping[str, int],
    positives: int,
    repetition: int,
    label_error: Optional[str],
) -> RankingCell:
    truth_keys = list(truth_keys)
    base = dict(measure=measure.value, model=entry.spec.label, order=h, repetition=repetition)
    if label_error is not None:
        log_step("experiment", "cell_invalid", {"reason": label_error}, severity="warning")
        return RankingCell(**base, auc=None, valid=False, evaluated=len(truth_keys), reason=label_error)
    prediction = compute(measure, entry.model, h, fundamental=entry.fundamental)
    projection = project_prediction(prediction, truth_keys)
    try:
        value = auc(projection.vector, labels)
    except EvaluationError as exc:
        log_step("experiment", "cell_invalid", {"reason": str(exc)}, severity="warning")
        return RankingCell(
            **base, auc=None, valid=False, evaluated=len(truth_keys),
            positives=positives, unmatched=len(projection.unmatched), reason=str(exc),
        )
    return RankingCell(
        **base, auc=value, valid=True, evaluated=len(truth_keys),
        positives=positives, unmatched=len(projection.unmatched),
    )


def run_experiment(
    ds: PathDataset,
    cfg: ExperimentConfig,
    *,
    threads: Optional[int] = None,
    splitter: Splitter = split,
    record_path: Optional[Path] = None,
) -> RankingReport:
    """Run every repetition and collect the per-cell AUCs.

    Repetitions run on a thread pool but results are collected in repetition
    order, so the report does not depend on ``threads``.  ``splitter`` replaces
    the random split (e.g. to evaluate on the training data itself).
    """

    if ds.is_empty():
        raise ConfigError("experiment needs a non-empty dataset")
    if cfg.subsample_size is not None:
        ds = subsample(ds, cfg.subsample_size, cfg.seed)

    workers = max(1, threads if threads is not None else SETTINGS.threads)
    log_step(
        "experiment",
        "experiment_started",
        {"paths": ds.total, "repetitions": cfg.repetitions, "models": cfg.models, "workers": workers},
    )
    with ThreadPoolExecutor(max_workers=workers) as pool:
        per_repetition = list(
            pool.map(lambda r: _run_repetition(ds, cfg, r, splitter), range(cfg.repetitions))
        )

    cells = tuple(cell for batch in per_repetition for cell in batch)
    invalid = tuple(
        r for r, batch in enumerate(per_repetition) if not any(c.valid for c in batch)
    )
    report = RankingReport(cfg, cells, invalid)

    if record_path is None and SETTINGS.record_runs:
        record_path = SETTINGS.runs_dir / f"{SETTINGS.run_id or 'experiment'}.jsonl"
    if record_path is not None:
        written = jsonl_sink.append_many(record_path, (c.as_dict() for c in cells))
        log_step("experiment", "cells_recorded", {"path": str(record_path), "records": written})

    log_step(
        "experiment",
        "experiment_finished",
        {"cells": len(cells), "invalid_repetitions": list(invalid)},
        severity="warning" if report.all_invalid else "info",
    )
    return report


__all__ = [
    "ExperimentConfig",
    "RankingCell",
    "CellSummary",
    "RankingReport",
    "run_experiment",
]
