"""Command line interface for path centrality analyses.

Subcommands write their payload (path file, model JSON summary, TSV scores or
experiment report) to stdout or ``--output``; logs go to stderr as JSON.
Exit codes: 0 ok, 1 failed experiment or numerical error, 2 bad input,
3 resource limit, 4 unsupported measure/model combination.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, Optional, TextIO

from config.settings import SETTINGS
from core.centrality import compute
from core.experiment import ExperimentConfig, run_experiment
from core.measures import Measure, ModelKind, parse_measure
from core.mogen_model import fit, fundamental_matrix
from core.network_model import build_network
from core.path_data import PathDataset, parse_path_file
from core.schema import validate_document
from core.temporal import extract_paths, read_temporal_network
from output.model_io import load_model, save_model
from output.report_export import report_json, report_matrix_tsv
from output.tsv_export import render, write_text
from pathrank_logging.errors import ConfigError, InputError, PathRankError
from pathrank_logging.logger import get_logger, log_step


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--seed", type=int, default=None,
        help="Random seed (default: PATHRANK_SEED). Only experiment draws random numbers; "
        "the other subcommands are deterministic and just record it in the log.",
    )
    parser.add_argument("--threads", type=_positive_int, default=None, help="Worker threads.")
    parser.add_argument("--output", type=Path, default=None, help="Write the payload here instead of stdout.")
    parser.add_argument("--format", choices=("tsv", "json"), default="tsv", dest="fmt")
    parser.add_argument("--log-level", default=None, help="Override LOG_LEVEL.")


def _input_group(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--paths", type=Path, help="Path file: v1,v2,...[<TAB>freq] per line.")
    group.add_argument("--temporal", type=Path, help="Temporal edge CSV: source,target,timestamp.")
    parser.add_argument("--delta", type=int, default=None, help="Time window in seconds for --temporal.")
    parser.add_argument("--max-paths", type=_positive_int, default=None)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathrank")
    sub = parser.add_subparsers(dest="command", required=True)

    extract = sub.add_parser(
        "extract",
        help="Extract time-respecting paths from a temporal network.",
        description="Writes the path file to stdout, or to --output. With --output the path "
        "statistics are printed to stdout as JSON; otherwise they only go to the log.",
    )
    _common(extract)
    extract.add_argument("--temporal", type=Path, required=True)
    extract.add_argument("--delta", type=int, required=True)
    extract.add_argument("--max-paths", type=_positive_int, default=None)

    fit_cmd = sub.add_parser("fit", help="Fit a MOGen model and save it as JSON.")
    _common(fit_cmd)
    fit_cmd.add_argument("--paths", type=Path, required=True)
    fit_cmd.add_argument("--order", type=int, required=True, help="Maximum order K.")
    fit_cmd.add_argument("--model-out", type=Path, required=True)

    centrality = sub.add_parser("centrality", help="Compute one centrality measure.")
    _common(centrality)
    _input_group(centrality)
    centrality.add_argument("--model", choices=[k.value for k in ModelKind], required=True)
    centrality.add_argument("--order", type=int, default=None, help="MOGen maximum order K.")
    centrality.add_argument("--model-in", type=Path, default=None, help="Load a saved MOGen model.")
    centrality.add_argument("--measure", required=True)
    centrality.add_argument("--gt-order", type=int, default=1, help="Evaluation order h.")
    centrality.add_argument("--direction", choices=("out", "in"), default="out")

    experiment = sub.add_parser("experiment", help="Run the out-of-sample ranking experiment.")
    _common(experiment)
    _input_group(experiment)
    experiment.add_argument("--config", type=Path, default=None, help="Experiment config JSON.")
    experiment.add_argument("--train-fraction", type=float, default=None)
    experiment.add_argument("--repetitions", type=int, default=None)
    experiment.add_argument("--top-fraction", type=float, default=None)
    experiment.add_argument("--models", nargs="+", default=None, help="N, P, M<K> ...")
    experiment.add_argument("--measures", nargs="+", default=None)
    experiment.add_argument("--gt-orders", nargs="+", type=int, default=None)
    experiment.add_argument("--subsample", type=_positive_int, default=None)
    experiment.add_argument("--matrix-out", type=Path, default=None)
    return parser


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except UnicodeDecodeError as exc:
        raise InputError(f"{path} is not valid UTF-8: {exc}") from None


def _load_paths(args: argparse.Namespace) -> PathDataset:
    if getattr(args, "paths", None) is not None:
        return parse_path_file(_read_text(args.paths))
    if args.delta is None:
        raise ConfigError("--temporal requires --delta")
    net = read_temporal_network(_read_text(args.temporal))
    return extract_paths(net, args.delta, args.max_paths or SETTINGS.max_paths)


def _seed(args: argparse.Namespace) -> int:
    return SETTINGS.seed if args.seed is None else args.seed


def _emit(text: str, out: Optional[Path], stdout: TextIO) -> None:
    if out is None:
        stdout.write(text)
    else:
        write_text(text, out)


def _cmd_extract(args: argparse.Namespace, stdout: TextIO) -> int:
    net = read_temporal_network(_read_text(args.temporal))
    dataset = extract_paths(net, args.delta, args.max_paths or SETTINGS.max_paths)
    stats = dataset.statistics().as_dict()
    log_step("cli", "extract_summary", stats)
    if args.output is None:
        stdout.write(dataset.to_text())
    else:
        write_text(dataset.to_text(), args.output)
        stdout.write(json.dumps({"output": str(args.output), **stats}, sort_keys=True) + "\n")
    return 0


def _cmd_fit(args: argparse.Namespace, stdout: TextIO) -> int:
    dataset = parse_path_file(_read_text(args.paths))
    model = fit(dataset, args.order)
    save_model(model, args.model_out)
    summary: Dict[str, Any] = {
        "model_out": str(args.model_out),
        "K": model.K,
        "states": model.n,
        **dataset.statistics().as_dict(),
    }
    _emit(json.dumps(summary, sort_keys=True) + "\n", args.output, stdout)
    return 0


def _cmd_centrality(args: argparse.Namespace, stdout: TextIO) -> int:
    measure = parse_measure(args.measure)
    if args.gt_order < 1:
        raise ConfigError("--gt-order must be at least 1")
    kind = ModelKind(args.model)
    fundamental = None
    if kind is ModelKind.MOGEN:
        if args.model_in is not None:
            model = load_model(args.model_in)
        else:
            order = args.order if args.order is not None else SETTINGS.max_order
            model = fit(_load_paths(args), order)
        if measure is not Measure.CLOSENESS:
            fundamental = fundamental_matrix(model)
    elif kind is ModelKind.NETWORK:
        model = build_network(_load_paths(args))
    else:
        model = _load_paths(args)
    vector = compute(measure, model, args.gt_order, fundamental=fundamental, direction=args.direction)
    _emit(render(vector, args.fmt), args.output, stdout)
    return 0


def _experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    data: Dict[str, Any] = {}
    if args.config is not None:
        try:
            data = json.loads(_read_text(args.config))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
        validate_document("experiment_config", data)
    overrides = {
        "train_fraction": args.train_fraction,
        "repetitions": args.repetitions,
        "top_fraction": args.top_fraction,
        "models": args.models,
        "measures": args.measures,
        "ground_truth_orders": args.gt_orders,
        "subsample_size": args.subsample,
        "seed": args.seed,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_mapping(data)


def _cmd_experiment(args: argparse.Namespace, stdout: TextIO) -> int:
    cfg = _experiment_config(args)
    dataset = _load_paths(args)
    report = run_experiment(dataset, cfg, threads=args.threads)
    document = report_json(report)
    matrix = report_matrix_tsv(report)
    if args.matrix_out is not None:
        write_text(matrix, args.matrix_out)
    _emit(document if args.fmt == "json" else matrix, args.output, stdout)
    if report.all_invalid:
        log_step("cli", "experiment_invalid", {"repetitions": cfg.repetitions}, severity="error")
        return 1
    return 0


_COMMANDS = {
    "extract": _cmd_extract,
    "fit": _cmd_fit,
    "centrality": _cmd_centrality,
    "experiment": _cmd_experiment,
}


def main(argv: Optional[list[str]] = None, stdout: Optional[TextIO] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    stdout = stdout or sys.stdout

    get_logger(stage=args.command, level=args.log_level.upper() if args.log_level else None)
    try:
        log_step("cli", "command_started", {"command": args.command, "seed": _seed(args)})
        return _COMMANDS[args.command](args, stdout)
    except PathRankError as exc:
        log_step(
            "cli",
            "command_failed",
            {"error": type(exc).__name__, "detail": str(exc), "exit_code": exc.exit_code},
            severity="error",
        )
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":  # pragma: no cover - CLI entry point
    raise SystemExit(main())
