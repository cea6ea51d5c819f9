"""MOGen model files: JSON with shortest round-trip float literals."""
from __future__ import annotations

import json
from pathlib import Path

from core.mogen_model import MogenModel, model_from_dict, model_to_dict
from core.schema import validate_document
from pathrank_logging.errors import InputError
from pathrank_logging.logger import log_step


def dumps_model(model: MogenModel) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads_model(text: str) -> MogenModel:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"model file is not valid JSON: {exc}") from None
    validate_document("mogen_model", payload)
    return model_from_dict(payload)


def save_model(model: MogenModel, out_path: Path) -> Path:
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(dumps_model(model), encoding="utf-8")
    log_step("model_io", "model_saved", {"path": str(out_path), "K": model.K, "states": model.n})
    return out_path


def load_model(path: Path) -> MogenModel:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read model file {path}: {exc}") from None
    except UnicodeDecodeError as exc:
        raise InputError(f"model file {path} is not valid UTF-8: {exc}") from None
    return loads_model(text)
