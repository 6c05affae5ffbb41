"""Config file loading and flag merging."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Type, TypeVar

import yaml
from pydantic import BaseModel, ValidationError

from ..errors import MalformedFileError

logger = logging.getLogger(__name__)

C = TypeVar("C", bound=BaseModel)

RUN_CONFIG_NAME = "run_config.json"


def _parse_key_values(text: str, path: Path) -> Dict[str, Any]:
    """`key = value` lines; values are read as YAML scalars or lists.

    A `[section]` line prefixes the keys that follow with `section.`.
    """
    data: Dict[str, Any] = {}
    section = ""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip() + "."
            continue
        if "=" not in line:
            raise MalformedFileError(str(path), f"expected key = value, got {raw!r}", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            data[section + key] = yaml.safe_load(value)
        except yaml.YAMLError as e:
            raise MalformedFileError(str(path), str(e), line=number)
    return data


def _nest(flat: Mapping[str, Any]) -> Dict[str, Any]:
    """Expand dotted keys such as `network.epochs` into nested mappings."""
    nested: Dict[str, Any] = {}
    for key, value in flat.items():
        target = nested
        *parents, leaf = str(key).split(".")
        for part in parents:
            target = target.setdefault(part, {})
        if isinstance(value, Mapping):
            value = _nest(value)
        if isinstance(target.get(leaf), dict) and isinstance(value, dict):
            target[leaf] = merge(target[leaf], value)
        else:
            target[leaf] = value
    return nested


def merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
    """Recursive dict merge; values in `override` win."""
    out = dict(base)
    for key, value in override.items():
        if isinstance(out.get(key), Mapping) and isinstance(value, Mapping):
            out[key] = merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config_file(path: Path) -> Dict[str, Any]:
    """Read a YAML mapping or a file of `key = value` lines."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise MalformedFileError(str(path), str(e))
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError:
        data = None
    if not isinstance(data, dict):
        data = _parse_key_values(text, path) if text.strip() else {}
    logger.debug(f"Loaded {len(data)} config key(s) from {path}")
    return _nest(data)


def resolve_config(
    model: Type[C], config_path: Optional[Path], overrides: Mapping[str, Any]
) -> C:
    """File values, then flags that were actually given, validated as `model`.

    Raises:
        ValidationError: if the merged values are invalid
    """
    data = load_config_file(config_path) if config_path else {}
    given = {k: v for k, v in overrides.items() if v is not None}
    return model.model_validate(merge(data, _nest(given)))


def write_run_config(config: BaseModel, directory: Path, extra: Optional[Mapping[str, Any]] = None) -> Path:
    """Write the resolved config (plus `extra`) as run_config.json in `directory`."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    document = {"config": config.model_dump(mode="json", by_alias=True)}
    if extra:
        document.update(extra)
    path = directory / RUN_CONFIG_NAME
    path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    logger.info(f"Resolved config written to {path}")
    return path


def describe_validation_error(error: ValidationError) -> str:
    """One line per failing field."""
    return "; ".join(
        f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in error.errors()
    )
