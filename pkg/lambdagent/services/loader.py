"""
Loading of configuration and oracle-script files.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, List, Mapping, Tuple, Union

import yaml

from lambdagent.core.errors import ConfigLoadError
from lambdagent.services.oracles import ScriptedOracle
from lambdagent.services.tools import ToolRegistry

logger = logging.getLogger(__name__)

YAML_EXTENSIONS = {".yaml", ".yml"}
JSON_EXTENSIONS = {".json"}
CONFIG_EXTENSIONS = YAML_EXTENSIONS | JSON_EXTENSIONS

PathLike = Union[str, os.PathLike]


def parse_text(text: str, extension: str) -> Any:
    """Parse YAML or JSON text according to a file extension."""
    extension = extension.lower()
    try:
        if extension in YAML_EXTENSIONS:
            return yaml.safe_load(text)
        if extension in JSON_EXTENSIONS:
            return json.loads(text)
    except (yaml.YAMLError, ValueError) as e:
        raise ConfigLoadError(f"cannot parse {extension} document: {e}") from e
    raise ConfigLoadError(f"unsupported file type {extension!r}; expected one of {sorted(CONFIG_EXTENSIONS)}")


def load_document(path: PathLike) -> Any:
    """Read and parse a YAML or JSON file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigLoadError(f"cannot read {path}: {e}") from e
    try:
        return parse_text(text, path.suffix)
    except ConfigLoadError as e:
        raise ConfigLoadError(f"{path}: {e}") from e


def find_configs(root: PathLike) -> List[Path]:
    """Config files under ``root`` (or ``root`` itself), sorted by path."""
    root = Path(root)
    if root.is_file():
        return [root]
    if not root.is_dir():
        raise ConfigLoadError(f"no such file or directory: {root}")
    return sorted(p for p in root.rglob("*") if p.is_file() and p.suffix.lower() in CONFIG_EXTENSIONS)


def load_oracle_script(path: PathLike, registry: ToolRegistry) -> Tuple[ScriptedOracle, Mapping]:
    """Load an oracle script; its ``tools`` tables are bound into ``registry``."""
    doc = load_document(path)
    if not isinstance(doc, Mapping):
        raise ConfigLoadError(f"{path}: oracle script must be a mapping")
    for name, table in (doc.get("tools") or {}).items():
        if not isinstance(table, Mapping):
            raise ConfigLoadError(f"{path}: tools.{name} must map arguments to outputs")
        registry.bind_table(str(name), {str(k): str(v) for k, v in table.items()})
        logger.debug("bound scripted tool %s (%d rows)", name, len(table))
    return ScriptedOracle.from_document(doc), doc
