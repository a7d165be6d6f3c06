"""
Reading run configuration documents from disk.

A bare file name that does not exist in the working directory is looked up
among the documents bundled in ``delta_identity/data`` (``smoke.json``).
"""

from __future__ import annotations

import logging
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from delta_identity.errors import ConfigError

logger = logging.getLogger(__name__)


def bundled_documents() -> List[str]:
    """Names of the configuration documents shipped with the package."""
    data = resources.files("delta_identity") / "data"
    return sorted(entry.name for entry in data.iterdir() if entry.name.endswith(".json"))


def _bundled_text(path: Path) -> Optional[str]:
    if path.exists() or path.parent != Path(".") or path.name not in bundled_documents():
        return None
    logger.info("Using bundled configuration %s", path.name)
    return (resources.files("delta_identity") / "data" / path.name).read_text(encoding="utf-8")


def load_document(path: Path) -> Tuple[Dict[str, Any], str]:
    """
    Load a JSON (or YAML) configuration document.

    :param path: Document path, or the name of a bundled document.
    :return: The parsed mapping and the raw text (for provenance hashing).
    :raises ConfigError: If the file cannot be read or is not a mapping.
    """
    path = Path(path)
    logger.debug("Loading configuration from %s", path)
    text = _bundled_text(path)
    if text is None:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path} is not valid JSON/YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return doc, text
