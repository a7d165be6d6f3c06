"""
Source fingerprinting utilities.

Ties a report to the exact configuration document that produced it. The
provenance block holds the path and the SHA-256 of the document text and
nothing time-dependent, so reruns of the same document produce
byte-identical reports.
"""

from __future__ import annotations

import hashlib
import logging
from pathlib import Path
from typing import Dict

logger = logging.getLogger(__name__)


def build_source_metadata(config_path: Path, text: str) -> Dict[str, str]:
    """
    Build the provenance block embedded under a report's ``source`` key.

    :param config_path: Path of the configuration document as given.
    :param text: Full text of the document.
    :return: ``{"config_path": ..., "sha256": ...}``.
    """
    sha = hashlib.sha256(text.encode("utf-8")).hexdigest()
    logger.debug("Source metadata for %s (sha256=%s...)", config_path, sha[:12])
    return {"config_path": str(config_path), "sha256": sha}
