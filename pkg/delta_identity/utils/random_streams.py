"""
Deterministic random streams.

Every stochastic stage derives its generators from one root seed through
``numpy.random.SeedSequence.spawn``. Child ``k`` depends only on the root
seed and ``k``, so results do not depend on how work is scheduled across
processes.
"""

from __future__ import annotations

import logging
from typing import List

import numpy as np

logger = logging.getLogger(__name__)


def substreams(seed: int, count: int) -> List[np.random.SeedSequence]:
    """
    ``count`` independent child seed sequences of ``seed``.

    :param seed: Non-negative root seed.
    :param count: Number of children.
    :raises ValueError: On a negative seed or count.
    """
    if seed < 0:
        raise ValueError("seed must be >= 0")
    if count < 0:
        raise ValueError("stream count must be >= 0")
    return np.random.SeedSequence(seed).spawn(count)
