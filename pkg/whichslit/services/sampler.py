"""
Born-rule Monte Carlo over the joint cavity × bin table.

Draws are produced in fixed-size chunks. Chunk ``c`` uses a generator seeded with
``SeedSequence([seed, c])``, so the outcome depends only on ``(seed, n, chunk_size)`` and
not on the number of workers.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from whichslit.analysis.families import INFERENCE_MAP
from whichslit.config import config
from whichslit.exceptions import InputError
from whichslit.operators.layout import CAVITIES
from whichslit.services.distributions import JointDistribution, joint_outcome_distribution
from whichslit.services.screen import ScreenModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SampleResult:
    """Counts per (cavity, bin) and the individual draws in draw order."""

    counts: np.ndarray
    cavity_idx: np.ndarray = field(repr=False)
    bin_idx: np.ndarray = field(repr=False)
    seed: int
    joint: JointDistribution = field(repr=False)

    @property
    def n(self) -> int:
        return int(self.cavity_idx.size)

    @property
    def cavity_frequencies(self) -> np.ndarray:
        return self.counts.sum(axis=1) / self.n

    @property
    def screen_frequencies(self) -> np.ndarray:
        return self.counts.sum(axis=0) / self.n

    def labels(self) -> List[Tuple[str, str]]:
        """(slit, G-or-G′) inferred from the cavity of each draw."""
        return [INFERENCE_MAP[CAVITIES[index]] for index in self.cavity_idx]


def _cdf(probabilities: np.ndarray) -> np.ndarray:
    flat = np.clip(probabilities.ravel(), 0.0, None)
    total = flat.sum()
    if total <= 0.0:
        raise InputError("joint distribution has no mass")
    cdf = np.cumsum(flat / total)
    cdf[-1] = 1.0
    return cdf


def _draw_chunk(cdf: np.ndarray, seed: int, chunk: int, size: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([seed, chunk]))
    cells = np.searchsorted(cdf, rng.random(size), side="right")
    return np.minimum(cells, cdf.size - 1)


def sample_runs(
    instance,
    screen: ScreenModel,
    n: int,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    chunk_size: Optional[int] = None,
) -> SampleResult:
    """
    Draw ``n`` independent runs of the apparatus.

    Args:
        instance: ``ProblemInstance`` (or ``BlockState``) to sample.
        screen: Screen model matching the instance's H1.
        n: Number of runs, at least 1.
        seed: Base seed; the configured sampler seed when None.
        workers: Thread count for chunk generation.
        chunk_size: Draws per chunk.
    """
    settings = config.get_service_config("sampler")
    seed = int(settings.get("seed", 7) if seed is None else seed)
    workers = int(settings.get("workers", 1) if workers is None else workers)
    chunk_size = int(settings.get("chunk_size", 100000) if chunk_size is None else chunk_size)
    if n < 1:
        raise InputError(f"sample size must be at least 1, got {n}")
    if workers < 1 or chunk_size < 1:
        raise InputError("workers and chunk_size must be positive")

    joint = joint_outcome_distribution(instance, screen)
    cdf = _cdf(joint.probabilities)
    sizes = [min(chunk_size, n - start) for start in range(0, n, chunk_size)]

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda item: _draw_chunk(cdf, seed, item[0], item[1]), enumerate(sizes)))
    else:
        chunks = [_draw_chunk(cdf, seed, index, size) for index, size in enumerate(sizes)]
    cells = np.concatenate(chunks)

    n_bins = screen.n_bins
    counts = np.bincount(cells, minlength=cdf.size).reshape(len(CAVITIES), n_bins)
    logger.debug("sampled %d runs in %d chunks with seed %d", n, len(sizes), seed)
    return SampleResult(
        counts=counts,
        cavity_idx=cells // n_bins,
        bin_idx=cells % n_bins,
        seed=seed,
        joint=joint,
    )
