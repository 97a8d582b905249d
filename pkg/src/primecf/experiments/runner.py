"""Parallel driver: lane batches of trajectories with derived seeds."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable

import numpy as np

from ..cf_stream import make_batch
from .config import ExperimentConfig
from .seeds import derive_seed

LANES = 8
BLOCK = 1 << 14


def trajectory_seeds(cfg: ExperimentConfig) -> list[int]:
    return [derive_seed(cfg.seed, i) for i in range(cfg.trajectories)]


def map_batches(cfg: ExperimentConfig, work: Callable[[list[int]], dict]) -> dict:
    """Apply ``work`` to consecutive seed batches and concatenate its per-lane arrays.

    Batch composition depends only on the trajectory count, and results are
    reduced in trajectory order, so the thread count never changes the output.
    """
    seeds = trajectory_seeds(cfg)
    batches = [seeds[i : i + LANES] for i in range(0, len(seeds), LANES)]
    if cfg.threads == 1:
        parts = [work(b) for b in batches]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(work, batches))
    return {key: np.concatenate([np.asarray(p[key]) for p in parts]) for key in parts[0]}


def open_batch(cfg: ExperimentConfig, seeds: list[int]):
    return make_batch(cfg.backend, seeds, cfg.initial_law)


def drive(source, summary, stops: Iterable[int], block: int = BLOCK):
    """Advance ``summary`` with blocks from ``source``, yielding at each stop position."""
    for stop in sorted(set(int(s) for s in stops)):
        while summary.n < stop:
            summary.update_block(source.next_block(min(block, stop - summary.n)))
        yield stop
