"""Randomized conversion of fractional allocations into committees.

``sample_iid`` backs the depth-1 construction (k independent draws from
a lottery, duplicates collapse); ``dependent_round`` backs the deeper
constructions with a pairwise pipage walk that preserves marginals,
keeps the drawn cardinality in {floor(B), ceil(B)} on every single draw,
and leaves the coordinates negatively correlated.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import _backend
from ._util import InputError
from .election import Committee

_K = _backend.load_kernels()

__all__ = ["RoundingOutcome", "sample_iid", "dependent_round", "rounding_statistics"]

SNAP = 1e-9  # coordinates this close to {0, 1} are treated as integral


@dataclasses.dataclass(frozen=True)
class RoundingOutcome:
    """One dependent-rounding draw: a binary vector plus the seed used."""

    selected: np.ndarray
    seed: int

    @property
    def committee(self) -> Committee:
        return Committee.of(np.nonzero(self.selected)[0].tolist())

    @property
    def size(self) -> int:
        return int(self.selected.sum())


def sample_iid(y, k: int, rng: np.random.Generator) -> Committee:
    """k i.i.d. category draws from the lottery y; duplicates collapse.

    y must be non-negative and sum to 1 within 1e-9; it is renormalized
    exactly before sampling.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    y = np.asarray(y, dtype=np.float64)
    if np.any(y < 0):
        raise InputError("lottery entries must be non-negative")
    total = float(y.sum())
    if abs(total - 1.0) > 1e-9:
        raise InputError(f"lottery must sum to 1 within 1e-9, got {total}")
    draws = rng.choice(y.shape[0], size=k, p=y / total)
    return Committee.of(np.unique(draws).tolist())


def dependent_round(y, rng: np.random.Generator, *, seed: int = -1) -> RoundingOutcome:
    """Pipage walk over the fractional coordinates of y.

    Repeatedly pairs the two leftmost fractional coordinates and shifts
    mass between them with probabilities proportional to the opposite
    headroom, until at most one coordinate is fractional; that one is
    resolved by a Bernoulli draw.  Every draw satisfies
    ``sum(selected) in {floor(sum y), ceil(sum y)}``; marginals are
    preserved and the coordinates are negatively correlated.
    """
    y = np.asarray(y, dtype=np.float64)
    if np.any(y < 0.0):
        raise InputError("entries must be non-negative")
    if np.any(y > 1.0 + SNAP):
        raise InputError("entries must not exceed 1")
    if float(y.sum()) <= 0.0:
        raise InputError("total mass must be positive")
    uniforms = rng.random(y.shape[0] + 1)
    selected = _K.pipage_round(np.clip(y, 0.0, 1.0), uniforms, SNAP)
    return RoundingOutcome(selected=selected, seed=seed)


def rounding_statistics(y, draws: int, rng: np.random.Generator, subsets=None):
    """Monte-Carlo summary over many draws of :func:`dependent_round`.

    Returns (per-coordinate selection frequencies, per-draw cardinality
    array, per-subset all-zero frequencies).  ``subsets`` is an optional
    list of index lists for the negative-correlation check.
    """
    y = np.asarray(y, dtype=np.float64)
    m = y.shape[0]
    if subsets is None:
        subsets = []
    max_len = max((len(s) for s in subsets), default=1)
    subs = np.full((max(len(subsets), 1), max_len), -1, dtype=np.int64)
    lens = np.zeros(max(len(subsets), 1), dtype=np.int64)
    for i, s in enumerate(subsets):
        subs[i, : len(s)] = s
        lens[i] = len(s)
    uniforms = rng.random((draws, m + 1))
    sel_counts, cards, zero_counts = _K.rounding_stats(
        np.clip(y, 0.0, 1.0), uniforms, SNAP, subs, lens)
    freqs = sel_counts.astype(np.float64) / draws
    zero_freqs = zero_counts[: len(subsets)].astype(np.float64) / draws
    return freqs, cards, zero_freqs
