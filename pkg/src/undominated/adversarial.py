"""Cyclic lower-bound elections and their exhaustive certification.

The construction places (k+1)*ell voters and candidates on a torus of
tuples (block, offset); each voter ranks candidates by shifting both
coordinates down by its own tuple, reverse-lexicographically.  Against
any committee of size k, some outsider is t-preferred by at least a
(1+t)/(1+k) * (1 - 1/ell) fraction of voters.
"""

from __future__ import annotations

import dataclasses
import itertools
from fractions import Fraction

import numpy as np

from . import _backend
from ._util import InputError, ResourceLimitError, map_chunks, resolve_jobs
from .election import Committee, Election

_K = _backend.load_kernels()

__all__ = ["CyclicInstanceSpec", "cyclic_instance", "verify_lower_bound", "LowerBoundResult"]

_CHUNK = 1024


@dataclasses.dataclass(frozen=True)
class CyclicInstanceSpec:
    """Parameters of the cyclic instance: n = m = (k+1) * ell."""

    k: int
    ell: int

    def __post_init__(self):
        if self.k < 1:
            raise InputError("k must be >= 1")
        if self.ell < 2:
            raise InputError("ell must be >= 2")

    @property
    def size(self) -> int:
        return (self.k + 1) * self.ell


def cyclic_instance(spec: CyclicInstanceSpec) -> Election:
    """Build the cyclic election.

    Voter (p, q) (index ell*p + q) ranks candidate (x, y) (index
    ell*x + y) before (x', y') iff (x-p) mod (k+1) < (x'-p) mod (k+1),
    or x == x' and (y-q) mod ell < (y'-q) mod ell.  Residues are
    normalized to [0, modulus) before comparison.
    """
    k, ell = spec.k, spec.ell
    size = spec.size
    blocks = np.arange(size) // ell
    offsets = np.arange(size) % ell
    rankings = np.empty((size, size), dtype=np.int64)
    for p in range(k + 1):
        for q in range(ell):
            v = ell * p + q
            key_block = (blocks - p) % (k + 1)
            key_off = (offsets - q) % ell
            rankings[v] = np.lexsort((key_off, key_block))
    return Election(rankings)


@dataclasses.dataclass(frozen=True)
class LowerBoundResult:
    """Exhaustive certificate that every size-k committee is beaten."""

    spec: CyclicInstanceSpec
    t: int
    worst_fraction: Fraction
    worst_committee: Committee
    bound: Fraction
    certified: bool
    witnesses: dict  # committee members tuple -> (outsider, dissent count)

    def to_dict(self) -> dict:
        return {
            "k": self.spec.k,
            "ell": self.spec.ell,
            "t": self.t,
            "worst_fraction": str(self.worst_fraction),
            "worst_committee": list(self.worst_committee.members),
            "bound": str(self.bound),
            "certified": self.certified,
            "committees_checked": len(self.witnesses),
        }


def verify_lower_bound(
    spec: CyclicInstanceSpec,
    t: int,
    *,
    jobs: int | None = None,
    node_limit: int = 10_000_000,
) -> LowerBoundResult:
    """Check every size-k committee against its best-dissenting outsider.

    For each committee the maximally dissenting outsider is recorded;
    the minimum of those maxima, as an exact fraction of n, is asserted
    to be at least (1+t)/(1+k) * (1 - 1/ell).
    """
    if t > spec.k:
        raise InputError(f"need t <= k, got t={t}, k={spec.k}")
    if t < 1:
        raise InputError("t must be >= 1")
    jobs = resolve_jobs(jobs)
    e = cyclic_instance(spec)
    n = e.n
    total = 1
    for i in range(spec.k):
        total = total * (e.m - i) // (i + 1)
    if total > node_limit:
        raise ResourceLimitError(
            f"C({e.m},{spec.k}) = {total} committees exceeds node limit {node_limit}")
    pos = e.positions
    combo_iter = itertools.combinations(range(e.m), spec.k)
    witnesses: dict = {}
    min_count = None
    argmin_committee = None
    while True:
        chunks = []
        for _ in range(jobs):
            block = list(itertools.islice(combo_iter, _CHUNK))
            if block:
                chunks.append(np.asarray(block, dtype=np.int64))
        if not chunks:
            break
        results = map_chunks(lambda ch: _K.batch_max_dissent(pos, ch, t), chunks, jobs)
        for ch, (counts, args) in zip(chunks, results):
            for row, cnt, arg in zip(ch, counts, args):
                key = tuple(int(c) for c in row)
                witnesses[key] = (int(arg), int(cnt))
                if min_count is None or cnt < min_count:
                    min_count = int(cnt)
                    argmin_committee = key
    worst_fraction = Fraction(min_count, n)
    bound = Fraction((1 + t) * (spec.ell - 1), (1 + spec.k) * spec.ell)
    return LowerBoundResult(
        spec=spec,
        t=t,
        worst_fraction=worst_fraction,
        worst_committee=Committee.of(argmin_committee),
        bound=bound,
        certified=worst_fraction >= bound,
        witnesses=witnesses,
    )
