"""Election data model, t-preference relation, and exhaustive verification.

An :class:`Election` holds complete strict rankings; :class:`Committee`
is a candidate subset.  ``undominance_check`` is the independent verifier
every construction is measured against, and
``min_undominated_size_oracle`` is the brute-force ground truth for
committee-size claims at desk scale.

Thresholds compare exactly: a committee passes at level ``alpha`` when no
outsider is t-preferred over it by more than ``floor(alpha * n)`` voters,
evaluated in integer arithmetic on ``alpha``'s numerator and denominator.
"""

from __future__ import annotations

import dataclasses
import hashlib
import itertools
import json
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from . import _backend
from ._util import InputError, ResourceLimitError, as_fraction, floor_mul, map_chunks, resolve_jobs

_K = _backend.load_kernels()

__all__ = [
    "Election",
    "Committee",
    "UndominanceReport",
    "prefers",
    "t_prefers_committee",
    "undominance_check",
    "min_undominated_size_oracle",
    "parse_election",
    "format_election",
    "load_election",
    "save_election",
    "random_election",
]

ORACLE_NODE_LIMIT = 5_000_000
_CHUNK = 4096


class Election:
    """n voters' strict rankings over m candidates.

    Parameters
    ----------
    rankings:
        Sequence of n rows; row v is a permutation of ``0..m-1`` listing
        candidates from most to least preferred.
    """

    __slots__ = ("rankings", "positions")

    def __init__(self, rankings):
        arr = np.asarray(rankings, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError("rankings must be a non-empty 2-d array")
        n, m = arr.shape
        expected = np.arange(m, dtype=np.int64)
        if not np.all(np.sort(arr, axis=1) == expected[None, :]):
            raise InputError("every ranking must be a permutation of 0..m-1")
        pos = np.empty_like(arr)
        rows = np.arange(n)[:, None]
        pos[rows, arr] = expected[None, :]
        self.rankings = arr
        self.positions = pos  # positions[v, c] = rank of c for voter v (0 = best)
        self.rankings.setflags(write=False)
        self.positions.setflags(write=False)

    @property
    def n(self) -> int:
        return self.rankings.shape[0]

    @property
    def m(self) -> int:
        return self.rankings.shape[1]

    def __eq__(self, other):
        return isinstance(other, Election) and np.array_equal(self.rankings, other.rankings)

    def __repr__(self):
        return f"Election(n={self.n}, m={self.m})"

    def digest(self) -> str:
        """sha256 of the canonical text serialization."""
        return hashlib.sha256(format_election(self).encode()).hexdigest()


@dataclasses.dataclass(frozen=True)
class Committee:
    """Sorted, duplicate-free subset of candidate indices."""

    members: tuple

    def __post_init__(self):
        mem = tuple(sorted(set(int(a) for a in self.members)))
        if any(a < 0 for a in mem):
            raise InputError("candidate indices must be non-negative")
        object.__setattr__(self, "members", mem)

    @staticmethod
    def of(members: Iterable[int]) -> "Committee":
        return Committee(tuple(members))

    @property
    def size(self) -> int:
        return len(self.members)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.members, dtype=np.int64)

    def __contains__(self, a) -> bool:
        return int(a) in self.members

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


@dataclasses.dataclass(frozen=True)
class UndominanceReport:
    """Verifier output for one committee at depth t and level alpha.

    ``per_outsider[a]`` counts voters who t-prefer outsider ``a`` over the
    committee; ``passed`` holds iff every count is at most
    ``floor(alpha * n)`` (the ``threshold`` field).
    """

    t: int
    alpha: Fraction
    n: int
    committee: Committee
    per_outsider: dict
    worst_outsider: Optional[int]
    threshold: int
    passed: bool

    @property
    def max_dissent(self) -> int:
        if not self.per_outsider:
            return 0
        return self.per_outsider[self.worst_outsider]

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "alpha": str(self.alpha),
            "n": self.n,
            "committee": list(self.committee.members),
            "per_outsider": {str(k): v for k, v in sorted(self.per_outsider.items())},
            "worst_outsider": self.worst_outsider,
            "threshold": self.threshold,
            "max_dissent": self.max_dissent,
            "pass": self.passed,
        }


def _check_voter(e: Election, v: int):
    if not 0 <= v < e.n:
        raise InputError(f"voter index {v} out of range for n={e.n}")


def _check_candidate(e: Election, a: int):
    if not 0 <= a < e.m:
        raise InputError(f"candidate index {a} out of range for m={e.m}")


def prefers(e: Election, v: int, a: int, b: int) -> bool:
    """True iff voter v ranks candidate a strictly above b."""
    _check_voter(e, v)
    _check_candidate(e, a)
    _check_candidate(e, b)
    return bool(e.positions[v, a] < e.positions[v, b])


def t_prefers_committee(e: Election, v: int, c: Committee, a: int, t: int) -> bool:
    """True iff at least t committee members rank above outsider a for v."""
    _check_voter(e, v)
    _check_candidate(e, a)
    if a in c:
        raise InputError(f"candidate {a} is a committee member, not an outsider")
    if not 1 <= t <= c.size:
        raise InputError(f"need 1 <= t <= |committee|, got t={t}, size={c.size}")
    members = c.as_array()
    if members.size and int(members.max()) >= e.m:
        raise InputError("committee contains candidates outside the election")
    better = int(np.sum(e.positions[v, members] < e.positions[v, a]))
    return better >= t


def undominance_check(e: Election, c: Committee, t: int, alpha) -> UndominanceReport:
    """Exhaustive (t, alpha)-undominance verification.

    Counts, for every outsider, the voters who t-prefer it over the
    committee, and compares the worst count against ``floor(alpha * n)``
    with exact rational arithmetic.
    """
    alpha = as_fraction(alpha)
    if not 0 < alpha <= 1:
        raise InputError(f"alpha must lie in (0, 1], got {alpha}")
    if not 1 <= t <= c.size:
        raise InputError(f"need 1 <= t <= |committee|, got t={t}, size={c.size}")
    members = c.as_array()
    if members.size and int(members.max()) >= e.m:
        raise InputError("committee contains candidates outside the election")
    threshold = floor_mul(alpha, e.n)
    counts = _K.dissent_counts(e.positions, members, t)
    outsiders = [a for a in range(e.m) if a not in c]
    per_outsider = {a: int(counts[a]) for a in outsiders}
    if outsiders:
        worst = max(outsiders, key=lambda a: (per_outsider[a], -a))
        passed = per_outsider[worst] <= threshold
    else:
        worst = None
        passed = True
    return UndominanceReport(
        t=t,
        alpha=alpha,
        n=e.n,
        committee=c,
        per_outsider=per_outsider,
        worst_outsider=worst,
        threshold=threshold,
        passed=passed,
    )


def min_undominated_size_oracle(
    e: Election,
    t: int,
    alpha,
    size_cap: int,
    *,
    node_limit: int = ORACLE_NODE_LIMIT,
    jobs: int | None = None,
    return_witness: bool = False,
):
    """Smallest k with a (t, alpha)-undominated committee of size k.

    Enumerates subsets per size in lexicographic order and returns the
    first passing size, or ``None`` when no committee of size at most
    ``size_cap`` passes.  With ``return_witness=True`` also returns the
    lexicographically first passing committee.

    Raises :class:`ResourceLimitError` once more than ``node_limit``
    committees have been examined.
    """
    alpha = as_fraction(alpha)
    if not 0 < alpha <= 1:
        raise InputError(f"alpha must lie in (0, 1], got {alpha}")
    if t < 1:
        raise InputError("t must be >= 1")
    if size_cap > e.m:
        raise InputError(f"size_cap {size_cap} exceeds candidate count {e.m}")
    jobs = resolve_jobs(jobs)
    threshold = floor_mul(alpha, e.n)
    pos = e.positions
    examined = 0
    for k in range(max(t, 1), size_cap + 1):
        combo_iter = itertools.combinations(range(e.m), k)
        while True:
            chunks = []
            for _ in range(jobs):
                block = list(itertools.islice(combo_iter, _CHUNK))
                if block:
                    chunks.append(np.asarray(block, dtype=np.int64))
            if not chunks:
                break
            examined += sum(ch.shape[0] for ch in chunks)
            if examined > node_limit:
                raise ResourceLimitError(
                    f"oracle exceeded node limit {node_limit} (size {k})")
            hits = map_chunks(
                lambda ch: _K.first_passing_committee(pos, ch, t, threshold),
                chunks,
                jobs,
            )
            for ch, hit in zip(chunks, hits):
                if hit >= 0:
                    witness = Committee.of(ch[hit].tolist())
                    return (k, witness) if return_witness else k
    return (None, None) if return_witness else None


# ---------------------------------------------------------------------------
# serialization: the ".elect" text format and a JSON equivalent


def parse_election(text: str) -> Election:
    """Parse the ``.elect`` text format (or its JSON equivalent).

    Text format: first data line ``n m``, then n lines with a
    space-separated permutation of ``0..m-1`` each (most preferred
    first).  Lines starting with ``#`` are comments.  A JSON object with
    the same fields (``n``, ``m``, ``rankings``) is accepted
    interchangeably.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON election: {exc}") from exc
        try:
            n, m, rankings = int(doc["n"]), int(doc["m"]), doc["rankings"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("JSON election needs fields n, m, rankings") from exc
        if len(rankings) != n or any(len(r) != m for r in rankings):
            raise InputError("JSON rankings shape does not match n, m")
        return Election(rankings)
    lines = [ln.strip() for ln in text.splitlines()]
    data = [(i + 1, ln) for i, ln in enumerate(lines) if ln and not ln.startswith("#")]
    if not data:
        raise InputError("empty election file")
    lineno, header = data[0]
    parts = header.split()
    if len(parts) != 2:
        raise InputError(f"line {lineno}: expected 'n m', got {header!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise InputError(f"line {lineno}: expected integers 'n m'") from exc
    if n < 1 or m < 1:
        raise InputError(f"line {lineno}: need n >= 1 and m >= 1")
    if len(data) - 1 != n:
        raise InputError(f"expected {n} ranking lines, found {len(data) - 1}")
    rankings = []
    for lineno, ln in data[1:]:
        try:
            row = [int(tok) for tok in ln.split()]
        except ValueError as exc:
            raise InputError(f"line {lineno}: non-integer ranking entry") from exc
        if len(row) != m:
            raise InputError(f"line {lineno}: expected {m} entries, got {len(row)}")
        rankings.append(row)
    try:
        return Election(rankings)
    except InputError as exc:
        raise InputError(f"invalid rankings: {exc}") from exc


def format_election(e: Election) -> str:
    rows = [f"{e.n} {e.m}"]
    rows.extend(" ".join(str(int(c)) for c in row) for row in e.rankings)
    return "\n".join(rows) + "\n"


def load_election(path) -> Election:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_election(fh.read())


def save_election(e: Election, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_election(e))


def random_election(n: int, m: int, rng: np.random.Generator) -> Election:
    """Impartial culture: each voter an independent uniform permutation."""
    if n < 1 or m < 1:
        raise InputError("need n >= 1 and m >= 1")
    return Election(np.stack([rng.permutation(m) for _ in range(n)]))
