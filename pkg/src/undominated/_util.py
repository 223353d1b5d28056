"""Shared helpers: exact rational thresholds, seed splitting, worker pools."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

JOBS_ENV_VAR = "UNDOMINATED_JOBS"


class InputError(ValueError):
    """An argument violates a documented precondition."""


class ResourceLimitError(RuntimeError):
    """An enumeration exceeded its configured node budget."""


class NotConvergedError(RuntimeError):
    """An equilibrium solve ended without a certified fixed point.

    Carries the best-effort result so callers can inspect the certificate.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


def as_fraction(x) -> Fraction:
    """Coerce ``x`` to an exact :class:`~fractions.Fraction`.

    Floats are interpreted through their shortest decimal repr, so
    ``as_fraction(0.39) == Fraction(39, 100)``.  Pass a string such as
    ``"39/100"`` when the denominator matters.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse {x!r} as a rational") from exc
    if isinstance(x, float):
        return Fraction(str(x))
    raise InputError(f"cannot interpret {type(x).__name__} as a rational")


def floor_mul(alpha: Fraction, n: int) -> int:
    """Exact ``floor(alpha * n)`` using integer arithmetic only."""
    return (alpha.numerator * n) // alpha.denominator


def sub_rng(seed: int, *key: int) -> np.random.Generator:
    """Child generator for component ``key`` under the global ``seed``.

    The (seed, key...) tuple feeds a SeedSequence, so every component
    draws from an independent stream that is reproducible from the one
    user-facing seed.
    """
    if seed < 0:
        raise InputError("seed must be non-negative")
    entropy = (int(seed),) + tuple(int(k) for k in key)
    return np.random.default_rng(np.random.SeedSequence(entropy))


def resolve_jobs(jobs: int | None) -> int:
    if jobs is None:
        jobs = int(os.environ.get(JOBS_ENV_VAR, "1"))
    if jobs < 1:
        raise InputError("jobs must be >= 1")
    return jobs


def map_chunks(fn, chunks, jobs: int):
    """Apply ``fn`` to each chunk, in order, optionally on a thread pool.

    Results come back in submission order, so any reduction that treats
    the chunk list sequentially is independent of the worker count.
    """
    chunks = list(chunks)
    if jobs <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=min(jobs, len(chunks))) as pool:
        return list(pool.map(fn, chunks))
