"""Continuous income distributions on [0, 1] used by the equilibrium solver.

Two shapes are provided: a *threshold* distribution that smooths a
Bernoulli income (all-or-nothing with success probability ``beta``) into
a continuous CDF, and a uniform distribution on the top interval
``[1 - epsilon, 1]``.  Both are stored as piecewise-linear CDF knots and
are evaluated exactly by linear interpolation.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from ._util import InputError

__all__ = [
    "IncomeDistribution",
    "make_threshold",
    "make_uniform_tail",
    "cdf",
    "expectation",
]


@dataclasses.dataclass(frozen=True)
class IncomeDistribution:
    """Piecewise-linear CDF on [0, 1].

    Attributes
    ----------
    kind:
        ``"threshold"`` or ``"uniform_tail"``.
    params:
        Constructor parameters, ``(beta, epsilon)`` or ``(epsilon,)``.
    knots_x, knots_f:
        CDF knots; ``knots_x`` is strictly increasing from 0 to 1,
        ``knots_f`` is non-decreasing from 0 to 1.
    """

    kind: str
    params: tuple
    knots_x: np.ndarray
    knots_f: np.ndarray

    def __post_init__(self):
        kx = np.asarray(self.knots_x, dtype=np.float64)
        kf = np.asarray(self.knots_f, dtype=np.float64)
        if kx.ndim != 1 or kx.shape != kf.shape:
            raise InputError("knot arrays must be 1-d and of equal length")
        if kx[0] != 0.0 or kx[-1] != 1.0 or kf[-1] != 1.0 or kf[0] < 0.0:
            raise InputError("knots must span [0, 1] with F(1) = 1")
        if np.any(np.diff(kx) <= 0) or np.any(np.diff(kf) < 0):
            raise InputError("knots must be strictly increasing in x, non-decreasing in F")
        kx.setflags(write=False)
        kf.setflags(write=False)
        object.__setattr__(self, "knots_x", kx)
        object.__setattr__(self, "knots_f", kf)

    def cdf(self, x):
        """F(x), clamped to {0, 1} outside the unit interval."""
        return np.interp(x, self.knots_x, self.knots_f)

    def expectation(self) -> float:
        """E[X] = 1 - integral of F, by exact trapezoids over the knots."""
        dx = np.diff(self.knots_x)
        avg = (self.knots_f[:-1] + self.knots_f[1:]) / 2.0
        return float(1.0 - np.sum(dx * avg))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": list(self.params),
            "knots_x": self.knots_x.tolist(),
            "knots_f": self.knots_f.tolist(),
        }

    @staticmethod
    def from_dict(d: dict) -> "IncomeDistribution":
        return IncomeDistribution(
            kind=str(d["kind"]),
            params=tuple(d["params"]),
            knots_x=np.asarray(d["knots_x"], dtype=np.float64),
            knots_f=np.asarray(d["knots_f"], dtype=np.float64),
        )


def make_threshold(beta: float, epsilon: float) -> IncomeDistribution:
    """Threshold income distribution with Pr[X >= 1 - epsilon] = beta.

    The CDF rises linearly from 0 to ``1 - beta`` on ``[0, eps0]`` with
    ``eps0 = min(epsilon, beta * epsilon / (1 - beta))``, stays flat up
    to ``1 - epsilon``, then rises linearly to 1.  The low block is
    squeezed so that E[X] <= beta always holds:

        E[X] = (1 - beta) * eps0 / 2 + beta * (1 - epsilon / 2)
             <= beta * epsilon / 2 + beta - beta * epsilon / 2 = beta.
    """
    beta = float(beta)
    epsilon = float(epsilon)
    if not 0.0 < beta < 1.0:
        raise InputError(f"beta must lie in (0, 1), got {beta}")
    if not 0.0 < epsilon < 0.5:
        raise InputError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    eps0 = min(epsilon, beta * epsilon / (1.0 - beta))
    kx = np.array([0.0, eps0, 1.0 - epsilon, 1.0])
    kf = np.array([0.0, 1.0 - beta, 1.0 - beta, 1.0])
    return IncomeDistribution("threshold", (beta, epsilon), kx, kf)


def make_uniform_tail(epsilon: float) -> IncomeDistribution:
    """Uniform income on [1 - epsilon, 1]; expectation 1 - epsilon / 2."""
    epsilon = float(epsilon)
    if not 0.0 < epsilon <= 1.0:
        raise InputError(f"epsilon must lie in (0, 1], got {epsilon}")
    if epsilon == 1.0:
        kx = np.array([0.0, 1.0])
        kf = np.array([0.0, 1.0])
    else:
        kx = np.array([0.0, 1.0 - epsilon, 1.0])
        kf = np.array([0.0, 0.0, 1.0])
    return IncomeDistribution("uniform_tail", (epsilon,), kx, kf)


def cdf(d: IncomeDistribution, x):
    return d.cdf(x)


def expectation(d: IncomeDistribution) -> float:
    return d.expectation()
