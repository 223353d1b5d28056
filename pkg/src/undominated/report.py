"""Structured run reports.

A report is a canonical JSON document: fixed key order, exact rational
strings, no wall-clock content, so re-running a command with the same
seed reproduces the bytes regardless of worker count.  Timings are
printed to stderr only.
"""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction

import numpy as np


def _canonical(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    return obj


@dataclasses.dataclass
class RunReport:
    """Self-describing record of one CLI invocation.

    Every number in the body is regenerable from the header (command,
    input digest, seed, parameters) alone.
    """

    command: list
    seed: int | None = None
    input_digest: str | None = None
    parameters: dict = dataclasses.field(default_factory=dict)
    committee: list | None = None
    verifier: dict | None = None
    certificate: dict | None = None
    extra: dict = dataclasses.field(default_factory=dict)

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "seed": self.seed,
            "input_digest": self.input_digest,
            "parameters": _canonical(self.parameters),
            "committee": self.committee,
            "verifier": _canonical(self.verifier),
            "certificate": _canonical(self.certificate),
        }
        doc.update(_canonical(self.extra))
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
