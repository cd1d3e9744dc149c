"""Problem instances, offline summaries and per-run algorithm state.

Arms are 0-indexed throughout the library; CSV columns and printed tables
use 1-based labels (``pulls_1`` ...).  Rewards are unit-variance Gaussians,
so no variance is carried anywhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from lucbh.errors import DeltaOutOfRange, DuplicateBest, LengthMismatch, ParseError

#: Bias bound meaning "no prior knowledge".  IEEE infinity keeps min/max exact.
UNBOUNDED = math.inf


def is_unbounded(x: float) -> bool:
    return x == UNBOUNDED


@dataclass(frozen=True)
class Instance:
    k: int
    mu_on: tuple[float, ...]
    mu_off: tuple[float, ...]
    t_s: tuple[int, ...]
    v: tuple[float, ...]
    delta: float

    @property
    def best_arm(self) -> int:
        return max(range(self.k), key=lambda i: self.mu_on[i])

    def replace(self, **changes: Any) -> "Instance":
        """Copy with some fields changed; the result is re-validated."""
        fields = {
            "k": self.k,
            "mu_on": self.mu_on,
            "mu_off": self.mu_off,
            "t_s": self.t_s,
            "v": self.v,
            "delta": self.delta,
        }
        fields.update(changes)
        return build_instance(**fields)

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "mu_on": list(self.mu_on),
            "mu_off": list(self.mu_off),
            "t_s": list(self.t_s),
            "v": ["inf" if is_unbounded(x) else x for x in self.v],
            "delta": self.delta,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "Instance":
        try:
            v = [UNBOUNDED if x == "inf" else float(x) for x in doc["v"]]
            return build_instance(
                k=int(doc["k"]),
                mu_on=[float(x) for x in doc["mu_on"]],
                mu_off=[float(x) for x in doc["mu_off"]],
                t_s=[int(x) for x in doc["t_s"]],
                v=v,
                delta=float(doc["delta"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, (DuplicateBest, LengthMismatch, DeltaOutOfRange)):
                raise
            raise ParseError(f"malformed instance document: {exc}") from exc


@dataclass(frozen=True)
class OfflineSummary:
    t_s: tuple[int, ...]
    x_hat: tuple[float, ...]


@dataclass
class AlgorithmState:
    """Mutable per-trial state: round index ``t``, counts and online means."""

    t: int
    n: list[int]
    y_hat: list[float]

    @classmethod
    def empty(cls, k: int) -> "AlgorithmState":
        return cls(t=1, n=[0] * k, y_hat=[0.0] * k)

    def record(self, arm: int, reward: float) -> None:
        n = self.n[arm]
        self.y_hat[arm] = (n * self.y_hat[arm] + reward) / (n + 1)
        self.n[arm] = n + 1


@dataclass(frozen=True)
class GapProfile:
    delta_i: tuple[float, ...]
    eta: tuple[float, ...]


def build_instance(
    k: int,
    mu_on: Sequence[float],
    mu_off: Sequence[float],
    t_s: Sequence[int],
    v: Sequence[float],
    delta: float,
) -> Instance:
    """Validate inputs and freeze them into an :class:`Instance`.

    Raises:
        LengthMismatch: a list is not of length ``k`` or ``k < 2``.
        DeltaOutOfRange: ``delta`` is not in (0, 1).
        DuplicateBest: the largest online mean is attained more than once.
    """
    if k < 2:
        raise LengthMismatch(f"need at least two arms, got k={k}")
    for name, seq in (("mu_on", mu_on), ("mu_off", mu_off), ("t_s", t_s), ("v", v)):
        if len(seq) != k:
            raise LengthMismatch(f"{name} has length {len(seq)}, expected {k}")
    if not 0.0 < delta < 1.0:
        raise DeltaOutOfRange(f"delta must lie in (0, 1), got {delta}")
    if any(int(x) != x or x < 0 for x in t_s):
        raise ValueError(f"t_s entries must be nonnegative integers, got {list(t_s)}")
    if any(not (x >= 0) for x in v):
        raise ValueError(f"v entries must be nonnegative or UNBOUNDED, got {list(v)}")
    if any(not math.isfinite(x) for x in (*mu_on, *mu_off)):
        raise ValueError("means must be finite")

    top = max(mu_on)
    if sum(1 for x in mu_on if x == top) != 1:
        raise DuplicateBest(f"several arms share the largest online mean {top}")

    return Instance(
        k=k,
        mu_on=tuple(float(x) for x in mu_on),
        mu_off=tuple(float(x) for x in mu_off),
        t_s=tuple(int(x) for x in t_s),
        v=tuple(float(x) for x in v),
        delta=float(delta),
    )


def gap_profile(inst: Instance) -> GapProfile:
    top = inst.mu_on[inst.best_arm]
    gaps = tuple(top - m for m in inst.mu_on)
    eta = tuple(
        UNBOUNDED if is_unbounded(v) else v + off - on
        for v, off, on in zip(inst.v, inst.mu_off, inst.mu_on)
    )
    return GapProfile(delta_i=gaps, eta=eta)


def check_validity(inst: Instance) -> list[bool]:
    """Per arm: is ``v[i]`` a valid bound on the offline/online mean shift?"""
    return [
        is_unbounded(v) or v >= abs(off - on)
        for v, off, on in zip(inst.v, inst.mu_off, inst.mu_on)
    ]


def load_instance(path: str | Path) -> Instance:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return Instance.from_dict(doc)


def dump_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(inst.to_dict(), indent=2) + "\n")
