"""Projective spin measurements, Born probabilities and simulated records."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .linalg import AXES, IDENTITY, expectation, pauli, tensor_product
from .states import PurifiedParams, frame_vectors

FIRST, SECOND, JOINT = "first", "second", "joint"


@dataclass(frozen=True)
class Observable:
    axis: str
    subsystem: str = FIRST
    axis2: str | None = None

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"unknown axis {self.axis!r}")
        if self.subsystem not in (FIRST, SECOND, JOINT):
            raise ValueError(f"unknown subsystem {self.subsystem!r}")
        if (self.subsystem == JOINT) != (self.axis2 is not None):
            raise ValueError("axis2 is required for joint observables and only for them")
        if self.axis2 is not None and self.axis2 not in AXES:
            raise ValueError(f"unknown axis {self.axis2!r}")


class ObservationLevel(tuple):
    """Ordered, duplicate-free subset of {z, x, y} measured on the first qubit."""

    def __new__(cls, axes):
        axes = tuple(axes)
        if not axes:
            raise ValueError("an observation level needs at least one observable")
        if len(set(axes)) != len(axes):
            raise ValueError(f"duplicate observables in {axes}")
        for a in axes:
            if a not in AXES:
                raise ValueError(f"unknown axis {a!r}")
        return super().__new__(cls, axes)

    @property
    def complete(self) -> bool:
        return set(self) == set(AXES)


LEVEL_A = ObservationLevel(("z",))
LEVEL_B = ObservationLevel(("z", "x"))
LEVEL_C = ObservationLevel(("z", "x", "y"))
LEVELS = {"A": LEVEL_A, "B": LEVEL_B, "C": LEVEL_C}


def parse_level(level) -> ObservationLevel:
    if isinstance(level, str) and level in LEVELS:
        return LEVELS[level]
    return ObservationLevel(level)


def projector(obs: Observable, outcome: int) -> np.ndarray:
    if outcome not in (1, -1):
        raise ValueError("outcome must be +1 or -1")
    s = outcome
    if obs.subsystem == FIRST:
        return tensor_product((IDENTITY + s * pauli(obs.axis)) / 2, IDENTITY)
    if obs.subsystem == SECOND:
        return tensor_product(IDENTITY, (IDENTITY + s * pauli(obs.axis)) / 2)
    return (tensor_product(IDENTITY, IDENTITY) + s * tensor_product(pauli(obs.axis), pauli(obs.axis2))) / 2


def _clamp(p: float) -> float:
    if -1e-12 <= p < 0.0:
        return 0.0
    if 1.0 < p <= 1.0 + 1e-12:
        return 1.0
    return p


def born_probability(rho: np.ndarray, obs: Observable, outcome: int) -> float:
    """Tr(P rho) for a 4x4 state."""
    return _clamp(expectation(rho, projector(obs, outcome)))


_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


def born_probability_params(p: PurifiedParams, obs: Observable, outcome: int) -> float:
    """Closed-form outcome probability for a purified state given by its angles."""
    s = outcome
    f1 = frame_vectors(p.theta1, p.phi1)
    f2 = frame_vectors(p.theta2, p.phi2)
    i = _AXIS_INDEX[obs.axis]
    if obs.subsystem == FIRST:
        return _clamp(0.5 + s * np.cos(p.alpha) * f1.r[i] / 2)
    if obs.subsystem == SECOND:
        return _clamp(0.5 + s * np.cos(p.alpha) * f2.r[i] / 2)
    j = _AXIS_INDEX[obs.axis2]
    k1, l1, r1 = f1
    k2, l2, r2 = f2
    coherence = (k1[i] * k2[j] - l1[i] * l2[j]) * np.cos(p.psi) - (k1[i] * l2[j] + l1[i] * k2[j]) * np.sin(p.psi)
    return _clamp(0.5 + s * r1[i] * r2[j] / 2 + s * np.sin(p.alpha) / 2 * coherence)


@dataclass
class Dataset:
    """Ordered measurement record on the first qubit.

    ``events`` is a list of ``(axis, s)`` pairs; per-axis tallies are
    derived from it on demand.
    """

    level: ObservationLevel
    events: list = field(default_factory=list)
    seed: int | None = None
    schedule: dict | None = None

    def __post_init__(self):
        self.level = ObservationLevel(self.level)
        for axis, s in self.events:
            if axis not in self.level:
                raise ValueError(f"event on {axis!r} not in observation level {tuple(self.level)}")
            if s not in (1, -1):
                raise ValueError(f"invalid outcome {s!r}")

    @property
    def counts(self) -> dict:
        """axis -> (n_plus, n_minus) for every axis in the level."""
        tally = Counter(self.events)
        return {a: (tally[(a, 1)], tally[(a, -1)]) for a in self.level}

    def __len__(self):
        return len(self.events)

    def __add__(self, other: "Dataset") -> "Dataset":
        level = tuple(self.level) + tuple(a for a in other.level if a not in self.level)
        return Dataset(level, list(self.events) + list(other.events))

    def to_jsonl(self) -> str:
        header = {"level": list(self.level), "seed": self.seed, "schedule": self.schedule}
        lines = [json.dumps(header)]
        lines.extend(json.dumps({"obs": a, "s": s}) for a, s in self.events)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "Dataset":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty dataset file")
        header = json.loads(lines[0])
        if "level" not in header:
            raise ValueError("dataset header must carry 'level'")
        events = []
        for ln in lines[1:]:
            ev = json.loads(ln)
            events.append((ev["obs"], int(ev["s"])))
        return cls(header["level"], events, seed=header.get("seed"), schedule=header.get("schedule"))


def simulate_outcomes(true_state: np.ndarray, level, schedule, seed: int) -> Dataset:
    """Draw i.i.d. outcomes per observable and interleave them round-robin.

    ``schedule`` is either a mapping axis -> count or a single count used
    for every axis of the level.
    """
    level = ObservationLevel(level)
    if not isinstance(schedule, dict):
        schedule = {a: int(schedule) for a in level}
    schedule = {a: int(schedule.get(a, 0)) for a in level}
    if any(n < 0 for n in schedule.values()):
        raise ValueError("counts must be non-negative")
    rng = np.random.default_rng(seed)
    draws = []
    for a in level:
        p_plus = min(1.0, max(0.0, (1.0 + expectation(true_state, pauli(a))) / 2))
        u = rng.random(schedule[a])
        draws.append(np.where(u < p_plus, 1, -1))
    events = []
    for i in range(max(schedule.values(), default=0)):
        for a, d in zip(level, draws):
            if i < len(d):
                events.append((a, int(d[i])))
    return Dataset(level, events, seed=seed, schedule=schedule)


def empirical_frequencies(d: Dataset) -> dict:
    """axis -> (f_plus, f_minus); axes without events are omitted."""
    out = {}
    for a, (n_plus, n_minus) in d.counts.items():
        n = n_plus + n_minus
        if n:
            out[a] = (n_plus / n, n_minus / n)
    return out


def empirical_means(d: Dataset) -> dict:
    return {a: fp - fm for a, (fp, fm) in empirical_frequencies(d).items()}
