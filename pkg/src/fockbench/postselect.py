"""Photon-number-resolving projective measurement on a subset of modes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import DomainError
from .fock import Occupation, PureState

PROBABILITY_FLOOR = 1e-12


@dataclass(frozen=True)
class Condition:
    count: int
    at_least: bool = False

    def __post_init__(self):
        if self.count < 0:
            raise DomainError("detector count must be non-negative")

    def matches(self, n: int) -> bool:
        return n >= self.count if self.at_least else n == self.count

    def __str__(self) -> str:
        return f"{'atleast' if self.at_least else 'exactly'} {self.count}"


def exactly(n: int) -> Condition:
    return Condition(n)


def at_least(n: int) -> Condition:
    return Condition(n, at_least=True)


@dataclass(frozen=True)
class DetectionPattern:
    """Per-mode count conditions defining one heralding event."""

    conditions: Mapping[int, Condition] = field(default_factory=dict)

    def __post_init__(self):
        conds = {}
        for mode, cond in dict(self.conditions).items():
            if not isinstance(cond, Condition):
                cond = exactly(int(cond))
            if mode < 0:
                raise DomainError(f"negative mode index {mode}")
            conds[int(mode)] = cond
        object.__setattr__(self, "conditions", dict(sorted(conds.items())))

    @classmethod
    def exact(cls, counts: Mapping[int, int]) -> "DetectionPattern":
        return cls({m: exactly(n) for m, n in counts.items()})

    @property
    def modes(self) -> tuple[int, ...]:
        return tuple(self.conditions)

    @property
    def removed_modes(self) -> tuple[int, ...]:
        return tuple(m for m, c in self.conditions.items() if not c.at_least)

    def matches(self, occ: Sequence[int]) -> bool:
        return all(c.matches(occ[m]) for m, c in self.conditions.items())


@dataclass(frozen=True)
class HeraldResult:
    probability: float
    conditional_state: PureState

    @property
    def succeeded(self) -> bool:
        return self.probability > PROBABILITY_FLOOR


def _drop_modes(occ: Occupation, drop: set[int]) -> Occupation:
    return tuple(n for k, n in enumerate(occ) if k not in drop)


def project(state: PureState, pattern: DetectionPattern) -> HeraldResult:
    """Keep the terms consistent with ``pattern`` and renormalize.

    Modes with ``exactly`` conditions are removed from the conditional
    state; ``at_least`` modes stay.
    """
    for m in pattern.modes:
        if m >= state.mode_count:
            raise DomainError(f"detector mode {m} out of range for {state.mode_count} modes")
    drop = set(pattern.removed_modes)
    remaining = state.mode_count - len(drop)
    kept = {}
    weights = []
    for occ, amp in state:
        if pattern.matches(occ):
            key = _drop_modes(occ, drop)
            kept[key] = kept.get(key, 0j) + amp
            weights.append(abs(amp) ** 2)
    probability = math.fsum(weights)
    if probability <= PROBABILITY_FLOOR:
        return HeraldResult(probability, PureState(remaining))
    scale = 1.0 / math.sqrt(probability)
    return HeraldResult(probability, PureState(remaining, {k: a * scale for k, a in kept.items()}))


def enumerate_outcomes(
    state: PureState, detected_modes: Sequence[int]
) -> list[tuple[tuple[int, ...], float, PureState]]:
    """Every detector outcome in the state's support, sorted by counts.

    Returns ``(counts, probability, conditional_state)`` triples, where
    ``counts`` follows the order of ``detected_modes``.
    """
    modes = list(detected_modes)
    if len(set(modes)) != len(modes):
        raise DomainError("detected modes must be distinct")
    for m in modes:
        if not 0 <= m < state.mode_count:
            raise DomainError(f"detector mode {m} out of range")
    seen = sorted({tuple(occ[m] for m in modes) for occ, _ in state})
    outcomes = []
    for counts in seen:
        res = project(state, DetectionPattern.exact(dict(zip(modes, counts))))
        if res.succeeded:
            outcomes.append((counts, res.probability, res.conditional_state))
    return outcomes
