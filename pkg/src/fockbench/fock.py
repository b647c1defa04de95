"""Sparse multimode pure states in the photon-number (Fock) basis.

A state is an immutable map from occupation vectors (tuples of photon
counts, one per mode) to complex amplitudes.  Iteration is always in
lexicographic order of the occupation vectors so that every derived
quantity is reproducible bit-for-bit.
"""

from __future__ import annotations

import cmath
import contextlib
import contextvars
import math
import os
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import CapacityError, DomainError

PRUNE_THRESHOLD = 1e-12
NORM_TOL = 1e-10
DEFAULT_CUTOFF = 12

Occupation = tuple[int, ...]

_cutoff_override: contextvars.ContextVar[int | None] = contextvars.ContextVar(
    "fockbench_cutoff", default=None
)


def get_cutoff() -> int:
    """Active photon-number cutoff: context override, then env var, then 12."""
    override = _cutoff_override.get()
    if override is not None:
        return override
    env = os.environ.get("FOCKBENCH_CUTOFF")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise DomainError(f"FOCKBENCH_CUTOFF must be an integer, got {env!r}")
        if value < 0:
            raise DomainError("FOCKBENCH_CUTOFF must be non-negative")
        return value
    return DEFAULT_CUTOFF


@contextlib.contextmanager
def photon_cutoff(n: int):
    """Temporarily set the photon-number cutoff for the current context."""
    if n < 0:
        raise DomainError("cutoff must be non-negative")
    token = _cutoff_override.set(int(n))
    try:
        yield n
    finally:
        _cutoff_override.reset(token)


def check_capacity(total_photons: int, cutoff: int | None = None) -> None:
    limit = get_cutoff() if cutoff is None else cutoff
    if total_photons > limit:
        raise CapacityError(
            f"term with {total_photons} photons exceeds the cutoff of {limit}"
        )


def _as_occupation(counts: Iterable[int]) -> Occupation:
    occ = tuple(int(c) for c in counts)
    if any(c < 0 for c in occ):
        raise DomainError(f"negative photon count in {occ}")
    return occ


class PureState:
    """Immutable sparse pure state on ``mode_count`` bosonic modes."""

    __slots__ = ("_mode_count", "_terms")

    def __init__(self, mode_count: int, terms: Mapping[Occupation, complex] | None = None):
        # mode_count 0 is the scalar left over when every mode was measured
        if mode_count < 0:
            raise DomainError("mode_count must be non-negative")
        clean: dict[Occupation, complex] = {}
        for key, amp in (terms or {}).items():
            occ = _as_occupation(key)
            if len(occ) != mode_count:
                raise DomainError(
                    f"occupation {occ} has length {len(occ)}, expected {mode_count}"
                )
            amp = complex(amp)
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise DomainError(f"non-finite amplitude for {occ}")
            if abs(amp) ** 2 >= PRUNE_THRESHOLD:
                clean[occ] = amp
        self._mode_count = mode_count
        self._terms = MappingProxyType(dict(sorted(clean.items())))

    @property
    def mode_count(self) -> int:
        return self._mode_count

    @property
    def terms(self) -> Mapping[Occupation, complex]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[Occupation, complex]]:
        return iter(self._terms.items())

    def __getitem__(self, key: Sequence[int]) -> complex:
        return self._terms.get(tuple(key), 0j)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PureState):
            return NotImplemented
        return self._mode_count == other._mode_count and dict(self._terms) == dict(other._terms)

    def __hash__(self) -> int:
        return hash((self._mode_count, tuple(self._terms.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v:.6g}" for k, v in list(self._terms.items())[:6])
        more = ", ..." if len(self._terms) > 6 else ""
        return f"PureState({self._mode_count}, {{{body}{more}}})"

    def is_zero(self) -> bool:
        return not self._terms

    def norm_sq(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self._terms.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_sq() - 1.0) <= tol

    def normalized(self) -> "PureState":
        n = self.norm()
        if n == 0.0:
            raise DomainError("cannot normalize the zero state")
        # terms that scaling would push below the prune threshold go first,
        # so the survivors are normalized exactly
        kept = {k: a for k, a in self._terms.items() if abs(a / n) ** 2 >= PRUNE_THRESHOLD}
        n_kept = math.sqrt(math.fsum(abs(a) ** 2 for a in kept.values()))
        return PureState(self._mode_count, {k: a / n_kept for k, a in kept.items()})

    def scaled(self, factor: complex) -> "PureState":
        return PureState(self._mode_count, {k: a * factor for k, a in self._terms.items()})

    def photon_numbers(self) -> set[int]:
        return {sum(k) for k in self._terms}

    def max_photons(self) -> int:
        return max((sum(k) for k in self._terms), default=0)

    def allclose(self, other: "PureState", atol: float = 1e-12) -> bool:
        if self._mode_count != other._mode_count:
            return False
        keys = set(self._terms) | set(other._terms)
        return all(abs(self[k] - other[k]) <= atol for k in keys)

    def to_text(self) -> str:
        return format_state(self)


def format_state(state: PureState) -> str:
    """Serialize as ``n1,n2,... : re imag`` lines, sorted by occupation."""
    lines = [
        f"{','.join(map(str, occ))} : {amp.real:.17g} {amp.imag:.17g}"
        for occ, amp in state
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_state(text: str, mode_count: int | None = None) -> PureState:
    """Inverse of :func:`format_state`."""
    terms: dict[Occupation, complex] = {}
    width = mode_count
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            occ_part, amp_part = line.split(":")
            occ = _as_occupation(occ_part.split(","))
            re_s, im_s = amp_part.split()
            amp = complex(float(re_s), float(im_s))
        except ValueError as exc:
            raise DomainError(f"line {lineno}: malformed state term {raw!r}") from exc
        if width is None:
            width = len(occ)
        terms[occ] = terms.get(occ, 0j) + amp
    if width is None:
        raise DomainError("empty state text needs an explicit mode_count")
    return PureState(width, terms)


def make_basis_state(counts: Sequence[int]) -> PureState:
    occ = _as_occupation(counts)
    if not occ:
        raise DomainError("a basis state needs at least one mode")
    return PureState(len(occ), {occ: 1.0})


def vacuum(mode_count: int) -> PureState:
    return make_basis_state((0,) * mode_count)


def superpose(
    terms: Iterable[tuple[Sequence[int], complex]], normalize: bool = False
) -> PureState:
    """Sum a list of (occupation, amplitude) pairs into a state.

    Duplicate occupations are summed with ``math.fsum`` on each component so
    that the result does not depend on the order of ``terms``.
    """
    buckets: dict[Occupation, tuple[list[float], list[float]]] = {}
    width = None
    for counts, amp in terms:
        occ = _as_occupation(counts)
        if width is None:
            width = len(occ)
        elif len(occ) != width:
            raise DomainError("all occupation vectors must share one length")
        amp = complex(amp)
        re, im = buckets.setdefault(occ, ([], []))
        re.append(amp.real)
        im.append(amp.imag)
    if width is None or width == 0:
        raise DomainError("superpose needs at least one non-empty term")
    summed = {k: complex(math.fsum(re), math.fsum(im)) for k, (re, im) in buckets.items()}
    state = PureState(width, summed)
    if normalize:
        if state.is_zero():
            raise DomainError("cannot normalize an all-zero superposition")
        state = state.normalized()
    return state


def tensor(left: PureState, right: PureState) -> PureState:
    """Tensor product; modes of ``right`` follow those of ``left``."""
    terms = {}
    for k1, a1 in left:
        for k2, a2 in right:
            terms[k1 + k2] = a1 * a2
    return PureState(left.mode_count + right.mode_count, terms)


def inner_product(bra: PureState, ket: PureState) -> complex:
    """<bra|ket>, conjugate-linear in ``bra``."""
    if bra.mode_count != ket.mode_count:
        raise DomainError(
            f"mode mismatch: {bra.mode_count} vs {ket.mode_count}"
        )
    small, large = (bra, ket) if len(bra) <= len(ket) else (ket, bra)
    re, im = [], []
    for k, _ in small:
        v = bra[k].conjugate() * ket[k]
        re.append(v.real)
        im.append(v.imag)
    return complex(math.fsum(re), math.fsum(im))


def fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2, insensitive to global phase; clipped to [0, 1]."""
    return min(1.0, abs(inner_product(a, b)) ** 2)


def equal_up_to_global_phase(a: PureState, b: PureState, tol: float = 1e-10) -> bool:
    if a.mode_count != b.mode_count:
        raise DomainError("mode mismatch")
    for s in (a, b):
        if not s.is_normalized():
            raise DomainError("equal_up_to_global_phase expects normalized states")
    return abs(inner_product(a, b)) >= 1.0 - tol


def relative_phase(state: PureState, first: Sequence[int], second: Sequence[int]) -> float:
    """Phase of ``state[second]`` relative to ``state[first]`` in (-pi, pi]."""
    a, b = state[first], state[second]
    if a == 0 or b == 0:
        raise DomainError("relative phase undefined for a missing term")
    return cmath.phase(b / a)
