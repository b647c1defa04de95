"""Linear-optical elements and their action on Fock states.

Every passive element is a mode unitary ``U`` acting on creation operators
as ``a_j^dag -> sum_k U[k, j] a_k^dag``.  Column ``j`` is therefore the
image of input mode ``j``.

Two independent routes compute the Fock-space action:

* :func:`apply_unitary` expands the product of transformed creation
  operators with multinomial bookkeeping;
* :func:`transition_amplitude_permanent` evaluates a single amplitude as a
  permanent of a row/column-repeated submatrix.

The ideal cross-Kerr phase is kept here as a diagonal reference map; it is
not a linear element.
"""

from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Sequence, Union

import numpy as np
from scipy.stats import unitary_group

from . import _kernels
from .errors import CapacityError, DomainError
from .fock import Occupation, PureState, check_capacity

UNITARY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ModeUnitary:
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DomainError(f"mode unitary must be square, got shape {m.shape}")
        err = np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0])))
        if err > UNITARY_TOL:
            raise DomainError(f"matrix is not unitary (max deviation {err:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "ModeUnitary":
        return cls(np.eye(dim))

    def dagger(self) -> "ModeUnitary":
        return ModeUnitary(self.matrix.conj().T)

    def allclose(self, other: "ModeUnitary", atol: float = 1e-12) -> bool:
        return self.dim == other.dim and np.allclose(self.matrix, other.matrix, rtol=0, atol=atol)

    def __repr__(self) -> str:
        return f"ModeUnitary(dim={self.dim})"


@dataclass(frozen=True)
class BeamSplitterParams:
    """Two-mode splitter; reflectivity ``|r|^2 = sin^2(theta)``."""

    theta: float
    phase: float = 0.0
    mode_a: int = 0
    mode_b: int = 1

    def __post_init__(self):
        if not (-1e-12 <= self.theta <= math.pi / 2 + 1e-12):
            raise DomainError(f"theta={self.theta} outside [0, pi/2]")
        if self.mode_a == self.mode_b:
            raise DomainError("beam splitter needs two distinct modes")
        if not math.isfinite(self.phase):
            raise DomainError("phase must be finite")

    @classmethod
    def from_reflectivity(cls, reflectivity_sq: float, mode_a: int, mode_b: int, phase: float = 0.0):
        if not 0.0 <= reflectivity_sq <= 1.0:
            raise DomainError(f"reflectivity {reflectivity_sq} outside [0, 1]")
        return cls(math.asin(math.sqrt(reflectivity_sq)), phase, mode_a, mode_b)

    @property
    def reflectivity_sq(self) -> float:
        return math.sin(self.theta) ** 2


@dataclass(frozen=True)
class KerrParams:
    kappa_tau: float
    mode_a: int = 0
    mode_b: int = 1

    def __post_init__(self):
        if self.mode_a == self.mode_b:
            raise DomainError("Kerr coupling needs two distinct modes")


@dataclass(frozen=True)
class PhaseShiftParams:
    phi: float
    mode: int = 0


Element = Union[BeamSplitterParams, PhaseShiftParams, KerrParams]


def _check_mode(mode: int, total_modes: int) -> None:
    if not 0 <= mode < total_modes:
        raise DomainError(f"mode index {mode} out of range for {total_modes} modes")


def beam_splitter_unitary(params: BeamSplitterParams, total_modes: int) -> ModeUnitary:
    """a^dag -> cos(t) a'^dag + sin(t) b'^dag,  b^dag -> sin(t) a'^dag - cos(t) b'^dag.

    ``params.phase`` is applied to mode ``b`` before mixing.
    """
    a, b = params.mode_a, params.mode_b
    _check_mode(a, total_modes)
    _check_mode(b, total_modes)
    c, s = math.cos(params.theta), math.sin(params.theta)
    e = complex(math.cos(params.phase), math.sin(params.phase))
    m = np.eye(total_modes, dtype=np.complex128)
    m[a, a], m[b, a] = c, s
    m[a, b], m[b, b] = s * e, -c * e
    return ModeUnitary(m)


def phase_shifter_unitary(mode: int, phi: float, total_modes: int) -> ModeUnitary:
    _check_mode(mode, total_modes)
    m = np.eye(total_modes, dtype=np.complex128)
    m[mode, mode] = complex(math.cos(phi), math.sin(phi))
    return ModeUnitary(m)


def compose(later: ModeUnitary, earlier: ModeUnitary) -> ModeUnitary:
    if later.dim != earlier.dim:
        raise DomainError(f"dimension mismatch: {later.dim} vs {earlier.dim}")
    return ModeUnitary(later.matrix @ earlier.matrix)


def compose_all(unitaries: Sequence[ModeUnitary]) -> ModeUnitary:
    """Compose in application order: ``unitaries[0]`` acts first."""
    if not unitaries:
        raise DomainError("nothing to compose")
    out = unitaries[0]
    for u in unitaries[1:]:
        out = compose(u, out)
    return out


def element_unitary(element: Element, total_modes: int) -> ModeUnitary:
    if isinstance(element, BeamSplitterParams):
        return beam_splitter_unitary(element, total_modes)
    if isinstance(element, PhaseShiftParams):
        return phase_shifter_unitary(element.mode, element.phi, total_modes)
    raise DomainError(f"{type(element).__name__} is not a linear element")


def apply_elements(state: PureState, elements: Sequence[Element], cutoff: int | None = None) -> PureState:
    """Run elements in order, fusing consecutive linear ones into one unitary."""
    pending: list[ModeUnitary] = []
    for elem in elements:
        if isinstance(elem, KerrParams):
            if pending:
                state = apply_unitary(state, compose_all(pending), cutoff)
                pending = []
            state = apply_kerr(state, elem)
        else:
            pending.append(element_unitary(elem, state.mode_count))
    if pending:
        state = apply_unitary(state, compose_all(pending), cutoff)
    return state


def random_unitary(dim: int, rng: np.random.Generator | int | None = None) -> ModeUnitary:
    """Haar-random unitary."""
    rng = np.random.default_rng(rng)
    if dim == 1:
        # unitary_group rejects dim 1
        return ModeUnitary(np.exp(2j * math.pi * rng.random()) * np.eye(1))
    return ModeUnitary(unitary_group.rvs(dim, random_state=rng))


# --- operator-polynomial expansion -------------------------------------------

_factorial_lock = threading.Lock()
_factorials: list[float] = [1.0]


def _factorial(n: int) -> float:
    if n >= len(_factorials):
        with _factorial_lock:
            while len(_factorials) <= n:
                _factorials.append(_factorials[-1] * len(_factorials))
    return _factorials[n]


@functools.lru_cache(maxsize=None)
def _compositions(n: int, parts: int) -> tuple[tuple[tuple[int, ...], float], ...]:
    """All ways to place ``n`` photons into ``parts`` modes with multinomial weights."""
    out = []
    for combo in combinations_with_replacement(range(parts), n):
        counts = [0] * parts
        for k in combo:
            counts[k] += 1
        weight = math.factorial(n)
        for c in counts:
            weight //= math.factorial(c)
        out.append((tuple(counts), float(weight)))
    return tuple(out)


def _column_power(col: np.ndarray, n: int, dim: int) -> dict[Occupation, complex]:
    support = [k for k in range(dim) if col[k] != 0]
    poly: dict[Occupation, complex] = {}
    for counts, weight in _compositions(n, len(support)):
        mono = [0] * dim
        coef = complex(weight)
        for k, c in zip(support, counts):
            if c:
                mono[k] = c
                coef *= col[k] ** c
        poly[tuple(mono)] = coef
    return poly


def creation_polynomial(u: ModeUnitary, occupation: Sequence[int]) -> dict[Occupation, complex]:
    """Expand prod_j (sum_k U[k, j] a_k^dag)^{n_j} into output monomials.

    The result maps exponent tuples to coefficients of the creation-operator
    monomial (no Fock normalization applied).
    """
    occ = tuple(occupation)
    if len(occ) != u.dim:
        raise DomainError(f"occupation has {len(occ)} modes, unitary has {u.dim}")
    dim = u.dim
    poly: dict[Occupation, complex] = {(0,) * dim: 1.0 + 0j}
    for j, n in enumerate(occ):
        if n == 0:
            continue
        factor = _column_power(u.matrix[:, j], n, dim)
        nxt: dict[Occupation, complex] = {}
        for m1, c1 in poly.items():
            for m2, c2 in factor.items():
                key = tuple(x + y for x, y in zip(m1, m2))
                nxt[key] = nxt.get(key, 0j) + c1 * c2
        poly = nxt
    return poly


def expansion_amplitudes(u: ModeUnitary, occupation: Sequence[int]) -> dict[Occupation, complex]:
    """Unpruned amplitudes <m| U |occupation> for every output ``m`` in the expansion."""
    inv_norm = 1.0 / math.sqrt(math.prod(_factorial(n) for n in occupation))
    return {
        mono: coef * math.sqrt(math.prod(_factorial(m) for m in mono)) * inv_norm
        for mono, coef in creation_polynomial(u, occupation).items()
    }


def transition_amplitude_expansion(
    u: ModeUnitary, input: Sequence[int], output: Sequence[int]
) -> complex:
    """<output| U |input> read off the operator expansion (no pruning)."""
    if len(output) != u.dim:
        raise DomainError("occupation length does not match unitary dimension")
    return expansion_amplitudes(u, input).get(tuple(output), 0j)


def apply_unitary(state: PureState, u: ModeUnitary, cutoff: int | None = None) -> PureState:
    if u.dim != state.mode_count:
        raise DomainError(f"unitary dim {u.dim} != state modes {state.mode_count}")
    for occ, _ in state:
        check_capacity(sum(occ), cutoff)
    out: dict[Occupation, complex] = {}
    for occ, amp in state:
        for mono, a in expansion_amplitudes(u, occ).items():
            out[mono] = out.get(mono, 0j) + amp * a
    return PureState(state.mode_count, out)


# --- permanent route ------------------------------------------------------------

def _repeated(occ: Sequence[int]) -> list[int]:
    return [k for k, n in enumerate(occ) for _ in range(n)]


def transition_amplitude_permanent(
    u: ModeUnitary, input: Sequence[int], output: Sequence[int]
) -> complex:
    """<output| U |input> via the permanent of the repeated submatrix."""
    if len(input) != u.dim or len(output) != u.dim:
        raise DomainError("occupation length does not match unitary dimension")
    n = sum(input)
    if n != sum(output):
        return 0j
    if n > _kernels.MAX_PERMANENT_SIZE:
        raise CapacityError(f"{n} photons exceeds the permanent limit of {_kernels.MAX_PERMANENT_SIZE}")
    rows, cols = _repeated(output), _repeated(input)
    sub = u.matrix[np.ix_(rows, cols)]
    norm = math.sqrt(math.prod(_factorial(k) for k in input) * math.prod(_factorial(k) for k in output))
    return _kernels.permanent(sub) / norm


@functools.lru_cache(maxsize=256)
def sector_basis(modes: int, photons: int) -> tuple[Occupation, ...]:
    """All occupations of ``modes`` modes with ``photons`` total, lexicographic."""
    out = []
    for combo in combinations_with_replacement(range(modes), photons):
        occ = [0] * modes
        for k in combo:
            occ[k] += 1
        out.append(tuple(occ))
    return tuple(sorted(out))


def transition_matrix(u: ModeUnitary, photons: int) -> tuple[tuple[Occupation, ...], np.ndarray]:
    """Fock-space matrix of ``u`` on the fixed-photon-number sector, by permanents.

    Entry ``[i, j]`` is ``<basis[i]| U |basis[j]>``.
    """
    if photons > _kernels.MAX_PERMANENT_SIZE:
        raise CapacityError(f"{photons} photons exceeds the permanent limit")
    basis = sector_basis(u.dim, photons)
    size = len(basis)
    if photons == 0:
        return basis, np.ones((1, 1), dtype=np.complex128)
    reps = np.array([_repeated(b) for b in basis], dtype=np.int64)
    facts = np.array([math.prod(_factorial(k) for k in b) for b in basis])
    ii, jj = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    norms = np.sqrt(facts[ii] * facts[jj])
    amps = _kernels.batch_amplitudes(u.matrix, reps[ii], reps[jj], norms)
    return basis, amps.reshape(size, size)


def apply_unitary_permanent(state: PureState, u: ModeUnitary, cutoff: int | None = None) -> PureState:
    """Same map as :func:`apply_unitary`, computed sector by sector with permanents."""
    if u.dim != state.mode_count:
        raise DomainError(f"unitary dim {u.dim} != state modes {state.mode_count}")
    out: dict[Occupation, complex] = {}
    for n in sorted(state.photon_numbers()):
        check_capacity(n, cutoff)
        basis, mat = transition_matrix(u, n)
        index = {b: i for i, b in enumerate(basis)}
        vec = np.zeros(len(basis), dtype=np.complex128)
        for occ, amp in state:
            if sum(occ) == n:
                vec[index[occ]] = amp
        for b, amp in zip(basis, mat @ vec):
            out[b] = complex(amp)
    return PureState(state.mode_count, out)


def apply_kerr(state: PureState, params: KerrParams) -> PureState:
    """Multiply each term by exp(i * kappa_tau * n_a * n_b)."""
    _check_mode(params.mode_a, state.mode_count)
    _check_mode(params.mode_b, state.mode_count)
    out = {}
    for occ, amp in state:
        phi = params.kappa_tau * occ[params.mode_a] * occ[params.mode_b]
        out[occ] = amp * complex(math.cos(phi), math.sin(phi))
    return PureState(state.mode_count, out)
