import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fockbench.errors import CapacityError, DomainError
from fockbench.fock import make_basis_state, photon_cutoff, superpose
from fockbench.optics import (
    BeamSplitterParams,
    KerrParams,
    ModeUnitary,
    PhaseShiftParams,
    apply_elements,
    apply_kerr,
    apply_unitary,
    apply_unitary_permanent,
    beam_splitter_unitary,
    compose,
    compose_all,
    creation_polynomial,
    phase_shifter_unitary,
    random_unitary,
    sector_basis,
    transition_amplitude_expansion,
    transition_amplitude_permanent,
    transition_matrix,
)

from oracles import permanent_bruteforce, sector_oracle, sector_states

HALF = math.pi / 4
seeds = st.integers(0, 2**32 - 1)


def test_mode_unitary_rejects_non_unitary():
    with pytest.raises(DomainError):
        ModeUnitary(np.array([[1, 1], [0, 1]]))


def test_mode_unitary_is_read_only():
    u = ModeUnitary.identity(2)
    with pytest.raises(ValueError):
        u.matrix[0, 0] = 2


def test_beam_splitter_matrix_layout():
    u = beam_splitter_unitary(BeamSplitterParams(0.3, 0.7, 0, 2), 3).matrix
    c, s, e = math.cos(0.3), math.sin(0.3), np.exp(0.7j)
    assert u[0, 0] == pytest.approx(c)
    assert u[2, 0] == pytest.approx(s)
    assert u[0, 2] == pytest.approx(s * e)
    assert u[2, 2] == pytest.approx(-c * e)
    assert u[1, 1] == 1


def test_beam_splitter_domain():
    with pytest.raises(DomainError):
        BeamSplitterParams(2.0)
    with pytest.raises(DomainError):
        BeamSplitterParams(0.1, 0, 1, 1)
    assert BeamSplitterParams.from_reflectivity(0.3, 0, 1).reflectivity_sq == pytest.approx(0.3)


@given(st.floats(0, math.pi / 2), st.floats(-math.pi, math.pi), seeds)
def test_built_unitaries_are_unitary(theta, phase, seed):
    u = compose(
        phase_shifter_unitary(1, phase, 3),
        compose(beam_splitter_unitary(BeamSplitterParams(theta, phase, 0, 2), 3), random_unitary(3, seed)),
    ).matrix
    assert np.allclose(u.conj().T @ u, np.eye(3), atol=1e-12)


@given(seeds)
def test_compose_all_applies_first_element_first(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_unitary(3, rng) for _ in range(3))
    assert compose_all([a, b, c]).allclose(ModeUnitary(c.matrix @ b.matrix @ a.matrix))
    state = superpose([((1, 1, 0), 1), ((0, 0, 2), 1j)], normalize=True)
    step = apply_unitary(apply_unitary(apply_unitary(state, a), b), c)
    assert step.allclose(apply_unitary(state, compose_all([a, b, c])), atol=1e-12)


def test_hom_dip_exact():
    out = apply_unitary(make_basis_state((1, 1)), beam_splitter_unitary(BeamSplitterParams(HALF), 2))
    assert set(out.terms) == {(2, 0), (0, 2)}
    assert out[(2, 0)] == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert out[(0, 2)] == pytest.approx(-1 / math.sqrt(2), abs=1e-15)


def test_three_three_support_on_even_occupations():
    out = apply_unitary(make_basis_state((3, 3)), beam_splitter_unitary(BeamSplitterParams(HALF), 2))
    assert set(out.terms) == {(6, 0), (4, 2), (2, 4), (0, 6)}


@given(seeds, st.integers(1, 3), st.integers(0, 3))
def test_expansion_matches_independent_oracle(seed, modes, photons):
    u = random_unitary(modes, seed)
    rng = np.random.default_rng(seed)
    basis = sector_states(modes, photons)
    amps = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
    state = superpose(list(zip(basis, amps)), normalize=True)
    ours = apply_unitary(state, u)
    ref = sector_oracle(u.matrix, dict(state.terms))
    for occ in set(ref) | set(ours.terms):
        assert abs(ours[occ] - ref.get(occ, 0)) < 1e-10


@given(seeds, st.integers(2, 4), st.integers(1, 4))
def test_permanent_route_matches_expansion(seed, modes, photons):
    u = random_unitary(modes, seed)
    basis = sector_basis(modes, photons)
    for inp in basis:
        for outp in basis:
            perm = transition_amplitude_permanent(u, inp, outp)
            assert abs(perm - transition_amplitude_expansion(u, inp, outp)) < 1e-10


def test_pruning_only_removes_dust():
    # states prune |amp|^2 < 1e-12; every retained amplitude equals the raw expansion value
    u = random_unitary(4, 7250788)
    out = apply_unitary(make_basis_state((0, 0, 4, 0)), u)
    for occ, amp in out:
        assert amp == transition_amplitude_expansion(u, (0, 0, 4, 0), occ)
    dropped = [o for o in sector_basis(4, 4) if o not in out.terms]
    for occ in dropped:
        assert abs(transition_amplitude_expansion(u, (0, 0, 4, 0), occ)) ** 2 < 1e-12


def test_transition_amplitude_photon_mismatch_is_zero():
    assert transition_amplitude_permanent(random_unitary(2, 0), (1, 0), (1, 1)) == 0


def test_transition_matrix_is_unitary_and_matches_bruteforce():
    u = random_unitary(3, 7)
    basis, t = transition_matrix(u, 3)
    assert np.allclose(t.conj().T @ t, np.eye(len(basis)), atol=1e-12)
    inp, outp = (1, 1, 1), (3, 0, 0)
    rows = [0, 0, 0]
    expected = permanent_bruteforce(u.matrix[np.ix_(rows, [0, 1, 2])]) / math.sqrt(6)
    assert t[basis.index(outp), basis.index(inp)] == pytest.approx(expected, abs=1e-12)


def test_apply_unitary_permanent_matches_expansion():
    u = random_unitary(3, 11)
    state = superpose([((2, 0, 0), 0.6), ((0, 1, 1), 0.8j), ((1, 0, 0), 0)])
    assert apply_unitary_permanent(state, u).allclose(apply_unitary(state, u), atol=1e-12)


def test_creation_polynomial_of_splitter():
    poly = creation_polynomial(beam_splitter_unitary(BeamSplitterParams(HALF), 2), (1, 0))
    assert poly[(1, 0)] == pytest.approx(1 / math.sqrt(2))
    assert poly[(0, 1)] == pytest.approx(1 / math.sqrt(2))


def test_capacity_error_instead_of_truncation():
    u = beam_splitter_unitary(BeamSplitterParams(HALF), 2)
    with photon_cutoff(5):
        with pytest.raises(CapacityError):
            apply_unitary(make_basis_state((3, 3)), u)
    with pytest.raises(CapacityError):
        apply_unitary(make_basis_state((3, 3)), u, cutoff=4)


def test_kerr_cross_phase():
    state = superpose([((1, 1), 1), ((2, 1), 1), ((0, 3), 1)], normalize=True)
    out = apply_kerr(state, KerrParams(0.5, 0, 1))
    assert out[(2, 1)] == pytest.approx(state[(2, 1)] * np.exp(1j))
    assert out[(0, 3)] == pytest.approx(state[(0, 3)])
    assert out[(1, 1)] == pytest.approx(state[(1, 1)] * np.exp(0.5j))


def test_apply_elements_fuses_linear_runs_and_keeps_kerr_order():
    state = make_basis_state((1, 1))
    elems = [BeamSplitterParams(HALF), KerrParams(math.pi, 0, 1), PhaseShiftParams(0.3, 0)]
    manual = apply_unitary(state, beam_splitter_unitary(BeamSplitterParams(HALF), 2))
    manual = apply_kerr(manual, KerrParams(math.pi, 0, 1))
    manual = apply_unitary(manual, phase_shifter_unitary(0, 0.3, 2))
    assert apply_elements(state, elems).allclose(manual, atol=1e-14)


def test_random_unitary_single_mode():
    u = random_unitary(1, 3)
    assert abs(abs(u.matrix[0, 0]) - 1) < 1e-12
