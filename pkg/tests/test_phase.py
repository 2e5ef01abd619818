import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from idealphase.phase import (
    Coherent,
    Fock,
    PhaseGrid,
    RandomDensity,
    Superposition,
    Thermal,
    default_grid,
    ideal_phase_density,
    make_state,
    povm_completeness_check,
    rotate_density,
    sg_ket,
    validate_density,
)

HALF = Superposition(((0, 1), (1, 1)))


def test_sg_ket_values():
    k = sg_ket(0.0, 3)
    assert_allclose(k.amplitudes, [1, 1, 1])
    assert not k.normalized
    phi = np.pi / 3
    assert np.conj(sg_ket(phi, 4).amplitudes[2]) == pytest.approx(np.exp(-2j * phi))
    assert np.vdot(sg_ket(1.7, 9).amplitudes, sg_ket(1.7, 9).amplitudes).real == pytest.approx(9)


def test_vacuum_density_uniform():
    p = ideal_phase_density(make_state(Fock(0), 6), PhaseGrid(32))
    assert_allclose(p.density, 1 / (2 * np.pi), atol=1e-15)


def test_half_superposition_density():
    grid = PhaseGrid(64)
    p = ideal_phase_density(make_state(HALF, 4), grid)
    assert_allclose(p.density, (1 + np.cos(grid.nodes)) / (2 * np.pi), atol=1e-15)


def test_coherent_peak_location():
    grid = PhaseGrid(256)
    p = ideal_phase_density(make_state(Coherent(2.0), 32), grid)
    j = int(np.argmax(p.density))
    dist = min(grid.nodes[j], 2 * np.pi - grid.nodes[j])
    assert dist <= grid.step
    # unimodal on the circle: one rise and one fall
    d = np.sign(np.diff(np.roll(p.density, -j)))
    assert np.count_nonzero(np.diff(d[d != 0])) == 1


def test_coarse_grid_flagged():
    with pytest.warns(RuntimeWarning):
        p = ideal_phase_density(make_state(HALF, 8), PhaseGrid(10))
    assert p.warnings


def test_non_density_rejected():
    with pytest.raises(ValueError):
        ideal_phase_density(np.diag([1.0, 1.0]))
    with pytest.raises(ValueError):
        validate_density(np.array([[0.5, 1.0], [0.0, 0.5]]))


def test_default_grid():
    assert default_grid(8).M == 256
    assert default_grid(200).M == 399


def test_completeness_exact_regime():
    assert povm_completeness_check(8, PhaseGrid(15)) <= 1e-12


def test_completeness_aliasing():
    # N = 8 has |n - m| <= 7, so an 8-point grid is still exact; on 7 points
    # the |n - m| = 7 corner aliases onto the diagonal frequency with weight 1
    assert povm_completeness_check(8, PhaseGrid(8)) <= 1e-12
    assert povm_completeness_check(8, PhaseGrid(7)) == pytest.approx(1.0, abs=1e-12)
    assert povm_completeness_check(8, PhaseGrid(4)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("M", [1, 2, 17])
def test_completeness_scalar(M):
    assert povm_completeness_check(1, PhaseGrid(M)) == 0


@st.composite
def densities(draw, max_dim=8):
    d = draw(st.integers(1, max_dim))
    seed = draw(st.integers(0, 2**31))
    rank = draw(st.integers(1, d))
    return make_state(RandomDensity(seed, rank), d)


@settings(max_examples=40, deadline=None)
@given(rho=densities())
def test_density_normalized_and_nonnegative(rho):
    N = rho.shape[0]
    p = ideal_phase_density(rho, PhaseGrid(2 * N - 1))
    assert abs(p.norm - 1) <= 1e-9
    assert p.density.min() >= 0
    assert np.isrealobj(p.density)


@settings(max_examples=30, deadline=None)
@given(rho=densities(), shift=st.integers(0, 63))
def test_phase_covariance_shift(rho, shift):
    grid = PhaseGrid(64)
    theta = shift * grid.step
    p = ideal_phase_density(rho, grid).density
    q = ideal_phase_density(rotate_density(rho, theta), grid).density
    assert np.abs(q - np.roll(p, shift)).max() <= 1e-12


@settings(max_examples=20, deadline=None)
@given(w=st.lists(st.floats(0.01, 1), min_size=1, max_size=10))
def test_diagonal_states_uniform(w):
    rho = np.diag(np.array(w) / np.sum(w))
    p = ideal_phase_density(rho, PhaseGrid(2 * len(w) + 3))
    assert np.abs(p.density - 1 / (2 * np.pi)).max() <= 1e-12


def test_make_state_fock():
    rho = make_state(Fock(0), 3)
    assert_allclose(rho, np.diag([1, 0, 0]))
    with pytest.raises(ValueError):
        make_state(Fock(3), 3)


def test_make_state_coherent_mean():
    # Poisson(1) mean; the N = 32 truncation loses ~1e-36 of weight
    rho = make_state(Coherent(1.0), 32)
    assert np.trace(np.diag(np.arange(32)) @ rho).real == pytest.approx(1.0, abs=1e-8)


def test_make_state_coherent_warns_when_truncation_unsafe():
    with pytest.warns(RuntimeWarning):
        make_state(Coherent(3.0), 16)


def test_make_state_random_contract():
    rho = make_state(RandomDensity(7, 3), 6)
    assert np.trace(rho).real == pytest.approx(1, abs=1e-12)
    assert np.linalg.eigvalsh(rho).min() >= -1e-14
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 3
    assert_allclose(make_state(RandomDensity(7, 3), 6), rho)


def test_make_state_thermal():
    rho = make_state(Thermal(0.5), 40)
    w = np.diag(rho).real
    assert_allclose(w[1:] / w[:-1], 1 / 3, rtol=1e-12)
    assert np.trace(rho).real == pytest.approx(1)


def test_make_state_superposition_and_errors():
    rho = make_state(HALF, 3)
    assert_allclose(rho[:2, :2], 0.5 * np.ones((2, 2)))
    with pytest.raises(ValueError):
        make_state(Superposition(((5, 1),)), 3)
    with pytest.raises(ValueError):
        make_state(Thermal(-1), 3)
    with pytest.raises(ValueError):
        make_state(RandomDensity(0, 5), 3)
