import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from idealphase.isometry import (
    AdmissibilityError,
    apply_T,
    build_isometry,
    covariance_check,
    outcome_density,
    radial_amplitudes,
    radial_profile,
)
from idealphase.phase import Fock, RandomDensity, Superposition, make_state

from oracles import gaussian_coeff_closed_form, gaussian_coeff_gauss_laguerre, gaussian_column_defect

GAUSS = radial_profile("gaussian")


@pytest.fixture(scope="module")
def V48():
    return build_isometry(GAUSS, K=8, N_a=48, renormalize=False)


# ---- profiles -----------------------------------------------------------------


def test_gaussian_admissible():
    assert GAUSS.admissibility_defect <= 1e-10
    assert GAUSS(0.0) == pytest.approx(np.sqrt(2 / np.pi))


def test_uniform_profile_value():
    u = radial_profile("uniform", T=2)
    assert u(1.0) == pytest.approx(np.sqrt(1 / (2 * np.pi)), abs=1e-15)
    assert u(1.0) == pytest.approx(0.3989, abs=1e-4)
    assert u(2.5) == 0
    assert u.admissibility_defect <= 1e-10


def test_uniform_requires_positive_cutoff():
    with pytest.raises(ValueError):
        radial_profile("uniform", T=0)


def test_custom_inadmissible():
    with pytest.raises(AdmissibilityError):
        radial_profile("custom", t=[0, 1], f=[1, 1])


def test_custom_tabulated_uniform_is_admissible():
    T = 1.5
    c = np.sqrt(2 / (np.pi * T**2))
    p = radial_profile("custom", t=[0, T], f=[c, c])
    assert p.admissibility_defect <= 1e-12


def test_custom_tabulated_gaussian():
    t = np.linspace(0, 9, 2001)
    f = np.sqrt(2 / np.pi) * np.exp(-t**2 / 2)
    p = radial_profile("custom", t=t, f=f)
    assert p.admissibility_defect <= 1e-6
    V = build_isometry(p, K=3, N_a=16, renormalize=False)
    W = build_isometry(GAUSS, K=3, N_a=16, renormalize=False)
    assert np.abs(V.entries - W.entries).max() < 1e-5


def test_unknown_profile():
    with pytest.raises(ValueError):
        radial_profile("triangle")


# ---- isometry construction ---------------------------------------------------------


@pytest.mark.parametrize("k,m", [(1, 0), (1, 10), (2, 3), (5, 0), (7, 20)])
def test_coefficients_two_independent_oracles(k, m):
    closed = gaussian_coeff_closed_form(k, m)
    assert gaussian_coeff_gauss_laguerre(k, m) == pytest.approx(closed, abs=1e-12)
    V = build_isometry(GAUSS, K=8, N_a=32, renormalize=False)
    assert V.coeffs[k][m].real == pytest.approx(closed, abs=1e-12)


def test_vacuum_column_is_vacuum(V48):
    col = V48.entries[:, 0]
    assert col[0] == pytest.approx(1.0, abs=1e-12)
    assert np.abs(col[1:]).max() <= 1e-12


def test_selection_rule_exact(V48):
    E = V48.entries
    n, m = np.divmod(np.arange(48 * 48), 48)
    mask = (n - m)[:, None] != np.arange(8)[None, :]
    assert np.all(E[mask] == 0)


def test_columns_orthogonal_exactly(V48):
    G = V48.entries.conj().T @ V48.entries
    assert np.all(G[~np.eye(8, dtype=bool)] == 0)


def test_column_defects_match_closed_form_tail(V48):
    ref = [gaussian_column_defect(k, 48) for k in range(8)]
    assert_allclose(V48.column_defects, ref, atol=1e-12)
    # the tail ~ 1/(4N) for k = 1; 1e-6 is out of reach at any desk-scale N
    assert V48.column_defects[1] == pytest.approx(1 / (4 * 48), rel=0.05)


def test_column_defects_non_increasing():
    d = [build_isometry(GAUSS, K=8, N_a=N, renormalize=False).column_defects for N in (24, 48, 96)]
    assert np.all(d[1] <= d[0] + 1e-13)
    assert np.all(d[2] <= d[1] + 1e-13)


def test_renormalized_is_exact_isometry():
    V = build_isometry(GAUSS, K=8, N_a=48, renormalize=True)
    assert V.isometry_defect() <= 1e-12
    assert V.renormalized


def test_rejects_bad_dims():
    with pytest.raises(ValueError):
        build_isometry(GAUSS, K=9, N_a=8)
    with pytest.raises(ValueError):
        build_isometry(GAUSS, K=2, N_a=8, N_b=9)


@settings(max_examples=15, deadline=None)
@given(
    N=st.integers(2, 20),
    kind=st.sampled_from(["gaussian", "uniform"]),
    T=st.floats(0.5, 4),
    data=st.data(),
)
def test_selection_rule_property(N, kind, T, data):
    K = data.draw(st.integers(1, N))
    prof = radial_profile(kind, T=T) if kind == "uniform" else GAUSS
    V = build_isometry(prof, K=K, N_a=N, nodes=64)
    E = V.entries
    n, m = np.divmod(np.arange(N * N), N)
    assert np.all(E[(n - m)[:, None] != np.arange(K)[None, :]] == 0)
    assert V.isometry_defect() <= 1e-12


# ---- channel T ----------------------------------------------------------------------


def test_apply_T_vacuum(V48):
    out = apply_T(V48, make_state(Fock(0), 8))
    target = np.zeros_like(out)
    target[0, 0] = 1
    assert np.abs(out - target).max() <= 1e-12


def test_apply_T_trace_and_linearity():
    V = build_isometry(GAUSS, K=6, N_a=24)
    r1 = make_state(RandomDensity(1, 2), 6)
    r2 = make_state(RandomDensity(2, 4), 6)
    assert np.trace(apply_T(V, r1)).real == pytest.approx(1, abs=1e-10)
    mix = apply_T(V, 0.5 * r1 + 0.5 * r2)
    assert np.abs(mix - 0.5 * apply_T(V, r1) - 0.5 * apply_T(V, r2)).max() <= 1e-14


def test_apply_T_dimension_mismatch(V48):
    with pytest.raises(ValueError):
        apply_T(V48, make_state(Fock(0), 5))


@pytest.mark.parametrize("theta", [0.0, 1.234, 2 * np.pi])
def test_covariance(theta):
    V = build_isometry(GAUSS, K=10, N_a=24)
    rho = make_state(RandomDensity(3, 3), 10)
    d = covariance_check(V, rho, theta)
    assert d <= 1e-12
    if theta == 0.0:
        assert d == 0


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10**6), theta=st.floats(-10, 10))
def test_covariance_property(seed, theta):
    V = build_isometry(GAUSS, K=6, N_a=16, nodes=128)
    assert covariance_check(V, make_state(RandomDensity(seed, 2), 6), theta) <= 1e-12


# ---- outcome density -----------------------------------------------------------------


@pytest.mark.parametrize("z", [0.0, 0.5, 1 - 1j, 2.5j])
def test_vacuum_outcome_density(V48, z):
    o = outcome_density(V48, make_state(Fock(0), 8), z)
    expected = np.exp(-abs(z) ** 2) / np.pi
    assert o.factorized == pytest.approx(expected, abs=1e-15)
    assert o.direct == pytest.approx(expected, abs=1e-12)


def test_vacuum_outcome_density_normalizes():
    # integrate direct density over the disk |z| <= 5 with a polar rule
    V = build_isometry(GAUSS, K=1, N_a=48)
    rho = make_state(Fock(0), 1)
    t, w = np.polynomial.legendre.leggauss(40)
    t, w = 2.5 * (t + 1), 2.5 * w
    vals = [outcome_density(V, rho, r).direct for r in t]
    total = 2 * np.pi * np.sum(w * t * vals)
    assert total == pytest.approx(1.0, abs=1e-4)


def test_radial_amplitudes_match_doubled_ket_contraction():
    V = build_isometry(GAUSS, K=4, N_a=20)
    g = radial_amplitudes(V, [0.3, 1.7])
    rho = np.zeros((4, 4))
    rho[2, 2] = 1
    o = outcome_density(V, rho, 1.7 * np.exp(0.4j))
    assert o.direct == pytest.approx(abs(g[1, 2]) ** 2 / np.pi, rel=1e-12)


def test_direct_density_within_ten_defects(V48):
    # the direct/factorized discrepancy is bounded by 10x the column defect
    # over the state's support
    rho = make_state(RandomDensity(5, 3), 8)
    gaps = [outcome_density(V48, rho, r * np.exp(1j * p)).gap for r in (0.5, 1, 2, 3) for p in (0, 1, 2, 4)]
    assert max(gaps) <= 10 * V48.max_defect


def test_direct_density_converges_with_N():
    rho = make_state(Superposition(((0, 1), (1, 1))), 2)
    zs = [r * np.exp(1j * p) for r in (0.5, 1.0, 2.0) for p in (0.3, 2.0)]
    gaps = []
    for N in (24, 48, 96):
        V = build_isometry(GAUSS, K=2, N_a=N, renormalize=False)
        gaps.append(max(outcome_density(V, rho, z).gap for z in zs))
    assert gaps[0] > gaps[1] > gaps[2]
