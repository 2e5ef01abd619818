"""Heterodyne detection on the two-mode output.

Joint densities on polar grids, phase marginals, Monte Carlo sampling of
outcomes, the resolution of identity by doubled displacement kets, and the
equivalence between heterodyne and a beam splitter followed by two homodyne
detections.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .fock import _displacement_lower, beam_splitter, displacement, hermite_functions, number
from .isometry import IsometryMatrix, RadialProfile, default_tmax, gauss_legendre, radial_amplitudes
from .phase import PhaseDistribution, PhaseGrid, ideal_phase_density, validate_density

__all__ = [
    "PolarGrid",
    "completeness_defect",
    "phase_marginal",
    "HeterodyneSampleSet",
    "sample_heterodyne",
    "philox_uniforms",
    "double_homodyne_check",
    "homodyne_amplitude",
]

PHASE_CDF_NODES = 4096
RADIAL_CDF_NODES = 4096
MARGINAL_WARN = 1e-3


@dataclass(frozen=True)
class PolarGrid:
    """Gauss-Legendre radii on [0, t_max] times M uniform angles."""

    t_max: float
    n_radial: int
    M: int

    def __post_init__(self):
        if self.t_max < 0 or self.n_radial < 1 or self.M < 1:
            raise ValueError("polar grid needs t_max >= 0 and positive node counts")

    @classmethod
    def for_dimension(cls, N: int, n_radial: int = 512, M: int | None = None) -> PolarGrid:
        return cls(default_tmax(N), n_radial, M or max(256, 2 * N - 1))

    @property
    def radial(self):
        return gauss_legendre(0.0, self.t_max, self.n_radial)

    @property
    def phase_grid(self) -> PhaseGrid:
        return PhaseGrid(self.M)


def completeness_defect(N: int, grid: PolarGrid) -> float:
    """Max-norm of (1/pi) sum w t dphi |D(z)>><<D(z)| - I on the n + m <= N/2 block."""
    n, m = np.divmod(np.arange(N * N), N)
    keep = n + m <= N // 2
    n, m = n[keep], m[keep]
    t, w = grid.radial
    D = _displacement_lower(t, N)
    # full real matrix elements <n|D(t)|m>, using D(t)^T = D(-t)
    sign = np.where((n - m) % 2 == 0, 1.0, -1.0)
    radial = np.where(n >= m, D[:, n, m], sign * D[:, m, n])  # (radii, block)
    phi = grid.phase_grid.nodes
    ang = np.exp(1j * np.outer(phi, n - m))  # (angles, block)
    kets = (radial[:, None, :] * ang[None, :, :]).reshape(-1, n.size)
    weight = np.repeat(w * t, phi.size) * grid.phase_grid.step / np.pi
    S = (kets * weight[:, None]).T @ kets.conj()
    return float(np.max(np.abs(S - np.eye(n.size))))


def phase_marginal(V: IsometryMatrix, rho, grid: PolarGrid | None = None) -> PhaseDistribution:
    """Marginal of arg z for heterodyne on V rho V^+.

    q(phi_j) = sum_i w_i t_i p(t_i e^{i phi_j}); the raw quadrature norm is
    reported and the returned density is rescaled to unit mass.
    """
    rho = validate_density(rho)
    if rho.shape[0] != V.K:
        raise ValueError(f"density dimension {rho.shape[0]} != isometry input {V.K}")
    grid = grid or PolarGrid.for_dimension(V.N_a)
    t, w = grid.radial
    g = radial_amplitudes(V, t)
    # p(t e^{i phi}) = (1/pi) sum_kl e^{-i(k-l)phi} g_k rho_kl g_l^*
    H = (g * (w * t)[:, None]).T @ g.conj() / np.pi
    k = number(V.K)
    E = np.exp(-1j * np.outer(grid.phase_grid.nodes, k))
    q = np.einsum("jk,kl,jl->j", E, rho * H, E.conj()).real
    notes = []
    if q.min() < -1e-12:
        msg = f"negative marginal {q.min():.3e} clipped"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
    q = np.clip(q, 0.0, None)
    raw = float(grid.phase_grid.step * q.sum())
    if abs(raw - 1.0) > MARGINAL_WARN:
        msg = f"marginal raw normalization {raw:.6f}; truncation visible"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
    return PhaseDistribution(grid.phase_grid, q / raw, raw_norm=raw, warnings=notes)


# ---- sampling -------------------------------------------------------------


def philox_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Two uniforms per sample for samples start..start+count-1.

    Sample i reads Philox block i under key ``seed``, so any chunking of the
    index range reproduces the same values.
    """
    if count == 0:
        return np.empty((0, 2))
    bg = np.random.Philox(key=seed, counter=start)
    raw = bg.random_raw(4 * count).reshape(count, 4)[:, :2]
    return (raw >> np.uint64(11)).astype(float) * 2.0**-53


def _inverse_cdf(x_edges: np.ndarray, cell_mass: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.concatenate([[0.0], np.cumsum(cell_mass)])
    cdf /= cdf[-1]
    return np.interp(u, cdf, x_edges)


@dataclass(frozen=True)
class HeterodyneSampleSet:
    seed: int
    radius: np.ndarray = field(repr=False)
    phase: np.ndarray = field(repr=False)
    provenance: str = "factorized-inverse-cdf"

    @property
    def samples(self) -> np.ndarray:
        return self.radius * np.exp(1j * self.phase)

    def __len__(self):
        return self.radius.size


def sample_heterodyne(
    profile: RadialProfile | IsometryMatrix,
    rho,
    n: int,
    seed: int,
    start: int = 0,
    t_max: float | None = None,
) -> HeterodyneSampleSet:
    """Draw heterodyne outcomes z = t e^{i phi} for input rho.

    The outcome density factorizes into an ideal phase part and a radial
    part pi t |f(t)|^2, so the two coordinates are drawn independently by
    inverse CDF on fixed tables.
    """
    if isinstance(profile, IsometryMatrix):
        profile = profile.profile
    rho = validate_density(rho)
    u = philox_uniforms(seed, start, n)

    dist = ideal_phase_density(rho, PhaseGrid(PHASE_CDF_NODES))
    p = dist.density
    edges = np.append(dist.grid.nodes, 2 * np.pi)
    # trapezoid mass per periodic cell
    phase_mass = 0.5 * (p + np.roll(p, -1)) * dist.grid.step
    phi = _inverse_cdf(edges, phase_mass, u[:, 0])

    upper = profile.support if profile.support is not None else (t_max or 12.0)
    t_edges = np.linspace(0.0, upper, RADIAL_CDF_NODES + 1)
    dens = profile.radial_density(t_edges)
    radial_mass = 0.5 * (dens[1:] + dens[:-1]) * np.diff(t_edges)
    t = _inverse_cdf(t_edges, radial_mass, u[:, 1])
    return HeterodyneSampleSet(seed, t, phi)


# ---- double homodyne --------------------------------------------------------


def homodyne_amplitude(x: float, y: float, psi, N: int) -> complex:
    """(<x|_a <y|_b) R^+ |psi> with X_a and Y_b quadrature eigenbras."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    R = beam_splitter(N).entries
    hx = hermite_functions(x, N)
    hy = hermite_functions(y, N) * (1j) ** number(N)
    bra = np.kron(hx, hy).conj()
    return complex(bra @ (R.conj().T @ psi))


def double_homodyne_check(x: float, y: float, psi, N: int) -> tuple[float, float]:
    """Heterodyne vs double-homodyne probability densities at z = x + iy.

    Returns (|<<D(z)|psi>|^2, pi |<x, y|R^+|psi>|^2). The factor pi converts
    the dx dy measure of the quadrature eigenstates to the d^2z / pi measure
    of the doubled displacement kets.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    ket = displacement(complex(x, y), N).entries.reshape(-1)
    het = abs(ket.conj() @ psi) ** 2
    hom = np.pi * abs(homodyne_amplitude(x, y, psi, N)) ** 2
    return float(het), float(hom)
