"""Susskind-Glogower phase kets, the ideal phase distribution, and test states."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .fock import FockKet, ModeLayout, basis, displacement, number

__all__ = [
    "PhaseGrid",
    "PhaseDistribution",
    "sg_ket",
    "ideal_phase_density",
    "povm_completeness_check",
    "default_grid",
    "Fock",
    "Coherent",
    "Superposition",
    "Thermal",
    "RandomDensity",
    "StateSpec",
    "make_state",
    "validate_density",
    "rotate_density",
]

NEGATIVE_FLOOR = 1e-12


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform periodic grid phi_j = 2 pi j / M on [0, 2 pi)."""

    M: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"phase grid needs M >= 1, got {self.M!r}")

    @property
    def nodes(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.M) / self.M

    @property
    def step(self) -> float:
        return 2 * np.pi / self.M


def default_grid(N: int) -> PhaseGrid:
    return PhaseGrid(max(256, 2 * N - 1))


@dataclass
class PhaseDistribution:
    grid: PhaseGrid
    density: np.ndarray
    raw_norm: float = 1.0
    warnings: list[str] = field(default_factory=list)

    @property
    def norm(self) -> float:
        return float(self.grid.step * np.sum(self.density))

    def total_variation(self, other: PhaseDistribution) -> float:
        if other.grid != self.grid:
            raise ValueError("distributions live on different grids")
        return 0.5 * self.grid.step * float(np.sum(np.abs(self.density - other.density)))


def sg_ket(phi: float, N: int) -> FockKet:
    """Truncated |e^{i phi}> = sum_n e^{i phi n}|n> (not normalizable)."""
    return FockKet(ModeLayout((N,)), np.exp(1j * phi * number(N)), normalized=False)


def validate_density(rho, tol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise ValueError(f"density trace {np.trace(rho).real:.3e} != 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("density has negative eigenvalues")
    return rho


def _clip(p: np.ndarray, notes: list[str]) -> np.ndarray:
    low = p.min() if p.size else 0.0
    if low < -NEGATIVE_FLOOR:
        msg = f"negative density {low:.3e} clipped to 0"
        warnings.warn(msg, RuntimeWarning, stacklevel=3)
        notes.append(msg)
    return np.clip(p, 0.0, None)


def ideal_phase_density(rho, grid: PhaseGrid | None = None) -> PhaseDistribution:
    """p(phi_j) = <e^{i phi_j}|rho|e^{i phi_j}> / 2 pi.

    The uniform grid integrates the result exactly when ``M >= 2N - 1``;
    coarser grids alias and are flagged.
    """
    rho = validate_density(rho)
    N = rho.shape[0]
    grid = grid or default_grid(N)
    notes = []
    if grid.M < 2 * N - 1:
        msg = f"phase grid M={grid.M} below 2N-1={2 * N - 1}; normalization is not exact"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
    E = np.exp(1j * np.outer(grid.nodes, number(N)))  # rows are sg kets
    p = np.einsum("jn,nm,jm->j", E.conj(), rho, E).real / (2 * np.pi)
    return PhaseDistribution(grid, _clip(p, notes), warnings=notes)


def povm_completeness_check(N: int, grid: PhaseGrid) -> float:
    """Max-norm of (1/M) sum_j |e^{i phi_j}><e^{i phi_j}| - I."""
    E = np.exp(1j * np.outer(grid.nodes, number(N)))
    S = E.T @ E.conj() / grid.M
    return float(np.max(np.abs(S - np.eye(N))))


def rotate_density(rho, theta: float) -> np.ndarray:
    """exp(i theta n) rho exp(-i theta n)."""
    rho = np.asarray(rho)
    u = np.exp(1j * theta * number(rho.shape[0]))
    return u[:, None] * rho * u.conj()[None, :]


# ---- state library --------------------------------------------------------


@dataclass(frozen=True)
class Fock:
    n: int


@dataclass(frozen=True)
class Coherent:
    alpha: complex


@dataclass(frozen=True)
class Superposition:
    terms: tuple[tuple[int, complex], ...]


@dataclass(frozen=True)
class Thermal:
    nbar: float


@dataclass(frozen=True)
class RandomDensity:
    seed: int
    rank: int = 1
    support: int | None = None


StateSpec = Union[Fock, Coherent, Superposition, Thermal, RandomDensity]


def _pure(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def make_state(spec: StateSpec, N: int) -> np.ndarray:
    """Density matrix for ``spec`` in an N-dimensional truncation."""
    if isinstance(spec, Fock):
        if not 0 <= spec.n < N:
            raise ValueError(f"Fock level {spec.n} outside truncation {N}")
        return _pure(basis(spec.n, N))
    if isinstance(spec, Coherent):
        alpha = complex(spec.alpha)
        if abs(alpha) ** 2 > N / 4:
            warnings.warn(
                f"|alpha|^2={abs(alpha) ** 2:.3g} exceeds N/4; truncation may be visible",
                RuntimeWarning,
                stacklevel=2,
            )
        return _pure(displacement(alpha, N).entries[:, 0])
    if isinstance(spec, Superposition):
        v = np.zeros(N, dtype=complex)
        for n, amp in spec.terms:
            if not 0 <= n < N:
                raise ValueError(f"Fock level {n} outside truncation {N}")
            v[n] += amp
        if not np.any(v):
            raise ValueError("superposition has no weight")
        return _pure(v)
    if isinstance(spec, Thermal):
        if spec.nbar < 0:
            raise ValueError("mean photon number must be nonnegative")
        if spec.nbar == 0:
            return _pure(basis(0, N))
        w = (spec.nbar / (1 + spec.nbar)) ** number(N)
        return np.diag(w / w.sum()).astype(complex)
    if isinstance(spec, RandomDensity):
        d = spec.support or N
        if not 1 <= spec.rank <= d or d > N:
            raise ValueError("random density needs 1 <= rank <= support <= N")
        rng = np.random.default_rng(spec.seed)
        G = rng.normal(size=(d, spec.rank)) + 1j * rng.normal(size=(d, spec.rank))
        rho = np.zeros((N, N), dtype=complex)
        rho[:d, :d] = G @ G.conj().T
        rho /= np.trace(rho).real
        return 0.5 * (rho + rho.conj().T)
    raise TypeError(f"unknown state spec {spec!r}")
