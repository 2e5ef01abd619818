"""Radial profiles and the phase-measurement isometry into two modes.

The isometry maps |k>_a to sum_m c_m^(k) |m+k>_a |m>_b with

    c_m^(k) = sqrt(2 pi) * int_0^inf t f(t) <m+k|D(t)|m> dt,

which is what remains of the heterodyne-ket integral once the angular part
is done analytically. Only the radial integral is numerical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fock import _displacement_lower, number
from .phase import validate_density

__all__ = [
    "AdmissibilityError",
    "RadialProfile",
    "radial_profile",
    "IsometryMatrix",
    "build_isometry",
    "apply_T",
    "covariance_check",
    "OutcomeDensity",
    "outcome_density",
    "radial_amplitudes",
    "default_tmax",
]

ADMISSIBILITY_TOL = 1e-6
DEFAULT_NODES = 512


class AdmissibilityError(ValueError):
    """Profile does not satisfy int t |f(t)|^2 dt = 1/pi."""


def default_tmax(N: int) -> float:
    return max(8.0, 3.0 * np.sqrt(N))


def gauss_legendre(a: float, b: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * (x + 1) + a, 0.5 * (b - a) * w


@dataclass(frozen=True)
class RadialProfile:
    kind: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    support: float | None = None  # f vanishes beyond this radius
    breakpoints: tuple[float, ...] = field(default=(), repr=False)
    params: dict = field(default_factory=dict)
    admissibility_defect: float = float("nan")

    def __call__(self, t):
        return self.func(np.asarray(t, dtype=float))

    def quadrature(self, t_max: float, nodes: int = DEFAULT_NODES):
        """Radial nodes and weights covering the support of f."""
        if self.breakpoints:
            edges = np.asarray(self.breakpoints)
            per = max(4, -(-nodes // (edges.size - 1)))
            ts, ws = zip(*(gauss_legendre(a, b, per) for a, b in zip(edges[:-1], edges[1:])))
            return np.concatenate(ts), np.concatenate(ws)
        upper = self.support if self.support is not None else t_max
        return gauss_legendre(0.0, upper, nodes)

    def radial_density(self, t):
        """pi t |f(t)|^2, the outcome density of |z| = t."""
        t = np.asarray(t, dtype=float)
        return np.pi * t * np.abs(self(t)) ** 2


def _admissibility(profile: RadialProfile, t_max: float = 40.0) -> float:
    t, w = profile.quadrature(t_max, 2048)
    return abs(float(np.sum(w * t * np.abs(profile(t)) ** 2)) - 1.0 / np.pi)


def radial_profile(kind: str = "gaussian", **params) -> RadialProfile:
    """Build and certify a radial profile.

    kinds: ``gaussian``; ``uniform`` (needs ``T``); ``custom`` (needs
    tabulated arrays ``t`` and ``f``, linearly interpolated, zero past the
    last node).
    """
    if kind == "gaussian":
        prof = RadialProfile("gaussian", lambda t: np.sqrt(2 / np.pi) * np.exp(-0.5 * t**2))
    elif kind == "uniform":
        T = float(params.get("T", 1.0))
        if not T > 0:
            raise ValueError("uniform profile needs T > 0")
        c = np.sqrt(2.0 / (np.pi * T**2))
        prof = RadialProfile(
            "uniform", lambda t: np.where((t >= 0) & (t <= T), c, 0.0), support=T, params={"T": T}
        )
    elif kind == "custom":
        tt = np.asarray(params["t"], dtype=float)
        ff = np.asarray(params["f"])
        if tt.ndim != 1 or tt.shape != ff.shape or tt.size < 2 or np.any(np.diff(tt) <= 0):
            raise ValueError("custom profile needs increasing t and matching f arrays")
        if tt[0] < 0:
            raise ValueError("custom profile radii must be nonnegative")
        edges = tt if tt[0] == 0 else np.concatenate([[0.0], tt])

        def func(t, tt=tt, ff=ff):
            vals = np.interp(t, tt, ff.real) + (1j * np.interp(t, tt, ff.imag) if np.iscomplexobj(ff) else 0)
            return np.where(t <= tt[-1], vals, 0.0)

        prof = RadialProfile("custom", func, support=float(tt[-1]), breakpoints=tuple(edges))
    else:
        raise ValueError(f"unknown profile kind {kind!r}")
    defect = _admissibility(prof)
    if defect > ADMISSIBILITY_TOL:
        raise AdmissibilityError(f"int t|f|^2 dt misses 1/pi by {defect:.3e}")
    return RadialProfile(prof.kind, prof.func, prof.support, prof.breakpoints, prof.params, defect)


@dataclass(frozen=True)
class IsometryMatrix:
    """Truncated isometry from K input levels into N_a x N_b modes.

    ``coeffs[k]`` holds c_m^(k) for m = 0..N_a-1-k; ``column_defects`` are
    1 - ||column||^2 before any renormalization.
    """

    profile: RadialProfile
    K: int
    N_a: int
    N_b: int
    coeffs: tuple[np.ndarray, ...] = field(repr=False)
    column_defects: np.ndarray = field(repr=False)
    renormalized: bool
    t_max: float

    @property
    def dims(self):
        return (self.N_a, self.N_b)

    @property
    def max_defect(self) -> float:
        return float(np.max(self.column_defects))

    @property
    def entries(self) -> np.ndarray:
        V = np.zeros((self.N_a * self.N_b, self.K), dtype=complex)
        for k, c in enumerate(self.coeffs):
            m = np.arange(c.size)
            V[(m + k) * self.N_b + m, k] = c
        return V

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def isometry_defect(self) -> float:
        V = self.entries
        return float(np.max(np.abs(V.conj().T @ V - np.eye(self.K))))


def build_isometry(
    profile: RadialProfile,
    K: int | None = None,
    N_a: int = 32,
    N_b: int | None = None,
    renormalize: bool = True,
    nodes: int = DEFAULT_NODES,
    t_max: float | None = None,
) -> IsometryMatrix:
    N_b = N_a if N_b is None else N_b
    K = N_a if K is None else K
    if N_a != N_b:
        raise ValueError("output modes must have equal truncation")
    if not 1 <= K <= N_a:
        raise ValueError(f"need 1 <= K <= N_a, got K={K}, N_a={N_a}")
    if not profile.admissibility_defect <= ADMISSIBILITY_TOL:
        raise AdmissibilityError("profile has not been certified admissible")
    t_max = default_tmax(N_a) if t_max is None else float(t_max)
    t, w = profile.quadrature(t_max, nodes)
    D = _displacement_lower(t, N_a)  # (nodes, n, m), n >= m
    weights = np.sqrt(2 * np.pi) * w * t * profile(t)
    coeffs, defects = [], []
    for k in range(K):
        m = np.arange(N_a - k)
        c = weights @ D[:, m + k, m]
        d = 1.0 - float(np.sum(np.abs(c) ** 2))
        if renormalize:
            c = c / np.linalg.norm(c)
        coeffs.append(c)
        defects.append(d)
    return IsometryMatrix(profile, K, N_a, N_b, tuple(coeffs), np.array(defects), renormalize, t_max)


def apply_T(V: IsometryMatrix, rho) -> np.ndarray:
    """Two-mode output V rho V^+ for an input density on K levels."""
    rho = validate_density(rho)
    if rho.shape[0] != V.K:
        raise ValueError(f"density dimension {rho.shape[0]} != isometry input {V.K}")
    M = V.entries
    return M @ rho @ M.conj().T


def covariance_check(V: IsometryMatrix, rho, theta: float) -> float:
    """Max-norm gap between T(rotated rho) and the counter-rotated T(rho)."""
    rho = np.asarray(rho, dtype=complex)
    ua = np.exp(1j * theta * number(V.K))
    lhs = apply_T(V, ua[:, None] * rho * ua.conj()[None, :])
    u2 = np.kron(np.exp(1j * theta * number(V.N_a)), np.exp(-1j * theta * number(V.N_b)))
    rhs = u2[:, None] * apply_T(V, rho) * u2.conj()[None, :]
    return float(np.max(np.abs(lhs - rhs)))


def radial_amplitudes(V: IsometryMatrix, t) -> np.ndarray:
    """g_k(t) = sum_m <m+k|D(t)|m> c_m^(k), shape (len(t), K).

    <<D(t e^{i phi})| V |k> = e^{-i k phi} g_k(t); in the untruncated limit
    g_k(t) = sqrt(pi/2) f(t) for every k.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    D = _displacement_lower(t, V.N_a)
    out = np.empty((t.size, V.K), dtype=complex)
    for k, c in enumerate(V.coeffs):
        m = np.arange(c.size)
        out[:, k] = D[:, m + k, m] @ c
    return out


@dataclass(frozen=True)
class OutcomeDensity:
    direct: float
    factorized: float

    @property
    def gap(self) -> float:
        return abs(self.direct - self.factorized)


def outcome_density(V: IsometryMatrix, rho, z: complex) -> OutcomeDensity:
    """Heterodyne density of outcome z after the isometry.

    ``direct`` contracts the truncated doubled displacement ket with
    V rho V^+; ``factorized`` is |f(|z|)|^2 <e^{i arg z}|rho|e^{i arg z}> / 2.
    """
    from .fock import displacement  # local: keeps the import graph flat

    rho = np.asarray(rho, dtype=complex)
    ket = displacement(z, V.N_a).entries.reshape(-1)
    amp = ket.conj() @ V.entries  # <<D(z)|V|k>
    direct = float((amp @ rho @ amp.conj()).real / np.pi)
    e = np.exp(1j * np.angle(z) * number(V.K))
    fz = V.profile(abs(z))
    factorized = float(0.5 * abs(fz) ** 2 * (e.conj() @ rho @ e).real)
    return OutcomeDensity(direct, factorized)
