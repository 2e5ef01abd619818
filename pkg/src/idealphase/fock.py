"""Truncated Fock-space linear algebra.

Everything here works with dense complex arrays. Multi-mode objects use the
row-major tensor convention: the leftmost subsystem is the slowest index, so
``|n>_a |m>_b`` lives at flat index ``n * N_b + m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import prod

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

__all__ = [
    "ModeLayout",
    "FockKet",
    "FockOperator",
    "basis",
    "annihilation",
    "creation",
    "number",
    "rotation",
    "laguerre_table",
    "displacement",
    "displacement_expm",
    "doubled_ket",
    "beam_splitter",
    "beam_splitter_expm",
    "hermite_functions",
    "quadrature_eigenket",
    "partial_trace",
    "kron",
]


def _check_dim(N):
    if int(N) != N or N < 1:
        raise ValueError(f"invalid dimension {N!r}; need a positive integer")
    return int(N)


@dataclass(frozen=True)
class ModeLayout:
    """Ordered truncation dimensions of the subsystems."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(_check_dim(d) for d in self.dims)
        if not dims:
            raise ValueError("layout needs at least one subsystem")
        object.__setattr__(self, "dims", dims)

    @property
    def total(self) -> int:
        return prod(self.dims)

    def __len__(self):
        return len(self.dims)

    def __add__(self, other: ModeLayout) -> ModeLayout:
        return ModeLayout(self.dims + other.dims)


@dataclass(frozen=True)
class FockKet:
    """State vector on a truncated layout.

    ``normalized`` is a claim that gets checked at construction
    (to 1e-12); unnormalizable objects such as phase kets set it to False.
    """

    layout: ModeLayout
    amplitudes: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.size != self.layout.total:
            raise ValueError(f"ket length {amp.size} does not match layout {self.layout.dims}")
        if self.normalized and abs(np.linalg.norm(amp) - 1.0) > 1e-12:
            raise ValueError("ket flagged normalized but has norm %.3e" % np.linalg.norm(amp))
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)

    def projector(self) -> FockOperator:
        v = self.amplitudes
        return FockOperator(self.layout, self.layout, np.outer(v, v.conj()))


@dataclass(frozen=True)
class FockOperator:
    """Matrix between two truncated layouts.

    Properties such as unitarity are never assumed; use the ``*_defect``
    helpers to measure them.
    """

    layout_in: ModeLayout
    layout_out: ModeLayout
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (self.layout_out.total, self.layout_in.total):
            raise ValueError(
                f"matrix shape {m.shape} does not match layouts "
                f"{self.layout_out.dims} <- {self.layout_in.dims}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @classmethod
    def square(cls, entries, dims) -> FockOperator:
        layout = ModeLayout(tuple(dims))
        return cls(layout, layout, entries)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    @property
    def shape(self):
        return self.entries.shape

    @property
    def dag(self) -> FockOperator:
        return FockOperator(self.layout_out, self.layout_in, self.entries.conj().T)

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            if other.layout_out != self.layout_in:
                raise ValueError("layout mismatch in operator product")
            return FockOperator(other.layout_in, self.layout_out, self.entries @ other.entries)
        if isinstance(other, FockKet):
            if other.layout != self.layout_in:
                raise ValueError("layout mismatch applying operator to ket")
            return FockKet(self.layout_out, self.entries @ other.amplitudes)
        return NotImplemented

    def unitarity_defect(self) -> float:
        m = self.entries
        return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[1]))))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def projector_defect(self) -> float:
        m = self.entries
        return float(np.max(np.abs(m @ m - m)))


def kron(*ops) -> np.ndarray:
    """Kronecker product of raw arrays or FockOperators (left = slowest index)."""
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, np.asarray(op))
    return out


def basis(n: int, N: int) -> np.ndarray:
    v = np.zeros(_check_dim(N), dtype=complex)
    v[n] = 1.0
    return v


def annihilation(N: int) -> FockOperator:
    N = _check_dim(N)
    a = np.diag(np.sqrt(np.arange(1, N, dtype=float)), k=1)
    return FockOperator.square(a, (N,))


def creation(N: int) -> FockOperator:
    return annihilation(N).dag


def number(N: int) -> np.ndarray:
    return np.arange(_check_dim(N), dtype=float)


def rotation(theta: float, N: int) -> np.ndarray:
    """Diagonal of exp(i theta n)."""
    return np.exp(1j * theta * number(N))


def laguerre_table(mmax: int, alpha, x) -> np.ndarray:
    """Generalized Laguerre values L_m^(alpha)(x) for m = 0..mmax.

    ``alpha`` and ``x`` broadcast against each other; the result has a
    leading axis of length ``mmax + 1``. Uses the three-term upward
    recurrence in the degree.
    """
    alpha, x = np.broadcast_arrays(np.asarray(alpha, dtype=float), np.asarray(x, dtype=float))
    out = np.empty((mmax + 1,) + alpha.shape)
    out[0] = 1.0
    if mmax >= 1:
        out[1] = 1.0 + alpha - x
    for k in range(1, mmax):
        out[k + 1] = ((2 * k + 1 + alpha - x) * out[k] - (k + alpha) * out[k - 1]) / (k + 1)
    return out


def _displacement_lower(r, N: int) -> np.ndarray:
    """Real matrix elements <n|D(r)|m> for real r >= 0 and n >= m.

    ``r`` may be an array of radii; the result has shape ``r.shape + (N, N)``
    with zeros above the diagonal.
    """
    r = np.asarray(r, dtype=float)
    x = r[..., None, None] ** 2
    n = np.arange(N)[:, None]
    m = np.arange(N)[None, :]
    k = np.clip(n - m, 0, None)
    # table indexed [degree, ..., alpha]; alpha = n - m runs over 0..N-1
    lag = laguerre_table(N - 1, np.arange(N), r[..., None] ** 2)
    lag = np.moveaxis(lag, 0, -1)  # (..., alpha, degree)
    vals = lag[..., k, m]
    with np.errstate(divide="ignore"):
        logmag = 0.5 * (gammaln(m + 1) - gammaln(n + 1)) - 0.5 * x
        logr = np.where(k > 0, k * np.log(np.where(x > 0, np.sqrt(x), 1.0)), 0.0)
    out = np.exp(logmag + logr) * vals
    out = np.where((k > 0) & (x == 0), 0.0, out)
    return np.where(n >= m, out, 0.0)


def displacement(z: complex, N: int) -> FockOperator:
    """Truncated D(z) = exp(z a^+ - z^* a) from the closed-form Laguerre elements."""
    N = _check_dim(N)
    z = complex(z)
    r, phi = abs(z), np.angle(z)
    low = _displacement_lower(r, N)
    n = np.arange(N)[:, None]
    m = np.arange(N)[None, :]
    # <n|D(r e^{i phi})|m> = e^{i(n-m) phi} <n|D(r)|m>;  D(r)^T = D(-r) for real r
    sign = np.where((n - m) % 2 == 0, 1.0, -1.0)
    full = low + (sign * low).T * (n < m)
    return FockOperator.square(full * np.exp(1j * (n - m) * phi), (N,))


def displacement_expm(z: complex, N: int) -> FockOperator:
    """Matrix exponential of the truncated generator (test oracle only)."""
    a = annihilation(N).entries
    gen = z * a.conj().T - np.conj(z) * a
    return FockOperator.square(expm(gen), (N,))


def doubled_ket(A) -> FockKet:
    """|A>> = sum_nm A_nm |n>|m>."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"doubled ket needs a square operator, got shape {A.shape}")
    N = A.shape[0]
    return FockKet(ModeLayout((N, N)), A.reshape(-1))


def _two_mode_generator_blocks(N: int):
    """Yield (indices, block) of a^+b - ab^+ restricted to fixed n_a + n_b."""
    for S in range(2 * N - 1):
        na = np.arange(max(0, S - N + 1), min(S, N - 1) + 1)
        idx = na * N + (S - na)
        g = np.zeros((na.size, na.size))
        # a^+ b |na, nb> = sqrt((na+1) nb) |na+1, nb-1>
        for j, n in enumerate(na[:-1]):
            amp = np.sqrt((n + 1) * (S - n))
            g[j + 1, j] = amp
            g[j, j + 1] = -amp
        yield idx, g


@lru_cache(maxsize=8)
def beam_splitter(N: int, theta: float = np.pi / 4) -> FockOperator:
    """R = exp[theta (a^+ b - a b^+)] on the N x N two-mode truncation.

    Built block by block over total photon number, which the generator
    conserves; this is the exact exponential of the truncated generator.
    Each block is exponentiated through the eigenbasis of the Hermitian
    matrix i*g, which keeps R unitary to rounding for large blocks.
    """
    N = _check_dim(N)
    R = np.zeros((N * N, N * N))
    for idx, g in _two_mode_generator_blocks(N):
        lam, vec = np.linalg.eigh(1j * g)
        R[np.ix_(idx, idx)] = ((vec * np.exp(-1j * theta * lam)) @ vec.conj().T).real
    return FockOperator.square(R.astype(complex), (N, N))


def beam_splitter_expm(N: int, theta: float = np.pi / 4) -> FockOperator:
    a = annihilation(N).entries
    I = np.eye(N)
    A, B = np.kron(a, I), np.kron(I, a)
    gen = A.conj().T @ B - A @ B.conj().T
    return FockOperator.square(expm(theta * gen), (N, N))


def hermite_functions(x, N: int) -> np.ndarray:
    """Harmonic-oscillator eigenfunctions <x|n>, n = 0..N-1 (leading axis)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((N,) + x.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x**2)
    if N > 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, N - 1):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def quadrature_eigenket(value: float, which: str, N: int) -> FockKet:
    """Delta-normalized eigenket of X = (a + a^+)/sqrt2 or Y = (i a^+ - i a)/sqrt2.

    Y = exp(i pi n / 2) X exp(-i pi n / 2), so the Y ket carries an extra
    factor i^n.
    """
    N = _check_dim(N)
    amp = hermite_functions(value, N).astype(complex)
    if which.upper() == "Y":
        amp = amp * (1j) ** np.arange(N)
    elif which.upper() != "X":
        raise ValueError(f"unknown quadrature {which!r}")
    return FockKet(ModeLayout((N,)), amp)


def partial_trace(state, dims, keep) -> np.ndarray:
    """Reduced density matrix on the subsystems listed in ``keep``.

    ``state`` is a square array (or FockOperator) on ``dims``; the kept
    subsystems come out in their original order.
    """
    rho = np.asarray(state)
    dims = tuple(dims)
    if isinstance(keep, int):
        keep = [keep]
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if any(k < 0 or k >= len(dims) for k in keep):
        raise IndexError(f"subsystem index out of range for {len(dims)} subsystems")
    n = len(dims)
    t = rho.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out_sub = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    kd = prod(dims[i] for i in keep)
    return np.einsum("".join(row) + "".join(col) + "->" + out_sub, t).reshape(kd, kd)
