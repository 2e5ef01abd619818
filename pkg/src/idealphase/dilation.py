"""Unitary dilation of the phase-measurement isometry.

With V = Vt (I_a x <chi|_b) and an ancilla operator W obeying W^2 = 0 and
W W^+ + W^+ W = I, the operator

    U = V x WW^+  -  V^+ x W^+W  +  (I - V^+V) x W^+  +  (I - VV^+) x W

is unitary whenever V is a partial isometry. Preparing mode b in |chi> and
the ancilla in a state mu with Tr[WW^+ mu] = 1, Tr[W mu] = 0 reproduces
rho -> Vt rho Vt^+ after tracing out the ancilla.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .fock import FockOperator, ModeLayout, partial_trace
from .isometry import IsometryMatrix
from .phase import validate_density

__all__ = [
    "AncillaW",
    "build_W",
    "MuCheck",
    "check_mu",
    "MuConditionError",
    "DilationConfig",
    "DilationUnitary",
    "build_V",
    "build_U",
    "evolve_and_trace",
    "eight_term_channel",
    "EIGHT_TERMS",
    "DENSE_U_LIMIT",
]

MU_TOL = 1e-12
DENSE_U_LIMIT = 32 * 32 * 2


class MuConditionError(ValueError):
    def __init__(self, check: MuCheck):
        self.check = check
        super().__init__(f"ancilla state fails the trace conditions: {check.residuals}")


@dataclass(frozen=True)
class AncillaW:
    kind: str
    matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def condition_defect(self) -> float:
        """max(|W^2|, |WW^+ + W^+W - I|) entrywise."""
        W = self.matrix
        Wd = W.conj().T
        return float(max(np.abs(W @ W).max(), np.abs(W @ Wd + Wd @ W - np.eye(self.dim)).max()))


def build_W(kind: str = "qubit", dim: int | None = None) -> AncillaW:
    """``qubit``: W = |0><1|. ``pseudospin``: W = sum_n |2n><2n+1| on an even dimension."""
    if kind == "qubit":
        W = np.zeros((2, 2), dtype=complex)
        W[0, 1] = 1.0
        return AncillaW("qubit", W)
    if kind == "pseudospin":
        if dim is None or int(dim) != dim or dim < 2 or dim % 2:
            raise ValueError(f"pseudo-spin ancilla needs an even dimension >= 2, got {dim!r}")
        W = np.zeros((dim, dim), dtype=complex)
        W[np.arange(0, dim, 2), np.arange(1, dim, 2)] = 1.0
        return AncillaW("pseudospin", W)
    raise ValueError(f"unknown W kind {kind!r}")


@dataclass(frozen=True)
class MuCheck:
    residuals: dict[str, float]

    @property
    def passed(self) -> bool:
        return all(v <= MU_TOL for v in self.residuals.values())

    def __bool__(self):
        return self.passed


def _traces(mu, W):
    Wd = W.conj().T
    return {
        "WWd": complex(np.trace(W @ Wd @ mu)),
        "WdW": complex(np.trace(Wd @ W @ mu)),
        "W": complex(np.trace(W @ mu)),
        "Wd": complex(np.trace(Wd @ mu)),
    }


def check_mu(mu, W: AncillaW) -> MuCheck:
    mu = validate_density(mu)
    if mu.shape[0] != W.dim:
        raise ValueError("mu and W act on different ancilla dimensions")
    tr = _traces(mu, W.matrix)
    return MuCheck({
        "Tr[WWd mu] - 1": abs(tr["WWd"] - 1),
        "Tr[W mu]": abs(tr["W"]),
        "Tr[Wd mu]": abs(tr["Wd"]),
    })


@dataclass(frozen=True)
class DilationConfig:
    chi: np.ndarray
    W: AncillaW
    mu: np.ndarray

    def __post_init__(self):
        chi = np.asarray(self.chi, dtype=complex).reshape(-1)
        if abs(np.linalg.norm(chi) - 1) > 1e-12:
            raise ValueError("chi must be normalized")
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "mu", validate_density(self.mu))
        if self.mu.shape[0] != self.W.dim:
            raise ValueError("mu and W act on different ancilla dimensions")

    @classmethod
    def default(cls, N_b: int) -> DilationConfig:
        chi = np.zeros(N_b, dtype=complex)
        chi[0] = 1.0
        mu = np.diag([1.0, 0.0]).astype(complex)
        return cls(chi, build_W("qubit"), mu)

    @property
    def sigma(self) -> np.ndarray:
        return np.outer(self.chi, self.chi.conj())

    def mu_check(self) -> MuCheck:
        return check_mu(self.mu, self.W)


@dataclass(frozen=True)
class DilationUnitary:
    U: FockOperator
    unitarity_defect: float


def build_V(Vt: IsometryMatrix, chi) -> FockOperator:
    """V = Vt (I_a x <chi|), a square operator on the two-mode space."""
    chi = np.asarray(chi, dtype=complex).reshape(-1)
    if Vt.K != Vt.N_a:
        raise ValueError("build_V needs an isometry with K = N_a")
    if chi.size != Vt.N_b:
        raise ValueError(f"chi has dimension {chi.size}, mode b has {Vt.N_b}")
    if abs(np.linalg.norm(chi) - 1) > 1e-12:
        raise ValueError("chi must be normalized")
    V = np.kron(Vt.entries, chi.conj()[None, :])
    return FockOperator.square(V, Vt.dims)


def _four_terms(V: np.ndarray, W: np.ndarray):
    """(system operator, ancilla operator) pairs whose Kronecker sum is U."""
    I = np.eye(V.shape[0])
    Vd, Wd = V.conj().T, W.conj().T
    return [
        (V, W @ Wd),
        (-Vd, Wd @ W),
        (I - Vd @ V, Wd),
        (I - V @ Vd, W),
    ]


def build_U(V, W: AncillaW) -> DilationUnitary:
    dims = V.layout_in.dims if isinstance(V, FockOperator) else None
    V = np.asarray(V)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise ValueError("V must be square")
    dims = dims or (V.shape[0],)
    if V.shape[0] * W.dim > DENSE_U_LIMIT:
        warnings.warn(
            f"dense U of dimension {V.shape[0] * W.dim} exceeds {DENSE_U_LIMIT}",
            RuntimeWarning,
            stacklevel=2,
        )
    U = sum(np.kron(A, B) for A, B in _four_terms(V, W.matrix))
    defect = float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))
    return DilationUnitary(FockOperator.square(U, dims + (W.dim,)), defect)


def _require_mu(cfg: DilationConfig):
    chk = cfg.mu_check()
    if not chk:
        raise MuConditionError(chk)


def evolve_and_trace(rho, cfg: DilationConfig, U: DilationUnitary | None = None, V=None) -> np.ndarray:
    """Tr_c[U (rho x |chi><chi| x mu) U^+].

    With a materialized ``U`` the conjugation is done literally. Otherwise
    ``V`` must be given and the ancilla trace is taken term by term:
    Tr_c[(A_i X A_j^+) x (B_i mu B_j^+)] = A_i X A_j^+ Tr[B_j^+ B_i mu].
    """
    _require_mu(cfg)
    rho = validate_density(rho)
    X = np.kron(rho, cfg.sigma)
    if U is not None:
        Um = U.U.entries
        dims = U.U.layout_in.dims
        if X.shape[0] * cfg.W.dim != Um.shape[0]:
            raise ValueError("state and U dimensions disagree")
        full = Um @ np.kron(X, cfg.mu) @ Um.conj().T
        return partial_trace(full, dims, keep=list(range(len(dims) - 1)))
    if V is None:
        raise ValueError("pass either U or V")
    V = np.asarray(V)
    terms = _four_terms(V, cfg.W.matrix)
    out = np.zeros_like(X)
    for i, (Ai, Bi) in enumerate(terms):
        left = Ai @ X
        for Aj, Bj in terms:
            c = np.trace(Bj.conj().T @ Bi @ cfg.mu)
            if c != 0:
                out += c * (left @ Aj.conj().T)
    return out


# (label, left operator, right operator, trace factor); each term is
# left @ X @ right * factor
EIGHT_TERMS = (
    ("V X V+ Tr[WW+ mu]", "V", "Vd", "WWd"),
    ("V X (I-VV+) Tr[W+ mu]", "V", "Q", "Wd"),
    ("V+ X V Tr[W+W mu]", "Vd", "V", "WdW"),
    ("-V+ X (I-V+V) Tr[W mu]", "-Vd", "P", "W"),
    ("-(I-V+V) X V Tr[W+ mu]", "-P", "V", "Wd"),
    ("(I-V+V) X (I-V+V) Tr[WW+ mu]", "P", "P", "WWd"),
    ("(I-VV+) X V+ Tr[W mu]", "Q", "Vd", "W"),
    ("(I-VV+) X (I-VV+) Tr[W+W mu]", "Q", "Q", "WdW"),
)


def eight_term_channel(rho, cfg: DilationConfig, V, sigma=None, return_terms: bool = False, strict: bool = True):
    """The traced channel written out as its eight surviving terms.

    ``sigma`` defaults to |chi><chi|; a mixed sigma is accepted with a
    warning since the isometry is only reproduced for the pure choice.
    ``strict=False`` skips the mu conditions, for exploring violations.
    """
    if strict:
        _require_mu(cfg)
    rho = validate_density(rho)
    if sigma is None:
        sigma = cfg.sigma
    else:
        sigma = validate_density(sigma)
        if np.linalg.matrix_rank(sigma, tol=1e-10) > 1:
            warnings.warn("mixed sigma: output is not the target isometric map", RuntimeWarning, stacklevel=2)
    X = np.kron(rho, sigma)
    V = np.asarray(V)
    I = np.eye(V.shape[0])
    Vd = V.conj().T
    ops = {"V": V, "Vd": Vd, "P": I - Vd @ V, "Q": I - V @ Vd}
    ops.update({"-" + k: -v for k, v in list(ops.items())})
    tr = _traces(cfg.mu, cfg.W.matrix)
    terms = []
    for label, left, right, factor in EIGHT_TERMS:
        terms.append((label, tr[factor], ops[left] @ X @ ops[right] * tr[factor]))
    total = sum(t[2] for t in terms)
    return (total, terms) if return_terms else total
