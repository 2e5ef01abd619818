"""The invariant suite behind ``idealphase verify``."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .config import Resolved
from .dilation import build_U, build_V, check_mu, eight_term_channel, evolve_and_trace
from .fock import ModeLayout
from .isometry import build_isometry, covariance_check, outcome_density
from .measurement import (
    PolarGrid,
    completeness_defect,
    double_homodyne_check,
    phase_marginal,
    sample_heterodyne,
)
from .phase import PhaseGrid, ideal_phase_density, povm_completeness_check, rotate_density

NOISE_FLOOR = 1e-12


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    relation: str = "<="
    note: str = ""

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        if self.relation == "<=":
            return self.value <= self.tolerance
        return self.value >= self.tolerance


@dataclass
class VerifyReport:
    checks: list[Check] = field(default_factory=list)

    def add(self, *args, **kw):
        self.checks.append(Check(*args, **kw))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __iter__(self):
        return iter(self.checks)


def non_increasing(values, floor: float = NOISE_FLOOR) -> bool:
    """True if each value is at most its predecessor; values under ``floor`` count as zero."""
    v = np.where(np.asarray(values, dtype=float) < floor, 0.0, values)
    return bool(np.all(np.diff(v) <= 0))


def _support_defect(V, K):
    return float(np.max(V.column_defects[:K]))


def _selection_rule_violation(V) -> float:
    E = V.entries
    n, m = np.divmod(np.arange(V.N_a * V.N_b), V.N_b)
    mask = (n - m)[:, None] != np.arange(V.K)[None, :]
    return float(np.max(np.abs(E[mask]), initial=0.0))


def _density_violation(rho) -> float:
    herm = np.max(np.abs(rho - rho.conj().T))
    eig = max(0.0, -np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    tr = abs(np.trace(rho).real - 1)
    return float(max(herm, eig, tr))


def run_checks(res: Resolved) -> VerifyReport:
    cfg = res.config
    N_a, N_b, _ = cfg.dims
    K = cfg.support
    rho_k = res.rho
    rho = np.zeros((N_a, N_a), dtype=complex)
    rho[:K, :K] = rho_k
    prof = res.profile
    rep = VerifyReport()

    # -- phase POVM and isometry ----------------------------------------
    rep.add("phase POVM completeness", povm_completeness_check(K, PhaseGrid(2 * K - 1)), 1e-12)
    tol = 1e-10 if prof.kind != "custom" else 1e-6
    rep.add("radial admissibility", prof.admissibility_defect, tol)

    Vt = build_isometry(prof, K=N_a, N_a=N_a, renormalize=cfg.renormalize)
    Vt2 = build_isometry(prof, K=N_a, N_a=2 * N_a, renormalize=cfg.renormalize)
    rep.add("selection rule", _selection_rule_violation(Vt), 0.0)
    gram = Vt.entries.conj().T @ Vt.entries
    rep.add("column orthogonality", float(np.max(np.abs(gram - np.diag(np.diag(gram))))), 0.0)
    if cfg.renormalize:
        rep.add("isometry (renormalized)", float(np.max(np.abs(gram - np.eye(N_a)))), 1e-12)
    else:
        rep.add("isometry (raw column defect on support)", _support_defect(Vt, K), 1e-6)
    d1, d2 = _support_defect(Vt, K), _support_defect(Vt2, K)
    rep.add("column defect non-increasing in N", d2 - d1, NOISE_FLOOR, note=f"N={N_a}: {d1:.3e}, N={2 * N_a}: {d2:.3e}")
    rep.add("covariance", covariance_check(Vt, rho, 1.234), 1e-12)
    Vs = build_isometry(prof, K=K, N_a=N_a, renormalize=cfg.renormalize)
    gaps = [
        outcome_density(Vs, rho_k, r * np.exp(1j * ph)).gap
        for r in (0.5, 1.0, 2.0)
        for ph in np.linspace(0, 2 * np.pi, 5, endpoint=False)
    ]
    bound = 10 * max(d1, NOISE_FLOOR)
    rep.add("direct vs factorized density within 10x column defect", max(gaps), bound)

    # -- dilation ----------------------------------------------------------
    dil = res.dilation
    V = build_V(Vt, dil.chi)
    Vm = V.entries
    P, Q = Vm.conj().T @ Vm, Vm @ Vm.conj().T
    rep.add("partial isometry V", float(max(np.abs(P @ P - P).max(), np.abs(Q @ Q - Q).max())), 1e-12)
    rep.add("W conditions", dil.W.condition_defect(), 1e-14)
    mu_chk = check_mu(dil.mu, dil.W)
    rep.add("mu conditions", max(mu_chk.residuals.values()), 1e-12)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        U = build_U(V, dil.W)
    rep.add("U unitarity", U.unitarity_defect, 1e-10)
    if mu_chk:
        out = evolve_and_trace(rho, dil, U)
        target = Vt.entries @ rho @ Vt.entries.conj().T
        rep.add("channel equality", float(np.max(np.abs(out - target))), 1e-9)
        rep.add("eight-term expansion", float(np.max(np.abs(eight_term_channel(rho, dil, Vm) - out))), 1e-10)
        rep.add("channel output is a density", _density_violation(out), 1e-10)
    else:
        for name, t in (("channel equality", 1e-9), ("eight-term expansion", 1e-10), ("channel output is a density", 1e-10)):
            rep.add(name, float("nan"), t, note="not run: mu conditions fail")

    # -- measurement ---------------------------------------------------------
    Nc = min(N_a, 24)
    rep.add("heterodyne completeness (n+m <= N/2)", completeness_defect(Nc, PolarGrid(7.0, 256, 64)), 1e-4)
    s = max(1, min(6, N_a // 4))
    rng = np.random.default_rng(cfg.seed)
    psi = np.zeros((N_a, N_a), dtype=complex)
    psi[:s, :s] = rng.normal(size=(s, s)) + 1j * rng.normal(size=(s, s))
    psi /= np.linalg.norm(psi)
    rel = []
    for x in (-2.0, 0.0, 2.0):
        for y in (-2.0, 0.0, 2.0):
            het, hom = double_homodyne_check(x, y, psi, N_a)
            rel.append(abs(het - hom) / max(het, hom, 1e-300))
    rep.add("double homodyne", max(rel), 1e-4)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        tv1 = phase_marginal(Vs, rho_k).total_variation(ideal_phase_density(rho_k, PhaseGrid(max(256, 2 * N_a - 1))))
        Vs2 = build_isometry(prof, K=K, N_a=2 * N_a, renormalize=cfg.renormalize)
        q2 = phase_marginal(Vs2, rho_k)
        tv2 = q2.total_variation(ideal_phase_density(rho_k, q2.grid))
    rep.add("marginal TV non-increasing in N", tv2 - tv1, NOISE_FLOOR, note=f"N={N_a}: {tv1:.3e}, N={2 * N_a}: {tv2:.3e}")
    rep.add("sampler phase chi-square p-value", sampler_chi2_pvalue(prof, rho_k, 100_000, cfg.seed), 1e-3, ">=")
    a = sample_heterodyne(prof, rho_k, 2000, cfg.seed).radius
    b = sample_heterodyne(prof, rotate_density(rho_k, 0.7), 2000, cfg.seed).radius
    rep.add("sampler radial stream rotation-invariant", float(np.max(np.abs(a - b))), 0.0)
    return rep


def phase_bin_probabilities(rho, bins: int, fine: int = 64) -> np.ndarray:
    """Exact bin masses of the ideal phase density (Fourier integration per bin)."""
    rho = np.asarray(rho)
    N = rho.shape[0]
    edges = 2 * np.pi * np.arange(bins + 1) / bins
    d = np.subtract.outer(np.arange(N), np.arange(N))  # n - m
    # int_a^b e^{-i d phi} dphi
    with np.errstate(divide="ignore", invalid="ignore"):
        integ = (np.exp(-1j * d[None] * edges[1:, None, None]) - np.exp(-1j * d[None] * edges[:-1, None, None])) / (-1j * d[None])
    integ = np.where(d[None] == 0, (edges[1:] - edges[:-1])[:, None, None], integ)
    return np.einsum("bnm,nm->b", integ, rho).real / (2 * np.pi)


def sampler_chi2_pvalue(profile, rho, n: int, seed: int, bins: int = 64) -> float:
    z = sample_heterodyne(profile, rho, n, seed).samples
    counts, _ = np.histogram(np.mod(np.angle(z), 2 * np.pi), bins=bins, range=(0, 2 * np.pi))
    expected = n * phase_bin_probabilities(rho, bins)
    return float(stats.chisquare(counts, expected * counts.sum() / expected.sum()).pvalue)
