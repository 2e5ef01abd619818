"""Truncated Fock-space simulation of unitary realizations of the ideal phase measurement."""

from .dilation import DilationConfig, build_U, build_V, build_W, check_mu, eight_term_channel, evolve_and_trace
from .fock import (
    annihilation,
    beam_splitter,
    displacement,
    doubled_ket,
    partial_trace,
    quadrature_eigenket,
)
from .isometry import apply_T, build_isometry, covariance_check, outcome_density, radial_profile
from .measurement import PolarGrid, completeness_defect, double_homodyne_check, phase_marginal, sample_heterodyne
from .phase import (
    Coherent,
    Fock,
    PhaseGrid,
    RandomDensity,
    Superposition,
    Thermal,
    ideal_phase_density,
    make_state,
    povm_completeness_check,
    sg_ket,
)

__version__ = "0.1.0"
