"""Equilibrium spheroids of the anisotropic Coulomb energy.

The energy ``I(mu) = iint W(x - y) dmu dmu + int |x|^2 dmu`` with kernel
``W(x) = |x|^(2-n) + alpha x_1^2 / |x|^n`` is minimised by the uniform
measure on a spheroid; this package computes it, checks it and tests it
against a particle simulation.
"""
from ._version import __version__
from .energetics import (
    ELReport,
    constant_relations,
    el_report,
    parseval_check,
    second_moment,
    spheroid_energy,
    total_energy,
    verify_el1,
    verify_el2,
)
from .estimators import ParticleFlow, SpheroidalEquilibrium, SpheroidShapeEstimator
from .exceptions import (
    BracketError,
    BudgetWarning,
    DegenerateSpheroidError,
    DomainError,
    QuadratureError,
    StagnationWarning,
)
from .kernel import EnergyParams, grad_w_alpha, w_alpha, w_hat_alpha
from .oracle import convolution_oracle
from .particle_flow import ParticleConfig, ShapeFit, discrete_energy, fit_shape, flow_step, run_flow
from .potentials import Spheroid, phi_alpha, phi0_inside, phi0_outside, psi_inside, psi_outside
from .equilibrium_solver import (
    EquilibriumSolution,
    limiting_equilibrium,
    solve_aspect_ratio,
    solve_equilibrium,
    stationarity_f,
)
from .special_functions import aux_integrals, h, h_prime

__all__ = [name for name in dir() if not name.startswith("_")]
