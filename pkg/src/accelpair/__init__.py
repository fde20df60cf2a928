"""Entanglement dynamics of two uniformly accelerated detectors coupled to a
common massless scalar field: exact correlators, Gaussian separability
measures, truncated density-matrix criteria and perturbative cross-checks."""

__version__ = "0.1.0"

from .params import CorrelatorSet, ModelParams
from .field import RegulatorKind, RegulatorScheme, Worldline, ridge_width, trajectory, wightman_cross, wightman_self
from .correlators import (a_part, chi_envelope, correlator_set, cross_qq_exact,
                          cross_qq_quad, cross_set_exact, self_v_quad,
                          self_weak_closed, stage_approx)
from .entanglement import (CovarianceMatrix, EntanglementReport, c_minus_weak,
                           covariance, creation_band, creation_window,
                           ground_state_covariance, measures, report,
                           symplectic_c)
from .rdm import (GTilde, TruncatedRDM, gtilde_assemble,
                  separability_inequalities, sigma_equivalence_residual,
                  truncated_rdm)
from .tdpt import TdptElement, tdpt_element, tdpt_inf_rate, tdpt_r1111
from .scenario import Scenario, figure_preset, load_scenario, run_scenario

__all__ = [
    "__version__",
    "ModelParams", "CorrelatorSet",
    "Worldline", "RegulatorScheme", "RegulatorKind",
    "trajectory", "wightman_self", "wightman_cross", "ridge_width",
    "cross_qq_exact", "cross_set_exact", "cross_qq_quad", "self_v_quad",
    "self_weak_closed", "a_part", "stage_approx", "chi_envelope",
    "correlator_set",
    "CovarianceMatrix", "EntanglementReport", "covariance", "symplectic_c",
    "measures", "report", "c_minus_weak", "creation_window", "creation_band",
    "ground_state_covariance",
    "GTilde", "TruncatedRDM", "gtilde_assemble", "truncated_rdm",
    "separability_inequalities", "sigma_equivalence_residual",
    "TdptElement", "tdpt_element", "tdpt_r1111", "tdpt_inf_rate",
    "Scenario", "figure_preset", "load_scenario", "run_scenario",
]
