"""Covariance assembly, symplectic separability measures and the
entanglement-creation window of the detector pair."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlators import chi_envelope
from .errors import ComplexSpectrum, NonPhysicalState
from .params import CorrelatorSet, ModelParams
from .specfun import lambert_w


@dataclass(frozen=True)
class CovarianceMatrix:
    """4x4 real symmetric second-moment matrix over (Q_A, P_A, Q_B, P_B)."""

    matrix: np.ndarray

    @property
    def v_AA(self):
        return self.matrix[:2, :2]

    @property
    def v_BB(self):
        return self.matrix[2:, 2:]

    @property
    def v_AB(self):
        return self.matrix[:2, 2:]


@dataclass(frozen=True)
class EntanglementReport:
    c_minus: float
    c_plus: float
    sigma: float
    log_neg: float
    entangled: bool


def ground_state_covariance(omega: float, hbar: float = 1.0) -> CovarianceMatrix:
    """Covariance of two free detectors in their ground states:
    (hbar/2) diag(1/omega, omega, 1/omega, omega)."""
    return CovarianceMatrix(0.5 * hbar * np.diag(
        [1.0 / omega, omega, 1.0 / omega, omega]))


def covariance(corr: CorrelatorSet, hbar: float = 1.0) -> CovarianceMatrix:
    """Build the 4x4 covariance matrix from one instant's correlators.

    Raises NonPhysicalState when either diagonal block violates the
    Heisenberg bound det(v) >= hbar^2/4 beyond numerical tolerance.
    """
    v_aa = np.array([[corr.qq_AA, corr.qp_AA], [corr.qp_AA, corr.pp_AA]])
    v_bb = np.array([[corr.qq_BB, corr.qp_BB], [corr.qp_BB, corr.pp_BB]])
    v_ab = np.array([[corr.qq_AB, corr.qp_AB], [corr.pq_AB, corr.pp_AB]])
    bound = 0.25 * hbar * hbar * (1.0 - 1e-9)
    for name, block in (("A", v_aa), ("B", v_bb)):
        if np.linalg.det(block) < bound:
            raise NonPhysicalState(
                f"detector {name} block violates the Heisenberg bound: "
                f"det={np.linalg.det(block):.6e} < {bound:.6e}")
    m = np.block([[v_aa, v_ab], [v_ab.T, v_bb]])
    return CovarianceMatrix(0.5 * (m + m.T))


def symplectic_c(v: CovarianceMatrix, hbar: float = 1.0):
    """Symplectic spectrum (c_minus, c_plus) of the partially transposed state.

    c_pm = sqrt((Z pm sqrt(Z^2 - 4 det V)) / 2) with
    Z = det v_AA + det v_BB - 2 det v_AB.  A discriminant that is negative
    beyond -1e-12 Z^2 signals an unphysical covariance matrix.
    """
    m = v.matrix
    z = (np.linalg.det(v.v_AA) + np.linalg.det(v.v_BB)
         - 2.0 * np.linalg.det(v.v_AB))
    disc = z * z - 4.0 * np.linalg.det(m)
    if disc < 0.0:
        if disc < -1e-12 * z * z:
            raise ComplexSpectrum(
                f"symplectic discriminant significantly negative: {disc:.3e}")
        disc = 0.0
    root = math.sqrt(disc)
    c_m2 = 0.5 * (z - root)
    c_p2 = 0.5 * (z + root)
    if c_m2 < 0.0:
        if c_m2 < -1e-12 * max(z, 1.0):
            raise ComplexSpectrum(f"negative squared symplectic value: {c_m2:.3e}")
        c_m2 = 0.0
    return math.sqrt(c_m2), math.sqrt(c_p2)


def measures(c_minus: float, c_plus: float, hbar: float = 1.0):
    """Separability product Sigma and logarithmic negativity E_N from c_pm."""
    q = 0.25 * hbar * hbar
    sigma = (c_plus**2 - q) * (c_minus**2 - q)
    if c_minus <= 0.0:
        log_neg = math.inf
    else:
        log_neg = max(0.0, -math.log2(2.0 * c_minus / hbar))
    return sigma, log_neg


def report(v: CovarianceMatrix, hbar: float = 1.0) -> EntanglementReport:
    c_minus, c_plus = symplectic_c(v, hbar)
    sigma, log_neg = measures(c_minus, c_plus, hbar)
    return EntanglementReport(
        c_minus=c_minus, c_plus=c_plus, sigma=sigma, log_neg=log_neg,
        entangled=c_minus < 0.5 * hbar)


def c_minus_weak(p: ModelParams, tau: float) -> float:
    """Ultraweak-coupling prediction for c_minus.

    omega*(Q(eta) - |chi(tau)|) + (gamma hbar / pi omega)(cutoff1 -
    ln(a/omega)); with a saturated Q this is the late-start limit used for
    the creation-window estimate.
    """
    gam, om, a, hbar = p.gamma, p.omega, p.accel, p.hbar
    eta = tau - p.tau0
    damp = math.exp(-2 * gam * eta) if gam * eta < 350 else 0.0
    coth = 1.0 / math.tanh(math.pi * om / a)
    q = hbar / (2 * om) * (damp + coth * (1.0 - damp))
    lam_term = gam * hbar / (math.pi * om) * (p.cutoff1 - math.log(a / om))
    return om * (q - abs(chi_envelope(p, tau))) + lam_term


def window_parameter(p: ModelParams) -> float:
    """zeta = e^{-pi omega/a}/2 + (gamma/pi omega)(cutoff1 - ln(a/omega))
    sinh(pi omega/a); the window exists for 0 < zeta < 1/e."""
    gam, om, a = p.gamma, p.omega, p.accel
    x = math.pi * om / a
    return (0.5 * math.exp(-x)
            + gam / (math.pi * om) * (p.cutoff1 - math.log(a / om)) * math.sinh(x))


def creation_window(p: ModelParams):
    """Entanglement creation and loss times (tau_E, tau_dE), or None.

    tau_E = -W_0(-zeta)/(2 gamma) and tau_dE = -W_{-1}(-zeta)/(2 gamma);
    valid in the ultraweak regime with the start pushed far into the past.
    Returns None when zeta >= 1/e (no window opens) or zeta <= 0.
    """
    zeta = window_parameter(p)
    if not 0.0 < zeta < math.exp(-1.0):
        return None
    tau_e = -lambert_w(0, -zeta) / (2.0 * p.gamma)
    tau_de = -lambert_w(-1, -zeta) / (2.0 * p.gamma)
    return tau_e, tau_de


def creation_band(p: ModelParams):
    """Acceleration-to-frequency band allowing entanglement creation.

    Returns (lower, upper, regime_ok): upper = pi/ln(e/2) ~ 10.238; the
    lower bound pi/ln(2 omega/(e cutoff1)) is evaluated verbatim (the
    couplings cancel) and `regime_ok` is False when its log argument is <= 1,
    where the printed expression stops being meaningful.
    """
    om, c1 = p.omega, p.cutoff1
    upper = math.pi / math.log(0.5 * math.e)
    arg = 2.0 * om / (math.e * c1)
    if arg <= 1.0:
        lower = math.pi / math.log(arg) if arg > 0 and arg != 1.0 else math.nan
        return lower, upper, False
    return math.pi / math.log(arg), upper, True
