"""Two-point functions of the detector pair.

The cross correlator <Q_A, Q_B> has an exact closed form built from the
hypergeometric kernel F_K at four log-arguments; a brute-force 2D quadrature
of the defining response integral serves as its independent oracle.  Self
correlators split into the response to field vacuum fluctuations (v-part,
computed by regulated quadrature) and the damped propagation of the initial
detector state (a-part, closed form).  The weak-coupling stage formulas and
the envelope chi used by the entanglement window are also provided here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import OverdampedUnsupported, StepUnderflow
from .field import RegulatorScheme, wightman_cross, wightman_self
from .params import CorrelatorSet, ModelParams
from .quadrature import graded_breakpoints, quad2d, quad_gk_vec

# drop the kernel tail beyond e^(-a |Delta|) ~ 1e-60; keeps the 1D
# integration range bounded even for etas of order 1/gamma
_DELTA_TAIL = 140.0


def cross_qq_exact(p: ModelParams, tau: float, tau_p: float) -> float:
    """Equal-start two-time cross correlator <Q_A(eta), Q_B(eta')> in closed form.

    Assembled from F_K and its frequency derivative at the four log-arguments
    a(tau+tau'), a(tau+tau0), a(tau'+tau0) and a(2 tau0), with
    K = (gamma - i omega)/a and eta = tau - tau0, eta' = tau' - tau0.
    """
    gam, om, a, hbar, tau0 = p.gamma, p.omega, p.accel, p.hbar, p.tau0
    k = complex(gam, -om) / a
    eta = tau - tau0
    etap = tau_p - tau0
    c = complex(om, gam)

    def F(w):
        return specfun.f_k(k, w)

    def Fd(w):
        return specfun.f_k_domega(k, w, a)

    w1, w2, w3, w4 = a * (tau + tau_p), a * (tau + tau0), a * (tau_p + tau0), a * 2.0 * tau0
    line1 = (1j * gam / om) * F(w1) - c * Fd(w1)
    line2 = math.exp(-gam * etap) * (
        (-(1j * gam / om) * math.cos(om * etap) + 1j * math.sin(om * etap)) * F(w2)
        + complex(math.cos(om * etap), math.sin(om * etap)) * c * Fd(w2))
    line3 = math.exp(-gam * eta) * (
        (-(1j * gam / om) * math.cos(om * eta) + 1j * math.sin(om * eta)) * F(w3)
        + complex(math.cos(om * eta), math.sin(om * eta)) * c * Fd(w3))
    f4 = F(w4)
    line4 = math.exp(-gam * (eta + etap)) * (
        -complex(math.cos(om * (eta + etap)), math.sin(om * (eta + etap)))
        * (f4 + c * Fd(w4))
        + (1j * gam / om + 1.0) * math.cos(om * (eta - etap)) * f4)
    return hbar * gam / (math.pi * om**2) * (line1 + line2 + line3 + line4).real


def _cross_eval_noise(p: ModelParams, tau: float) -> float:
    """Double-precision noise bound for one closed-form evaluation.

    The four lines of the closed form can exceed the assembled value by
    orders of magnitude, and their oscillatory phases (arguments up to
    omega*eta and omega*w/a) carry ~1 ulp argument-reduction error each, so
    the evaluation noise is set by the line magnitudes, not the result.
    """
    gam, om, a = p.gamma, p.omega, p.accel
    k = complex(gam, -om) / a
    eta = tau - p.tau0
    env = (1.0,
           math.exp(-gam * eta) if gam * eta < 700 else 0.0,
           math.exp(-gam * eta) if gam * eta < 700 else 0.0,
           math.exp(-2 * gam * eta) if gam * eta < 350 else 0.0)
    ws = (2 * a * tau, a * (tau + p.tau0), a * (tau + p.tau0), 2 * a * p.tau0)
    phases = (om / a * abs(ws[0]),
              om * eta + om / a * abs(ws[1]),
              om * eta + om / a * abs(ws[2]),
              2 * om * eta + om / a * abs(ws[3]))
    eps_m = np.finfo(float).eps
    total = 0.0
    for e, w, ph in zip(env, ws, phases):
        if e == 0.0:
            continue
        mag = abs(specfun.f_k(k, w)) + (om + gam + 1.0) * abs(
            specfun.f_k_domega(k, w, a))
        total += e * mag * eps_m * (50.0 + ph)
    return p.hbar * gam / (math.pi * om**2) * total


def cross_set_exact(p: ModelParams, tau: float):
    """Equal-time cross correlators (qq, qp, pq, pp) from the closed form.

    Momentum entries are proper-time derivatives of the two-time qq
    correlator, taken by central differences with one Richardson step;
    convergence is checked against a doubled-step extrapolation, down to
    the double-precision noise floor of the evaluation.
    """
    om = p.omega
    h = 1e-4 / om

    def f(t, tp):
        return cross_qq_exact(p, t, tp)

    qq = f(tau, tau)

    def d_second(hh):
        return (f(tau, tau + hh) - f(tau, tau - hh)) / (2 * hh)

    def d_first(hh):
        return (f(tau + hh, tau) - f(tau - hh, tau)) / (2 * hh)

    def d_mixed(hh):
        return (f(tau + hh, tau + hh) - f(tau + hh, tau - hh)
                - f(tau - hh, tau + hh) + f(tau - hh, tau - hh)) / (4 * hh * hh)

    out = [qq]
    # finite-difference floor of a central difference: noise(f) / step^k
    e_f = max(_cross_eval_noise(p, tau), 1e-280)
    noise = (10 * e_f / h, 10 * e_f / h, 10 * e_f / (h * h))
    scales = (om * abs(qq), om * abs(qq), om * om * abs(qq))
    for deriv, scale, floor in zip((d_second, d_first, d_mixed), scales, noise):
        fine = (4.0 * deriv(h) - deriv(2 * h)) / 3.0
        coarse = (4.0 * deriv(2 * h) - deriv(4 * h)) / 3.0
        ref = max(abs(fine), scale, 1e-280)
        if abs(fine - coarse) > max(1e-7 * ref, floor):
            raise StepUnderflow(
                f"derivative extrapolation stalled at tau={tau}: "
                f"|{fine:.3e} - {coarse:.3e}| > 1e-7*{ref:.3e}")
        out.append(fine)
    qq, qp, pq, pp = out
    return qq, qp, pq, pp


def cross_qq_quad(p: ModelParams, tau: float, tau_p: float, quad_tol: float = 1e-9) -> float:
    """Brute-force 2D quadrature of the defining cross-response integral.

    Integrates lambda0^2/omega^2 * e^{-gamma(tau-s)-gamma(tau'-s')}
    sin(omega(tau-s)) sin(omega(tau'-s')) Re D+_AB(s, s') over
    [tau0, tau] x [tau0, tau'], with the cross kernel at eps = 0.  Serves as
    the independent oracle for `cross_qq_exact`.
    """
    gam, om, a, hbar, tau0 = p.gamma, p.omega, p.accel, p.hbar, p.tau0
    if tau <= tau0 or tau_p <= tau0:
        return 0.0

    def integrand(s, sp):
        d = wightman_cross(s, sp, a, hbar, 0.0)
        return (np.exp(-gam * (tau - s) - gam * (tau_p - sp))
                * np.sin(om * (tau - s)) * np.sin(om * (tau_p - sp)) * d)

    init = min(math.pi / om, 2.0 / a, tau - tau0, tau_p - tau0)
    val = quad2d(integrand, (tau0, tau), (tau0, tau_p),
                 abs_tol=quad_tol * 1e-3, rel_tol=quad_tol, init_size=init)
    return p.coupling_sq / om**2 * val


def _u_envelope_integrals(abs_d: np.ndarray, eta: float, gam: float, om: float):
    """Integrals of e^{-2 gamma u} {1, cos 2 om u, sin 2 om u} over the
    u-range [|Delta|/2, eta - |Delta|/2] left by the T integration."""
    u1 = 0.5 * abs_d
    u2 = eta - 0.5 * abs_d
    empty = u1 >= u2
    u2 = np.maximum(u1, u2)
    gc = (np.exp(-2 * gam * u1) - np.exp(-2 * gam * u2)) / (2 * gam)
    zc = complex(-2 * gam, 2 * om)
    ec = (np.exp(zc * u2) - np.exp(zc * u1)) / zc
    gc = np.where(empty, 0.0, gc)
    gcos = np.where(empty, 0.0, ec.real)
    gsin = np.where(empty, 0.0, ec.imag)
    return gc, gcos, gsin


def self_v_quad(p: ModelParams, tau: float, quad_tol: float = 1e-10):
    """Vacuum-response part of the self correlators (qq, qp, pp) at time tau.

    The defining double integral over [tau0, tau]^2 with the translation
    invariant kernel reduces exactly to a single Delta integral: the T
    integration of the damped-oscillation envelopes is elementary.  The
    remaining integrand has a regulated double pole at Delta = 0 of width
    eps_phys, resolved by geometrically graded panels.
    """
    gam, om, a, hbar = p.gamma, p.omega, p.accel, p.hbar
    eta = tau - p.tau0
    if eta <= 0:
        return 0.0, 0.0, 0.0
    epsp = p.eps_phys
    reg = RegulatorScheme.modified(epsp)
    L = min(eta, _DELTA_TAIL / a + 10.0)

    def integrand(delta):
        re_d = wightman_self(delta, np.zeros_like(delta), a, hbar, reg).real
        gc, gcos, gsin = _u_envelope_integrals(np.abs(delta), eta, gam, om)
        cd = np.cos(om * delta)
        sd = np.sin(om * delta)
        m_qq = 0.5 * (cd * gc - gcos)
        m_qp = -0.5 * gam * (cd * gc - gcos) + 0.5 * om * (gsin - sd * gc)
        m_pp = (0.5 * gam * gam * (cd * gc - gcos) - gam * om * gsin
                + 0.5 * om * om * (cd * gc + gcos))
        return re_d[:, None] * np.stack([m_qq, m_qp, m_pp], axis=1)

    bps = [b for b in graded_breakpoints(epsp, min(L, 2.0)) if -L < b < L]
    step = math.pi / om
    bps += [x for x in np.arange(step, L, step)] + [-x for x in np.arange(step, L, step)]
    vec = quad_gk_vec(integrand, -L, L, breakpoints=bps,
                      abs_tol=1e-12, rel_tol=quad_tol, max_intervals=8000)
    scale = p.coupling_sq / om**2
    return scale * vec[0], scale * vec[1], scale * vec[2]


def self_weak_closed(p: ModelParams, eta: float):
    """Ultraweak-coupling closed forms of the total self correlators.

    qq = Q, pp = omega^2 Q + (2/pi) gamma hbar (cutoff1 - ln(a/omega)),
    qp = 0, with Q = (hbar/2omega)[e^{-2 gamma eta}
    + coth(pi omega/a)(1 - e^{-2 gamma eta})].  Validity (gamma*cutoffs small
    against omega and a) is the caller's concern.
    """
    gam, om, a, hbar = p.gamma, p.omega, p.accel, p.hbar
    damp = math.exp(-2 * gam * eta) if gam * eta < 350 else 0.0
    coth = 1.0 / math.tanh(math.pi * om / a)
    qq = hbar / (2 * om) * (damp + coth * (1.0 - damp))
    pp = om**2 * qq + (2.0 / math.pi) * gam * hbar * (p.cutoff1 - math.log(a / om))
    return qq, pp, 0.0


def a_part(p: ModelParams, eta: float, detector: str = "A"):
    """Initial-state part (qq, pp, qp) of one detector's self correlators.

    Homogeneous damped-oscillator propagation of the initial Gaussian
    moments <Q^2> = hbar/(2 w^2), <P^2> = hbar w^2/2, <Q,P> = 0 with
    w = alpha (detector A) or beta (B):

        Q(eta) = e^{-g eta}[(cos(om eta) + (g/om) sin(om eta)) Q0
                 + sin(om eta)/om P0],   P = dQ/deta,

    where om = sqrt(omega_r^2 - gamma^2) is the observed frequency.
    """
    gam = p.gamma
    om_r2 = p.omega_r**2
    if om_r2 <= gam**2:
        raise OverdampedUnsupported("damped propagation requires omega_r > gamma")
    om = math.sqrt(om_r2 - gam**2)
    width = p.alpha if detector == "A" else p.beta
    q2 = p.hbar / (2 * width**2)
    p2 = p.hbar * width**2 / 2
    e = math.exp(-gam * eta) if gam * eta < 350 else 0.0
    cqq = e * (math.cos(om * eta) + gam / om * math.sin(om * eta))
    cqp = e * math.sin(om * eta) / om
    cpq = -e * om_r2 / om * math.sin(om * eta)
    cpp = e * (math.cos(om * eta) - gam / om * math.sin(om * eta))
    qq = cqq**2 * q2 + cqp**2 * p2
    pp = cpq**2 * q2 + cpp**2 * p2
    qp = cqq * cpq * q2 + cqp * cpp * p2
    return qq, pp, qp


def chi_envelope(p: ModelParams, tau: float) -> float:
    """Envelope chi(tau) of the oscillating weak-coupling cross correlators.

    chi = -(2 hbar gamma e^{-2 gamma tau} / (omega sinh(pi omega/a)))
          * [tau steps(tau) - (tau + tau0) steps(tau + tau0)]
    with steps(0) = 0 so chi(0) = 0 exactly.
    """
    gam, om, a, hbar, tau0 = p.gamma, p.omega, p.accel, p.hbar, p.tau0
    bracket = 0.0
    if tau > 0:
        bracket += tau
    if tau + tau0 > 0:
        bracket -= tau + tau0
    if bracket == 0.0:
        return 0.0
    damp = math.exp(-2 * gam * tau) if abs(gam * tau) < 350 else 0.0
    return -2 * hbar * gam * damp / (om * math.sinh(math.pi * om / a)) * bracket


def stage_approx(p: ModelParams, tau: float, stage: str) -> float:
    """Printed multi-stage approximations of the cross correlator.

    stage "II": intermediate regime 1 <~ a tau < -a tau0, dominated by the
    tau+tau' line; stage "III": tau > -tau0, slowly decaying oscillation;
    stage "zero_tau0": the tau0 = 0 evolution (starts directly in stage III)
    built from complex polygamma values.
    """
    gam, om, a, hbar, tau0 = p.gamma, p.omega, p.accel, p.hbar, p.tau0
    sinh = math.sinh(math.pi * om / a)
    coth = 1.0 / math.tanh(math.pi * om / a)
    damp = math.exp(-2 * gam * tau)
    if stage == "II":
        return (hbar * gam * damp / (om * sinh)
                * (-2 * tau * math.cos(2 * om * tau)
                   + math.pi / a * coth * math.sin(2 * om * tau)))
    if stage == "III":
        return (hbar * gam * damp / (om**2 * sinh)
                * (2 * om * tau0 * math.cos(2 * om * tau)
                   - math.pi * om / a * coth * math.sin(2 * om * tau)
                   + 2 * math.sin(om * (tau - tau0)) * math.cos(om * (tau + tau0))))
    if stage == "zero_tau0":
        z = -0.5j * om / a
        tri = (1j * specfun.trigamma_c(z) - 1j * specfun.trigamma_c(0.5 + z)).real
        dig = (specfun.digamma_c(z) - specfun.digamma_c(0.5 + z)).real
        return (hbar * gam / (math.pi * om**2) * damp
                * (math.pi / (2 * sinh) * (1 - math.pi * om / a * coth)
                   * math.sin(2 * om * tau)
                   + om / (4 * a) * tri * math.cos(2 * om * tau)
                   + 0.5 * dig * (1 - math.cos(2 * om * tau))))
    raise ValueError(f"unknown stage {stage!r}")


@dataclass(frozen=True)
class SelfMoments:
    qq: float
    pp: float
    qp: float


def self_total(p: ModelParams, tau: float, quad_tol: float = 1e-10):
    """Total self correlators (v-part + initial-state part) for A and B."""
    eta = tau - p.tau0
    qq_v, qp_v, pp_v = self_v_quad(p, tau, quad_tol)
    out = []
    for det in ("A", "B"):
        qq_a, pp_a, qp_a = a_part(p, eta, det)
        out.append(SelfMoments(qq_v + qq_a, pp_v + pp_a, qp_v + qp_a))
    return out[0], out[1]


def correlator_set(p: ModelParams, tau: float, quad_tol: float = 1e-10) -> CorrelatorSet:
    """Assemble all ten equal-time correlators at proper time tau."""
    sa, sb = self_total(p, tau, quad_tol)
    if tau == p.tau0:
        qq = qp = pq = pp = 0.0
    else:
        qq, qp, pq, pp = cross_set_exact(p, tau)
    return CorrelatorSet(
        tau=tau,
        qq_AA=sa.qq, pp_AA=sa.pp, qp_AA=sa.qp,
        qq_BB=sb.qq, pp_BB=sb.pp, qp_BB=sb.qp,
        qq_AB=qq, qp_AB=qp, pq_AB=pq, pp_AB=pp)
