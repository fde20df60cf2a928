import cmath
import math

import numpy as np
import pytest
from scipy import integrate

from accelpair.correlators import correlator_set
from accelpair.entanglement import covariance
from accelpair.errors import SingularKernel
from accelpair.field import RegulatorScheme, wightman_cross
from accelpair.params import EULER_GAMMA, ModelParams
from accelpair.rdm import gtilde_assemble, truncated_rdm
from accelpair import tdpt


def fig6_params():
    return ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=0.0)


def fig6_schemes(p):
    eps_cut = math.exp(-14.0 - EULER_GAMMA) / p.omega
    return {
        "original": RegulatorScheme.original(eps_cut),
        "modified": RegulatorScheme.modified(eps_cut),
        "shifted": RegulatorScheme.shifted(eps_cut, eps_cut,
                                           math.exp(-30.0) / p.omega),
        "shifted0": RegulatorScheme.shifted(eps_cut, eps_cut, 0.0),
    }


def brute_dblquad(p, tau, kernel, phase):
    """Reference double integral over [tau0, tau]^2 by scipy dblquad."""
    def integrand(sp, s, which):
        if phase == "delta":
            ph = np.exp(-1j * p.omega * (s - sp))
        else:
            ph = np.exp(1j * p.omega * (s + sp))
        v = ph * kernel(s, sp)
        return v.real if which == 0 else v.imag

    re_, _ = integrate.dblquad(lambda sp, s: integrand(sp, s, 0),
                               p.tau0, tau, p.tau0, tau,
                               epsabs=1e-13, epsrel=1e-11)
    im_, _ = integrate.dblquad(lambda sp, s: integrand(sp, s, 1),
                               p.tau0, tau, p.tau0, tau,
                               epsabs=1e-13, epsrel=1e-11)
    return complex(re_, im_)


class TestElements:
    def test_zero_at_initial_time(self):
        p = fig6_params()
        sch = RegulatorScheme.modified(p.eps_phys)
        for which in ("r1010", "r1001", "r1100", "r1111"):
            el = tdpt.tdpt_element(p, which, p.tau0, sch, 1e-8)
            assert el.value == 0.0

    def test_cross_channels_against_dblquad(self):
        p = ModelParams(gamma=0.01, omega=1.3, accel=2.0, tau0=-10.0)
        sch = RegulatorScheme.modified(1e-3)
        tau = 5.0
        pref = p.coupling_sq / (2 * p.hbar * p.omega)

        def kern(s, sp):
            return wightman_cross(s, sp, p.accel, p.hbar, 0.0)

        got = tdpt.tdpt_element(p, "r1001", tau, sch, 1e-10).value
        ref = pref * brute_dblquad(p, tau, kern, "delta")
        assert got == pytest.approx(ref, rel=1e-9)
        got = tdpt.tdpt_element(p, "r1100", tau, sch, 1e-10).value
        ref = -pref * cmath.exp(-2j * p.omega * tau) * brute_dblquad(p, tau, kern, "sum")
        assert got == pytest.approx(ref, rel=1e-9)

    def test_self_channel_modified_against_dblquad(self):
        # resolvable regulator so the brute-force reference converges
        p = ModelParams(gamma=0.05, omega=1.3, accel=1.0, tau0=-2.0)
        epsp = 5e-3
        sch = RegulatorScheme.modified(epsp)
        tau = 3.0
        pref = p.coupling_sq / (2 * p.hbar * p.omega)

        def kern(s, sp):
            y = 0.5 * p.accel * (np.asarray(s) - np.asarray(sp) - 1j * epsp)
            return (p.hbar / (4 * math.pi**2)) / (-(4 / p.accel**2) * np.sinh(y) ** 2)

        got = tdpt.tdpt_element(p, "r1010", tau, sch, 1e-10).value
        ref = pref * brute_dblquad(p, tau, kern, "delta")
        assert got == pytest.approx(ref, rel=1e-10)

    def test_self_channel_original_against_dblquad(self):
        p = ModelParams(gamma=0.05, omega=1.3, accel=1.0, tau0=-2.0)
        eps = 5e-3
        sch = RegulatorScheme.original(eps)
        tau = 3.0
        pref = p.coupling_sq / (2 * p.hbar * p.omega)

        def kern(s, sp):
            d = np.asarray(s) - np.asarray(sp)
            t_avg = 0.5 * (np.asarray(s) + np.asarray(sp))
            sh = np.sinh(0.5 * p.accel * d)
            den = (-(4 / p.accel**2) * sh
                   * (sh - 1j * eps * p.accel * np.cosh(p.accel * t_avg)) + eps**2)
            return (p.hbar / (4 * math.pi**2)) / den

        got = tdpt.tdpt_element(p, "r1010", tau, sch, 1e-9).value
        ref = pref * brute_dblquad(p, tau, kern, "delta")
        assert got == pytest.approx(ref, rel=1e-8)

    def test_original_with_zero_eps_rejected(self):
        p = fig6_params()
        with pytest.raises(SingularKernel):
            tdpt.tdpt_element(p, "r1010", 4.0, RegulatorScheme.original(0.0), 1e-8)


class TestRegulatorSchemes:
    def test_scheme_equivalence(self):
        # shifted bounds with the kernel regulator taken to zero reproduce
        # the translation-invariant scheme over the linear phase
        p = fig6_params()
        schemes = fig6_schemes(p)
        for tau in (8.0, 11.0, 14.0):
            a = tdpt.tdpt_element(p, "r1010", tau, schemes["shifted0"], 1e-9).value.real
            b = tdpt.tdpt_element(p, "r1010", tau, schemes["modified"], 1e-9).value.real
            assert abs(a - b) <= 0.02 * abs(b)

    def test_shifted_linear_phase_slope(self):
        # dense sweep; the switch-on transient decays as e^{-a tau} riding on
        # the detector frequency, leaving the Markovian excitation slope
        p = fig6_params()
        sch = fig6_schemes(p)["shifted"]
        rate = tdpt.tdpt_inf_rate(p)
        taus = np.arange(8.0, 15.3, 0.1)
        vals = np.array([tdpt.tdpt_element(p, "r1010", t, sch, 1e-9).value.real
                         for t in taus])
        om, a = p.omega, p.accel
        damp = np.exp(-a * taus)
        basis = np.column_stack([
            np.ones_like(taus), taus, damp,
            damp * np.sin(om * taus), damp * np.cos(om * taus),
            damp * np.sin(2 * om * taus), damp * np.cos(2 * om * taus)])
        coef, *_ = np.linalg.lstsq(basis, vals, rcond=None)
        assert coef[1] == pytest.approx(rate, rel=0.05)

    def test_original_scheme_negative_initial_slope(self):
        p = fig6_params()
        sch = fig6_schemes(p)["original"]
        taus = np.arange(0.5, 4.1, 0.5)
        vals = [tdpt.tdpt_element(p, "r1010", t, sch, 1e-8).value.real
                for t in taus]
        slope = np.polyfit(taus, vals, 1)[0]
        assert slope < 0.0

    def test_original_scheme_saturates(self):
        # saturation beyond tau ~ -ln(eps)/a
        p = fig6_params()
        sch = fig6_schemes(p)["original"]
        tau_sat = -math.log(sch.eps) / p.accel
        v1 = tdpt.tdpt_element(p, "r1010", tau_sat + 2.0, sch, 1e-8).value.real
        v2 = tdpt.tdpt_element(p, "r1010", tau_sat + 6.0, sch, 1e-8).value.real
        early_drop = abs(tdpt.tdpt_element(p, "r1010", 1.0, sch, 1e-8).value.real
                         - tdpt.tdpt_element(p, "r1010", 5.0, sch, 1e-8).value.real)
        assert abs(v2 - v1) < 0.5 * early_drop


class TestThreeStage:
    def test_pair_element_growth_stages(self):
        p = ModelParams(gamma=1e-5, omega=1.3, accel=2.0, tau0=-10.0)
        sch = RegulatorScheme.modified(p.eps_phys)
        vals = {t: abs(tdpt.tdpt_element(p, "r1100", t, sch, 1e-9).value)
                for t in (-10.0, 0.0, 10.0, 12.5, 25.0)}
        growth_before = vals[0.0] - vals[-10.0]
        growth_after = vals[10.0] - vals[0.0]
        assert growth_after >= 10.0 * growth_before
        # saturation: changes < 5% beyond |tau0| + 5/a
        assert abs(vals[25.0] - vals[12.5]) < 0.05 * vals[12.5]


class TestDoublyExcited:
    def test_factorized_structure(self):
        # the pair-creation channel contribution equals the square of the
        # r1100 raw integral, reassembled from the element's phase factors
        p = ModelParams(gamma=0.01, omega=1.3, accel=2.0, tau0=-10.0)
        sch = RegulatorScheme.modified(p.eps_phys)
        tau = 4.0
        pref = p.coupling_sq / (2 * p.hbar * p.omega)
        el_1100 = tdpt.tdpt_element(p, "r1100", tau, sch, 1e-9).value
        j_sum = el_1100 / (-pref * cmath.exp(-2j * p.omega * tau))
        el_1010 = tdpt.tdpt_element(p, "r1010", tau, sch, 1e-9).value
        el_1001 = tdpt.tdpt_element(p, "r1001", tau, sch, 1e-9).value
        total = tdpt.tdpt_r1111(p, tau, sch, 1e-9)
        expected = (abs(j_sum) ** 2 * pref**2
                    + el_1010**2 + el_1001**2)
        assert total == pytest.approx(expected, rel=1e-6)

    def test_magnitude_ordering_weak_coupling(self):
        p = ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=-10.0)
        sch = RegulatorScheme.modified(p.eps_phys)
        v1111 = tdpt.tdpt_r1111(p, 5.0, sch, 1e-8)
        v1010 = tdpt.tdpt_element(p, "r1010", 5.0, sch, 1e-8).value
        assert abs(v1111) < 1e-3 * abs(v1010)
        assert v1111.real >= 0.0


class TestMarkovianRate:
    def test_reference_value(self):
        p = fig6_params()
        rate = tdpt.tdpt_inf_rate(p)
        assert rate == pytest.approx(2e-5 / math.expm1(2 * math.pi * 2.3), rel=1e-14)
        assert rate == pytest.approx(1.059e-11, rel=1e-3)

    def test_boltzmann_suppression(self):
        p = ModelParams(gamma=1e-5, omega=2.3, accel=1e-2, tau0=0.0)
        assert tdpt.tdpt_inf_rate(p) < 1e-300 or tdpt.tdpt_inf_rate(p) == 0.0

    def test_small_frequency_divergence(self):
        p = ModelParams(gamma=1e-5, omega=1e-8, accel=1.0, tau0=0.0)
        rate = tdpt.tdpt_inf_rate(p)
        assert rate == pytest.approx(p.gamma * p.accel / (math.pi * p.omega), rel=1e-6)


class TestAgainstExactPipeline:
    def test_pair_element_matches_exact_rdm(self):
        # ultraweak window 1/omega << tau - tau0 << 1/gamma
        p = ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=-40.0)
        sch = RegulatorScheme.modified(p.eps_phys)
        for tau in (0.0, 15.0, 35.0):
            el = tdpt.tdpt_element(p, "r1100", tau, sch, 1e-9)
            v = covariance(correlator_set(p, tau), p.hbar)
            exact = truncated_rdm(gtilde_assemble(v, p), p).rho[3, 0]
            assert abs(el.value - exact) <= 0.1 * abs(exact)
