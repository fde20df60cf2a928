import math

import numpy as np
import pytest

from accelpair import entanglement as ent
from accelpair.correlators import correlator_set
from accelpair.errors import ComplexSpectrum, NonPhysicalState
from accelpair.params import CorrelatorSet, ModelParams


def free_set(omega, hbar=1.0, cross=0.0):
    return CorrelatorSet(
        tau=0.0,
        qq_AA=hbar / (2 * omega), pp_AA=hbar * omega / 2, qp_AA=0.0,
        qq_BB=hbar / (2 * omega), pp_BB=hbar * omega / 2, qp_BB=0.0,
        qq_AB=cross, qp_AB=0.0, pq_AB=0.0, pp_AB=-omega**2 * cross)


class TestCovariance:
    def test_ground_state_matrix(self):
        v = ent.covariance(free_set(1.3), 1.0)
        v0 = ent.ground_state_covariance(1.3, 1.0)
        assert np.allclose(v.matrix, v0.matrix, rtol=0, atol=1e-15)

    def test_block_structure(self):
        c = free_set(1.3, cross=0.05)
        v = ent.covariance(c, 1.0)
        assert np.allclose(v.matrix, v.matrix.T, atol=0)
        assert np.allclose(v.v_AB, v.matrix[2:, :2].T, atol=0)
        assert v.v_AB[0, 0] == 0.05

    def test_heisenberg_violation_rejected(self):
        bad = CorrelatorSet(
            tau=0.0, qq_AA=0.1, pp_AA=0.1, qp_AA=0.0,
            qq_BB=1.0, pp_BB=1.0, qp_BB=0.0,
            qq_AB=0.0, qp_AB=0.0, pq_AB=0.0, pp_AB=0.0)
        with pytest.raises(NonPhysicalState):
            ent.covariance(bad, 1.0)

    def test_physicality_of_pipeline_states(self):
        # V + (i hbar/2) J >= 0 along a sweep
        p = ModelParams(gamma=0.01, omega=1.3, accel=2.0, tau0=-60.0)
        j = np.array([[0, 1, 0, 0], [-1, 0, 0, 0],
                      [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float)
        for tau in (-30.0, 0.0, 30.0, 60.0):
            v = ent.covariance(correlator_set(p, tau), p.hbar)
            ev = np.linalg.eigvalsh(v.matrix + 0.5j * p.hbar * j)
            assert ev.min() > -1e-10


class TestSymplectic:
    def test_ground_state_degenerate(self):
        v0 = ent.ground_state_covariance(1.3, 1.0)
        c_minus, c_plus = ent.symplectic_c(v0, 1.0)
        assert c_minus == pytest.approx(0.5, rel=1e-14)
        assert c_plus == pytest.approx(0.5, rel=1e-14)

    def test_exchange_symmetry(self):
        # c_pm invariant under swapping the A and B blocks
        rng = np.random.default_rng(0)
        p = ModelParams(gamma=0.01, omega=1.3, accel=2.0, tau0=-60.0)
        v = ent.covariance(correlator_set(p, 45.0), p.hbar)
        perm = np.zeros((4, 4))
        perm[0, 2] = perm[1, 3] = perm[2, 0] = perm[3, 1] = 1.0
        swapped = ent.CovarianceMatrix(perm @ v.matrix @ perm.T)
        assert ent.symplectic_c(v, 1.0) == pytest.approx(
            ent.symplectic_c(swapped, 1.0), rel=1e-12)

    def test_complex_spectrum_rejected(self):
        # cross correlations exceeding the local variances: not a covariance
        # matrix at all, the squared symplectic value goes negative
        m = np.diag([1.0, 1.0, 1.0, 1.0])
        m[0, 2] = m[2, 0] = 2.0
        m[1, 3] = m[3, 1] = 3.0
        with pytest.raises(ComplexSpectrum):
            ent.symplectic_c(ent.CovarianceMatrix(m), 1.0)


class TestMeasures:
    def test_threshold(self):
        sigma, log_neg = ent.measures(0.5, 0.5, 1.0)
        assert sigma == 0.0 and log_neg == 0.0

    def test_entangled_values(self):
        sigma, log_neg = ent.measures(0.25, 1.0, 1.0)
        assert log_neg == pytest.approx(1.0, rel=1e-14)
        assert sigma == pytest.approx((1.0 - 0.25) * (0.0625 - 0.25), rel=1e-14)
        assert sigma < 0

    def test_separable_clamp(self):
        _, log_neg = ent.measures(0.8, 5.0, 1.0)
        assert log_neg == 0.0

    def test_sign_equivalence(self):
        # physical partial transposes always carry c_plus >= hbar/2
        rng = np.random.default_rng(1)
        for _ in range(40):
            c_minus = rng.uniform(0.05, 1.2)
            c_plus = max(c_minus, rng.uniform(0.51, 2.0))
            sigma, log_neg = ent.measures(c_minus, c_plus, 1.0)
            assert (c_minus < 0.5) == (sigma < 0) == (log_neg > 0)


class TestWeakCoupling:
    def test_separable_limit(self):
        p = ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=-1e9)
        # chi = 0 at tau < 0; saturated Q
        val = ent.c_minus_weak(p, -5.0)
        coth = 1 / math.tanh(math.pi * p.omega / p.accel)
        expected = (0.5 * coth + p.gamma / (math.pi * p.omega)
                    * (p.cutoff1 - math.log(p.accel / p.omega)))
        assert val == pytest.approx(expected, rel=1e-10)
        assert val > 0.5

    def test_matches_full_pipeline_in_weak_regime(self):
        p = ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=-2e5)
        for tau in (2e3, 3e4, 1e5):
            weak = ent.c_minus_weak(p, tau)
            rep = ent.report(ent.covariance(correlator_set(p, tau), p.hbar), p.hbar)
            assert weak == pytest.approx(rep.c_minus, abs=1e-3)

    def test_window_consistent_with_root_finding(self):
        # dips below hbar/2 exactly on the product-log window
        p = ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=-1e12)
        tau_e, tau_de = ent.creation_window(p)
        for tau, inside in ((tau_e * 0.5, False), (tau_e * 1.5, True),
                            (math.sqrt(tau_e * tau_de), True),
                            (tau_de * 0.9, True), (tau_de * 1.2, False)):
            assert (ent.c_minus_weak(p, tau) < 0.5) == inside
        # crossing points themselves
        assert ent.c_minus_weak(p, tau_e) == pytest.approx(0.5, abs=1e-8)
        assert ent.c_minus_weak(p, tau_de) == pytest.approx(0.5, abs=1e-8)


class TestCreationWindow:
    def test_reference_values(self):
        p = ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=-1e12,
                        cutoff1=20.0)
        zeta = ent.window_parameter(p)
        assert zeta == pytest.approx(0.0202, abs=3e-4)
        tau_e, tau_de = ent.creation_window(p)
        assert tau_e == pytest.approx(1.0e3, rel=0.1)
        assert tau_de == pytest.approx(2.8e5, rel=0.1)

    def test_window_closes_at_inverse_e(self):
        # zeta >= 1/e: no window (acceleration far above the band)
        p = ModelParams(gamma=1e-5, omega=0.3, accel=9.0, tau0=-1e12)
        assert ent.window_parameter(p) > math.exp(-1)
        assert ent.creation_window(p) is None

    def test_large_acceleration_above_band(self):
        p0 = ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=-1e12)
        _, upper, _ = ent.creation_band(p0)
        p = p0.replace(accel=11.0 * p0.omega)
        assert 11.0 > upper
        assert ent.window_parameter(p) > math.exp(-1)
        assert ent.creation_window(p) is None

    def test_positive_creation_time(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            p = ModelParams(gamma=10 ** rng.uniform(-6, -4), omega=rng.uniform(1, 3),
                            accel=rng.uniform(0.5, 4.0), tau0=-1e12,
                            cutoff1=rng.uniform(10, 40))
            win = ent.creation_window(p)
            if win is not None:
                assert win[0] > 0
                assert win[1] > win[0]


class TestCreationBand:
    def test_upper_bound(self):
        p = ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=-1.0)
        _, upper, _ = ent.creation_band(p)
        assert upper == pytest.approx(10.2376, abs=1e-3)

    def test_small_cutoff_limit(self):
        # cutoff1 -> 0+: log argument diverges, lower bound -> 0+
        p = ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=-1.0,
                        cutoff1=1e-8)
        lower, _, ok = ent.creation_band(p)
        assert ok and 0 < lower < 0.2

    def test_regime_flag(self):
        # 2 omega/(e cutoff1) <= 1: printed bound undefined, flag raised
        p = ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=-1.0,
                        cutoff1=20.0)
        lower, _, ok = ent.creation_band(p)
        assert not ok
