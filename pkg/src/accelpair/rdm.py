"""Truncated reduced density matrix of the detector pair.

The Gaussian state of the two detectors, written as a quadratic form in the
doubled coordinates (A, A', B, B'), yields the matrix elements of the reduced
density matrix in the energy eigenbasis.  Keeping both oscillators up to
their first excited level gives a 4x4 matrix over (n_A, n_B) in
{00, 01, 10, 11} whose two PPT inequalities reproduce, exactly, the
symplectic separability criterion of the full Gaussian state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entanglement import CovarianceMatrix
from .errors import SingularCovariance, SingularGTilde
from .params import ModelParams


@dataclass(frozen=True)
class GTilde:
    """Quadratic-form matrix of the doubled Gaussian state plus its scalars."""

    matrix: np.ndarray       # 4x4 complex symmetric over (A, A', B, B')
    a_A: tuple               # (a_{A+}, a_{A-})
    a_B: tuple
    a_X: tuple
    b_A: float
    b_B: float
    b_X: tuple               # (b_{X+}, b_{X-})
    g_norm: float            # scalar G = 4[<QA^2><QB^2> - <QA,QB>^2]
    k_scale: float           # K = sqrt(omega_r/hbar)


@dataclass(frozen=True)
class TruncatedRDM:
    rho: np.ndarray          # 4x4 complex over basis (00, 01, 10, 11)
    g: float                 # normalization rho_{00,00}


def gtilde_assemble(v: CovarianceMatrix, p: ModelParams) -> GTilde:
    """Solve the Gaussian quadratic-form coefficients from the covariance.

    a_{A+-} = [V11 +- (4/hbar^2) (V^-1)22 det V] / (2G) and cyclic partners;
    the b factors are linear in the <Q,P>-type correlators.  The coefficient
    solution is exact on the identical-detector family (v_AA = v_BB,
    symmetric cross block) realized by this model; it has been verified
    against direct Gaussian wavefunction integrals on that family.
    """
    m = v.matrix
    hbar = p.hbar
    qq_a, qq_b, qq_x = m[0, 0], m[2, 2], m[0, 2]
    qp_a, qp_b = m[0, 1], m[2, 3]
    # <P_A, Q_B> and <Q_A, P_B>
    pa_qb, qa_pb = m[1, 2], m[0, 3]
    g_norm = 4.0 * (qq_a * qq_b - qq_x * qq_x)
    det_v = np.linalg.det(m)
    scale = float(np.abs(m).max()) ** 4
    if abs(det_v) < 1e-14 * max(scale, 1e-300) or g_norm < 1e-14 * max(qq_a * qq_b, 1e-300):
        raise SingularCovariance(
            f"covariance too singular for the Gaussian inversion: "
            f"det={det_v:.3e}, G={g_norm:.3e}")
    inv = np.linalg.inv(m)
    w = 4.0 / hbar**2 * det_v
    a_ap = (qq_a + w * inv[1, 1]) / (2 * g_norm)
    a_am = (qq_a - w * inv[1, 1]) / (2 * g_norm)
    a_bp = (qq_b + w * inv[3, 3]) / (2 * g_norm)
    a_bm = (qq_b - w * inv[3, 3]) / (2 * g_norm)
    a_xp = -(qq_x + w * inv[1, 3]) / (2 * g_norm)
    a_xm = -(qq_x - w * inv[1, 3]) / (2 * g_norm)
    b_a = 2.0 / (hbar * g_norm) * (pa_qb * qq_x - qp_a * qq_b)
    b_b = 2.0 / (hbar * g_norm) * (qa_pb * qq_x - qp_b * qq_a)
    half1 = qp_a * qq_x - pa_qb * qq_a
    half2 = qp_b * qq_x - qa_pb * qq_b
    b_xp = (half1 + half2) / (hbar * g_norm)
    b_xm = (half1 - half2) / (hbar * g_norm)
    k2 = p.omega_r / hbar
    gt = np.array([
        [a_ap + 1j * b_a + k2 / 2, a_am, a_xp + 1j * b_xp, a_xm + 1j * b_xm],
        [a_am, a_ap - 1j * b_a + k2 / 2, a_xm - 1j * b_xm, a_xp - 1j * b_xp],
        [a_xp + 1j * b_xp, a_xm - 1j * b_xm, a_bp + 1j * b_b + k2 / 2, a_bm],
        [a_xm + 1j * b_xm, a_xp - 1j * b_xp, a_bm, a_bp - 1j * b_b + k2 / 2],
    ])
    return GTilde(matrix=gt, a_A=(a_ap, a_am), a_B=(a_bp, a_bm),
                  a_X=(a_xp, a_xm), b_A=b_a, b_B=b_b, b_X=(b_xp, b_xm),
                  g_norm=g_norm, k_scale=math.sqrt(k2))


def truncated_rdm(gt: GTilde, p: ModelParams) -> TruncatedRDM:
    """4x4 truncated density matrix over (n_A, n_B) = (00, 01, 10, 11).

    With J = GTilde^{-1}: rho_00,00 = g; rho_11,00 = g K^2 J^{AB};
    rho_01,01 = g K^2 J^{BB'}; rho_10,10 = g K^2 J^{AA'};
    rho_10,01 = g K^2 J^{AB'};
    rho_11,11 = g K^4 [J^{AB} J^{A'B'} + J^{AA'} J^{BB'} + J^{AB'} J^{A'B}];
    g = (omega/hbar)/sqrt(G det GTilde).  The printed sparsity holds exactly
    and hermiticity follows from the structure of GTilde.
    """
    gm = gt.matrix
    det_gt = np.linalg.det(gm)
    if abs(det_gt) < 1e-14 * max(float(np.abs(gm).max()) ** 4, 1e-300):
        raise SingularGTilde(f"quadratic-form matrix not invertible: det={det_gt:.3e}")
    jm = np.linalg.inv(gm)
    j_aap = jm[0, 1]
    j_bbp = jm[2, 3]
    j_ab = jm[0, 2]
    j_apbp = jm[1, 3]
    j_abp = jm[0, 3]
    j_apb = jm[1, 2]
    # det GTilde is real by the conjugation-exchange symmetry of the matrix
    norm = gt.g_norm * det_gt.real
    if norm <= 0.0:
        raise SingularGTilde(f"nonpositive normalization G*det = {norm:.3e}")
    g = (p.omega / p.hbar) / math.sqrt(norm)
    k2 = gt.k_scale**2
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = g
    rho[0, 3] = g * k2 * j_apbp
    rho[3, 0] = g * k2 * j_ab
    rho[1, 1] = g * k2 * j_bbp
    rho[2, 2] = g * k2 * j_aap
    rho[1, 2] = g * k2 * j_apb
    rho[2, 1] = g * k2 * j_abp
    rho[3, 3] = g * k2 * k2 * (j_ab * j_apbp + j_aap * j_bbp + j_abp * j_apb)
    return TruncatedRDM(rho=rho, g=g)


def separability_inequalities(rdm: TruncatedRDM):
    """PPT inequalities of the truncated 2x2-level system.

    ineq1 = rho_10,10 rho_01,01 - rho_11,00 rho_00,11 and
    ineq2 = rho_00,00 rho_11,11 - rho_10,01 rho_01,10; the state is
    entangled when either is negative.
    """
    rho = rdm.rho
    ineq1 = (rho[2, 2] * rho[1, 1] - rho[3, 0] * rho[0, 3]).real
    ineq2 = (rho[0, 0] * rho[3, 3] - rho[2, 1] * rho[1, 2]).real
    return ineq1, ineq2, bool(ineq1 < 0.0 or ineq2 < 0.0)


def sigma_equivalence_residual(v: CovarianceMatrix, p: ModelParams) -> float:
    """Residual of the identity tying the truncated-state PPT combination to
    the full Gaussian separability product Sigma.

    The combination J^{AA'} J^{BB'} - J^{AB} J^{A'B'} equals, by the Jacobi
    complementary-minor relation applied to GTilde,

        [a_{A-} a_{B-} - a_{X+}^2 - b_{X+}^2] / det(GTilde)
        = Sigma / (hbar^4 * G * det(GTilde)),

    i.e. Sigma times a positive function of the state, so the truncated PPT
    criterion carries exactly the separability information of the full
    Gaussian state.  Returns |lhs - rhs| / max(|lhs|, |rhs|, 1e-30).
    """
    gt = gtilde_assemble(v, p)
    jm = np.linalg.inv(gt.matrix)
    lhs = jm[0, 1] * jm[2, 3] - jm[0, 2] * jm[1, 3]
    rhs = _sigma_polynomial(v.matrix, p.hbar) / (
        p.hbar**4 * gt.g_norm * np.linalg.det(gt.matrix).real)
    scale = max(abs(lhs), abs(rhs))
    if scale < 1e-30:
        return 0.0  # both sides vanish (degenerate trivial case)
    return float(abs(lhs - rhs) / scale)


def _det_expansion(m):
    """Determinant by minor expansion, dtype-preserving (works for the
    extended-precision floats LAPACK does not accept)."""
    n = m.shape[0]
    if n == 1:
        return m[0, 0]
    total = m.dtype.type(0)
    cols = list(range(n))
    for j in range(n):
        minor = m[1:][:, [c for c in cols if c != j]]
        term = m[0, j] * _det_expansion(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


def _sigma_polynomial(m, hbar: float):
    """Separability product Sigma = det V - q Z + q^2, q = hbar^2/4.

    Equivalent to (c+^2 - q)(c-^2 - q) via c+^2 c-^2 = det V and
    c+^2 + c-^2 = Z, but free of the symplectic square roots that cancel
    at c+ = c-.  Sigma can be ~1e-9 of the determinant scale, so the
    polynomial is evaluated in extended precision where available.
    """
    ml = np.asarray(m, dtype=np.longdouble)
    q = np.longdouble(hbar) * np.longdouble(hbar) / 4.0

    def det2(b):
        return b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]

    z = det2(ml[:2, :2]) + det2(ml[2:, 2:]) - 2.0 * det2(ml[:2, 2:])
    sigma = _det_expansion(ml) - q * z + q * q
    return float(sigma)
