"""Detector worldlines and the regulated field two-point kernels.

Conventions: metric signature (-+++), c = 1, hbar explicit.  Both detectors
ride uniformly accelerated hyperbolae in opposite spatial directions,

    A: (t, x) = (sinh(a tau)/a, +cosh(a tau)/a)
    B: (t, x) = (sinh(a tau)/a, -cosh(a tau)/a)

so they stay spacelike separated forever.  All kernels are written in the
average/difference variables T = (s + s')/2, Delta = s - s' of the two
proper times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, SingularPoint

_FOUR_PI_SQ = 4.0 * math.pi**2
# beyond this |Re arg| the squared sinh/cosh overflow; the kernels are below
# 1e-300 there and are flushed to zero
_EXP_GUARD = 350.0


class RegulatorKind(Enum):
    ORIGINAL_EPS = "original_eps"
    MODIFIED_EPS_PRIME = "modified_eps_prime"
    SHIFTED_BOUNDS = "shifted_bounds"


@dataclass(frozen=True)
class RegulatorScheme:
    """Choice of short-distance regulator for the response integrals.

    ORIGINAL_EPS keeps the frequency-integral regulator `eps` inside the
    kernel; MODIFIED_EPS_PRIME shifts the proper-time difference by i*eps
    (translation invariant); SHIFTED_BOUNDS moves the physical cutoffs
    `eps0`/`eps1` into the integration limits while the kernel regulator is
    taken to zero.
    """

    kind: RegulatorKind
    eps: float = 0.0
    eps0: float = 0.0
    eps1: float = 0.0

    def __post_init__(self):
        if min(self.eps, self.eps0, self.eps1) < 0:
            raise ValueError("regulators must be nonnegative")

    @staticmethod
    def original(eps: float) -> "RegulatorScheme":
        return RegulatorScheme(RegulatorKind.ORIGINAL_EPS, eps=eps)

    @staticmethod
    def modified(eps_prime: float) -> "RegulatorScheme":
        return RegulatorScheme(RegulatorKind.MODIFIED_EPS_PRIME, eps=eps_prime)

    @staticmethod
    def shifted(eps0: float, eps1: float, eps: float = 0.0) -> "RegulatorScheme":
        return RegulatorScheme(RegulatorKind.SHIFTED_BOUNDS, eps=eps,
                               eps0=eps0, eps1=eps1)


@dataclass(frozen=True)
class Worldline:
    detector: str  # "A" or "B"
    accel: float

    def __post_init__(self):
        if self.detector not in ("A", "B"):
            raise ValueError("detector must be 'A' or 'B'")
        if self.accel <= 0:
            raise ValueError("accel must be positive")


def trajectory(w: Worldline, tau: float):
    """Minkowski coordinates (t, x, y, z) of the detector at proper time tau."""
    a = w.accel
    sign = 1.0 if w.detector == "A" else -1.0
    return (math.sinh(a * tau) / a, sign * math.cosh(a * tau) / a, 0.0, 0.0)


def wightman_self(s, sp, a: float, hbar: float, reg: RegulatorScheme):
    """Field two-point kernel along a single accelerated worldline.

    ORIGINAL_EPS:
        (hbar/4pi^2) / [-(4/a^2) sinh(aD/2)(sinh(aD/2) - i eps a cosh(aT)) + eps^2]
    MODIFIED_EPS_PRIME:
        (hbar/4pi^2) / [-(4/a^2) sinh^2(a(D - i eps')/2)]

    with T = (s+s')/2 and D = s-s'.  Accepts scalars or numpy arrays.
    SHIFTED_BOUNDS callers receive the ORIGINAL_EPS kernel (their regulator
    lives in the integration limits, usually with eps = 0).
    """
    if a <= 0:
        raise DomainError("accel must be positive")
    s = np.asarray(s, dtype=float)
    sp = np.asarray(sp, dtype=float)
    T = 0.5 * (s + sp)
    delta = s - sp
    if reg.kind is RegulatorKind.MODIFIED_EPS_PRIME:
        y = 0.5 * a * (delta - 1j * reg.eps)
        out = np.zeros(np.broadcast(s, sp).shape, dtype=complex)
        ok = np.abs(y.real) < _EXP_GUARD
        sh = np.sinh(np.where(ok, y, 0.0))
        den = -(4.0 / a**2) * sh * sh
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = (hbar / _FOUR_PI_SQ) / den
        out[...] = np.where(ok, vals, 0.0)
        if reg.eps == 0.0 and np.any(delta == 0.0):
            raise SingularPoint("coincident points with eps' = 0")
        return out if out.ndim else complex(out)
    # ORIGINAL_EPS (also the SHIFTED_BOUNDS kernel)
    eps = reg.eps
    half = 0.5 * a * delta
    ok = np.abs(half) < _EXP_GUARD
    sh = np.sinh(np.where(ok, half, 0.0))
    # saturated cosh keeps eps*cosh(aT) finite without overflow warnings
    ch = np.exp(np.minimum(np.abs(a * T), 700.0))
    ch = 0.5 * (ch + 1.0 / ch)
    den = -(4.0 / a**2) * sh * (sh - 1j * eps * a * ch) + eps**2
    singular = (den == 0.0)
    if np.any(singular & ok):
        raise SingularPoint("kernel denominator vanished (eps = 0, Delta = 0)")
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = (hbar / _FOUR_PI_SQ) / den
    out = np.where(ok, vals, 0.0)
    return out if out.ndim else complex(out)


def wightman_cross(s, sp, a: float, hbar: float, eps: float = 0.0):
    """Field two-point kernel between the two opposite worldlines.

    (hbar/4pi^2) / [(4/a^2) cosh(aT)(cosh(aT) + i eps a sinh(aD/2)) + eps^2];
    regular for all (s, s') including eps = 0, where it reduces to
    hbar a^2 / (16 pi^2 cosh^2(aT)).
    """
    if a <= 0:
        raise DomainError("accel must be positive")
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    s = np.asarray(s, dtype=float)
    sp = np.asarray(sp, dtype=float)
    T = 0.5 * (s + sp)
    if eps == 0.0:
        # sech^2 via exponentials: stable for arbitrarily large |aT|
        e = np.exp(-2.0 * np.abs(a * T))
        out = (hbar * a * a / (4.0 * _FOUR_PI_SQ)) * 4.0 * e / (1.0 + e) ** 2
        return out if out.ndim else float(out)
    delta = s - sp
    ch = np.exp(np.minimum(np.abs(a * T), 700.0))
    ch = 0.5 * (ch + 1.0 / ch)
    half = np.clip(0.5 * a * delta, -700.0, 700.0)
    sh = np.sinh(half)
    den = (4.0 / a**2) * ch * (ch + 1j * eps * a * sh) + eps**2
    with np.errstate(over="ignore"):
        out = (hbar / _FOUR_PI_SQ) / den
    out = np.where(np.isfinite(out), out, 0.0)
    return out if out.ndim else complex(out)


def ridge_width(a: float, eps: float) -> float:
    """Half-extent tau_1 = asinh(1/(a eps))/a of the cross-kernel ridge.

    For a*eps << 1 this is approximately ln(2/(a eps))/a.  The kernel ridge
    along T ~ 0 spreads over |Delta| <~ 2*tau_1 before the regulator
    suppresses it.
    """
    if a <= 0:
        raise DomainError("accel must be positive")
    if eps <= 0:
        raise DomainError("ridge width is unbounded at eps = 0")
    return math.asinh(1.0 / (a * eps)) / a
