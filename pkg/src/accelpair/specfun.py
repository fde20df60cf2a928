"""Special functions for the closed-form correlators and entanglement windows.

The central object is the kernel

    F_K(x) = -2F1(1, 1+K; 2+K; x) * x / (1 + K)

evaluated on the ray x = -e^w with complex index K.  Two complementary
series are used:

* w <= 0.5: the Pfaff transformation maps the argument to
  u = x/(x-1) = 1/(1+e^(-w)) in (0, 1) and gives
  F_K = u/(1+K) * sum_n n!/(2+K)_n u^n, which converges geometrically.
* w > 0.5: the inverse-argument connection formula gives, with z = e^(-w),
  F_K = sum_n (-1)^n z^n/(K-n) - pi z^K / sin(pi K),
  where z^K = exp(-w K) is formed directly in the exponent so arbitrarily
  large w never overflows.

Also provided: the frequency derivative of F_K by term-wise differentiation,
complex digamma/trigamma by recurrence shift plus the Bernoulli asymptotic
series, and the two real branches of the Lambert W function by Halley
iteration.
"""

from __future__ import annotations

import cmath
import math

from .errors import DomainError, InvalidIndex, NonConvergence, PoleArgument

_TERM_CUTOFF = 1e-17
_MAX_TERMS = 100_000
# switch between the two F_K series where their convergence rates cross
# (u(w*) = e^(-w*) at w* = ln((1+sqrt(5))/2) ~ 0.481)
_PATH_SWITCH = 0.5


def _check_index(k: complex) -> complex:
    k = complex(k)
    if k.imag == 0.0 and k.real <= 0.0 and k.real == int(k.real):
        raise InvalidIndex(f"index {k} is a nonpositive integer")
    return k


def _log_sin_pi(k: complex) -> complex:
    """log(sin(pi k)) without overflow for large |Im k|."""
    if k.imag < 0:
        q = cmath.exp(-2j * cmath.pi * k)
        return 1j * cmath.pi * k - cmath.log(2j) + cmath.log(1.0 - q)
    q = cmath.exp(2j * cmath.pi * k)
    return -1j * cmath.pi * k - cmath.log(-2j) + cmath.log(1.0 - q)


def _cot_pi(k: complex) -> complex:
    """cot(pi k) without overflow for large |Im k|."""
    if k.imag < 0:
        q = cmath.exp(-2j * cmath.pi * k)
        return 1j * (1.0 + q) / (1.0 - q)
    q = cmath.exp(2j * cmath.pi * k)
    return -1j * (1.0 + q) / (1.0 - q)


def _f_k_series(k: complex, w: float) -> complex:
    # Pfaff-transformed direct series, argument u = 1/(1+e^(-w)) in (0, 1)
    u = 1.0 / (1.0 + math.exp(-w)) if w > -700.0 else math.exp(w)
    if u == 0.0:
        return 0.0 + 0.0j
    s = 0.0 + 0.0j
    term = 1.0 + 0.0j
    for n in range(_MAX_TERMS):
        s += term
        if abs(term) < _TERM_CUTOFF * abs(s) and n > 3:
            return u / (1.0 + k) * s
        term *= (n + 1.0) * u / (2.0 + k + n)
    raise NonConvergence(f"F_K direct series stalled at w={w}")


def _f_k_asymptotic(k: complex, w: float) -> complex:
    # inverse-argument expansion, z = e^(-w) < 1 for w > 0
    z = math.exp(-w) if w < 700.0 else 0.0
    s = 0.0 + 0.0j
    term = 1.0
    for n in range(_MAX_TERMS):
        s += term / (k - n)
        if abs(term) < _TERM_CUTOFF * abs(s) * max(1.0, abs(k - n)) and n > 3:
            break
        term *= -z
    else:
        raise NonConvergence(f"F_K inverse-argument series stalled at w={w}")
    log_pole = -w * k + cmath.log(cmath.pi) - _log_sin_pi(k)
    if log_pole.real < -745.0:
        return s
    return s - cmath.exp(log_pole)


def f_k(k: complex, w: float) -> complex:
    """Evaluate F_K(-e^w) to ~1e-10 relative accuracy.

    `w` may be any finite real; magnitudes below the double-precision range
    flush to zero (the value itself scales as e^w for very negative w).
    """
    k = _check_index(k)
    if not math.isfinite(w):
        raise DomainError("log-argument w must be finite")
    if w <= _PATH_SWITCH:
        return _f_k_series(k, w)
    return _f_k_asymptotic(k, w)


def _f_k_series_dk(k: complex, w: float) -> complex:
    # d/dK of the Pfaff series: each coefficient c_n = n!/(2+K)_n obeys
    # dc_n/dK = -c_n * sum_{m<n} 1/(2+K+m)
    u = 1.0 / (1.0 + math.exp(-w)) if w > -700.0 else math.exp(w)
    if u == 0.0:
        return 0.0 + 0.0j
    s = 0.0 + 0.0j
    sd = 0.0 + 0.0j
    term = 1.0 + 0.0j
    harmonic = 0.0 + 0.0j
    for n in range(_MAX_TERMS):
        s += term
        sd += term * harmonic
        if abs(term) * max(1.0, abs(harmonic)) < _TERM_CUTOFF * max(abs(s), abs(sd), 1e-300) and n > 3:
            f = u / (1.0 + k) * s
            return -f / (1.0 + k) - u / (1.0 + k) * sd
        harmonic += 1.0 / (2.0 + k + n)
        term *= (n + 1.0) * u / (2.0 + k + n)
    raise NonConvergence(f"F_K series derivative stalled at w={w}")


def _f_k_asymptotic_dk(k: complex, w: float) -> complex:
    z = math.exp(-w) if w < 700.0 else 0.0
    s = 0.0 + 0.0j
    term = 1.0
    for n in range(_MAX_TERMS):
        s -= term / (k - n) ** 2
        if abs(term) < _TERM_CUTOFF * abs(s) * max(1.0, abs(k - n) ** 2) and n > 3:
            break
        term *= -z
    else:
        raise NonConvergence(f"F_K inverse-argument derivative stalled at w={w}")
    log_pole = -w * k + cmath.log(cmath.pi) - _log_sin_pi(k)
    if log_pole.real < -745.0:
        return s
    return s - cmath.exp(log_pole) * (-w - cmath.pi * _cot_pi(k))


def f_k_domega(k: complex, w: float, accel: float) -> complex:
    """Frequency derivative of F_K(-e^w) at fixed argument.

    With k = (gamma - i*omega)/accel one has dk/domega = -i/accel, so the
    derivative is (-i/accel) * dF/dK, computed term-wise on whichever series
    `f_k` would use.
    """
    k = _check_index(k)
    if not math.isfinite(w):
        raise DomainError("log-argument w must be finite")
    if accel <= 0:
        raise DomainError("accel must be positive")
    if w <= _PATH_SWITCH:
        dk = _f_k_series_dk(k, w)
    else:
        dk = _f_k_asymptotic_dk(k, w)
    return -1j / accel * dk


# Bernoulli numbers B_2..B_16 for the polygamma asymptotic tails
_BERNOULLI = (
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0,
)
_ASYMP_RADIUS = 12.0


def _check_pole(z: complex) -> complex:
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise PoleArgument(f"polygamma pole at {z}")
    return z


def digamma_c(z: complex) -> complex:
    """Complex digamma psi(z) via recurrence shift plus asymptotic series."""
    z = _check_pole(z)
    if z.real < 0.5:
        # reflection keeps the recurrence shift short for Re z << 0
        return digamma_c(1.0 - z) - cmath.pi * _cot_pi(z)
    shift = 0.0 + 0.0j
    while abs(z) < _ASYMP_RADIUS:
        shift -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    tail = 0.0 + 0.0j
    p = inv2
    for n, b in enumerate(_BERNOULLI, start=1):
        tail += b / (2 * n) * p
        p *= inv2
    return shift + cmath.log(z) - 0.5 / z - tail


def trigamma_c(z: complex) -> complex:
    """Complex trigamma psi'(z) via recurrence shift plus asymptotic series."""
    z = _check_pole(z)
    if z.real < 0.5:
        s = cmath.sin(cmath.pi * z) if abs(z.imag) < 300 else None
        if s is not None and s != 0:
            return -trigamma_c(1.0 - z) + (cmath.pi / s) ** 2
        # large |Im z|: reflection term underflows, recurrence alone suffices
    shift = 0.0 + 0.0j
    while abs(z) < _ASYMP_RADIUS:
        shift += 1.0 / (z * z)
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    tail = 0.0 + 0.0j
    p = inv * inv2
    for b in _BERNOULLI:
        tail += b * p
        p *= inv2
    return shift + inv + 0.5 * inv2 + tail


_INV_E = math.exp(-1.0)


def lambert_w(branch: int, x: float) -> float:
    """Real Lambert W on branch 0 or -1, solving W e^W = x by Halley steps.

    Branch 0 requires x >= -1/e and returns W >= -1; branch -1 requires
    -1/e <= x < 0 and returns W <= -1.
    """
    if branch not in (0, -1):
        raise DomainError("branch must be 0 or -1")
    if x < -_INV_E - 1e-300:
        raise DomainError(f"x={x} below the branch point -1/e")
    if branch == 0:
        if x == 0.0:
            return 0.0
        if x <= -_INV_E:
            return -1.0
        if abs(x) < 0.3:
            w = x * (1.0 - x)
        elif x > math.e:
            lx = math.log(x)
            w = lx - math.log(lx)
        else:
            w = 0.5
        if x < -0.25:  # near the branch point the series start converges faster
            w = -1.0 + math.sqrt(2.0 * (math.e * x + 1.0))
    else:
        if x >= 0.0:
            raise DomainError("branch -1 requires x < 0")
        if x <= -_INV_E:
            return -1.0
        if x > -0.25:
            l1 = math.log(-x)
            w = l1 - math.log(-l1)
        else:
            w = -1.0 - math.sqrt(2.0 * (math.e * x + 1.0))
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= 1e-14 * max(abs(x), 1e-300):
            return w
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        if denom == 0.0:
            break
        w -= f / denom
    ew = math.exp(w)
    if abs(w * ew - x) <= 1e-13 * max(abs(x), 1e-300):
        return w
    raise NonConvergence(f"Lambert W Halley iteration stalled at x={x}")
