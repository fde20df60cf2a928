"""Self-contained validation suites behind `accelpair validate`.

Each suite prints one PASS/FAIL line per check and returns True only if all
checks pass.  They are sized to run in well under a minute; the complete
acceptance battery lives in the test suite.
"""

from __future__ import annotations

import math

import numpy as np

from .correlators import correlator_set, cross_qq_exact, cross_qq_quad
from .entanglement import covariance, creation_band, creation_window, report
from .params import ModelParams
from .rdm import sigma_equivalence_residual


def _check(name: str, ok: bool, detail: str = "") -> bool:
    print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
    return ok


def suite_oracle() -> bool:
    """Closed-form cross correlator against the 2D quadrature oracle."""
    ok = True
    for gamma in (0.01, 0.1):
        for accel in (1.0, 2.0):
            for tau0, tau in ((-10.0, 5.0), (-30.0, 8.0), (-5.0, 1.5)):
                p = ModelParams(gamma=gamma, omega=1.3, accel=accel, tau0=tau0)
                exact = cross_qq_exact(p, tau, tau)
                quad = cross_qq_quad(p, tau, tau, quad_tol=1e-9)
                err = abs(exact - quad) / max(abs(quad), 1e-12)
                ok &= _check(
                    f"oracle g={gamma} a={accel} tau0={tau0} tau={tau}",
                    err < 1e-6, f"rel {err:.2e}")
    return ok


def suite_identity() -> bool:
    """Separability-product identity between truncated and full state."""
    ok = True
    cases = [
        (ModelParams(gamma=0.01, omega=1.3, accel=2.0, tau0=-60.0), (10.0, 40.0, 90.0)),
        (ModelParams(gamma=0.1, omega=1.3, accel=1.0, tau0=-60.0), (-20.0, 5.0, 30.0)),
        (ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=-30.0), (5.0, 20.0)),
    ]
    for p, taus in cases:
        for tau in taus:
            v = covariance(correlator_set(p, tau), p.hbar)
            res = sigma_equivalence_residual(v, p)
            ok &= _check(f"identity g={p.gamma} tau={tau}", res < 1e-8,
                         f"residual {res:.2e}")
    return ok


def suite_window() -> bool:
    """Entanglement window location and the product-log window formulas."""
    ok = True
    p = ModelParams(gamma=0.01, omega=1.3, accel=2.0, tau0=-60.0)
    taus = np.arange(10.0, 95.0, 0.5)
    cms = []
    for tau in taus:
        rep = report(covariance(correlator_set(p, tau), p.hbar), p.hbar)
        cms.append(rep.c_minus)
    cms = np.array(cms)
    below = cms < 0.5 * p.hbar
    if below.any():
        t_on = taus[np.argmax(below)]
        t_off = taus[len(below) - 1 - np.argmax(below[::-1])]
    else:
        t_on = t_off = math.nan
    ok &= _check("window opens near tau=19", abs(t_on - 19.0) <= 2.0,
                 f"found {t_on}")
    ok &= _check("window closes near tau=80", abs(t_off - 80.0) <= 4.0,
                 f"found {t_off}")
    pw = ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=-1e12,
                     cutoff0=20.0, cutoff1=20.0)
    win = creation_window(pw)
    ok &= _check("weak-coupling window exists", win is not None)
    if win:
        ok &= _check("creation time ~1e3", abs(win[0] - 1.0e3) < 0.1e3,
                     f"tau_E {win[0]:.1f}")
        ok &= _check("loss time ~2.8e5", abs(win[1] - 2.8e5) < 0.28e5,
                     f"tau_dE {win[1]:.3e}")
    _, upper, _ = creation_band(pw)
    ok &= _check("band upper bound 10.238", abs(upper - 10.238) < 1e-3,
                 f"{upper:.4f}")
    return ok


SUITES = {"oracle": suite_oracle, "identity": suite_identity,
          "window": suite_window}


def run_suite(name: str) -> bool:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name]()
