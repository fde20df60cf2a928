"""Deterministic adaptive quadrature engines.

Two integrators back all response integrals:

* `quad_gk_vec`: globally adaptive Gauss-Kronrod (G7, K15) for vector-valued
  1D integrands.  Caller-supplied breakpoints seed the initial partition so
  known kinks and near-pole grading are resolved from the start.
* `quad2d`: h-adaptive tensor Gauss-Legendre rule on rectangular panels with
  a lower-order embedded estimate, used for the genuinely two-dimensional
  brute-force oracle.

Both refine the worst panels in rounds and sum contributions in a fixed
panel order, so results are bit-stable for identical inputs.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import QuadratureNonConvergence

# 15-point Kronrod nodes/weights with embedded 7-point Gauss rule, on [-1, 1]
_XK = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])
_GAUSS_IDX = np.arange(1, 15, 2)


def graded_breakpoints(scale: float, halfwidth: float, ratio: float = 3.0):
    """Symmetric geometric grading around zero, from `scale` out to `halfwidth`.

    Used to seed the partition where an integrand varies on a scale much
    smaller than the full interval (regulated kernel poles at distance
    `scale` from the real axis).
    """
    pts = [0.0]
    x = scale
    while x < halfwidth:
        pts.append(x)
        pts.append(-x)
        x *= ratio
    return pts


def quad_gk_vec(f, a: float, b: float, breakpoints=(), abs_tol: float = 1e-12,
                rel_tol: float = 1e-10, max_intervals: int = 4000,
                noise_fn=None):
    """Adaptive GK15 integration of a vector-valued integrand on [a, b].

    `f` maps an array of abscissae (n,) to an array (n, m); returns the
    length-m integral.  Each interval carries a roundoff floor proportional
    to its L1 mass, so cancelling near-pole lobes stop refining once they
    are machine-noise limited.  `noise_fn(x) -> (n,)`, when given, supplies
    the caller's per-point absolute evaluation noise (e.g. cancellation
    noise of a pole subtraction) entering the same floor.  Raises
    QuadratureNonConvergence (with the achieved error attached) if the
    budget is exhausted while significant error remains.
    """
    if b <= a:
        probe = np.asarray(f(np.array([a])), dtype=float)
        return np.zeros(probe.shape[1])
    pts = sorted({float(a), float(b), *(float(p) for p in breakpoints if a < p < b)})
    intervals = [(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]

    def eval_batch(ivs):
        lo = np.array([iv[0] for iv in ivs])
        hi = np.array([iv[1] for iv in ivs])
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        x = (mid[:, None] + half[:, None] * _XK[None, :]).ravel()
        vals = np.asarray(f(x), dtype=float)
        m = vals.shape[1]
        vals = vals.reshape(len(ivs), 15, m)
        ik = half[:, None] * np.einsum("k,pkm->pm", _WK, vals)
        ig = half[:, None] * np.einsum("k,pkm->pm", _WG, vals[:, _GAUSS_IDX, :])
        err = np.abs(ik - ig).max(axis=1)
        mass = half * np.einsum("k,pkm->pm", _WK, np.abs(vals)).max(axis=1)
        noise = 50.0 * np.finfo(float).eps * mass
        if noise_fn is not None:
            npts = np.asarray(noise_fn(x), dtype=float).reshape(len(ivs), 15)
            noise = noise + half * np.einsum("k,pk->p", _WK, npts)
        return ik, err, noise

    vals, errs, noise = eval_batch(intervals)
    for _ in range(400):
        total = vals.sum(axis=0)
        # the summed roundoff floor is the best accuracy double precision
        # admits for this integrand; never demand better
        tol = max(abs_tol, rel_tol * float(np.abs(total).max()),
                  0.5 * float(noise.sum()))
        live = np.maximum(errs - noise, 0.0)
        if live.sum() <= tol:
            break
        if len(intervals) >= max_intervals:
            raise QuadratureNonConvergence(
                f"1D quadrature budget exhausted ({len(intervals)} intervals)",
                achieved_error=float(errs.sum()))
        # split the smallest set of intervals carrying 90% of the live error
        order = np.argsort(live)[::-1]
        cum = np.cumsum(live[order])
        cut = int(np.searchsorted(cum, 0.9 * cum[-1])) + 1
        split = [int(i) for i in order[:min(cut, 64)]]
        keep = [i for i in range(len(intervals)) if i not in set(split)]
        new_ivs = []
        for i in split:
            lo, hi = intervals[i]
            mid = 0.5 * (lo + hi)
            new_ivs += [(lo, mid), (mid, hi)]
        nvals, nerrs, nnoise = eval_batch(new_ivs)
        intervals = [intervals[i] for i in keep] + new_ivs
        vals = np.concatenate([vals[keep], nvals], axis=0)
        errs = np.concatenate([errs[keep], nerrs], axis=0)
        noise = np.concatenate([noise[keep], nnoise], axis=0)
    # deterministic reduction order independent of refinement history
    order = np.lexsort((np.array([iv[1] for iv in intervals]),
                        np.array([iv[0] for iv in intervals])))
    return vals[order].sum(axis=0)


def quad2d(f, xlim, ylim, abs_tol: float = 1e-12, rel_tol: float = 1e-9,
           max_panels: int = 60_000, init_size: float | None = None):
    """Adaptive tensor-product quadrature of f(x, y) over a rectangle.

    `f` must accept equal-shape arrays and return an array.  Panels carry a
    Gauss-Legendre 10x10 value with an embedded 6x6 error estimate; panels
    whose error exceeds their area share of the tolerance are split in four
    until the summed error estimate meets max(abs_tol, rel_tol*|I|).
    """
    (x0, x1), (y0, y1) = xlim, ylim
    if x1 <= x0 or y1 <= y0:
        return 0.0
    g10, w10 = np.polynomial.legendre.leggauss(10)
    g6, w6 = np.polynomial.legendre.leggauss(6)

    def panel_values(panels):
        arr = np.asarray(panels, dtype=float)
        cx = 0.5 * (arr[:, 0] + arr[:, 1])
        hx = 0.5 * (arr[:, 1] - arr[:, 0])
        cy = 0.5 * (arr[:, 2] + arr[:, 3])
        hy = 0.5 * (arr[:, 3] - arr[:, 2])
        X10 = cx[:, None, None] + hx[:, None, None] * g10[None, :, None]
        Y10 = cy[:, None, None] + hy[:, None, None] * g10[None, None, :]
        F10 = np.asarray(f(np.broadcast_to(X10, X10.shape[:1] + (10, 10)).copy(),
                           np.broadcast_to(Y10, Y10.shape[:1] + (10, 10)).copy()))
        I10 = hx * hy * np.einsum("i,j,pij->p", w10, w10, F10)
        X6 = cx[:, None, None] + hx[:, None, None] * g6[None, :, None]
        Y6 = cy[:, None, None] + hy[:, None, None] * g6[None, None, :]
        F6 = np.asarray(f(np.broadcast_to(X6, X6.shape[:1] + (6, 6)).copy(),
                          np.broadcast_to(Y6, Y6.shape[:1] + (6, 6)).copy()))
        I6 = hx * hy * np.einsum("i,j,pij->p", w6, w6, F6)
        return I10, np.abs(I10 - I6)

    span_x, span_y = x1 - x0, y1 - y0
    size = init_size if init_size else max(span_x, span_y)
    nx = max(1, int(math.ceil(span_x / size)))
    ny = max(1, int(math.ceil(span_y / size)))
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    panels = [(xs[i], xs[i + 1], ys[j], ys[j + 1]) for i in range(nx) for j in range(ny)]
    vals, errs = panel_values(panels)
    area_total = span_x * span_y

    for _ in range(200):
        total = float(vals.sum())
        tol = max(abs_tol, rel_tol * abs(total))
        if errs.sum() <= tol:
            break
        if len(panels) >= max_panels:
            raise QuadratureNonConvergence(
                f"2D quadrature budget exhausted ({len(panels)} panels)",
                achieved_error=float(errs.sum()))
        areas = np.array([(p[1] - p[0]) * (p[3] - p[2]) for p in panels])
        over = errs > 0.25 * tol * areas / area_total
        if not over.any():
            over[np.argmax(errs)] = True
        new_panels = []
        for i in np.nonzero(over)[0]:
            xa, xb, ya, yb = panels[i]
            xm, ym = 0.5 * (xa + xb), 0.5 * (ya + yb)
            new_panels += [(xa, xm, ya, ym), (xa, xm, ym, yb),
                           (xm, xb, ya, ym), (xm, xb, ym, yb)]
        keep = np.nonzero(~over)[0]
        nvals, nerrs = panel_values(new_panels)
        panels = [panels[i] for i in keep] + new_panels
        vals = np.concatenate([vals[keep], nvals])
        errs = np.concatenate([errs[keep], nerrs])

    order = np.lexsort(tuple(np.array([p[k] for p in panels]) for k in (3, 2, 1, 0)))
    return float(vals[order].sum())
