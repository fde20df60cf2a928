"""Scenario files, figure presets and the sweep runner.

A scenario is a flat key-value text file (one `key = value` per line, `#`
comments) naming the physical parameters, a sweep specification and the
requested output columns.  The runner emits one CSV row per sweep point at
full precision plus a sidecar metadata file that is itself a valid scenario
file, so every run can be reproduced from its own output.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Sequence

from . import __version__
from .correlators import a_part, correlator_set, cross_set_exact, self_v_quad
from .entanglement import (covariance, creation_band, creation_window, report,
                           window_parameter)
from .errors import UnknownPreset
from .field import RegulatorScheme, wightman_cross
from .params import EULER_GAMMA, CorrelatorSet, ModelParams
from .rdm import gtilde_assemble, separability_inequalities, truncated_rdm
from .tdpt import tdpt_element

_OUTPUT_COLUMNS = {
    "correlators": ("qq_AB", "qp_AB", "pq_AB", "pp_AB",
                    "qq_AA", "qp_AA", "pp_AA", "qq_BB", "qp_BB", "pp_BB"),
    "c_minus": ("c_minus", "c_plus"),
    "sigma": ("sigma",),
    "log_neg": ("log_neg",),
    "rdm_elements": ("rho_1100_abs", "rho_1010_abs", "rho_0101_abs",
                     "ineq1", "ineq2"),
    "tdpt_elements": (),  # expanded per requested schemes
}
_TDPT_SCHEMES = ("original", "modified", "shifted")


@dataclass(frozen=True)
class TimeSeries:
    tau_start: float
    tau_end: float
    n_points: int


@dataclass(frozen=True)
class AlphaBetaGrid:
    alpha_min: float
    alpha_max: float
    beta_min: float
    beta_max: float
    n_grid: int
    tau_start: float
    tau_end: float
    n_tau: int


@dataclass(frozen=True)
class WindowSearch:
    pass


@dataclass(frozen=True)
class FieldGrid:
    s_min: float
    s_max: float
    n_points: int
    eps: float


@dataclass(frozen=True)
class Scenario:
    params: ModelParams
    sweep: object
    outputs: tuple
    quad_tol: float = 1e-9
    tdpt_which: str = "r1010"
    tdpt_schemes: tuple = ()
    tdpt_eps: float | None = None   # kernel regulator for original/shifted
    name: str = "scenario"

    def __post_init__(self):
        if not self.outputs and not isinstance(self.sweep, (WindowSearch, FieldGrid)):
            raise ValueError("output list must be nonempty")
        if isinstance(self.sweep, TimeSeries):
            if self.sweep.n_points < 2:
                raise ValueError("n_points must be >= 2")
            if self.sweep.tau_start < self.params.tau0:
                raise ValueError("tau_start must not precede tau0")


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def scenario_to_text(s: Scenario) -> str:
    """Serialize a scenario to the flat key-value file format."""
    p = s.params
    lines = [f"# accelpair scenario", f"version = {__version__}",
             f"name = {s.name}"]
    for key in ("gamma", "omega", "accel", "hbar", "tau0", "alpha", "beta",
                "cutoff0", "cutoff1", "eps_phys"):
        lines.append(f"{key} = {_fmt(getattr(p, key))}")
    lines.append(f"quad_tol = {_fmt(s.quad_tol)}")
    if s.outputs:
        lines.append("outputs = " + ", ".join(s.outputs))
    sw = s.sweep
    if isinstance(sw, TimeSeries):
        lines += ["sweep = time_series",
                  f"tau_start = {_fmt(sw.tau_start)}",
                  f"tau_end = {_fmt(sw.tau_end)}",
                  f"n_points = {sw.n_points}"]
    elif isinstance(sw, AlphaBetaGrid):
        lines += ["sweep = alpha_beta_grid",
                  f"alpha_min = {_fmt(sw.alpha_min)}", f"alpha_max = {_fmt(sw.alpha_max)}",
                  f"beta_min = {_fmt(sw.beta_min)}", f"beta_max = {_fmt(sw.beta_max)}",
                  f"n_grid = {sw.n_grid}", f"tau_start = {_fmt(sw.tau_start)}",
                  f"tau_end = {_fmt(sw.tau_end)}", f"n_tau = {sw.n_tau}"]
    elif isinstance(sw, WindowSearch):
        lines.append("sweep = window_search")
    elif isinstance(sw, FieldGrid):
        lines += ["sweep = field_grid", f"s_min = {_fmt(sw.s_min)}",
                  f"s_max = {_fmt(sw.s_max)}", f"n_points = {sw.n_points}",
                  f"field_eps = {_fmt(sw.eps)}"]
    if "tdpt_elements" in s.outputs:
        lines.append(f"tdpt_which = {s.tdpt_which}")
        lines.append("tdpt_schemes = " + ", ".join(s.tdpt_schemes))
        if s.tdpt_eps is not None:
            lines.append(f"tdpt_eps = {_fmt(s.tdpt_eps)}")
    return "\n".join(lines) + "\n"


def parse_scenario_text(text: str, name: str = "scenario") -> Scenario:
    kv = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        kv[key] = val

    def fget(key, default=None):
        if key in kv:
            return float(kv.pop(key))
        if default is None:
            raise ValueError(f"missing required key {key!r}")
        return default

    kv.pop("version", None)
    name = kv.pop("name", name)
    alpha = kv.pop("alpha", "ground")
    beta = kv.pop("beta", "ground")
    p = ModelParams(
        gamma=fget("gamma"), omega=fget("omega"), accel=fget("accel"),
        tau0=fget("tau0"), hbar=fget("hbar", 1.0),
        alpha=None if alpha == "ground" else float(alpha),
        beta=None if beta == "ground" else float(beta),
        cutoff0=fget("cutoff0", 20.0), cutoff1=fget("cutoff1", 20.0),
        eps_phys=float(kv.pop("eps_phys")) if "eps_phys" in kv else None)
    sweep_kind = kv.pop("sweep", "time_series")
    if sweep_kind == "time_series":
        sweep = TimeSeries(fget("tau_start"), fget("tau_end"),
                           int(fget("n_points")))
    elif sweep_kind == "alpha_beta_grid":
        sweep = AlphaBetaGrid(
            fget("alpha_min"), fget("alpha_max"), fget("beta_min"),
            fget("beta_max"), int(fget("n_grid")), fget("tau_start"),
            fget("tau_end"), int(fget("n_tau")))
    elif sweep_kind == "window_search":
        sweep = WindowSearch()
    elif sweep_kind == "field_grid":
        sweep = FieldGrid(fget("s_min"), fget("s_max"), int(fget("n_points")),
                          fget("field_eps"))
    else:
        raise ValueError(f"unknown sweep kind {sweep_kind!r}")
    outputs = tuple(
        o.strip() for o in kv.pop("outputs", "").split(",") if o.strip())
    for o in outputs:
        if o not in _OUTPUT_COLUMNS:
            raise ValueError(f"unknown output {o!r}")
    tdpt_which = kv.pop("tdpt_which", "r1010")
    tdpt_schemes = tuple(
        t.strip() for t in kv.pop("tdpt_schemes", "").split(",") if t.strip())
    tdpt_eps = float(kv.pop("tdpt_eps")) if "tdpt_eps" in kv else None
    quad_tol = fget("quad_tol", 1e-9)
    if kv:
        raise ValueError(f"unrecognized keys: {sorted(kv)}")
    return Scenario(params=p, sweep=sweep, outputs=outputs, quad_tol=quad_tol,
                    tdpt_which=tdpt_which, tdpt_schemes=tdpt_schemes,
                    tdpt_eps=tdpt_eps, name=name)


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario_text(fh.read(), name=os.path.basename(path))


# ---------------------------------------------------------------------------
# figure presets

def _cutoff_eps(cutoff: float, omega: float) -> float:
    return math.exp(-cutoff - EULER_GAMMA) / omega


def figure_preset(name: str) -> Scenario:
    """Fully specified scenario for one of the reference figures."""
    ground = dict(hbar=1.0, cutoff0=20.0, cutoff1=20.0)
    if name == "fig1_left":
        p = ModelParams(gamma=0.01, omega=1.3, accel=2.0, tau0=-60.0, **ground)
        return Scenario(p, TimeSeries(-60.0, 100.0, 1601), ("correlators",),
                        name=name)
    if name == "fig1_right":
        p = ModelParams(gamma=0.01, omega=1.3, accel=2.0, tau0=0.0, **ground)
        return Scenario(p, TimeSeries(0.0, 100.0, 1001), ("correlators",),
                        name=name)
    if name == "fig2_left":
        p = ModelParams(gamma=0.01, omega=1.3, accel=2.0, tau0=-60.0, **ground)
        return Scenario(p, TimeSeries(-60.0, 140.0, 801),
                        ("c_minus", "sigma", "log_neg"), name=name)
    if name == "fig2_right":
        p = ModelParams(gamma=0.01, omega=1.3, accel=2.0, tau0=-10.0, **ground)
        return Scenario(p, TimeSeries(-10.0, 140.0, 601),
                        ("c_minus", "sigma", "log_neg"), name=name)
    if name in ("fig3_left", "fig3_right"):
        tau0 = -2.0e5 if name == "fig3_left" else -2.5e4
        p = ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=tau0, **ground)
        return Scenario(p, TimeSeries(0.0, 3.2e5, 641),
                        ("c_minus", "sigma", "log_neg"), name=name)
    if name == "fig4":
        p = ModelParams(gamma=0.1, omega=1.3, accel=1.0, tau0=-60.0, **ground)
        return Scenario(p, TimeSeries(-60.0, 140.0, 801),
                        ("c_minus", "sigma", "log_neg"), name=name)
    if name == "fig5":
        p = ModelParams(gamma=0.01, omega=1.3, accel=2.0, tau0=-60.0, **ground)
        return Scenario(p, TimeSeries(-60.0, 140.0, 801),
                        ("rdm_elements", "c_minus"), name=name)
    if name == "fig6":
        p = ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=0.0, **ground)
        return Scenario(p, TimeSeries(0.25, 15.0, 60), ("tdpt_elements",),
                        tdpt_which="r1010", tdpt_schemes=_TDPT_SCHEMES,
                        tdpt_eps=math.exp(-30.0) / 2.3, name=name,
                        quad_tol=1e-8)
    if name == "fig7":
        p = ModelParams(gamma=0.01, omega=1.3, accel=1.0, tau0=-10.0, **ground)
        return Scenario(p, FieldGrid(-15.0, 15.0, 121, math.exp(-8.0)),
                        (), name=name)
    if name == "alpha_beta_grid":
        p = ModelParams(gamma=0.01, omega=1.3, accel=2.0, tau0=-60.0, **ground)
        w = math.sqrt(p.omega_r)
        return Scenario(p, AlphaBetaGrid(0.6 * w, 1.6 * w, 0.6 * w, 1.6 * w,
                                         5, 0.0, 100.0, 151),
                        ("sigma",), name=name)
    raise UnknownPreset(name)


PRESET_NAMES = ("fig1_left", "fig1_right", "fig2_left", "fig2_right",
                "fig3_left", "fig3_right", "fig4", "fig5", "fig6", "fig7",
                "alpha_beta_grid")


# ---------------------------------------------------------------------------
# runner

def _tdpt_scheme(kind: str, p: ModelParams, kernel_eps: float | None):
    # regulator scale e^{-14-euler}/omega throughout; `kernel_eps` is the
    # near-zero kernel regulator of the shifted-bounds variant only
    eps_phys_like = _cutoff_eps(14.0, p.omega)
    if kind == "original":
        return RegulatorScheme.original(eps_phys_like)
    if kind == "modified":
        return RegulatorScheme.modified(eps_phys_like)
    if kind == "shifted":
        return RegulatorScheme.shifted(eps_phys_like, eps_phys_like,
                                       kernel_eps or 0.0)
    raise ValueError(f"unknown tdpt scheme {kind!r}")


def _columns(s: Scenario):
    cols = []
    for out in s.outputs:
        if out == "tdpt_elements":
            for sch in (s.tdpt_schemes or _TDPT_SCHEMES):
                cols += [f"{s.tdpt_which}_{sch}_re", f"{s.tdpt_which}_{sch}_im"]
        else:
            cols += list(_OUTPUT_COLUMNS[out])
    return cols


def _needs(s: Scenario, *keys):
    return any(k in s.outputs for k in keys)


def _time_point(s: Scenario, tau: float):
    p = s.params
    row = {}
    if _needs(s, "correlators", "c_minus", "sigma", "log_neg", "rdm_elements"):
        corr = correlator_set(p, tau, s.quad_tol)
        for col in _OUTPUT_COLUMNS["correlators"]:
            row[col] = getattr(corr, col)
        if _needs(s, "c_minus", "sigma", "log_neg", "rdm_elements"):
            v = covariance(corr, p.hbar)
            rep = report(v, p.hbar)
            row.update(c_minus=rep.c_minus, c_plus=rep.c_plus,
                       sigma=rep.sigma, log_neg=rep.log_neg)
            if _needs(s, "rdm_elements"):
                rdm = truncated_rdm(gtilde_assemble(v, p), p)
                i1, i2, _ = separability_inequalities(rdm)
                row.update(rho_1100_abs=abs(rdm.rho[3, 0]),
                           rho_1010_abs=abs(rdm.rho[2, 2]),
                           rho_0101_abs=abs(rdm.rho[1, 1]),
                           ineq1=i1, ineq2=i2)
    if _needs(s, "tdpt_elements"):
        for sch in (s.tdpt_schemes or _TDPT_SCHEMES):
            scheme = _tdpt_scheme(sch, s.params, s.tdpt_eps)
            el = tdpt_element(s.params, s.tdpt_which, tau, scheme,
                              max(s.quad_tol, 1e-8))
            row[f"{s.tdpt_which}_{sch}_re"] = el.value.real
            row[f"{s.tdpt_which}_{sch}_im"] = el.value.imag
    return row


def _grid_rows(s: Scenario):
    """AlphaBetaGrid rows; the cross and vacuum-response parts do not depend
    on (alpha, beta), so they are computed once per tau."""
    sw = s.sweep
    p = s.params
    taus = [sw.tau_start + (sw.tau_end - sw.tau_start) * i / (sw.n_tau - 1)
            for i in range(sw.n_tau)]
    shared = []
    for tau in taus:
        v3 = self_v_quad(p, tau, s.quad_tol)
        cross = cross_set_exact(p, tau) if tau != p.tau0 else (0.0,) * 4
        shared.append((tau, v3, cross))
    alphas = [sw.alpha_min + (sw.alpha_max - sw.alpha_min) * i / (sw.n_grid - 1)
              for i in range(sw.n_grid)]
    betas = [sw.beta_min + (sw.beta_max - sw.beta_min) * i / (sw.n_grid - 1)
             for i in range(sw.n_grid)]
    rows = []
    for alpha in alphas:
        for beta in betas:
            pab = p.replace(alpha=alpha, beta=beta)
            sigma_min, cmin_min, tau_at = math.inf, math.inf, taus[0]
            for tau, (qqv, qpv, ppv), cr in shared:
                eta = tau - p.tau0
                qa = a_part(pab, eta, "A")
                qb = a_part(pab, eta, "B")
                corr = CorrelatorSet(
                    tau=tau,
                    qq_AA=qqv + qa[0], pp_AA=ppv + qa[1], qp_AA=qpv + qa[2],
                    qq_BB=qqv + qb[0], pp_BB=ppv + qb[1], qp_BB=qpv + qb[2],
                    qq_AB=cr[0], qp_AB=cr[1], pq_AB=cr[2], pp_AB=cr[3])
                rep = report(covariance(corr, p.hbar), p.hbar)
                if rep.sigma < sigma_min:
                    sigma_min, tau_at = rep.sigma, tau
                cmin_min = min(cmin_min, rep.c_minus)
            rows.append({"alpha": alpha, "beta": beta, "sigma_min": sigma_min,
                         "c_minus_min": cmin_min, "tau_at_min": tau_at,
                         "entangled_any": cmin_min < 0.5 * p.hbar})
    return (("alpha", "beta", "sigma_min", "c_minus_min", "tau_at_min",
             "entangled_any"), rows)


def run_scenario(s: Scenario):
    """Execute the sweep; returns (column_names, rows) with dict rows."""
    p = s.params
    sw = s.sweep
    if isinstance(sw, TimeSeries):
        cols = ["tau"] + _columns(s)
        taus = [sw.tau_start + (sw.tau_end - sw.tau_start) * i / (sw.n_points - 1)
                for i in range(sw.n_points)]
        n_workers = int(os.environ.get("ACCELPAIR_THREADS", "1"))
        if n_workers > 1:
            from concurrent.futures import ProcessPoolExecutor
            with ProcessPoolExecutor(max_workers=n_workers) as ex:
                payload = list(ex.map(_time_point, [s] * len(taus), taus,
                                      chunksize=8))
        else:
            payload = [_time_point(s, tau) for tau in taus]
        rows = []
        for tau, data in zip(taus, payload):
            row = {"tau": tau}
            row.update(data)
            rows.append(row)
        return cols, rows
    if isinstance(sw, AlphaBetaGrid):
        return _grid_rows(s)
    if isinstance(sw, WindowSearch):
        zeta = window_parameter(p)
        win = creation_window(p)
        lo, hi, ok = creation_band(p)
        row = {"zeta": zeta,
               "tau_e": win[0] if win else math.nan,
               "tau_de": win[1] if win else math.nan,
               "band_lower": lo, "band_upper": hi, "band_regime_ok": ok,
               "window_exists": win is not None}
        return (list(row.keys()), [row])
    if isinstance(sw, FieldGrid):
        cols = ["s", "s_prime", "abs_cross_kernel"]
        rows = []
        grid = [sw.s_min + (sw.s_max - sw.s_min) * i / (sw.n_points - 1)
                for i in range(sw.n_points)]
        for sv in grid:
            for spv in grid:
                d = wightman_cross(sv, spv, p.accel, p.hbar, sw.eps)
                rows.append({"s": sv, "s_prime": spv,
                             "abs_cross_kernel": abs(d)})
        return cols, rows
    raise TypeError(f"unsupported sweep {type(sw).__name__}")


def write_csv(path: str, cols: Sequence[str], rows) -> None:
    """Full-precision CSV so downstream thresholding is reproducible."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            cells = []
            for c in cols:
                val = row[c]
                if isinstance(val, bool):
                    cells.append("true" if val else "false")
                elif isinstance(val, float):
                    cells.append(f"{val:.17g}")
                else:
                    cells.append(str(val))
            fh.write(",".join(cells) + "\n")


def write_metadata(path: str, s: Scenario) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(scenario_to_text(s))


def run_to_files(s: Scenario, out_csv: str, fig_path: str | None = None) -> None:
    cols, rows = run_scenario(s)
    write_csv(out_csv, cols, rows)
    write_metadata(out_csv + ".meta", s)
    if fig_path:
        from .figures import render_figure
        render_figure(s, cols, rows, fig_path)
