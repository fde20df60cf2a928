"""Model parameters and correlator containers shared across all modules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

EULER_GAMMA = 0.5772156649015328606


@dataclass(frozen=True)
class ModelParams:
    """All physical parameters of one two-detector scenario.

    Units: natural units with c = 1; hbar carried explicitly.  `gamma` is the
    damping rate lambda0^2/(8 pi), `omega` the natural (observed) oscillation
    frequency, `accel` the common proper acceleration, `tau0` the proper time
    at which the detector-field coupling switches on (same for both
    detectors).  `alpha` and `beta` set the initial Gaussian widths of
    detectors A and B; None selects the free ground state sqrt(omega_r).
    `cutoff0` / `cutoff1` are the dimensionless switch-on and time-resolution
    cutoff constants; `eps_phys` is the physical short-time regulator used by
    the self-correlator quadratures.  When None it is derived from `cutoff1`
    via eps_phys = exp(-cutoff1 - euler_gamma)/omega, the inverse of the
    mapping cutoff = -ln(omega*eps) - euler_gamma.
    """

    gamma: float
    omega: float
    accel: float
    tau0: float
    hbar: float = 1.0
    alpha: float | None = None
    beta: float | None = None
    cutoff0: float = 20.0
    cutoff1: float = 20.0
    eps_phys: float | None = None

    def __post_init__(self):
        if self.gamma <= 0 or self.omega <= 0 or self.accel <= 0 or self.hbar <= 0:
            raise ValueError("gamma, omega, accel and hbar must be positive")
        omega_r = math.sqrt(self.omega**2 + self.gamma**2)
        if self.alpha is None:
            object.__setattr__(self, "alpha", math.sqrt(omega_r))
        if self.beta is None:
            object.__setattr__(self, "beta", math.sqrt(omega_r))
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.eps_phys is None:
            object.__setattr__(
                self, "eps_phys",
                math.exp(-self.cutoff1 - EULER_GAMMA) / self.omega)
        if self.eps_phys <= 0:
            raise ValueError("eps_phys must be positive")

    @property
    def omega_r(self) -> float:
        """Renormalized natural frequency sqrt(omega^2 + gamma^2)."""
        return math.sqrt(self.omega**2 + self.gamma**2)

    @property
    def coupling_sq(self) -> float:
        """Squared detector-field coupling lambda0^2 = 8 pi gamma."""
        return 8.0 * math.pi * self.gamma

    def is_ground_state(self) -> bool:
        w = math.sqrt(self.omega_r)
        return abs(self.alpha - w) < 1e-12 * w and abs(self.beta - w) < 1e-12 * w

    def replace(self, **kw) -> "ModelParams":
        vals = {f.name: getattr(self, f.name) for f in fields(self)}
        vals.update(kw)
        return ModelParams(**vals)


@dataclass(frozen=True)
class CorrelatorSet:
    """Symmetrized two-point functions of both detectors at one instant."""

    tau: float
    qq_AA: float
    pp_AA: float
    qp_AA: float
    qq_BB: float
    pp_BB: float
    qp_BB: float
    qq_AB: float
    qp_AB: float
    pq_AB: float
    pp_AB: float

    def __post_init__(self):
        for name in ("qq_AA", "pp_AA", "qq_BB", "pp_BB"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        for f in fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise ValueError(f"{f.name} must be finite")
