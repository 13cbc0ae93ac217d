"""Closed-form sharp-interface results for coherent precipitates.

Phase alpha is the precipitate, phase beta the matrix.  Stress-free strains
are dilatational, q_a and q_b, and [x] means x_alpha - x_beta.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .core import IsotropicModuli, StiffnessTensor, young_poisson
from .elastic import minimize_over_directions

__all__ = [
    "PhasePair",
    "PrecipitateEnsemble",
    "RaftOrientation",
    "LSWTrajectory",
    "plate_energy",
    "sphere_energy",
    "plate_energy_limit",
    "sphere_energy_limit",
    "plate_deviatoric_strain",
    "raft_orientation",
    "eshelby_pair",
    "elastic_offset",
    "gibbs_thomson",
    "critical_radius",
    "lsw_rate",
    "lsw_critical_radius",
    "lsw_evolve",
    "stability_isotropic",
    "stability_anisotropic",
    "isotropic_stability_margin",
    "anisotropic_stability_margin",
    "cubic_plate_moduli",
]


@dataclass(frozen=True)
class PhasePair:
    K_a: float = 1.0
    G_a: float = 1.0
    K_b: float = 1.0
    G_b: float = 1.0
    q_a: float = 0.01
    q_b: float = 0.0
    sigma: float = 1.0
    D: float = 1.0
    c_eq_a: float = 0.9
    c_eq_b: float = 0.1
    c0_a: float = 1.0
    T: float = 1.0

    def __post_init__(self):
        if min(self.K_a, self.G_a, self.K_b, self.G_b) <= 0:
            raise ValueError("moduli must be positive")
        if not 0 <= self.c_eq_b < self.c_eq_a <= self.c0_a <= 1:
            raise ValueError("need 0 <= c_eq_b < c_eq_a <= c0_a <= 1")
        if self.sigma < 0 or self.D <= 0 or self.T <= 0:
            raise ValueError("need sigma >= 0, D > 0, T > 0")

    @property
    def dq(self):
        return self.q_a - self.q_b

    @property
    def dG(self):
        return self.G_a - self.G_b

    @property
    def dc_eq(self):
        return self.c_eq_a - self.c_eq_b

    def swapped(self):
        """Same physical system with the roles of the phases exchanged."""
        return PhasePair(self.K_b, self.G_b, self.K_a, self.G_a, self.q_b, self.q_a,
                         self.sigma, self.D, self.c_eq_a, self.c_eq_b, self.c0_a, self.T)


def _check_phi(phi):
    if not 0 <= phi <= 1:
        raise ValueError(f"volume fraction must lie in [0, 1], got {phi}")


def plate_energy(p: PhasePair, phi: float) -> float:
    """Mean elastic energy density of alternating coherent slabs."""
    _check_phi(phi)
    inv = (1 - phi) / p.K_a + phi / p.K_b + 0.75 * ((1 - phi) / p.G_a + phi / p.G_b)
    return 4.5 * phi * (1 - phi) * p.dq**2 / inv


def sphere_energy(p: PhasePair, phi: float) -> float:
    """Mean elastic energy density of a coated-sphere cell."""
    _check_phi(phi)
    inv = (1 - phi) / p.K_a + phi / p.K_b + 0.75 / p.G_b
    return 4.5 * phi * (1 - phi) * p.dq**2 / inv


def plate_energy_limit(p: PhasePair) -> float:
    """Energy per unit precipitate volume of an isolated plate."""
    return 18 * p.G_a * p.K_a * p.dq**2 / (3 * p.K_a + 4 * p.G_a)


def sphere_energy_limit(p: PhasePair) -> float:
    """Energy per unit precipitate volume of an isolated sphere."""
    return 18 * p.K_a * p.G_b * p.dq**2 / (3 * p.K_a + 4 * p.G_b)


def plate_deviatoric_strain(p: PhasePair, phi: float) -> float:
    """Axial deviatoric mean strain of the slab stack (along the plate normal)."""
    _check_phi(phi)
    inv = (1 - phi) / p.K_a + phi / p.K_b + 0.75 * ((1 - phi) / p.G_a + phi / p.G_b)
    return 0.75 * (1 / p.G_a - 1 / p.G_b) * p.dq / inv


class RaftOrientation(enum.Enum):
    PARALLEL = "parallel"
    PERPENDICULAR = "perpendicular"
    INDETERMINATE = "indeterminate"


def raft_orientation(t_axial: float, dq: float, dG: float) -> RaftOrientation:
    """Plate orientation relative to the stress axis from sign(t_axial [q] [G])."""
    s = np.sign(t_axial) * np.sign(dq) * np.sign(dG)
    if s > 0:
        return RaftOrientation.PARALLEL
    if s < 0:
        return RaftOrientation.PERPENDICULAR
    return RaftOrientation.INDETERMINATE


def eshelby_pair(R1: float, R2: float, D: float, p: PhasePair) -> float:
    """First-order-in-[G] interaction energy of two misfitting spheres at distance D.

    Poisson's ratio is the matrix (beta) value.
    """
    if D <= R1 + R2:
        raise ValueError(f"spheres overlap: D={D} <= R1+R2={R1 + R2}")
    _, nu = young_poisson(IsotropicModuli(p.K_b, p.G_b))
    pref = 8 * np.pi / 81 * ((1 + nu) / (1 - nu)) ** 2 * p.dq**2 * p.dG
    return pref * (R1**6 * R2**3 / (D**2 - R2**2) ** 3 + R2**6 * R1**3 / (D**2 - R1**2) ** 3)


def elastic_offset(p: PhasePair) -> float:
    """Elastic part of the grand-potential jump for a sphere in an infinite matrix."""
    return sphere_energy_limit(p)


def gibbs_thomson(R: float, p: PhasePair):
    """Interface concentrations (c_alpha, c_beta) on a sphere of radius R."""
    if R <= 0:
        raise ValueError("radius must be positive")
    jump = 2 * p.sigma / R + elastic_offset(p)
    scale = jump / (p.T * p.dc_eq)
    return p.c_eq_a + (p.c0_a - p.c_eq_a) * scale, p.c_eq_b + p.c_eq_b * scale


def critical_radius(c_far: float, p: PhasePair, elastic: bool = True) -> float:
    """Radius at which the interface concentration equals the far-field value."""
    drive = p.T * p.dc_eq * (c_far - p.c_eq_b) / p.c_eq_b
    if elastic:
        drive -= elastic_offset(p)
    if drive <= 0:
        return np.inf
    return 2 * p.sigma / drive


def lsw_rate(R, R_star, p: PhasePair):
    """dR/dt for radius R in a mean field with critical radius R_star."""
    A = 2 * p.sigma * p.D * p.c_eq_b / (p.T * p.dc_eq)
    R = np.asarray(R, dtype=float)
    return A / R * (1 / R_star - 1 / R)


# -- ensemble coarsening -------------------------------------------------------


@dataclass
class PrecipitateEnsemble:
    radii: np.ndarray
    c_far: float = 0.0

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float).copy()
        if self.radii.ndim != 1 or np.any(self.radii <= 0):
            raise ValueError("radii must be a 1-D array of positive values")

    @property
    def total_volume(self):
        return 4 * np.pi / 3 * float(np.sum(self.radii**3))


def lsw_critical_radius(radii) -> float:
    """Common R* making d/dt sum R^3 vanish, from a bracketed root find.

    With dR/dt proportional to (1/R*-1/R)/R, the condition is
    sum_i (R_i/R* - 1) = 0.
    """
    radii = np.asarray(radii, dtype=float)

    def resid(inv_rs):
        return float(np.sum(radii * inv_rs - 1.0))

    lo, hi = 1.0 / radii.max(), 1.0 / radii.min()
    if resid(lo) > 0 or resid(hi) < 0:
        raise RuntimeError("critical radius root not bracketed; inconsistent ensemble")
    if lo == hi:
        return float(radii[0])
    return 1.0 / optimize.brentq(resid, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


@dataclass
class LSWTrajectory:
    t: np.ndarray
    mean_radius: np.ndarray
    count: np.ndarray
    r_star: np.ndarray
    max_volume_drift: float
    ensemble: PrecipitateEnsemble


def lsw_evolve(ens: PrecipitateEnsemble, p: PhasePair, dt: float, steps: int,
               max_fraction: float = 0.05, floor: float = 1e-6) -> LSWTrajectory:
    """Advance an LSW ensemble ``steps`` outer steps of length ``dt``.

    Sub-steps integrate particle volumes v = R^3 with forward Euler; the
    common R* makes sum dv/dt vanish, so the explicit update conserves
    sum R^3 to rounding.  A sub-step never removes more than ``max_fraction``
    of any volume except to land a vanishing particle exactly on zero.
    Particles below ``floor`` times the mean radius are deleted.
    """
    A = 2 * p.sigma * p.D * p.c_eq_b / (p.T * p.dc_eq)
    v = ens.radii**3
    ts, means, counts, rstars = [0.0], [ens.radii.mean()], [v.size], [lsw_critical_radius(ens.radii)]
    drift = 0.0
    t = 0.0
    for _ in range(steps):
        remaining = dt
        while remaining > 0 and v.size > 1:
            R = np.cbrt(v)
            rs = lsw_critical_radius(R)
            rate = 3 * A * (R / rs - 1.0)
            shrinking = rate < 0
            h = remaining
            if np.any(shrinking):
                ratio = np.sort(v[shrinking] / -rate[shrinking])
                h = min(h, ratio[0])
                if ratio.size > 1:
                    h = min(h, max(ratio[0], max_fraction * ratio[1]))
            before = v.sum()
            v = v + h * rate
            after = v.sum()
            drift = max(drift, abs(after - before) / before)
            R = np.cbrt(np.clip(v, 0, None))
            keep = R > floor * R.mean()
            if not np.all(keep):
                v = v[keep]
            remaining -= h
            t += h
        if v.size <= 1:
            R = np.cbrt(v)
            ts.append(t + remaining)
            means.append(R.mean())
            counts.append(v.size)
            rstars.append(R.mean())
            t += remaining
            continue
        R = np.cbrt(v)
        ts.append(t)
        means.append(R.mean())
        counts.append(v.size)
        rstars.append(lsw_critical_radius(R))
    out = PrecipitateEnsemble(np.cbrt(v), ens.c_far)
    return LSWTrajectory(np.array(ts), np.array(means), np.array(counts), np.array(rstars), drift, out)


# -- coherent spinodal ---------------------------------------------------------


def isotropic_stability_margin(f2: float, eta: float, m: IsotropicModuli) -> float:
    return f2 + 2 * eta**2 * 18 * m.K * m.G / (3 * m.K + 4 * m.G)


def stability_isotropic(f2: float, eta: float, m: IsotropicModuli) -> bool:
    """Uniform state stable against small fluctuations: f'' + 2 eta^2 E/(1-nu) > 0."""
    return isotropic_stability_margin(f2, eta, m) > 0


def anisotropic_stability_margin(f2: float, eta: float, lam: StiffnessTensor,
                                 n_samples: int = 20000) -> float:
    if eta == 0:
        return f2
    bmin, _ = minimize_over_directions(lam, np.eye(lam.dim), n_samples)
    return f2 + eta**2 * bmin


def stability_anisotropic(f2: float, eta: float, lam: StiffnessTensor,
                          n_samples: int = 20000) -> bool:
    """f'' + eta^2 min_k sum_im Psi_iimm(k) > 0, minimum over >= 1e4 directions."""
    return anisotropic_stability_margin(f2, eta, lam, n_samples) > 0


def cubic_plate_moduli(c, normal: str):
    """Effective isotropic (K, G) for a plate with a <100> or <111> normal in a cubic crystal."""
    key = normal.strip("<>[]() ").replace(",", "")
    K = (c.C11 + 2 * c.C12) / 3
    if key == "100":
        G = (c.C11 - c.C12) / 2
    elif key == "111":
        G = c.C44
    else:
        raise ValueError(f"unsupported plate normal {normal!r}; use <100> or <111>")
    return IsotropicModuli(K, G)
