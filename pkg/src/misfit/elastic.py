"""Homogeneous-modulus microelasticity in Fourier space.

For a stiffness tensor lambda and transformation strain [e0], the elastic
energy of any arrangement of inclusions on a periodic box is

    W = 1/(2|Omega|) sum_{k != 0} B(k) |theta(k)|^2,

where theta is the transform of the inclusion indicator and B depends only on
the direction of k.  Discrete transforms follow u~(k) = sum_x e^{ik.x} u(x) a^d,
which is what ``numpy.fft.fftn`` computes up to the sign of the exponent
(irrelevant for |.|^2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .core import GridSpec, ScalarField, StiffnessTensor, solve_strain

__all__ = [
    "ElasticKernel",
    "TransformationStrain",
    "SpringSet",
    "acoustic_matrix",
    "psi",
    "psi_trace",
    "kernel_in_direction",
    "build_kernel",
    "elastic_energy",
    "vel_realspace",
    "external_work",
    "spring_dynamical_matrix",
    "spring_kernel",
    "spring_kernel_at",
    "spring_elastic_constants",
    "minimize_over_directions",
    "realspace_energy",
]


@dataclass(frozen=True)
class TransformationStrain:
    de0: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.de0, dtype=float)
        if d.ndim == 0:
            raise ValueError("transformation strain must be a tensor; use dilatational()")
        if not np.allclose(d, d.T, rtol=0, atol=1e-15):
            raise ValueError("transformation strain must be symmetric")
        object.__setattr__(self, "de0", d)

    @classmethod
    def dilatational(cls, q, dim=3):
        return cls(q * np.eye(dim))


@dataclass(frozen=True)
class ElasticKernel:
    """Tabulated B(k) on the reciprocal lattice of ``grid``; ``b_of_k[0] == 0``."""

    grid: GridSpec
    b_of_k: np.ndarray
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        b = np.asarray(self.b_of_k, dtype=float)
        if b.shape != self.grid.shape:
            raise ValueError(f"kernel shape {b.shape} does not match grid {self.grid.shape}")
        b = b.copy()
        b[(0,) * self.grid.dim] = 0.0
        b.flags.writeable = False
        object.__setattr__(self, "b_of_k", b)

    def scaled(self, s):
        return ElasticKernel(self.grid, s * self.b_of_k, dict(self.provenance, scale=s))


def _lam_for(lam: StiffnessTensor, kdim: int):
    if lam.dim == kdim:
        return lam.lam
    if lam.dim == 3 and kdim == 2:
        return lam.lam
    raise ValueError(f"cannot use a {lam.dim}-D stiffness with {kdim}-D wavevectors")


def _pad_k(k, dim):
    k = np.asarray(k, dtype=float)
    if k.shape[-1] == dim:
        return k
    pad = np.zeros(k.shape[:-1] + (dim - k.shape[-1],))
    return np.concatenate([k, pad], axis=-1)


def acoustic_matrix(lam: StiffnessTensor, k):
    """(Z^-1)_ij = sum_mn k_m lambda_imnj k_n; k may carry leading batch axes."""
    k = np.asarray(k, dtype=float)
    L = _lam_for(lam, k.shape[-1])
    k = _pad_k(k, L.shape[0])
    zinv = np.einsum("...m,imnj,...n->...ij", k, L, k)
    if zinv.ndim == 2:
        if np.allclose(k, 0) or np.linalg.cond(zinv) > 1e14:
            raise np.linalg.LinAlgError(f"singular acoustic matrix at k={k}")
    return zinv


def psi(lam: StiffnessTensor, k):
    """Psi_ijmn(k) = lambda_ijmn - lambda_ijpq k_p Z_qr k_s lambda_rsmn for a single k != 0."""
    k = np.asarray(k, dtype=float)
    L = _lam_for(lam, k.shape[-1])
    k = _pad_k(k, L.shape[0])
    k = k / np.linalg.norm(k)
    Z = np.linalg.inv(acoustic_matrix(lam, k))
    lk = np.einsum("ijpq,p->ijq", L, k)
    kl = np.einsum("s,rsmn->rmn", k, L)
    return L - np.einsum("ijq,qr,rmn->ijmn", lk, Z, kl)


def psi_trace(lam: StiffnessTensor, k):
    """sum_im Psi_iimm(k): the kernel for a unit dilatational misfit."""
    return kernel_in_direction(lam, np.eye(lam.dim), k)


def kernel_in_direction(lam: StiffnessTensor, de0, k):
    """B(k) = [e0] : Psi(k) : [e0] for an array of nonzero wavevectors (..., d)."""
    k = np.asarray(k, dtype=float)
    L = _lam_for(lam, k.shape[-1])
    d = L.shape[0]
    k = _pad_k(k, d)
    de0 = np.asarray(de0, dtype=float)
    if de0.shape != (d, d):
        if de0.shape == (2, 2) and d == 3:
            de0 = np.pad(de0, ((0, 1), (0, 1)))
        else:
            raise ValueError(f"transformation strain shape {de0.shape} incompatible with {d}-D stiffness")
    norm = np.linalg.norm(k, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise ValueError("kernel_in_direction needs nonzero wavevectors")
    n = k / norm
    sig0 = np.einsum("ijmn,mn->ij", L, de0)
    zinv = np.einsum("...m,imnj,...n->...ij", n, L, n)
    v = np.einsum("ij,...j->...i", sig0, n)
    z_v = np.linalg.solve(zinv, v[..., None])[..., 0]
    return float(np.sum(de0 * sig0)) - np.einsum("...i,...i->...", v, z_v)


def build_kernel(grid: GridSpec, lam: StiffnessTensor, de0) -> ElasticKernel:
    """Tabulate B(k) over the reciprocal lattice of ``grid``.

    A 3-D stiffness on a 2-D grid is used with in-plane wavevectors (k_z = 0).
    """
    if isinstance(de0, TransformationStrain):
        de0 = de0.de0
    de0 = np.asarray(de0, dtype=float)
    k = grid.wavevectors().reshape(-1, grid.dim)
    b = np.zeros(grid.size)
    if np.any(de0):
        nz = np.any(k != 0, axis=1)
        b[nz] = kernel_in_direction(lam, de0, k[nz])
    return ElasticKernel(grid, b.reshape(grid.shape), {"stiffness": lam, "de0": de0})


def _indicator(fld: ScalarField, spins: bool):
    v = fld.values
    return 0.5 * (v + 1.0) if spins else v


def elastic_energy(fld: ScalarField, kernel: ElasticKernel, spins: bool = False) -> float:
    """W = 1/(2|Omega|) sum_{k!=0} B(k)|theta(k)|^2 for an inclusion indicator.

    With ``spins=True`` the field holds gamma in {-1, +1} and the inclusion
    indicator is (gamma + 1)/2.
    """
    if fld.grid != kernel.grid:
        raise ValueError("field and kernel live on different grids")
    g = fld.grid
    theta = np.fft.fftn(_indicator(fld, spins)) * g.cell_volume
    return float(0.5 * np.sum(kernel.b_of_k * np.abs(theta) ** 2) / g.volume)


def vel_realspace(kernel: ElasticKernel) -> ScalarField:
    """Pair potential V_el(p): inverse discrete transform of B, summing to zero."""
    return ScalarField(kernel.grid, np.fft.ifftn(kernel.b_of_k).real)


def realspace_energy(fld: ScalarField, kernel: ElasticKernel, spins: bool = False) -> float:
    """O(N^2) position-space double sum (a^d/2) sum_xy dc(x) V_el(x-y) dc(y)."""
    g = fld.grid
    v = vel_realspace(kernel).values
    dc = _indicator(fld, spins).ravel()
    dc = dc - dc.mean()
    idx = np.array(np.unravel_index(np.arange(g.size), g.shape)).T
    total = 0.0
    n = np.array(g.shape)
    for x in range(g.size):
        off = (idx - idx[x]) % n
        total += dc[x] * np.dot(v[tuple(off.T)], dc)
    return 0.5 * g.cell_volume * total


def external_work(fld: ScalarField, lam: StiffnessTensor, de0, t_ext, spins: bool = False):
    """Loading energy -|Omega| t_ext : (mean e0 + e_ext/2) and the mean strain.

    Returns ``(W_ext, mean_strain)`` with mean_strain = mean e0 + e_ext.
    """
    if isinstance(de0, TransformationStrain):
        de0 = de0.de0
    t = np.asarray(getattr(t_ext, "t_ext", t_ext), dtype=float)
    e_ext = solve_strain(lam, t)
    phi = float(np.mean(_indicator(fld, spins)))
    e0_mean = phi * np.asarray(de0, dtype=float)
    w = -fld.grid.volume * float(np.sum(t * (e0_mean + 0.5 * e_ext)))
    return w, e0_mean + e_ext


# -- directional minimum ------------------------------------------------------


def _fibonacci_sphere(n):
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    r = np.sqrt(1 - z**2)
    phi = np.pi * (1 + 5**0.5) * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _special_directions(dim):
    if dim == 2:
        return np.array([[1, 0], [0, 1], [1, 1], [1, -1]], float)
    dirs = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    dirs += [[1, 1, 0], [1, -1, 0], [1, 0, 1], [1, 0, -1], [0, 1, 1], [0, 1, -1]]
    dirs += [[1, 1, 1], [1, 1, -1], [1, -1, 1], [-1, 1, 1]]
    return np.array(dirs, float)


def minimize_over_directions(lam: StiffnessTensor, de0, n_samples: int = 20000):
    """Minimum of B over unit directions: dense sample, cube axes and diagonals, then polish.

    Returns ``(bmin, direction)``.
    """
    dim = lam.dim
    if dim == 3:
        pts = _fibonacci_sphere(n_samples)
    else:
        t = np.linspace(0, np.pi, n_samples, endpoint=False)
        pts = np.stack([np.cos(t), np.sin(t)], axis=1)
    pts = np.vstack([pts, _special_directions(dim)])
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    vals = kernel_in_direction(lam, de0, pts)
    best = np.argsort(vals)[:8]
    bmin, nbest = vals[best[0]], pts[best[0]]

    def f(x):
        if dim == 3:
            th, ph = x
            n = np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
        else:
            n = np.array([np.cos(x[0]), np.sin(x[0])])
        return float(kernel_in_direction(lam, de0, n[None])[0]), n

    for j in best:
        p = pts[j]
        if dim == 3:
            x0 = [np.arccos(np.clip(p[2], -1, 1)), np.arctan2(p[1], p[0])]
        else:
            x0 = [np.arctan2(p[1], p[0])]
        res = optimize.minimize(lambda x: f(x)[0], x0, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-16, "maxiter": 2000})
        val, n = f(res.x)
        if val < bmin:
            bmin, nbest = val, n
    return float(bmin), nbest


# -- square-lattice spring model ------------------------------------------------


@dataclass(frozen=True)
class SpringSet:
    """Nearest-neighbour longitudinal and transverse and next-nearest longitudinal stiffnesses."""

    L_nn: float
    T_nn: float
    L_nnn: float

    def bonds(self):
        """(bond vector, longitudinal, transverse) for one orientation of every bond."""
        return [
            (np.array([1.0, 0.0]), self.L_nn, self.T_nn),
            (np.array([0.0, 1.0]), self.L_nn, self.T_nn),
            (np.array([1.0, 1.0]), self.L_nnn, 0.0),
            (np.array([1.0, -1.0]), self.L_nnn, 0.0),
        ]


def spring_dynamical_matrix(springs: SpringSet, k, a: float = 1.0):
    """Harmonic matrix D(k) (..., 2, 2) with energy (1/2N) sum_k u~* D u~."""
    k = np.asarray(k, dtype=float)
    D = np.zeros(k.shape[:-1] + (2, 2))
    for d, L, T in springs.bonds():
        n = d / np.linalg.norm(d)
        t = np.array([-n[1], n[0]])
        w = 2 - 2 * np.cos(a * (k @ d))
        D += w[..., None, None] * (L * np.outer(n, n) + T * np.outer(t, t))
    return D


def _spring_force(springs: SpringSet, k, a):
    s = np.zeros(k.shape[:-1] + (2,))
    phi0 = np.zeros(k.shape[:-1])
    for d, L, _ in springs.bonds():
        length = a * np.linalg.norm(d)
        n = d / np.linalg.norm(d)
        kd = a * (k @ d)
        s += (L * length * np.sin(kd))[..., None] * n
        phi0 += L * length**2 * (2 + 2 * np.cos(kd))
    return s, phi0


def spring_kernel(grid: GridSpec, springs: SpringSet, misfit_amp: float) -> ElasticKernel:
    """Elastic potential of the square spring lattice with gamma-dependent natural lengths.

    Spring natural length is |d| (1 + m (gamma_p + gamma_p')) with ``m = misfit_amp``;
    stiffnesses do not depend on the atoms.  Minimizing the harmonic energy
    over displacements mode by mode gives W = (1/2N) sum_k B(k)|gamma~(k)|^2 with

        B(k) = m^2 [ phi0(k) - 4 s(k)^T D(k)^-1 s(k) ],

    phi0 the unrelaxed bond-length term and s the misfit force per unit gamma.
    """
    if grid.dim != 2:
        raise ValueError("spring lattice is two-dimensional")
    b = np.zeros(grid.shape)
    if misfit_amp != 0:
        k = grid.wavevectors()
        nz = np.any(k != 0, axis=-1)
        b[nz] = spring_kernel_at(springs, k[nz], misfit_amp, grid.a)
    return ElasticKernel(grid, b, {"springs": springs, "misfit_amp": misfit_amp})


def spring_kernel_at(springs: SpringSet, k, misfit_amp: float, a: float = 1.0):
    """B(k) of the spring lattice at arbitrary nonzero wavevectors ``k`` (..., 2)."""
    k = np.asarray(k, dtype=float)
    D = spring_dynamical_matrix(springs, k, a)
    s, phi0 = _spring_force(springs, k, a)
    cond = np.linalg.cond(D.reshape(-1, 2, 2))
    if np.any(~np.isfinite(cond)) or cond.max() > 1e13:
        bad = k.reshape(-1, 2)[np.argmax(np.where(np.isfinite(cond), cond, np.inf))]
        raise np.linalg.LinAlgError(f"singular dynamical matrix at k={bad}; unstable spring set")
    relax = np.einsum("...i,...i->...", s, np.linalg.solve(D, s[..., None])[..., 0])
    return misfit_amp**2 * (phi0 - 4 * relax)


def spring_elastic_constants(springs: SpringSet, a: float = 1.0, h: float = 1e-4):
    """Long-wavelength (C11, C12, C44) from acoustic slopes of D(k) per unit cell area."""
    from .core import CubicModuli

    kx = spring_dynamical_matrix(springs, np.array([h, 0.0]) / a, a) / h**2
    kd = spring_dynamical_matrix(springs, np.array([h, h]) / np.sqrt(2) / a, a) / h**2
    area = a**2
    c11 = kx[0, 0] * a**2 / area
    c44 = kx[1, 1] * a**2 / area
    c12 = 2 * kd[0, 1] * a**2 / area - c44
    return CubicModuli(c11, c12, c44)
