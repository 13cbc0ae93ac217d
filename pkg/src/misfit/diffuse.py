"""Elastic Cahn-Hilliard dynamics on a periodic grid.

The free energy is

    F = sum_x [f(c) + chi/2 |grad c|^2] a^d + 1/2 sum_{k!=0} V(k) |c~(k)|^2 a^d / N

with grad the forward-difference bond gradient (its variation is the
(2d+1)-point Laplacian) and V(k) = b : Psi(k) : b the Vegard-law elastic
kernel.  The same code path serves the continuum equation and its lattice
(Khachaturyan) form: on a lattice of spacing a, the gradient term is the
nearest-neighbour coupling chi/a^2 and the mobility matrix is M times the
lattice Laplacian.
"""

from __future__ import annotations

import csv
import dataclasses
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import fft as sfft

from .core import GridSpec, MisfitSpec, ScalarField, StiffnessTensor, write_field
from .elastic import ElasticKernel, build_kernel

log = logging.getLogger(__name__)

__all__ = [
    "CHParams",
    "CHState",
    "SolverBlowUp",
    "bulk_f",
    "bulk_df",
    "bulk_d2f",
    "ch_kernel",
    "free_energy_parts",
    "total_free_energy",
    "diffusion_potential",
    "gradient_potential",
    "step_ch",
    "linear_rate",
    "amplification_factor",
    "initial_state",
    "run_ch",
    "CHRun",
]

CLAMP = 1e-9


class SolverBlowUp(FloatingPointError):
    pass


@dataclass(frozen=True)
class CHParams:
    chi: float = 2.0
    T: float = 0.75
    T0: float = 1.0
    mu_eq: float = 0.0
    eta: float = 0.0
    c0: float = 0.5
    mobility_const: float = 1.0 / 3.0
    dt: float = 1.0
    noise_amp: float = 0.0
    seed: int = 0
    stabilizer: float = 2.0

    def __post_init__(self):
        if not self.chi > 0:
            raise ValueError("chi must be positive")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.mobility_const > 0:
            raise ValueError("mobility_const must be positive")
        if self.noise_amp < 0 or self.stabilizer < 0:
            raise ValueError("noise_amp and stabilizer must be non-negative")

    @staticmethod
    def mobility_from_diffusivity(D, cbar, T):
        """Constant mobility D cbar (1 - cbar) / T."""
        return D * cbar * (1 - cbar) / T


@dataclass
class CHState:
    c: ScalarField
    t: float = 0.0
    kernel: ElasticKernel | None = None
    energy_series: list = field(default_factory=list)

    @property
    def grid(self):
        return self.c.grid


def _clamped(c):
    return np.clip(c, CLAMP, 1 - CLAMP)


def bulk_f(c, p: CHParams):
    """Mean-field alloy free energy density.

    The pair term is 2 T0 c(1-c) - T0, so that f(1/2) = -T0/2 - T log 2 and
    f''(1/2) = 4(T - T0): the graph is non-convex below T0.
    """
    c = np.asarray(c, dtype=float)
    if np.any(~np.isfinite(c)):
        raise SolverBlowUp("non-finite concentration")
    cc = _clamped(c)
    ent = cc * np.log(cc) + (1 - cc) * np.log(1 - cc)
    return p.mu_eq * c - 2 * p.T0 * (c - 0.5) ** 2 - 0.5 * p.T0 + p.T * ent


def bulk_df(c, p: CHParams):
    cc = _clamped(np.asarray(c, dtype=float))
    return p.mu_eq - 4 * p.T0 * (c - 0.5) + p.T * np.log(cc / (1 - cc))


def bulk_d2f(c, p: CHParams):
    cc = _clamped(np.asarray(c, dtype=float))
    return -4 * p.T0 + p.T / (cc * (1 - cc))


def ch_kernel(grid: GridSpec, lam: StiffnessTensor, misfit: MisfitSpec) -> ElasticKernel:
    """V(k) = b : Psi(k) : b with b the Vegard expansion tensor."""
    return build_kernel(grid, lam, misfit.expansion_tensor(lam.dim))


def _grad_sq(c, a):
    g = 0.0
    for ax in range(c.ndim):
        g = g + ((np.roll(c, -1, axis=ax) - c) / a) ** 2
    return g


def _laplacian(c, a):
    out = -2 * c.ndim * c
    for ax in range(c.ndim):
        out = out + np.roll(c, 1, axis=ax) + np.roll(c, -1, axis=ax)
    return out / a**2


def _kfull_to_half(grid, b):
    return np.asarray(b)[..., : grid.shape[-1] // 2 + 1]


def _elastic_conv(c, kernel, grid):
    if kernel is None:
        return None
    ch = sfft.rfftn(c)
    return sfft.irfftn(_kfull_to_half(grid, kernel.b_of_k) * ch, s=grid.shape)


def free_energy_parts(s: CHState, p: CHParams):
    """(F_bulk, F_grad, F_elastic) for the current state."""
    g = s.grid
    c = s.c.values
    dv = g.cell_volume
    fb = float(np.sum(bulk_f(c, p))) * dv
    fg = float(0.5 * p.chi * np.sum(_grad_sq(c, g.a))) * dv
    fe = 0.0
    if s.kernel is not None:
        fe = float(0.5 * np.sum(s.kernel.b_of_k * np.abs(np.fft.fftn(c)) ** 2) / g.size) * dv
    return fb, fg, fe


def total_free_energy(s: CHState, p: CHParams) -> float:
    return float(sum(free_energy_parts(s, p)))


def diffusion_potential(s: CHState, p: CHParams) -> ScalarField:
    """f'(c) plus the elastic convolution V * (c - cbar); gradient term excluded."""
    c = s.c.values
    mu = bulk_df(c, p)
    el = _elastic_conv(c, s.kernel, s.grid)
    if el is not None:
        mu = mu + el
    return ScalarField(s.grid, mu)


def gradient_potential(s: CHState, p: CHParams) -> ScalarField:
    """-chi Lap(c), the gradient part of the variational derivative."""
    return ScalarField(s.grid, -p.chi * _laplacian(s.c.values, s.grid.a))


class _Spectral:
    """Cached reciprocal-space tables for one grid and parameter set."""

    def __init__(self, grid, p, kernel):
        self.grid = grid
        full = grid.laplacian_symbol()
        self.ksq = _kfull_to_half(grid, full)
        self.vel = None if kernel is None else _kfull_to_half(grid, kernel.b_of_k)
        self.key = (p.dt, p.mobility_const, p.chi, p.stabilizer)
        dtm = p.dt * p.mobility_const
        self.denom = 1.0 + dtm * (p.stabilizer * self.ksq + p.chi * self.ksq**2)


_cache: dict = {}


def _spectral(grid, p, kernel):
    key = (grid, p.dt, p.mobility_const, p.chi, p.stabilizer, id(kernel))
    hit = _cache.get(key)
    # the entry holds its kernel, so an id reused after garbage collection cannot alias
    if hit is None or hit[0] is not kernel:
        if len(_cache) > 16:
            _cache.clear()
        hit = _cache[key] = (kernel, _Spectral(grid, p, kernel))
    return hit[1]


def step_ch(s: CHState, p: CHParams, rng: np.random.Generator | None = None) -> CHState:
    """One semi-implicit spectral step.

    c~ <- (c~ (1 + dt M S k^2) - dt M k^2 mu~) / (1 + dt M (S k^2 + chi k^4)),
    mu = f'(c) + V * c explicit, chi k^4 implicit; S is an optional
    linear stabilizer (zero reproduces the plain splitting).
    """
    g = s.grid
    c = s.c.values
    sp = _spectral(g, p, s.kernel)
    dtm = p.dt * p.mobility_const
    # a blow-up is reported below, so overflow inside the transforms stays quiet
    with np.errstate(invalid="ignore", over="ignore"):
        ch = sfft.rfftn(c)
        mu_h = sfft.rfftn(bulk_df(c, p))
        if sp.vel is not None:
            mu_h = mu_h + sp.vel * ch
        num = ch * (1.0 + dtm * p.stabilizer * sp.ksq) - dtm * sp.ksq * mu_h
        num[(0,) * g.dim] = ch[(0,) * g.dim]
        new = sfft.irfftn(num / sp.denom, s=g.shape)
    if p.noise_amp > 0:
        if rng is None:
            raise ValueError("noise requires an rng")
        new = new + _noise_divergence(rng, g, p.noise_amp * np.sqrt(p.dt))
    if not np.all(np.isfinite(new)):
        mu = diffusion_potential(s, p).values
        raise SolverBlowUp(f"non-finite field after step at t={s.t}; max |mu| = {np.abs(mu).max():.3e}")
    return CHState(ScalarField(g, new), s.t + p.dt, s.kernel, s.energy_series)


def _noise_divergence(rng, grid, amp):
    """Divergence of a white random flux on grid bonds; sums to zero exactly."""
    a = grid.a
    out = np.zeros(grid.shape)
    for ax in range(grid.dim):
        j = amp * rng.standard_normal(grid.shape)
        out -= (j - np.roll(j, 1, axis=ax)) / a
    return out


def linear_rate(grid: GridSpec, p: CHParams, cbar: float, kernel: ElasticKernel | None = None):
    """Continuum linear growth rate -M k^2 (f''(cbar) + V(k) + chi k^2) on the grid."""
    ksq = grid.laplacian_symbol()
    v = 0.0 if kernel is None else kernel.b_of_k
    return -p.mobility_const * ksq * (bulk_d2f(cbar, p) + v + p.chi * ksq)


def amplification_factor(grid: GridSpec, p: CHParams, cbar: float, kernel: ElasticKernel | None = None):
    """Per-step linear amplification of the semi-implicit scheme."""
    ksq = grid.laplacian_symbol()
    v = 0.0 if kernel is None else kernel.b_of_k
    dtm = p.dt * p.mobility_const
    num = 1 + dtm * p.stabilizer * ksq - dtm * ksq * (bulk_d2f(cbar, p) + v)
    return num / (1 + dtm * (p.stabilizer * ksq + p.chi * ksq**2))


def initial_state(grid: GridSpec, cbar: float, delta: float, rng: np.random.Generator,
                  kernel: ElasticKernel | None = None) -> CHState:
    """cbar plus uniform noise in [-delta, delta], shifted to the exact mean."""
    z = rng.uniform(-delta, delta, grid.shape)
    c = cbar + (z - z.mean())
    return CHState(ScalarField(grid, c), 0.0, kernel, [])


@dataclass
class CHRun:
    state: CHState
    times: list
    energies: list
    snapshots: list
    steps: int
    wall: float
    files: list = field(default_factory=list)


def run_ch(grid: GridSpec, p: CHParams, steps: int, *, cbar: float = 0.5, delta: float = 0.01,
           kernel: ElasticKernel | None = None, snap_every: int = 0, energy_every: int = 0,
           out_dir: str | Path | None = None, dt_max: float | None = None,
           dt_growth: float = 0.0, keep_snapshots: bool = True, analyze=None) -> CHRun:
    """Integrate from a noisy uniform state.

    ``dt_growth`` > 0 lets the step grow as dt (1 + dt_growth t) up to ``dt_max``;
    the linear stabilizer keeps large steps energy-stable.  Snapshots are kept
    in memory and, when ``out_dir`` is given, written as field files together
    with ``energy.csv``.  ``analyze(state)`` may return a dict of metrics to
    record with each snapshot.
    """
    rng = np.random.default_rng(p.seed)
    s = initial_state(grid, cbar, delta, rng, kernel)
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    times, energies, snaps, files = [], [], [], []
    t0 = time.perf_counter()
    energy_every = energy_every or snap_every or max(steps // 100, 1)

    def record_energy(st):
        parts = free_energy_parts(st, p)
        times.append(st.t)
        energies.append((sum(parts),) + parts)

    def record_snapshot(st, i):
        metrics = analyze(st) if analyze else {}
        if keep_snapshots:
            snaps.append((i, st.t, st.c, metrics))
        else:
            snaps.append((i, st.t, None, metrics))
        if out is not None:
            path = out / f"snapshot_{i:06d}.fld"
            write_field(path, st.c)
            files.append(path)

    record_energy(s)
    if snap_every:
        record_snapshot(s, 0)
    q = p
    for i in range(1, steps + 1):
        if dt_growth > 0:
            dt = min(p.dt * (1 + dt_growth * s.t), dt_max or np.inf)
            if dt != q.dt:
                q = dataclasses.replace(p, dt=dt)
        s = step_ch(s, q, rng)
        if i % energy_every == 0:
            record_energy(s)
        if snap_every and i % snap_every == 0:
            record_snapshot(s, i)
    wall = time.perf_counter() - t0
    s.energy_series = list(zip(times, [e[0] for e in energies]))
    if out is not None:
        path = out / "energy.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "F", "F_bulk", "F_grad", "F_elastic"])
            for t, e in zip(times, energies):
                w.writerow([repr(t)] + [repr(x) for x in e])
        files.append(path)
    log.info("CH run: %d steps in %.1f s", steps, wall)
    return CHRun(s, times, energies, snaps, steps, wall, files)
