"""Kawasaki-exchange Monte Carlo for a binary square lattice with misfit springs.

Sites carry gamma = +1 or -1.  The energy is

    F = -J_nn sum_<nn> g g - J_nnn sum_<nnn> g g + (1/2N) sum_{k!=0} B(k) |g~(k)|^2

where the elastic kernel B comes from ``spring_kernel``.  The cached field
phi = V_el * gamma (V_el the inverse transform of B) makes the elastic change
of a two-site exchange exact in O(1) and its bookkeeping O(N).
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numba
import numpy as np

from .core import GridSpec, ScalarField, write_field
from .elastic import ElasticKernel, vel_realspace

log = logging.getLogger(__name__)

__all__ = [
    "MCParams",
    "SpinLattice",
    "SweepStats",
    "MCRun",
    "random_lattice",
    "total_energy",
    "energy_parts",
    "delta_f_exchange",
    "kawasaki_sweep",
    "run_sweeps",
    "sweep_codes",
    "exchange",
    "run_mc",
    "sublattice_labels",
]

RESYNC_EVERY = 10_000
DRIFT_WARN = 1e-7

_NN = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=np.int64)
_NNN = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=np.int64)


@dataclass(frozen=True)
class MCParams:
    """Couplings use the Hamiltonian -J sum g g, so J > 0 favours like neighbours."""

    T: float
    J_nn: float = 1.0
    J_nnn: float = 0.0
    kernel: ElasticKernel | None = None
    sweeps: int = 1
    seed: int = 0
    snap_every: int = 0
    glauber: bool = False

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("temperature must be positive")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")


@dataclass
class SpinLattice:
    grid: GridSpec
    gamma: np.ndarray
    phi: np.ndarray | None = None
    vel: np.ndarray | None = None

    def __post_init__(self):
        if self.grid.dim != 2:
            raise ValueError("the lattice model is two-dimensional")
        g = np.asarray(self.gamma)
        if g.shape != self.grid.shape or not np.all(np.abs(g) == 1):
            raise ValueError("gamma must be a grid-shaped array of +-1")
        self.gamma = np.ascontiguousarray(g, dtype=np.int8)
        self.nbr = _neighbour_table(self.grid.shape)
        self.vel2 = None

    @classmethod
    def with_kernel(cls, grid, gamma, kernel: ElasticKernel | None):
        lat = cls(grid, gamma)
        lat.attach(kernel)
        return lat

    def attach(self, kernel: ElasticKernel | None):
        if kernel is None or not np.any(kernel.b_of_k):
            self.vel = None
            self.vel2 = None
            self.phi = None
            return
        if kernel.grid != self.grid:
            raise ValueError("kernel grid does not match the lattice")
        self.vel = np.ascontiguousarray(vel_realspace(kernel).values)
        # periodic image table: vel2[nx + di, ny + dj] = vel[di mod nx, dj mod ny]
        self.vel2 = np.ascontiguousarray(np.tile(self.vel, (2, 2)))
        self.phi = self.full_phi()

    def full_phi(self):
        # circular convolution phi = V_el * gamma
        ghat = np.fft.fftn(self.gamma.astype(float))
        return np.fft.ifftn(np.fft.fftn(self.vel) * ghat).real

    def resync(self):
        """Recompute phi from scratch; returns the max deviation of the cached copy."""
        if self.vel is None:
            return 0.0
        fresh = self.full_phi()
        dev = float(np.abs(fresh - self.phi).max())
        self.phi = fresh
        return dev

    @property
    def composition(self):
        return int(self.gamma.sum(dtype=np.int64))

    def field(self) -> ScalarField:
        return ScalarField(self.grid, self.gamma.astype(float))


def random_lattice(grid: GridSpec, fraction_up: float, rng: np.random.Generator,
                   kernel: ElasticKernel | None = None) -> SpinLattice:
    """Exactly round(fraction_up N) sites set to +1, placed uniformly at random."""
    n_up = int(round(fraction_up * grid.size))
    g = -np.ones(grid.size, dtype=np.int8)
    g[rng.permutation(grid.size)[:n_up]] = 1
    return SpinLattice.with_kernel(grid, g.reshape(grid.shape), kernel)


def _chem_energy(gamma, J_nn, J_nnn):
    g = gamma.astype(float)
    nn = np.sum(g * np.roll(g, 1, 0)) + np.sum(g * np.roll(g, 1, 1))
    nnn = np.sum(g * np.roll(np.roll(g, 1, 0), 1, 1)) + np.sum(g * np.roll(np.roll(g, 1, 0), -1, 1))
    return float(-J_nn * nn - J_nnn * nnn)


def energy_parts(l: SpinLattice, p: MCParams):
    """(F_chem, F_elastic) with the elastic part from the Fourier sum."""
    fc = _chem_energy(l.gamma, p.J_nn, p.J_nnn)
    fe = 0.0
    if p.kernel is not None:
        gh = np.fft.fftn(l.gamma.astype(float))
        fe = float(0.5 * np.sum(p.kernel.b_of_k * np.abs(gh) ** 2) / l.grid.size)
    return fc, fe


def total_energy(l: SpinLattice, p: MCParams) -> float:
    return float(sum(energy_parts(l, p)))


def _neighbour_table(shape):
    """Flat indices of the 4 nearest and then 4 next-nearest neighbours of every site."""
    nx, ny = shape
    i, j = np.indices(shape)
    cols = [((i + di) % nx) * ny + (j + dj) % ny for di, dj in np.concatenate([_NN, _NNN])]
    return np.stack([c.ravel() for c in cols], axis=1).astype(np.int64)


@numba.njit(cache=True)
def _delta(g, phi, vel2, has_el, a, b, nbr, ny, J_nn, J_nnn):
    # flips: dg_a = -2 g_a, dg_b = -2 g_b = +2 g_a
    da = -2.0 * g[a]
    db = -2.0 * g[b]
    ha = 0.0
    hb = 0.0
    for d in range(4):
        ha += J_nn * g[nbr[a, d]] + J_nnn * g[nbr[a, d + 4]]
        hb += J_nn * g[nbr[b, d]] + J_nnn * g[nbr[b, d + 4]]
    # -sum dg h - 1/2 sum dg J dg, the pair term restoring the unchanged a-b bond
    dF = -da * ha - db * hb - J_nn * da * db
    if has_el:
        nx = vel2.shape[0] // 2
        v0 = vel2[nx, ny]
        vab = vel2[nx + a // ny - b // ny, ny + a % ny - b % ny]
        dF += da * phi[a] + db * phi[b] + 0.5 * (da * da + db * db) * v0 + da * db * vab
    return dF


@numba.njit(cache=True)
def _apply(g, phi, vel2, has_el, a, b, ny):
    da = -2.0 * g[a]
    db = -2.0 * g[b]
    g[a] = -g[a]
    g[b] = -g[b]
    if has_el:
        nx = vel2.shape[0] // 2
        ai, aj = a // ny, a % ny
        bi, bj = b // ny, b % ny
        for i in range(nx):
            ra = vel2[i - ai + nx]
            rb = vel2[i - bi + nx]
            row = i * ny
            for j in range(ny):
                phi[row + j] += da * ra[j - aj + ny] + db * rb[j - bj + ny]


# xoshiro256++ keeps the inner loop cheap; the state lives in a 4-word array
_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)


@numba.njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@numba.njit(cache=True, inline="always")
def _next(st):
    s0, s1, s2, s3 = st[0], st[1], st[2], st[3]
    out = _rotl(s0 + s3, 23) + s0
    t = s1 << np.uint64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    st[0], st[1], st[2], st[3] = s0, s1, s2, s3
    return out


def _rng_state(rng: np.random.Generator):
    st = rng.integers(0, 2**63, size=4, dtype=np.uint64) | np.uint64(1)
    return st


@numba.njit(cache=True)
def _attempts(g, phi, vel2, has_el, n_attempts, T, J_nn, J_nnn, glauber, budget, nbr, ny, st):
    """Run up to n_attempts proposals; stop early once ``budget`` moves are accepted.

    Returns (attempts done, accepted).
    """
    m = np.uint64(4 * g.size)
    acc = 0
    done = 0
    while done < n_attempts:
        done += 1
        # top 32 bits scaled onto [0, 4N): site and bond direction
        s = ((_next(st) >> np.uint64(32)) * m) >> np.uint64(32)
        u = (_next(st) >> np.uint64(11)) * (1.0 / 9007199254740992.0)
        a = np.int64(s >> np.uint64(2))
        b = nbr[a, np.int64(s & np.uint64(3))]
        if g[a] == g[b]:
            continue
        dF = _delta(g, phi, vel2, has_el, a, b, nbr, ny, J_nn, J_nnn)
        if glauber:
            ok = u * (1.0 + np.exp(dF / T)) < 1.0
        else:
            ok = dF <= 0.0 or u < np.exp(-dF / T)
        if ok:
            _apply(g, phi, vel2, has_el, a, b, ny)
            acc += 1
            if acc >= budget:
                break
    return done, acc


@dataclass
class SweepStats:
    attempts: int = 0
    accepted: int = 0
    max_drift: float = 0.0
    since_sync: int = 0
    rng_state: np.ndarray | None = None

    @property
    def acceptance(self):
        return self.accepted / self.attempts if self.attempts else 0.0


def _buffers(l):
    if l.vel is None:
        z = np.zeros(1)
        return z, np.zeros((2, 2)), False
    return l.phi.reshape(-1), l.vel2, True


def _run_attempts(l: SpinLattice, p: MCParams, n_attempts: int, stats: SweepStats):
    phi, vel2, has_el = _buffers(l)
    st = stats.rng_state
    left = n_attempts
    while left > 0:
        budget = RESYNC_EVERY - stats.since_sync if has_el else 1 << 62
        done, acc = _attempts(l.gamma.reshape(-1), phi, vel2, has_el, left, float(p.T), float(p.J_nn),
                              float(p.J_nnn), bool(p.glauber), budget, l.nbr, l.grid.n[1], st)
        left -= done
        stats.attempts += done
        stats.accepted += acc
        stats.since_sync += acc
        if has_el and stats.since_sync >= RESYNC_EVERY:
            dev = l.resync()
            phi = l.phi.reshape(-1)
            stats.max_drift = max(stats.max_drift, dev)
            stats.since_sync = 0
            if dev > DRIFT_WARN:
                log.warning("cached elastic potential drifted by %.3e; resynchronised", dev)


def kawasaki_sweep(l: SpinLattice, p: MCParams, rng: np.random.Generator):
    """One Monte Carlo step: N exchange attempts.  Returns the number accepted.

    Picks that land on a like pair count as rejected attempts.
    """
    return run_sweeps(l, p, rng, 1).accepted


def run_sweeps(l: SpinLattice, p: MCParams, rng: np.random.Generator, sweeps: int,
               stats: SweepStats | None = None) -> SweepStats:
    """``sweeps`` Monte Carlo steps; the compiled generator is reseeded from ``rng``."""
    stats = stats or SweepStats()
    stats.rng_state = _rng_state(rng)
    _run_attempts(l, p, sweeps * l.grid.size, stats)
    return stats


@numba.njit(cache=True)
def _codes(g, n_sweeps, T, J_nn, J_nnn, glauber, nbr, ny, st, out):
    z = np.zeros(1)
    z2 = np.zeros((2, 2))
    n = g.size
    acc = 0
    for s in range(n_sweeps):
        _, a = _attempts(g, z, z2, False, n, T, J_nn, J_nnn, glauber, 1 << 62, nbr, ny, st)
        acc += a
        code = 0
        for i in range(n):
            if g[i] > 0:
                code |= 1 << i
        out[s] = code
    return acc


def sweep_codes(l: SpinLattice, p: MCParams, rng: np.random.Generator, sweeps: int) -> np.ndarray:
    """Bit-encoded configuration after each sweep (site i*ny+j is bit i*ny+j).

    For small lattices without elasticity (at most 63 sites).
    """
    if l.grid.size > 63:
        raise ValueError("configuration codes need at most 63 sites")
    if p.kernel is not None and np.any(p.kernel.b_of_k):
        raise ValueError("configuration codes are for the chemical-only model")
    out = np.empty(sweeps, dtype=np.int64)
    _codes(l.gamma.reshape(-1), sweeps, float(p.T), float(p.J_nn), float(p.J_nnn), bool(p.glauber),
           l.nbr, l.grid.n[1], _rng_state(rng), out)
    return out


def delta_f_exchange(l: SpinLattice, p: MCParams, site_a, site_b) -> float:
    """Exact energy change of exchanging the atoms on two unlike nearest-neighbour sites."""
    nx, ny = l.grid.shape
    ai, aj = (int(site_a[0]) % nx, int(site_a[1]) % ny)
    bi, bj = (int(site_b[0]) % nx, int(site_b[1]) % ny)
    if (ai, aj) == (bi, bj):
        raise ValueError("exchange needs two distinct sites")
    di = min((ai - bi) % nx, (bi - ai) % nx)
    dj = min((aj - bj) % ny, (bj - aj) % ny)
    if di + dj != 1:
        raise ValueError("sites are not nearest neighbours")
    if l.gamma[ai, aj] == l.gamma[bi, bj]:
        raise ValueError("sites hold the same species")
    phi, vel2, has_el = _buffers(l)
    return float(_delta(l.gamma.reshape(-1), phi, vel2, has_el, ai * ny + aj, bi * ny + bj, l.nbr, ny,
                        float(p.J_nn), float(p.J_nnn)))


def exchange(l: SpinLattice, site_a, site_b):
    """Carry out an exchange, keeping the cached potential current."""
    phi, vel2, has_el = _buffers(l)
    nx, ny = l.grid.shape
    a = (int(site_a[0]) % nx) * ny + int(site_a[1]) % ny
    b = (int(site_b[0]) % nx) * ny + int(site_b[1]) % ny
    _apply(l.gamma.reshape(-1), phi, vel2, has_el, a, b, ny)


def sublattice_labels(gamma, min_order: float = 0.75):
    """Checkerboard variant map from the 2x2-plaquette staggered order.

    Each site gets +1 or -1 for the two antiphase variants when the staggered
    average over the plaquette anchored there exceeds ``min_order`` in size,
    and 0 otherwise (disordered or boundary).
    """
    g = np.asarray(gamma, dtype=float)
    i, j = np.indices(g.shape)
    st = g * (1 - 2 * ((i + j) % 2))
    avg = (st + np.roll(st, -1, 0) + np.roll(st, -1, 1) + np.roll(np.roll(st, -1, 0), -1, 1)) / 4
    up = 0.5 * (g + 1)
    conc = (up + np.roll(up, -1, 0) + np.roll(up, -1, 1) + np.roll(np.roll(up, -1, 0), -1, 1)) / 4
    ordered = (np.abs(avg) >= min_order) & (np.abs(conc - 0.5) < 0.3)
    return np.where(ordered, np.sign(avg), 0).astype(np.int8)


@dataclass
class MCRun:
    lattice: SpinLattice
    mcs: list
    energies: list
    acceptance: list
    snapshots: list
    wall: float
    max_drift: float
    files: list = field(default_factory=list)


def run_mc(grid: GridSpec, p: MCParams, fraction_up: float = 0.5, *, out_dir=None,
           analyze=None, keep_snapshots: bool = True, log_snapshots: bool = False) -> MCRun:
    """Random start at fixed composition, then ``p.sweeps`` sweeps.

    Snapshots every ``p.snap_every`` sweeps (or at roughly logarithmic spacing
    when ``log_snapshots``); each snapshot records the energy and acceptance,
    and ``analyze(lattice)`` metrics when given.
    """
    rng = np.random.default_rng(p.seed)
    lat = random_lattice(grid, fraction_up, rng, p.kernel)
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    if log_snapshots:
        marks = np.unique(np.geomspace(1, p.sweeps, 60).astype(int))
    elif p.snap_every:
        marks = np.arange(p.snap_every, p.sweeps + 1, p.snap_every)
    else:
        marks = np.array([p.sweeps])
    if marks[-1] != p.sweeps:
        marks = np.append(marks, p.sweeps)
    mcs, energies, accs, snaps, files = [0], [energy_parts(lat, p)], [0.0], [], []
    stats = SweepStats()
    t0 = time.perf_counter()
    done = 0

    def snapshot(m):
        metrics = analyze(lat) if analyze else {}
        snaps.append((m, lat.gamma.copy() if keep_snapshots else None, metrics))
        if out is not None:
            path = out / f"snapshot_{m:06d}.fld"
            write_field(path, lat.field())
            files.append(path)

    snapshot(0)
    for m in marks:
        before = SweepStats(stats.attempts, stats.accepted)
        run_sweeps(lat, p, rng, int(m) - done, stats)
        done = int(m)
        mcs.append(done)
        energies.append(energy_parts(lat, p))
        da = stats.attempts - before.attempts
        accs.append((stats.accepted - before.accepted) / da if da else 0.0)
        snapshot(done)
    stats.max_drift = max(stats.max_drift, lat.resync())
    wall = time.perf_counter() - t0
    if out is not None:
        path = out / "energy.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["MCS", "F_chem", "F_elastic", "acceptance"])
            for m, (fc, fe), a in zip(mcs, energies, accs):
                w.writerow([m, repr(fc), repr(fe), repr(a)])
        files.append(path)
    log.info("MC run: %d sweeps in %.1f s, acceptance %.3f", p.sweeps, wall, stats.acceptance)
    return MCRun(lat, mcs, energies, accs, snaps, wall, stats.max_drift, files)
