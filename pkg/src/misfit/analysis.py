"""Microstructure metrics: structure factors, lobe anisotropy, domain size, growth exponents."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage, stats

from .core import GridSpec, ScalarField

__all__ = [
    "Spectrum",
    "GrowthSeries",
    "structure_factor",
    "anisotropy_ratio",
    "domain_size",
    "coarse_grain",
    "growth_exponent",
    "saxs_image",
    "read_pgm",
]

LOBE_HALF_WIDTH = np.deg2rad(10.0)
RING_WIDTH = 0.5


@dataclass(frozen=True)
class Spectrum:
    """S(k) = |f~(k)|^2 / N with the k = 0 entry zeroed."""

    grid: GridSpec
    s_of_k: np.ndarray
    radii: np.ndarray
    azimuthal: np.ndarray
    peak_radius: float
    anisotropy: float

    @property
    def empty(self):
        return not np.any(self.s_of_k > 0)


def _kindex(grid):
    axes = [np.fft.fftfreq(m) * m for m in grid.n]
    kk = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    # integer wave numbers, rescaled per axis so rectangular grids share one metric
    scale = np.array(grid.n, float) / max(grid.n)
    return kk / scale


def _lobe_axes(dim):
    if dim == 2:
        axial = np.array([[1, 0], [0, 1]], float)
        diag = np.array([[1, 1], [1, -1]], float) / np.sqrt(2)
    else:
        axial = np.eye(3)
        diag = np.array([[1, 1, 0], [1, -1, 0], [1, 0, 1], [1, 0, -1], [0, 1, 1], [0, 1, -1]], float)
        diag /= np.sqrt(2)
    return axial, diag


def _angle_to(nhat, axes):
    cos = np.abs(nhat @ axes.T).max(axis=-1)
    return np.arccos(np.clip(cos, -1, 1))


def anisotropy_ratio(s_of_k, grid: GridSpec, peak_radius: float, width: float = RING_WIDTH):
    """Mean S in +-10 degree lobes about <10> axes over lobes about <11> axes.

    Only wavevectors in the annulus |k| in [(1-width) k_p, (1+width) k_p] about
    the peak ring count.  Returns 1 when either lobe set is empty or both are
    dark, and infinity when only the diagonal lobes are dark.
    """
    if not peak_radius > 0:
        return 1.0
    kk = _kindex(grid)
    r = np.linalg.norm(kk, axis=-1)
    ring = (r >= (1 - width) * peak_radius) & (r <= (1 + width) * peak_radius) & (r > 0)
    if not np.any(ring):
        return 1.0
    nhat = kk[ring] / r[ring][:, None]
    s = s_of_k[ring]
    axial, diag = _lobe_axes(grid.dim)
    in_ax = _angle_to(nhat, axial) <= LOBE_HALF_WIDTH
    in_dg = _angle_to(nhat, diag) <= LOBE_HALF_WIDTH
    if not in_ax.any() or not in_dg.any():
        return 1.0
    num, den = s[in_ax].mean(), s[in_dg].mean()
    if den <= 0:
        return np.inf if num > 0 else 1.0
    return float(num / den)


def structure_factor(fld: ScalarField) -> Spectrum:
    """Structure factor with azimuthal average and lobe anisotropy at the peak ring."""
    g = fld.grid
    v = fld.values
    s = np.abs(np.fft.fftn(v)) ** 2 / g.size
    s[(0,) * g.dim] = 0.0
    kk = _kindex(g)
    r = np.linalg.norm(kk, axis=-1)
    rmax = int(np.floor(r.max())) + 1
    bins = np.rint(r).astype(int)
    counts = np.bincount(bins.ravel(), minlength=rmax + 1)
    sums = np.bincount(bins.ravel(), weights=s.ravel(), minlength=rmax + 1)
    radii = np.arange(counts.size, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        az = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
    az[0] = 0.0
    if not np.any(s > 0):
        return Spectrum(g, s, radii, az, 0.0, 1.0)
    # intensity-weighted first moment of the radial profile locates the ring
    w = az * counts
    peak = float(np.sum(radii * w) / np.sum(w))
    return Spectrum(g, s, radii, az, peak, anisotropy_ratio(s, g, peak))


def domain_size(fld: ScalarField, threshold: float = 0.0) -> float:
    """Minority-phase area over interface length, the interface counted as unlike bonds.

    The bond count overestimates the length of an isotropic interface by 4/pi
    (a disk of radius R gives pi R / 8 instead of R / 2).
    """
    g = fld.grid
    b = fld.values > threshold
    bonds = sum(int(np.count_nonzero(b != np.roll(b, 1, axis=ax))) for ax in range(g.dim))
    if bonds == 0:
        raise ValueError("field is single-phase at this threshold; domain size undefined")
    n_up = int(np.count_nonzero(b))
    minority = min(n_up, b.size - n_up)
    return minority * g.cell_volume / (bonds * g.a ** (g.dim - 1))


def coarse_grain(fld: ScalarField, radius: int = 1) -> ScalarField:
    """Periodic box average over (2 radius + 1)^d cells.

    Thresholding the result at zero is a majority rule for +-1 spins; it strips
    isolated thermal flips that would otherwise count as interface.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    v = ndimage.uniform_filter(np.asarray(fld.values, float), size=2 * radius + 1, mode="wrap")
    return ScalarField(fld.grid, v)


@dataclass(frozen=True)
class GrowthSeries:
    t: np.ndarray
    R: np.ndarray
    window: tuple | None = None

    def __post_init__(self):
        t = np.asarray(self.t, float)
        R = np.asarray(self.R, float)
        if t.shape != R.shape or t.ndim != 1:
            raise ValueError("t and R must be 1-D arrays of equal length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("t must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "R", R)

    def final_decade(self):
        return GrowthSeries(self.t, self.R, (self.t[-1] / 10, self.t[-1]))


def growth_exponent(series: GrowthSeries, min_samples: int = 8):
    """Least-squares fit log R = log(prefactor) + exponent log t over the window.

    Returns ``(exponent, prefactor, stderr)``.
    """
    t, R = series.t, series.R
    if series.window is not None:
        lo, hi = series.window
        m = (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
        t, R = t[m], R[m]
    if t.size < min_samples:
        raise ValueError(f"need at least {min_samples} samples in the fit window, got {t.size}")
    if np.any(t <= 0) or np.any(R <= 0):
        raise ValueError("growth fit needs positive t and R")
    fit = stats.linregress(np.log(t), np.log(R))
    return float(fit.slope), float(np.exp(fit.intercept)), float(fit.stderr)


def saxs_image(spec: Spectrum, path) -> np.ndarray:
    """Write log-scaled S(k), k = 0 centred, as an 8-bit binary PGM; returns the pixels."""
    s = spec.s_of_k
    if spec.grid.dim == 3:
        s = s[:, :, 0]
    s = np.fft.fftshift(s)
    if not np.any(s > 0):
        img = np.zeros(s.shape, dtype=np.uint8)
    else:
        pos = s[s > 0]
        floor = max(pos.max() * 1e-6, pos.min())
        ls = np.log10(np.maximum(s, floor))
        lo, hi = ls.min(), ls.max()
        img = np.zeros(s.shape, dtype=np.uint8) if hi == lo else \
            np.rint(255 * (ls - lo) / (hi - lo)).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())
    return img


def read_pgm(path) -> np.ndarray:
    raw = open(path, "rb").read()
    parts = raw.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4][: w * h], dtype=np.uint8).reshape(h, w)
