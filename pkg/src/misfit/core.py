"""Shared domain types: grids, fields, elastic constants, misfit and applied stress.

Every elastic quantity in the package derives from a :class:`StiffnessTensor`.
Temperatures are in energy units (kB = 1) and the undeformed lattice is the
matrix lattice, so stress-free strains are zero in the matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "GridSpec",
    "ScalarField",
    "IsotropicModuli",
    "CubicModuli",
    "StiffnessTensor",
    "MisfitSpec",
    "AppliedStress",
    "stiffness_from_isotropic",
    "stiffness_from_cubic",
    "young_poisson",
    "moduli_from_young_poisson",
    "stress_from_strain",
    "elastic_energy_density",
    "solve_strain",
    "write_field",
    "read_field",
    "Config",
    "ConfigError",
    "parse_config",
    "load_config",
    "make_rng",
]


@dataclass(frozen=True)
class GridSpec:
    """Periodic rectangular grid of ``n`` sites per axis with spacing ``a``."""

    dim: int
    n: tuple
    a: float = 1.0

    def __post_init__(self):
        n = (self.n,) * self.dim if np.isscalar(self.n) else tuple(int(v) for v in self.n)
        object.__setattr__(self, "n", n)
        if self.dim not in (2, 3):
            raise ValueError(f"grid dim must be 2 or 3, got {self.dim}")
        if len(n) != self.dim:
            raise ValueError(f"expected {self.dim} extents, got {n}")
        if any(v < 4 or v % 2 for v in n):
            raise ValueError(f"grid extents must be even and >= 4, got {n}")
        if not self.a > 0:
            raise ValueError("lattice spacing must be positive")

    @property
    def shape(self):
        return self.n

    @property
    def size(self):
        return int(np.prod(self.n))

    @property
    def cell_volume(self):
        return self.a**self.dim

    @property
    def volume(self):
        return self.size * self.cell_volume

    def wavevectors(self):
        """Reciprocal-lattice vectors as an array of shape ``n + (dim,)``."""
        axes = [2 * np.pi * np.fft.fftfreq(m, d=self.a) for m in self.n]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def laplacian_symbol(self):
        """|k_eff|^2 of the (2 dim + 1)-point finite-difference Laplacian."""
        ksq = np.zeros(self.n)
        for ax, m in enumerate(self.n):
            k = 2 * np.pi * np.fft.fftfreq(m, d=self.a)
            s = (4.0 / self.a**2) * np.sin(k * self.a / 2) ** 2
            shape = [1] * self.dim
            shape[ax] = m
            ksq = ksq + s.reshape(shape)
        return ksq


@dataclass(frozen=True)
class ScalarField:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            if v.size != self.grid.size:
                raise ValueError(f"field has {v.size} values, grid has {self.grid.size} sites")
            v = v.reshape(self.grid.shape)
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def mean(self):
        return float(self.values.mean())

    def is_occupation(self):
        return bool(np.all(np.abs(self.values) == 1.0))

    def is_concentration(self):
        return bool(np.all((self.values >= 0.0) & (self.values <= 1.0)))


@dataclass(frozen=True)
class IsotropicModuli:
    K: float
    G: float

    def __post_init__(self):
        if not (self.K > 0 and self.G > 0):
            raise ValueError(f"moduli must be positive: K={self.K}, G={self.G}")


@dataclass(frozen=True)
class CubicModuli:
    C11: float
    C12: float
    C44: float

    def __post_init__(self):
        if not self.C44 > 0:
            raise ValueError("C44 must be positive")
        if not self.C11 > abs(self.C12):
            raise ValueError("C11 must exceed |C12|")
        if not self.C11 + 2 * self.C12 > 0:
            raise ValueError("C11 + 2 C12 must be positive")

    @property
    def anisotropy(self):
        return self.C11 - self.C12 - 2 * self.C44

    @property
    def cauchy(self):
        """True when the central-force (Cauchy) relation C12 = C44 holds."""
        return bool(np.isclose(self.C12, self.C44, rtol=1e-12, atol=0.0))

    @classmethod
    def from_isotropic(cls, m: IsotropicModuli):
        return cls(m.K + 4 * m.G / 3, m.K - 2 * m.G / 3, m.G)


# Mandel basis: symmetric tensors <-> vectors with the inner product preserved.
def _mandel_pairs(dim):
    diag = [(i, i) for i in range(dim)]
    off = [(i, j) for i in range(dim) for j in range(i + 1, dim)]
    return diag + off


def _to_mandel_matrix(lam):
    dim = lam.shape[0]
    pairs = _mandel_pairs(dim)
    w = np.array([1.0 if i == j else np.sqrt(2.0) for i, j in pairs])
    m = np.array([[lam[i, j, k, l] for (k, l) in pairs] for (i, j) in pairs])
    return m * np.outer(w, w)


def _to_mandel_vector(e):
    dim = e.shape[0]
    return np.array([e[i, j] * (1.0 if i == j else np.sqrt(2.0)) for i, j in _mandel_pairs(dim)])


def _from_mandel_vector(v, dim):
    e = np.zeros((dim, dim))
    for val, (i, j) in zip(v, _mandel_pairs(dim)):
        if i == j:
            e[i, i] = val
        else:
            e[i, j] = e[j, i] = val / np.sqrt(2.0)
    return e


@dataclass(frozen=True)
class StiffnessTensor:
    """Fourth-rank stiffness lambda_ijmn in 2 or 3 dimensions."""

    lam: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float)
        d = lam.shape[0]
        if lam.shape != (d, d, d, d) or d not in (2, 3):
            raise ValueError(f"stiffness must have shape (d,d,d,d), d in (2,3); got {lam.shape}")
        if not self.symmetric(lam):
            raise ValueError("stiffness lacks minor/major index symmetry")
        if np.linalg.eigvalsh(_to_mandel_matrix(lam)).min() <= 0:
            raise ValueError("stiffness is not positive definite on symmetric tensors")
        lam.flags.writeable = False
        object.__setattr__(self, "lam", lam)

    @staticmethod
    def symmetric(lam):
        return (
            np.array_equal(lam, lam.transpose(1, 0, 2, 3))
            and np.array_equal(lam, lam.transpose(0, 1, 3, 2))
            and np.array_equal(lam, lam.transpose(2, 3, 0, 1))
        )

    @property
    def dim(self):
        return self.lam.shape[0]

    def __getitem__(self, idx):
        return self.lam[idx]

    def mandel(self):
        return _to_mandel_matrix(self.lam)

    def anisotropy(self):
        """C11 - C12 - 2 C44 read back from the tensor (cubic axes assumed)."""
        lam = self.lam
        return lam[0, 0, 0, 0] - lam[0, 0, 1, 1] - 2 * lam[0, 1, 0, 1]

    def embed3d(self):
        """Lift a 2-D tensor into 3-D with out-of-plane rows zero (for k_z = 0 use only)."""
        if self.dim == 3:
            return self.lam
        out = np.zeros((3, 3, 3, 3))
        out[:2, :2, :2, :2] = self.lam
        return out


def _fill_cubic(c11, c12, c44, dim):
    lam = np.zeros((dim,) * 4)
    for i, j, k, l in itertools.product(range(dim), repeat=4):
        if i == j == k == l:
            lam[i, j, k, l] = c11
        elif i == j and k == l:
            lam[i, j, k, l] = c12
        elif (i == k and j == l) or (i == l and j == k):
            if i != j:
                lam[i, j, k, l] = c44
    return lam


def stiffness_from_isotropic(m: IsotropicModuli, dim: int = 3) -> StiffnessTensor:
    """lambda_1111 = K + 4G/3, lambda_1122 = K - 2G/3, lambda_2323 = G."""
    return StiffnessTensor(_fill_cubic(m.K + 4 * m.G / 3, m.K - 2 * m.G / 3, m.G, dim))


def stiffness_from_cubic(m: CubicModuli, dim: int = 3) -> StiffnessTensor:
    """Cubic (dim=3) or square (dim=2) stiffness from C11, C12, C44.

    The 2-D case is the square-lattice analogue with the same three constants;
    its positivity conditions are checked by the tensor itself.
    """
    return StiffnessTensor(_fill_cubic(m.C11, m.C12, m.C44, dim))


def young_poisson(m: IsotropicModuli):
    E = 9 * m.K * m.G / (3 * m.K + m.G)
    nu = (3 * m.K - 2 * m.G) / (6 * m.K + 2 * m.G)
    return E, nu


def moduli_from_young_poisson(E, nu) -> IsotropicModuli:
    return IsotropicModuli(E / (3 * (1 - 2 * nu)), E / (2 * (1 + nu)))


def stress_from_strain(lam: StiffnessTensor, e, e0=None):
    """Hooke's law t_ij = lambda_ijmn (e_mn - e0_mn)."""
    de = np.asarray(e, dtype=float)
    if e0 is not None:
        de = de - np.asarray(e0, dtype=float)
    return np.einsum("ijmn,mn->ij", lam.lam, de)


def elastic_energy_density(lam: StiffnessTensor, e, e0=None):
    de = np.asarray(e, dtype=float)
    if e0 is not None:
        de = de - np.asarray(e0, dtype=float)
    return 0.5 * np.einsum("ij,ijmn,mn->", de, lam.lam, de)


def solve_strain(lam: StiffnessTensor, t):
    """Symmetric strain e with lambda : e = t."""
    t = np.asarray(t, dtype=float)
    v = np.linalg.solve(lam.mandel(), _to_mandel_vector(t))
    return _from_mandel_vector(v, lam.dim)


def _check_symmetric(a, what):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or not np.allclose(a, a.T, rtol=0, atol=1e-15):
        raise ValueError(f"{what} must be a symmetric square tensor")
    return a


@dataclass(frozen=True)
class MisfitSpec:
    """Vegard's law e0_ij = eta (c - c0) delta_ij, or b_ij (c - c0) when ``b`` is given."""

    eta: float
    c0: float = 0.0
    b: np.ndarray | None = None

    def __post_init__(self):
        if self.b is not None:
            object.__setattr__(self, "b", _check_symmetric(self.b, "b_ij"))

    def expansion_tensor(self, dim=3):
        if self.b is not None:
            return np.array(self.b)
        return self.eta * np.eye(dim)


@dataclass(frozen=True)
class AppliedStress:
    t_ext: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))

    def __post_init__(self):
        object.__setattr__(self, "t_ext", _check_symmetric(self.t_ext, "applied stress"))

    @property
    def axial(self):
        t = self.t_ext
        if t.shape[0] == 3:
            return (2 * t[2, 2] - t[0, 0] - t[1, 1]) / 3
        return (t[1, 1] - t[0, 0]) / 2

    @classmethod
    def uniaxial(cls, s, dim=3):
        t = np.zeros((dim, dim))
        t[-1, -1] = s
        return cls(t)


# -- field persistence -------------------------------------------------------

_MAGIC = "MCF1"
_HEADER_MIN = 16


def write_field(path, fld: ScalarField):
    """Text header ``MCF1 dim nx ny [nz]`` padded to 16 bytes, then float64 LE data."""
    head = " ".join([_MAGIC, str(fld.grid.dim)] + [str(v) for v in fld.grid.n])
    head = head.ljust(_HEADER_MIN - 1) + "\n"
    data = np.ascontiguousarray(fld.values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(head.encode("ascii"))
        fh.write(data.tobytes(order="C"))


def read_field(path, a: float = 1.0) -> ScalarField:
    raw = Path(path).read_bytes()
    nl = raw.index(b"\n")
    parts = raw[:nl].decode("ascii").split()
    if not parts or parts[0] != _MAGIC:
        raise ValueError(f"{path}: not an MCF1 field file")
    dim = int(parts[1])
    n = tuple(int(v) for v in parts[2 : 2 + dim])
    values = np.frombuffer(raw[nl + 1 :], dtype="<f8")
    if values.size != int(np.prod(n)):
        raise ValueError(f"{path}: expected {np.prod(n)} values, found {values.size}")
    return ScalarField(GridSpec(dim, n, a), values.reshape(n))


# -- configuration and seeding -------------------------------------------------


class ConfigError(ValueError):
    """Missing or malformed configuration entry; ``key`` names the culprit."""

    def __init__(self, key, message=None):
        self.key = key
        super().__init__(message or f"missing required config key: {key}")


_MISSING = object()


class Config:
    """Flat ``key = value`` settings with typed lookups."""

    def __init__(self, entries=None, source=None):
        self.entries = dict(entries or {})
        self.source = source

    def __contains__(self, key):
        return key in self.entries

    def _raw(self, key, default):
        if key in self.entries:
            return self.entries[key]
        if default is _MISSING:
            raise ConfigError(key)
        return default

    def _typed(self, key, default, conv, what):
        raw = self._raw(key, default)
        if raw is default:
            return default
        try:
            return conv(raw)
        except ValueError:
            raise ConfigError(key, f"config key {key}: cannot read {raw!r} as {what}") from None

    def get_str(self, key, default=_MISSING):
        return self._raw(key, default)

    def get_float(self, key, default=_MISSING):
        return self._typed(key, default, float, "a number")

    def get_int(self, key, default=_MISSING):
        return self._typed(key, default, int, "an integer")

    def get_bool(self, key, default=_MISSING):
        def conv(s):
            low = s.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(s)
        return self._typed(key, default, conv, "a boolean")

    def get_floats(self, key, default=_MISSING):
        return self._typed(key, default, lambda s: [float(v) for v in s.replace(",", " ").split()],
                           "a list of numbers")

    def as_dict(self):
        return dict(self.entries)


def parse_config(text: str, source=None) -> Config:
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(None, f"{source or 'config'}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(None, f"{source or 'config'}:{lineno}: empty key")
        entries[key] = value
    return Config(entries, source)


def load_config(path) -> Config:
    return parse_config(Path(path).read_text(), str(path))


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent, reproducible generator for ``seed`` and an optional stream label."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream)))
