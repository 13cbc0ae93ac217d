"""Command-line entry point ``misfit-coarsen``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import platform
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .core import (
    Config,
    ConfigError,
    CubicModuli,
    GridSpec,
    IsotropicModuli,
    MisfitSpec,
    ScalarField,
    load_config,
    make_rng,
    read_field,
    stiffness_from_cubic,
    stiffness_from_isotropic,
    write_field,
)

log = logging.getLogger("misfit")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


@dataclass(frozen=True)
class Key:
    name: str
    default: object
    unit: str
    help: str
    kind: type = float


# a default of None marks a required key
ELASTIC_KEYS = [
    Key("elastic.model", "none", "-", "none, isotropic, cubic or springs", str),
    Key("elastic.K", 1.0, "energy/volume", "bulk modulus (isotropic)"),
    Key("elastic.G", 1.0, "energy/volume", "shear modulus (isotropic)"),
    Key("elastic.c11", 1.0, "energy/volume", "cubic C11"),
    Key("elastic.c12", 0.6, "energy/volume", "cubic C12"),
    Key("elastic.c44", 0.5, "energy/volume", "cubic C44"),
    Key("misfit.eta", 0.0, "1/concentration", "Vegard coefficient; dilatational strain eta (c - c0)"),
    Key("misfit.c0", 0.5, "-", "reference concentration of the Vegard law"),
]

SPRING_KEYS = [
    Key("springs.L_nn", 1.0, "energy/area", "nearest-neighbour longitudinal spring"),
    Key("springs.T_nn", 0.0, "energy/area", "nearest-neighbour transverse spring"),
    Key("springs.L_nnn", 0.0, "energy/area", "next-nearest-neighbour longitudinal spring"),
    Key("springs.m", 0.0, "-", "misfit amplitude; natural length |d|(1 + m (g + g'))"),
]

GRID_KEYS = [
    Key("grid.dim", 2, "-", "spatial dimension", int),
    Key("grid.n", 64, "sites", "sites per axis", int),
    Key("grid.a", 1.0, "length", "grid spacing"),
]

PHASE_KEYS = [
    Key("phase.K_a", 1.0, "energy/volume", "precipitate bulk modulus"),
    Key("phase.G_a", 1.0, "energy/volume", "precipitate shear modulus"),
    Key("phase.K_b", 1.0, "energy/volume", "matrix bulk modulus"),
    Key("phase.G_b", 1.0, "energy/volume", "matrix shear modulus"),
    Key("phase.q_a", 0.01, "-", "precipitate dilatational stress-free strain"),
    Key("phase.q_b", 0.0, "-", "matrix dilatational stress-free strain"),
    Key("phase.sigma", 1.0, "energy/area", "interfacial energy"),
    Key("phase.D", 1.0, "length^2/time", "matrix diffusivity"),
    Key("phase.c_eq_a", 0.9, "-", "precipitate equilibrium concentration"),
    Key("phase.c_eq_b", 0.1, "-", "matrix equilibrium concentration"),
    Key("phase.c0_a", 1.0, "-", "stoichiometric precipitate concentration"),
    Key("phase.T", 1.0, "energy", "temperature"),
]

SHARP_KEYS = {
    "plate": PHASE_KEYS + [Key("sharp.phi", None, "-", "volume fractions (list)", list)],
    "sphere": PHASE_KEYS + [Key("sharp.phi", None, "-", "volume fractions (list)", list)],
    "pair": PHASE_KEYS + [
        Key("sharp.R1", None, "length", "first sphere radius"),
        Key("sharp.R2", None, "length", "second sphere radius"),
        Key("sharp.D", None, "length", "centre distances (list)", list),
    ],
    "gt": PHASE_KEYS + [
        Key("sharp.R", None, "length", "radii (list)", list),
        Key("sharp.c_far", 0.12, "-", "far-field matrix concentration for R*"),
    ],
    "lsw": PHASE_KEYS + [
        Key("lsw.n", 10000, "-", "particle count", int),
        Key("lsw.r_min", 0.5, "length", "smallest initial radius"),
        Key("lsw.r_max", 1.5, "length", "largest initial radius"),
        Key("lsw.dt", 5.0, "time", "output interval"),
        Key("lsw.steps", 200, "-", "number of output intervals", int),
        Key("seed", 0, "-", "random seed", int),
    ],
    "stability": ELASTIC_KEYS + [
        Key("stability.f2", None, "energy", "curvature f''(c) of the bulk free energy"),
    ],
}

CH_KEYS = GRID_KEYS + ELASTIC_KEYS + [
    Key("ch.chi", 2.0, "energy*length^2", "gradient coefficient"),
    Key("ch.T", 0.75, "energy", "temperature"),
    Key("ch.T0", 1.0, "energy", "mean-field ordering temperature"),
    Key("ch.mu_eq", 0.0, "energy", "linear term of f"),
    Key("ch.mobility", 1.0 / 3.0, "length^2/(energy*time)", "constant mobility M"),
    Key("ch.dt", 1.0, "time", "time step"),
    Key("ch.stabilizer", 2.0, "energy", "linear stabilizer S (0 gives the plain scheme)"),
    Key("ch.noise_amp", 0.0, "-", "Cook noise amplitude"),
    Key("ch.cbar", 0.5, "-", "mean concentration"),
    Key("ch.delta", 0.01, "-", "initial noise half-width"),
    Key("seed", 0, "-", "random seed", int),
]

MC_KEYS = [
    Key("grid.n", 128, "sites", "sites per axis", int),
    Key("mc.T", 1.5, "energy", "temperature"),
    Key("mc.J_nn", 1.0, "energy", "nearest-neighbour coupling (positive: like atoms attract)"),
    Key("mc.J_nnn", 0.0, "energy", "next-nearest-neighbour coupling"),
    Key("mc.fraction", 0.5, "-", "fraction of +1 sites"),
    Key("mc.glauber", False, "-", "Glauber instead of Metropolis acceptance", bool),
    Key("seed", 0, "-", "random seed", int),
] + SPRING_KEYS


def read_keys(cfg: Config, keys) -> dict:
    out = {}
    for k in keys:
        if k.default is None and k.name not in cfg:
            raise ConfigError(k.name)
        getter = {list: cfg.get_floats, int: cfg.get_int, bool: cfg.get_bool,
                  str: cfg.get_str}.get(k.kind, cfg.get_float)
        out[k.name] = getter(k.name) if k.default is None else getter(k.name, k.default)
    return out


def keys_help(keys) -> str:
    lines = ["config keys (key = value, # comments):"]
    for k in keys:
        d = "required" if k.default is None else f"default {k.default}"
        lines.append(f"  {k.name:<18} [{k.unit}] {k.help}; {d}")
    return "\n".join(lines)


# -- manifest --------------------------------------------------------------------


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def versions():
    import numba
    import scipy

    return {"misfit": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "numba": numba.__version__, "python": platform.python_version()}


@dataclass
class RunManifest:
    command: list
    config: dict
    seed: int | None
    versions: dict
    wall_clock: float
    checksums: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def add_outputs(self, root: Path, files):
        for f in sorted(Path(p) for p in files):
            self.checksums[str(f.relative_to(root))] = sha256(f)

    def write(self, path):
        """Atomic write: temp file in the target directory, then rename."""
        path = Path(path)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".manifest-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(asdict(self), fh, indent=2, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def thread_count() -> int:
    raw = os.environ.get("MISFIT_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("MISFIT_THREADS", f"MISFIT_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("MISFIT_THREADS", "MISFIT_THREADS must be >= 1")
    return n


# -- shared builders -----------------------------------------------------------


def build_stiffness(v, dim):
    model = v["elastic.model"].lower()
    if model == "isotropic":
        return stiffness_from_isotropic(IsotropicModuli(v["elastic.K"], v["elastic.G"]), dim)
    if model == "cubic":
        return stiffness_from_cubic(CubicModuli(v["elastic.c11"], v["elastic.c12"], v["elastic.c44"]), dim)
    if model in ("none", "springs"):
        return None
    raise ConfigError("elastic.model", f"elastic.model must be none, isotropic, cubic or springs, got {model!r}")


def build_grid(v):
    return GridSpec(v["grid.dim"], v["grid.n"], v["grid.a"])


def build_springs(v):
    from .elastic import SpringSet

    return SpringSet(v["springs.L_nn"], v["springs.T_nn"], v["springs.L_nnn"])


def _write_csv(path, header, rows):
    fh = open(path, "w", newline="") if path else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    finally:
        if path:
            fh.close()


# -- subcommands ---------------------------------------------------------------


def cmd_kernel(args, cfg):
    from .elastic import build_kernel, kernel_in_direction, spring_kernel, spring_kernel_at

    keys = GRID_KEYS + ELASTIC_KEYS + SPRING_KEYS
    v = read_keys(cfg, keys)
    grid = build_grid(v)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    theta = np.deg2rad(np.arange(360.0))
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    if v["elastic.model"].lower() == "springs":
        springs = build_springs(v)
        kernel = spring_kernel(grid, springs, v["springs.m"])
        # long-wavelength limit along each ray
        rays = spring_kernel_at(springs, 1e-4 * dirs / grid.a, v["springs.m"], grid.a)
    else:
        lam = build_stiffness(v, grid.dim)
        if lam is None:
            raise ConfigError("elastic.model", "kernel dump needs an elastic model")
        de0 = MisfitSpec(v["misfit.eta"], v["misfit.c0"]).expansion_tensor(lam.dim)
        kernel = build_kernel(grid, lam, de0)
        k = dirs if lam.dim == 2 else np.concatenate([dirs, np.zeros((360, 1))], axis=1)
        rays = kernel_in_direction(lam, de0, k)
    files = [out / "kernel.fld", out / "kernel_rays.csv"]
    write_field(files[0], ScalarField(grid, kernel.b_of_k))
    _write_csv(files[1], ["angle_deg", "nx", "ny", "B"],
               [(float(np.rad2deg(t)), float(d[0]), float(d[1]), float(b)) for t, d, b in zip(theta, dirs, rays)])
    return out, files, None, {}


def _phase_pair(v):
    from .sharp import PhasePair

    return PhasePair(*(v[k.name] for k in PHASE_KEYS))


def cmd_sharp(args, cfg):
    from . import sharp

    what = args.what
    v = read_keys(cfg, SHARP_KEYS[what])
    rows = []
    if what == "plate":
        p = _phase_pair(v)
        header = ["phi", "energy_density", "deviatoric_strain"]
        rows = [(phi, sharp.plate_energy(p, phi), sharp.plate_deviatoric_strain(p, phi)) for phi in v["sharp.phi"]]
    elif what == "sphere":
        p = _phase_pair(v)
        header = ["phi", "energy_density"]
        rows = [(phi, sharp.sphere_energy(p, phi)) for phi in v["sharp.phi"]]
    elif what == "pair":
        p = _phase_pair(v)
        header = ["R1", "R2", "D", "interaction_energy"]
        rows = [(v["sharp.R1"], v["sharp.R2"], d, sharp.eshelby_pair(v["sharp.R1"], v["sharp.R2"], d, p))
                for d in v["sharp.D"]]
    elif what == "gt":
        p = _phase_pair(v)
        header = ["R", "c_alpha", "c_beta", "R_star_elastic", "R_star_plain"]
        rs_el = sharp.critical_radius(v["sharp.c_far"], p, True)
        rs_pl = sharp.critical_radius(v["sharp.c_far"], p, False)
        rows = [(r, *sharp.gibbs_thomson(r, p), rs_el, rs_pl) for r in v["sharp.R"]]
    elif what == "lsw":
        p = _phase_pair(v)
        rng = make_rng(v["seed"])
        radii = rng.uniform(v["lsw.r_min"], v["lsw.r_max"], v["lsw.n"])
        tr = sharp.lsw_evolve(sharp.PrecipitateEnsemble(radii), p, v["lsw.dt"], v["lsw.steps"])
        header = ["t", "mean_radius", "count", "r_star"]
        rows = list(zip(tr.t.tolist(), tr.mean_radius.tolist(), tr.count.tolist(), tr.r_star.tolist()))
    elif what == "stability":
        lam = build_stiffness(v, 3)
        if lam is None:
            raise ConfigError("elastic.model", "stability needs elastic.model isotropic or cubic")
        f2, eta = v["stability.f2"], v["misfit.eta"]
        aniso = sharp.anisotropic_stability_margin(f2, eta, lam)
        header = ["f2", "eta", "margin_anisotropic", "stable_anisotropic", "margin_isotropic", "stable_isotropic"]
        if v["elastic.model"].lower() == "isotropic":
            m = IsotropicModuli(v["elastic.K"], v["elastic.G"])
            iso = sharp.isotropic_stability_margin(f2, eta, m)
            rows = [(f2, eta, aniso, int(aniso > 0), iso, int(iso > 0))]
        else:
            rows = [(f2, eta, aniso, int(aniso > 0), "", "")]
    out = Path(args.out) if args.out else None
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
    _write_csv(out, header, rows)
    return (out.parent if out else None), ([out] if out else []), v.get("seed"), {}


def _ch_setup(v):
    from .diffuse import CHParams, ch_kernel

    grid = build_grid(v)
    p = CHParams(chi=v["ch.chi"], T=v["ch.T"], T0=v["ch.T0"], mu_eq=v["ch.mu_eq"], eta=v["misfit.eta"],
                 c0=v["misfit.c0"], mobility_const=v["ch.mobility"], dt=v["ch.dt"], noise_amp=v["ch.noise_amp"],
                 seed=v["seed"], stabilizer=v["ch.stabilizer"])
    lam = build_stiffness(v, 3)
    kernel = None
    if lam is not None and v["misfit.eta"] != 0:
        kernel = ch_kernel(grid, lam, MisfitSpec(v["misfit.eta"], v["misfit.c0"]))
    return grid, p, kernel


def _metrics(fld: ScalarField, threshold, coarse=0):
    from .analysis import coarse_grain, domain_size, structure_factor

    spec = structure_factor(fld)
    try:
        size = domain_size(coarse_grain(fld, coarse) if coarse else fld, threshold)
    except ValueError:
        size = float("nan")
    return {"domain_size": size, "anisotropy": spec.anisotropy, "peak_radius": spec.peak_radius}


def cmd_evolve_ch(args, cfg):
    from scipy import fft as sfft

    from .diffuse import run_ch

    v = read_keys(cfg, CH_KEYS)
    grid, p, kernel = _ch_setup(v)
    out = Path(args.out)
    thr = v["ch.cbar"]
    with sfft.set_workers(thread_count()):
        run = run_ch(grid, p, args.steps, cbar=v["ch.cbar"], delta=v["ch.delta"], kernel=kernel,
                     snap_every=args.snap_every, out_dir=out, keep_snapshots=False,
                     analyze=lambda st: _metrics(st.c, thr))
    summary = out / "summary.csv"
    _write_csv(summary, ["step", "t", "domain_size", "anisotropy", "peak_radius"],
               [(i, t, m["domain_size"], m["anisotropy"], m["peak_radius"]) for i, t, _, m in run.snapshots])
    return out, run.files + [summary], p.seed, {"time_per_index": p.dt, "steps": args.steps}


def cmd_evolve_mc(args, cfg):
    from .elastic import spring_kernel
    from .montecarlo import MCParams, run_mc

    v = read_keys(cfg, MC_KEYS)
    grid = GridSpec(2, v["grid.n"])
    kernel = None
    if v["springs.m"] != 0:
        kernel = spring_kernel(grid, build_springs(v), v["springs.m"])
    p = MCParams(T=v["mc.T"], J_nn=v["mc.J_nn"], J_nnn=v["mc.J_nnn"], kernel=kernel, sweeps=args.sweeps,
                 seed=v["seed"], snap_every=args.snap_every, glauber=v["mc.glauber"])
    out = Path(args.out)
    run = run_mc(grid, p, v["mc.fraction"], out_dir=out, keep_snapshots=False,
                 analyze=lambda l: _metrics(l.field(), 0.0))
    summary = out / "summary.csv"
    _write_csv(summary, ["MCS", "domain_size", "anisotropy", "peak_radius"],
               [(m, d["domain_size"], d["anisotropy"], d["peak_radius"]) for m, _, d in run.snapshots])
    return out, run.files + [summary], p.seed, {"time_per_index": 1.0, "max_phi_drift": run.max_drift}


def _analyze_one(job):
    from .analysis import saxs_image, structure_factor

    path, out, threshold, scale, coarse = job
    fld = read_field(path)
    thr = threshold if threshold is not None else 0.5 * (fld.values.min() + fld.values.max())
    m = _metrics(fld, thr, coarse)
    idx = int(Path(path).stem.split("_")[-1])
    spec = structure_factor(fld)
    pgm = Path(out) / f"sk_{idx:06d}.pgm"
    saxs_image(spec, pgm)
    return idx * scale, m, spec.radii.tolist(), spec.azimuthal.tolist(), str(pgm)


def cmd_analyze(args, cfg):
    src = Path(args.inp)
    if not src.is_dir():
        raise FileNotFoundError(f"input directory not found: {src}")
    files = sorted(src.glob("snapshot_*.fld"))
    if not files:
        raise FileNotFoundError(f"no snapshot_*.fld files in {src}")
    scale = 1.0
    man = src / "manifest.json"
    if man.exists():
        scale = float(json.loads(man.read_text()).get("extra", {}).get("time_per_index", 1.0))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(str(f), str(out), args.threshold, scale, args.coarse) for f in files]
    n = min(thread_count(), len(jobs))
    if n > 1:
        with ProcessPoolExecutor(n) as ex:
            results = list(ex.map(_analyze_one, jobs))
    else:
        results = [_analyze_one(j) for j in jobs]
    metrics, sk = out / "metrics.csv", out / "sk_azimuthal.csv"
    _write_csv(metrics, ["t", "domain_size", "anisotropy"],
               [(t, m["domain_size"], m["anisotropy"]) for t, m, *_ in results])
    _write_csv(sk, ["t", "k", "S"],
               [(t, k, s) for t, _, radii, az, _ in results for k, s in zip(radii, az) if k > 0])
    pgms = [Path(r[4]) for r in results]
    return out, [metrics, sk] + pgms, None, {}


# -- parser and dispatch --------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    fmt = argparse.RawDescriptionHelpFormatter
    ap = _Parser(prog="misfit-coarsen", description="Misfit-driven coarsening in binary alloys.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    kp = sub.add_parser("kernel", help="elastic kernel utilities", formatter_class=fmt,
                        epilog=keys_help(GRID_KEYS + ELASTIC_KEYS + SPRING_KEYS))
    kp.add_argument("action", choices=["dump"])
    kp.add_argument("--config", required=True)
    kp.add_argument("--out", required=True, help="output directory (kernel.fld, kernel_rays.csv)")
    kp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("sharp", help="sharp-interface closed forms", formatter_class=fmt,
                        epilog="\n\n".join(f"{w}:\n{keys_help(k)}" for w, k in SHARP_KEYS.items()) + (
                            "\n\nCSV columns:\n  plate: phi, energy_density, deviatoric_strain\n"
                            "  sphere: phi, energy_density\n  pair: R1, R2, D, interaction_energy\n"
                            "  gt: R, c_alpha, c_beta, R_star_elastic, R_star_plain\n"
                            "  lsw: t, mean_radius, count, r_star\n"
                            "  stability: f2, eta, margin_anisotropic, stable_anisotropic, "
                            "margin_isotropic, stable_isotropic"))
    sp.add_argument("what", choices=list(SHARP_KEYS))
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", help="CSV file (default: stdout)")
    sp.set_defaults(func=cmd_sharp)

    cp = sub.add_parser("evolve-ch", help="elastic Cahn-Hilliard run", formatter_class=fmt,
                        epilog=keys_help(CH_KEYS))
    cp.add_argument("--config", required=True)
    cp.add_argument("--out", required=True)
    cp.add_argument("--steps", type=int, required=True)
    cp.add_argument("--snap-every", type=int, default=0)
    cp.set_defaults(func=cmd_evolve_ch)

    mp = sub.add_parser("evolve-mc", help="Kawasaki Monte Carlo run", formatter_class=fmt,
                        epilog=keys_help(MC_KEYS))
    mp.add_argument("--config", required=True)
    mp.add_argument("--out", required=True)
    mp.add_argument("--sweeps", type=int, required=True)
    mp.add_argument("--snap-every", type=int, default=0)
    mp.set_defaults(func=cmd_evolve_mc)

    an = sub.add_parser("analyze", help="metrics and structure factors of snapshot files")
    an.add_argument("--in", dest="inp", required=True)
    an.add_argument("--out", required=True)
    an.add_argument("--threshold", type=float, default=None,
                    help="binarization level (default: midpoint of each field's range)")
    an.add_argument("--coarse", type=int, default=0,
                    help="box radius for majority coarse-graining before the domain-size count")
    an.set_defaults(func=cmd_analyze)
    return ap


def dispatch(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if not getattr(args, "func", None):
        ap.print_usage(sys.stderr)
        return EXIT_CONFIG
    t0 = time.perf_counter()
    try:
        for name in ("steps", "sweeps", "snap_every"):
            if getattr(args, name, 0) is not None and getattr(args, name, 0) < 0:
                raise ConfigError(name, f"--{name.replace('_', '-')} must be non-negative")
        cfg = load_config(args.config) if getattr(args, "config", None) else Config()
        out, files, seed, extra = args.func(args, cfg)
        if out is not None:
            man = RunManifest(list(sys.argv[:1]) + list(argv if argv is not None else sys.argv[1:]),
                              cfg.as_dict(), seed, versions(), time.perf_counter() - t0, extra=extra)
            man.add_outputs(Path(out), [f for f in files if f is not None])
            man.write(Path(out) / "manifest.json")
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (FloatingPointError, np.linalg.LinAlgError, ArithmeticError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except RuntimeError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
