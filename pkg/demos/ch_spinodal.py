"""Spinodal decomposition with and without a coherency misfit.

Run:  python3 demos/ch_spinodal.py [outdir]

Two Cahn-Hilliard runs from the same noisy 50/50 start.  The first has no
elastic term and coarsens into an isotropic labyrinth.  The second adds a
dilatational misfit in a cubic crystal whose soft directions are the cube
axes, and the pattern lines up along x and y.  Both end with a SAXS-style
image of the structure factor.
"""

import sys
from pathlib import Path

import numpy as np

from misfit.analysis import GrowthSeries, domain_size, growth_exponent, saxs_image, structure_factor
from misfit.core import CubicModuli, GridSpec, MisfitSpec, stiffness_from_cubic
from misfit.diffuse import CHParams, ch_kernel, run_ch

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/ch")
out.mkdir(parents=True, exist_ok=True)

# %% Setup
# 128^2 periodic box at T = 0.75 T0, deep inside the spinodal.
grid = GridSpec(2, 128)
steps = 1500

# %% Isotropic coarsening
p = CHParams(T=0.75, T0=1.0, seed=3)
run = run_ch(grid, p, steps, snap_every=100, keep_snapshots=False,
             analyze=lambda st: {"R": domain_size(st.c, 0.5)})
t = np.array([s[1] for s in run.snapshots[1:]])
R = np.array([s[3]["R"] for s in run.snapshots[1:]])
for ti, ri in zip(t[::3], R[::3]):
    print(f"t = {ti:6.0f}   R = {ri:6.2f}")
expo, lam, err = growth_exponent(GrowthSeries(t, R).final_decade())
print(f"R ~ t^{expo:.2f} (+- {err:.3f}) over the last decade, 1/3 expected for bulk diffusion")

F = [e[0] for e in run.energies]
print(f"free energy {F[0]:.2f} -> {F[-1]:.2f}, never increasing: {bool(np.all(np.diff(F) <= 0))}")
spec = structure_factor(run.state.c)
saxs_image(spec, out / "isotropic.pgm")
print(f"axial/diagonal lobe ratio {spec.anisotropy:.2f}")

# %% With misfit: cubic crystal, soft along <10>
soft = CubicModuli(1.0, 0.6, 0.5)
lam = stiffness_from_cubic(soft)
kernel = ch_kernel(grid, lam, MisfitSpec(0.3))
run = run_ch(grid, CHParams(T=0.75, T0=1.0, eta=0.3, seed=3), steps, kernel=kernel)
spec = structure_factor(run.state.c)
saxs_image(spec, out / "misfit.pgm")
print(f"with misfit the lobe ratio is {spec.anisotropy:.2f}; the SAXS pattern is a cross")
print(f"images in {out}/")
