"""Sharp-interface results: inclusion energies, rafting and LSW coarsening.

Run:  python3 demos/sharp_interface.py
"""

import numpy as np

from misfit.analysis import GrowthSeries, growth_exponent
from misfit.core import IsotropicModuli
from misfit.sharp import (
    PhasePair,
    PrecipitateEnsemble,
    critical_radius,
    lsw_evolve,
    plate_energy,
    raft_orientation,
    sphere_energy,
    stability_isotropic,
)

# %% Plate or sphere?
# With equal moduli the two shapes cost the same.  A soft precipitate
# (G_a < G_b) prefers plates, a hard one prefers spheres.
for Ga in (0.5, 1.0, 2.0):
    p = PhasePair(K_a=1.0, G_a=Ga, K_b=1.0, G_b=1.0, q_a=0.01, q_b=0.0)
    e_p, e_s = plate_energy(p, 0.2), sphere_energy(p, 0.2)
    shape = "plate" if e_p < e_s else "sphere" if e_s < e_p else "either"
    print(f"G_a = {Ga:3.1f}: plate {e_p:.3e}  sphere {e_s:.3e}  -> {shape}")

# %% Rafting under uniaxial load
for t in (+0.01, -0.01):
    for dq in (+0.01, -0.01):
        o = raft_orientation(t, dq, dG=-0.5)
        print(f"load {t:+.2f}, misfit difference {dq:+.2f}, soft precipitate: {o.name}")

# %% Ostwald ripening
rng = np.random.default_rng(0)
p = PhasePair()
tr = lsw_evolve(PrecipitateEnsemble(rng.uniform(0.5, 1.5, 5000)), p, 5.0, 200)
for i in range(0, len(tr.t), 40):
    print(f"t = {tr.t[i]:7.1f}   <R> = {tr.mean_radius[i]:.3f}   N = {tr.count[i]}")
expo, _, err = growth_exponent(GrowthSeries(tr.t[1:], tr.mean_radius[1:]).final_decade())
print(f"<R> ~ t^{expo:.3f} (+- {err:.3f}); total volume drift {tr.max_volume_drift:.1e}")

# misfit raises the critical radius at a given supersaturation
for q in (0.0, 0.01, 0.02):
    pq = PhasePair(q_a=q, sigma=0.05)
    print(f"misfit {q:.2f}: R* = {critical_radius(0.12, pq):.3f}")

# %% Coherent spinodal
m = IsotropicModuli(1.0, 1.0)
for f2 in (-0.3, -0.16, -0.05):
    print(f"f'' = {f2:+.2f}: stable against coherent decomposition: {stability_isotropic(f2, 0.2, m)}")
