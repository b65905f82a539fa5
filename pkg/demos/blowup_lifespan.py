"""
Blow-up times against data size
===============================

Pseudospectral runs of the coupled system in one space dimension.  Data of
size eps blow up at a detected time that shrinks like a power of eps.
"""

import numpy as np

from sigmadamp.analysis import SimConfig, fit_decay, lifespan_sweep
from sigmadamp.model import ModelParams, lifespan_exponent
from sigmadamp.semilinear import SystemState, integrate
from sigmadamp.spectral import SpectralGrid, profile

params = ModelParams(2, 1, 1, p=2, q=2)
grid = SpectralGrid(1, 1024, 100.0)
zero = profile(grid, "zero")
bump = profile(grid, "bump", 1.0, 1.0)

# one run: positive velocity bumps, watch the monitor cross the threshold
state = SystemState(0.0, zero, 0.3 * bump, zero, 0.3 * bump)
record, report = integrate(state, "UU", params, 1e4, 0.05, blowup_threshold=1e6)
print(report.as_dict())

# a decade of eps values
eps = np.geomspace(0.1, 1.0, 5)
curve = lifespan_sweep(params, (zero, bump, zero, bump), eps, sim=SimConfig(blowup_threshold=1e6))
for e, t in zip(curve.eps_values, curve.t_detect):
    print(f"eps={e:.3f}  T={t:.3f}")
print("fitted", round(curve.fitted_slope, 4), "predicted", lifespan_exponent(params))

# small data inside the global existence region: norms keep decaying
calm = ModelParams(1, "1/8", 1, p=4, q=4)
g = SpectralGrid(1, 512, 200.0)
z = profile(g, "zero")
rec, rep = integrate(SystemState(0.0, profile(g, "bump", 1e-3, 5.0), z, profile(g, "bump", 1e-3, 4.0), z),
                     "UU", calm, 1e3, 0.1)
t, v = rec.series("u:j0:a0")
print("blew up:", rep.blew_up, " slope of ||u|| on [1e2, 1e3]:", round(fit_decay(t, v, (1e2, 1e3)).slope, 3))
