"""
Linear decay from the exact propagator
======================================

Radial quadrature of the Fourier multipliers gives L^2 norms of the linear
solution at any time; a log-log fit recovers the predicted rate.
"""

import numpy as np

from sigmadamp.analysis import fit_decay, predicted_linear_exponent, linear_norm_series
from sigmadamp.model import ModelParams
from sigmadamp.propagator import gaussian_data, kernels, radial_norm

# velocity data only, Gaussian spectrum, three space dimensions
params = ModelParams(1, "1/2", 3)
data = gaussian_data(c0=0.0, c1=1.0)

# the multipliers at a handful of frequencies
rho = np.array([1e-3, 0.1, 1.0, 10.0])
K = kernels(5.0, rho, params)
print("K1(t=5):", np.round(K.k1.real, 6))

# norms along a log-spaced set of times
times = np.geomspace(1e2, 1e4, 16)
norms = linear_norm_series(params, data, 0, 0, times)
for t, v in zip(times[::5], norms[::5]):
    print(f"t={t:9.1f}  ||w(t)|| = {v:.6e}")

fit = fit_decay(times, norms)
pred, _ = predicted_linear_exponent(params, data, 0, 0, 1)
print(f"fitted slope {fit.slope:.4f}, predicted {float(pred):.4f}, r^2 {fit.r_squared:.6f}")

# a single norm directly
print("||d_t w(100)|| =", radial_norm(data, 100.0, 1, 0.0, params))
