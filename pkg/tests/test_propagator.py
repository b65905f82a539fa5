import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigmadamp.errors import GridMismatch
from sigmadamp.model import ModelParams
from sigmadamp.propagator import (
    QuadratureSpec,
    char_roots,
    evolve_linear,
    gaussian_data,
    kernels,
    multiplier_sup,
    radial_norm,
)
from sigmadamp.spectral import SpectralField, SpectralGrid, profile, sobolev_norm

HALF = ModelParams(1, "1/2", 3)
BELOW = ModelParams(1, "1/4", 2)
ABOVE = ModelParams(1, "3/4", 3)

# closed forms at delta = sigma/2, |xi| = 1, t = 1, evaluated with mpmath (30 digits)
K1_HALF = 0.533507195114692982758642688302
K0_HALF = 0.659700153391701661973563002891


def test_roots_half_at_unit_frequency():
    r = char_roots(1.0, ModelParams(2, 1, 1))
    assert r.lambda1 == pytest.approx(complex(-0.5, np.sqrt(3) / 2), abs=1e-15)
    assert r.lambda2 == pytest.approx(complex(-0.5, -np.sqrt(3) / 2), abs=1e-15)
    assert not r.degenerate


def test_roots_at_zero():
    r = char_roots(0.0, BELOW)
    assert r.lambda1 == 0 and r.lambda2 == 0 and r.degenerate


def test_roots_degenerate_radius():
    r = char_roots(0.25, BELOW)
    assert r.degenerate
    assert r.lambda1 == pytest.approx(-0.25) and r.lambda2 == pytest.approx(-0.25)


@pytest.mark.parametrize("params", [HALF, BELOW, ABOVE, ModelParams(3, "1/3", 1)])
def test_vieta_and_stability(params):
    rho = np.concatenate([[0.0], np.geomspace(1e-8, 1e3, 2000), [0.25, 0.25 * (1 + 1e-9)]])
    r = char_roots(rho, params)
    b = rho ** (2 * float(params.delta))
    c = rho ** (2 * float(params.sigma))
    s = r.lambda1 + r.lambda2
    prod = r.lambda1 * r.lambda2
    assert np.all(np.abs(s + b) <= 1e-12 * np.maximum(np.abs(r.lambda1) + np.abs(r.lambda2), 1e-300))
    assert np.all(np.abs(prod - c) <= 1e-12 * np.maximum(c, 1e-300))
    assert np.all(r.lambda1.real <= 0) and np.all(r.lambda2.real <= 0)


def test_kernels_at_zero_frequency():
    for t in (0.0, 0.3, 7.0):
        K = kernels(t, 0.0, BELOW)
        assert (K.k0, K.k1, K.dt_k0, K.dt_k1) == (1, t, 0, 1)


def test_kernels_initial_conditions():
    rho = np.geomspace(1e-4, 1e2, 50)
    K = kernels(0.0, rho, ABOVE)
    assert np.all(K.k0 == 1) and np.all(K.k1 == 0) and np.all(K.dt_k0 == 0) and np.all(K.dt_k1 == 1)


def test_half_regime_closed_forms():
    K = kernels(1.0, 1.0, ModelParams(1, "1/2", 1))
    assert K.k1.real == pytest.approx(K1_HALF, rel=1e-13)
    assert K.k0.real == pytest.approx(K0_HALF, rel=1e-13)


def test_half_regime_closed_form_grid():
    sigma = 1.5
    params = ModelParams("3/2", "3/4", 1)
    t = np.geomspace(1e-2, 50, 40)[:, None]
    rho = np.geomspace(1e-2, 20, 50)[None, :]
    K = kernels(t, rho, params)
    w = np.sqrt(3) / 2 * rho**sigma
    e = np.exp(-0.5 * rho**sigma * t)
    k1 = e * np.sin(w * t) / w
    k0 = e * (np.cos(w * t) + np.sin(w * t) / np.sqrt(3))
    live = (e > 1e-200) & (rho > 0) & (t > 0)
    e = np.where(live, e, 1.0)
    # errors measured against the size of the terms entering both forms
    assert np.max((np.abs(K.k1 - k1) / (e * t))[live]) < 1e-12
    assert np.max((np.abs(K.k0 - k0) / e)[live]) < 1e-12


def test_degenerate_straddle():
    # mpmath evaluation of the generic formula at rho = 1/4 -+ 1e-9, t = 1
    ref = {0.25 - 1e-9: (0.77880078349325529278, 0.97350097904206878887),
           0.25 + 1e-9: (0.77880078264955444446, 0.97350097863644338102)}
    for rho, (k1, k0) in ref.items():
        K = kernels(1.0, rho, BELOW)
        assert K.k1.real == pytest.approx(k1, rel=1e-8)
        assert K.k0.real == pytest.approx(k0, rel=1e-8)
    K = kernels(1.0, 0.25, BELOW)
    assert K.k1.real == pytest.approx(np.exp(-0.25), rel=1e-14)
    assert K.k0.real == pytest.approx(1.25 * np.exp(-0.25), rel=1e-14)


def test_branch_continuity():
    # straddling the degenerate radius: the value at r_d is the midpoint of
    # its neighbours up to the second-order term, and tiny straddles agree
    for params in (BELOW, ABOVE):
        r_d = 4.0 ** (1.0 / (4 * float(params.delta) - 2 * float(params.sigma)))
        for t in (0.5, 3.0, 40.0):
            mid = kernels(t, r_d, params)
            for dr in (1e-8, 1e-10, 1e-12):
                a = kernels(t, r_d * (1 - dr), params)
                b = kernels(t, r_d * (1 + dr), params)
                for name in ("k0", "k1", "dt_k0", "dt_k1"):
                    x, y, m = getattr(a, name), getattr(b, name), getattr(mid, name)
                    assert abs(0.5 * (x + y) - m) <= 1e-8 * abs(m)
                    if dr <= 1e-12:
                        assert abs(x - y) <= 1e-8 * abs(m)


def _relation_sample(params, seed=0):
    rng = np.random.default_rng(seed)
    t = 10 ** rng.uniform(-3, 3, 10_000)
    rho = 10 ** rng.uniform(-4, 2, 10_000)
    r_d = 4.0 ** (1.0 / (4 * float(params.delta) - 2 * float(params.sigma))) if params.delta * 2 != params.sigma else 1.0
    rho[:200] = r_d * (1 + rng.uniform(-1e-9, 1e-9, 200))
    return t, rho


@pytest.mark.parametrize("params", [HALF, BELOW, ABOVE])
def test_derivative_relations(params):
    t, rho = _relation_sample(params)
    r = char_roots(rho, params)
    K = kernels(t, rho, params)
    prod = r.lambda1 * r.lambda2
    s = r.lambda1 + r.lambda2
    lhs0, rhs0 = K.dt_k0, -prod * K.k1
    assert np.all(np.abs(lhs0 - rhs0) <= 1e-10 * np.maximum(np.abs(rhs0), 1e-300))
    rhs1 = K.k0 + s * K.k1
    scale = np.abs(K.k0) + np.abs(s * K.k1) + 1e-300
    assert np.all(np.abs(K.dt_k1 - rhs1) <= 1e-10 * scale)


@pytest.mark.parametrize("params", [HALF, BELOW, ABOVE])
def test_finite_difference_derivatives(params):
    t = np.geomspace(0.1, 20, 30)[:, None]
    rho = np.geomspace(0.05, 5, 30)[None, :]
    h = 1e-6
    Kp, Km, K = kernels(t + h, rho, params), kernels(t - h, rho, params), kernels(t, rho, params)
    for k, dk in (("k0", "dt_k0"), ("k1", "dt_k1")):
        fd = (getattr(Kp, k) - getattr(Km, k)) / (2 * h)
        exact = getattr(K, dk)
        scale = np.maximum(np.abs(exact), np.abs(getattr(K, k)) * rho ** 1.0 + 1e-3 * np.exp(-0.0 * t))
        assert np.max(np.abs(fd - exact) / scale) < 1e-5


@pytest.mark.parametrize("params", [HALF, BELOW, ABOVE, ModelParams(2, "1/2", 1)])
def test_uniform_boundedness(params):
    t = np.geomspace(1e-3, 1e4, 200)[:, None]
    rho = np.geomspace(1e-6, 1e3, 400)[None, :]
    K = kernels(t, rho, params)
    assert np.max(np.abs(K.k0)) <= 10
    assert np.max(rho ** float(params.sigma) * np.abs(K.k1)) <= 10


def test_evolve_linear_t0_and_mismatch():
    g = SpectralGrid(1, 32, 5.0)
    a, b = profile(g, "gaussian"), profile(g, "bump", 0.3, 2.0)
    w, wt = evolve_linear(a, b, 0.0, HALF)
    assert np.array_equal(w.values, a.values) and np.array_equal(wt.values, b.values)
    with pytest.raises(GridMismatch):
        evolve_linear(a, SpectralField.zeros(SpectralGrid(1, 32, 6.0)), 1.0, HALF)


def test_single_mode_norm():
    params = ModelParams(2, 1, 1)
    g = SpectralGrid(1, 32, np.pi)  # xi_k = k
    w0 = SpectralField.from_real(g, np.cos(g.x))
    w, _ = evolve_linear(w0, SpectralField.zeros(g), 2.5, params)
    k0 = kernels(2.5, 1.0, params).k0.real
    assert sobolev_norm(w) == pytest.approx(abs(k0) * sobolev_norm(w0), rel=1e-13)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.01, 20), st.floats(0.01, 20))
def test_semigroup(seed, t1, t2):
    params = ModelParams(1, "1/4", 1)
    g = SpectralGrid(1, 64, 8.0)
    rng = np.random.default_rng(seed)
    w0 = SpectralField.from_real(g, rng.standard_normal(g.shape))
    w1 = SpectralField.from_real(g, rng.standard_normal(g.shape))
    a, at = evolve_linear(w0, w1, t1 + t2, params)
    b, bt = evolve_linear(*evolve_linear(w0, w1, t1, params), t2, params)
    assert np.max(np.abs(a.values - b.values)) <= 1e-9 * max(np.max(np.abs(a.values)), 1e-12)
    assert np.max(np.abs(at.values - bt.values)) <= 1e-9 * max(np.max(np.abs(at.values)), 1e-12)


def test_radial_norm_t0_gaussian():
    # ||w0||^2 = (1/pi) int_0^inf e^{-2 rho^2} drho = 1 / sqrt(8 pi) in one dimension
    val = radial_norm(gaussian_data(1.0, 0.0), 0.0, 0, 0, ModelParams(1, "1/2", 1))
    assert val == pytest.approx((8 * np.pi) ** -0.25, rel=1e-9)


@pytest.mark.parametrize("params", [ModelParams(3, 1, 1), ModelParams(2, 1, 1)])
def test_radial_norm_matches_grid(params):
    # analytic symbols keep the periodic surrogate spectrally accurate
    g = SpectralGrid(1, 2048, 200.0)
    # w0_hat = exp(-rho^2)  <=>  w0(x) = exp(-x^2/4) / (2 sqrt(pi))
    w0 = SpectralField.from_real(g, np.exp(-g.x**2 / 4) / (2 * np.sqrt(np.pi)))
    for t in (0.5, 5.0, 30.0):
        w, wt = evolve_linear(w0, SpectralField.zeros(g), t, params)
        assert radial_norm(gaussian_data(1.0, 0.0), t, 0, 0, params) == pytest.approx(sobolev_norm(w), rel=1e-7)
        assert radial_norm(gaussian_data(1.0, 0.0), t, 1, 0.5, params) == pytest.approx(sobolev_norm(wt, 0.5), rel=1e-7)


def test_radial_norm_slope_half_regime():
    data = gaussian_data(0.0, 1.0)
    ts = np.geomspace(1e2, 1e4, 12)
    y = [radial_norm(data, t, 0, 0, HALF) for t in ts]
    slope = np.polyfit(np.log1p(ts), np.log(y), 1)[0]
    assert abs(slope + 0.5) <= 0.05


def test_radial_norm_quadrature_failure():
    from sigmadamp.errors import QuadratureFailure

    with pytest.raises(QuadratureFailure):
        radial_norm(gaussian_data(0.0, 1.0), 1e3, 0, 0, ABOVE, QuadratureSpec(rel_tol=1e-13, limit=1))


def test_multiplier_sup_velocity_half():
    # at rho -> 0 the velocity multiplier tends to t
    assert multiplier_sup(50.0, 0, 0, 1, HALF) == pytest.approx(50.0, rel=1e-6)
