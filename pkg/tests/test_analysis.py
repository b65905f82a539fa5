import json
import math
from fractions import Fraction as F

import numpy as np
import pytest

from sigmadamp import analysis
from sigmadamp.analysis import (
    fit_decay,
    gn_check,
    kernel_lr_scaling,
    small_freq_integral,
    small_freq_integral_value,
    verify_linear_decay,
)
from sigmadamp.errors import DomainError, InsufficientData, NonPositiveNorm, ThetaOutOfRange
from sigmadamp.model import ModelParams
from sigmadamp.propagator import gaussian_data
from sigmadamp.spectral import SpectralGrid, profile


def test_fit_exact_power_law():
    t = np.geomspace(1e2, 1e4, 20)
    fit = fit_decay(t, (1 + t) ** -1.5)
    assert abs(fit.slope + 1.5) < 1e-9 and fit.r_squared == pytest.approx(1.0)
    assert fit.n_points == 20 and fit.window == (1e2, 1e4)


def test_fit_constant():
    t = np.geomspace(1e2, 1e4, 10)
    fit = fit_decay(t, np.full(10, 3.0))
    assert abs(fit.slope) < 1e-12 and fit.r_squared == 1.0


def test_fit_perturbed():
    t = np.geomspace(1e2, 1e4, 200)
    fit = fit_decay(t, (1 + t) ** -0.5 * (1 + 0.01 * np.sin(t)))
    assert abs(fit.slope + 0.5) <= 0.01


def test_fit_noisy():
    rng = np.random.default_rng(1)
    t = np.geomspace(1e2, 1e4, 200)
    fit = fit_decay(t, (1 + t) ** -0.8 * (1 + 0.05 * rng.standard_normal(200)))
    assert abs(fit.slope + 0.8) <= 1e-2


def test_fit_errors():
    t = np.geomspace(1e2, 1e4, 7)
    with pytest.raises(InsufficientData):
        fit_decay(t, np.ones(7))
    t = np.geomspace(1e2, 1e4, 10)
    with pytest.raises(NonPositiveNorm):
        fit_decay(t, np.r_[np.ones(9), 0.0])


def test_verify_linear_half_n3():
    fit, pred, ok = verify_linear_decay(ModelParams(1, "1/2", 3), gaussian_data(0.0, 1.0), 0, 0)
    assert pred.exponent_data1 == F(-1, 2) and ok
    assert abs(fit.slope + 0.5) <= 0.05


def test_verify_linear_below_half():
    fit, pred, ok = verify_linear_decay(ModelParams(1, "1/4", 2), gaussian_data(1.0, 0.0), 0, 0)
    assert pred.exponent_data0 == F(-2, 3) and ok


def test_verify_linear_l2_branch():
    fit, pred, ok = verify_linear_decay(ModelParams(1, "1/2", 3), gaussian_data(0.0, 1.0), 0, 0, m_choice=2)
    assert ok and abs(fit.slope - 1) <= 0.05


def test_ci_matrix_coverage():
    cases = analysis.ci_matrix()
    assert len(cases) >= 12
    assert {c.params().delta * 2 - c.params().sigma > 0 for c in cases} == {True, False}
    assert {c.j for c in cases} == {0, 1} and {c.m for c in cases} == {1, 2} and {c.n for c in cases} == {1, 2, 3, 4}
    assert len({c.case_id for c in cases}) == len(cases)


def test_small_freq_examples():
    assert small_freq_integral(0, 2, 1, 1).passed
    assert small_freq_integral(-0.5, 1, 1, 1).passed
    # (1+t) form: bounded by the t = 0 value on (0, 1]
    v0 = small_freq_integral_value(0, 2, 1, 1, 0.0)
    assert v0 == pytest.approx(2.0)
    assert max(small_freq_integral_value(0, 2, 1, 1, t) for t in np.linspace(0.01, 1, 20)) <= v0
    with pytest.raises(DomainError):
        small_freq_integral_value(-1, 2, 1, 1, 1.0)


def test_small_freq_gamma_closed_form():
    # int_{-1}^{1} |x|^{-1/2} e^{-|x| t} dx -> 2 Gamma(1/2) t^{-1/2}
    t = 1e5
    assert small_freq_integral_value(-0.5, 1, 1, 1, t) == pytest.approx(2 * math.sqrt(math.pi / t), rel=1e-8)


def test_kernel_lr_r2_plancherel():
    r = kernel_lr_scaling(0, 2, 2, 1, 1, 1, relation="abs")
    assert r.passed and abs(r.measured + 0.25) <= 0.05


def test_kernel_lr_sup_exact():
    r = kernel_lr_scaling(0, 1, math.inf, 1, 0, 2, tol=1e-3, relation="abs")
    assert r.passed and abs(r.measured + 2) <= 1e-3
    # n = 1, alpha = 2: sup = (2 pi)^{-1} sqrt(pi / t)
    val = analysis.kernel_lr_value(0, 2, math.inf, 1, 0, 1, 4.0)
    assert val == pytest.approx(math.sqrt(math.pi / 4) / (2 * math.pi), rel=1e-9)


def test_kernel_lr_sin_upper():
    r = kernel_lr_scaling(1, 2, 2, 1, 1, 3, variant="sin")
    assert r.relation == "upper" and r.passed and r.measured <= -1 / 2 - 3 / 4 + 0.05


def test_kernel_lr_grid_r4():
    assert kernel_lr_scaling(0, 2, 4, 1, 1, 1).passed


def test_kernel_lr_grid_matches_quadrature():
    q = analysis.kernel_lr_value(0, 2, 2, 1, 1, 1, 3.0)
    g = analysis.kernel_lr_value(0, 2, 2.0000001, 1, 1, 1, 3.0)
    assert g == pytest.approx(q, rel=1e-5)


def test_gn_endpoints_and_single_mode():
    assert gn_check(2, 2, 2, 0, 1.5, 1, samples=50) == 1.0
    assert gn_check(2, 2, 2, 1.5, 1.5, 2, samples=50) == 1.0
    g = SpectralGrid(1, 32, math.pi)
    u = profile(g, "single-mode", mode=2)
    assert analysis.gn_ratio(u, 0.75, 1.5, 0.5) == pytest.approx(1.0, rel=1e-14)


def test_gn_random_bound():
    assert gn_check(2, 2, 2, 0.6, 2.0, 2, samples=200, seed=3) <= 1 + 1e-9


def test_gn_errors():
    with pytest.raises(ThetaOutOfRange):
        gn_check(2, 2, 2, 2.0, 1.0, 1)
    with pytest.raises(DomainError):
        gn_check(4, 2, 2, 0.5, 1.0, 1)


def test_lifespan_sweep_monotone():
    P = ModelParams(2, 1, 1, p=2, q=2)
    g = SpectralGrid(1, 256, 50.0)
    z = profile(g, "zero")
    b = profile(g, "bump", 1.0, 1.0)
    curve = analysis.lifespan_sweep(P, (z, b, z, b), np.geomspace(0.1, 1, 5))
    assert curve.predicted_slope == -0.5
    assert curve.inversions() == 0
    with pytest.raises(ValueError):
        analysis.lifespan_sweep(P, (z, b, z, b), [0.1, 0.2, 0.3, 0.4, 0.5])


def test_lifespan_no_blowup():
    from sigmadamp.errors import NoBlowupObserved

    P = ModelParams(2, 1, 1, p=2, q=2)
    g = SpectralGrid(1, 64, 20.0)
    z = profile(g, "zero")
    b = profile(g, "bump", 1.0, 1.0)
    with pytest.raises(NoBlowupObserved):
        analysis.lifespan_sweep(P, (z, b, z, b), np.geomspace(0.01, 0.1, 5), sim=analysis.SimConfig(horizon=1.0))


def test_report_files(tmp_path):
    res = [small_freq_integral(0, 2, 1, 1)]
    analysis.write_report(tmp_path / "r.json", res)
    analysis.write_series_csv(tmp_path / "s.csv", res)
    data = json.loads((tmp_path / "r.json").read_text())
    assert set(data[0]) == {"case_id", "predicted", "measured", "tolerance", "pass"}
    assert (tmp_path / "s.csv").read_text().startswith("case_id,t,value")
