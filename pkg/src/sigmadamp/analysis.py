"""Experiment harness: decay-slope fits, linear decay checks against the
predicted exponents, lifespan sweeps and numerical checks of the auxiliary
kernel estimates."""

from __future__ import annotations

import csv
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import integrate as spi

from .errors import (
    DomainError,
    InsufficientData,
    NoBlowupObserved,
    NonPositiveNorm,
    QuadratureFailure,
    ThetaOutOfRange,
)
from .model import Corollary, ModelParams, decay_prediction, derive_constants, lifespan_exponent
from .propagator import QuadratureSpec, RadialData, gaussian_data, multiplier_sup, radial_norm, sphere_area
from .semilinear import CouplingKind, SystemState, integrate
from .spectral import SpectralField, SpectralGrid, frac_symbol, lr_norm, sobolev_norm

MIN_FIT_POINTS = 8


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    window: tuple[float, float]
    n_points: int


def fit_decay(times, norms, window=(1e2, 1e4), shift: float = 1.0) -> SlopeFit:
    """Least squares of log(norm) against log(shift + t) inside ``window``.

    ``shift = 1`` gives the (1 + t) abscissa of the decay estimates; checks of
    statements made directly in t use ``shift = 0``.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(norms, dtype=float)
    lo, hi = window
    inside = (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
    t, y = t[inside], y[inside]
    if t.size < MIN_FIT_POINTS:
        raise InsufficientData(f"{t.size} samples inside window [{lo:g}, {hi:g}], need {MIN_FIT_POINTS}")
    if np.any(~(y > 0)):
        raise NonPositiveNorm("norms must be positive for a log-log fit")
    x = np.log(shift + t)
    ly = np.log(y)
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * x + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    flat = ss_tot <= 1e-24 * max(1.0, float(np.sum(ly**2)))
    r2 = 1.0 if flat else max(0.0, min(1.0, 1.0 - float(np.sum(resid**2)) / ss_tot))
    return SlopeFit(float(slope), float(intercept), r2, (float(lo), float(hi)), int(t.size))


# --------------------------------------------------------------------------
# verification results


@dataclass
class CheckResult:
    case_id: str
    predicted: float
    measured: float
    tolerance: float
    passed: bool
    relation: str = "abs"  # abs: |measured - predicted| <= tol; upper: measured <= predicted + tol; rel: relative
    series: list = field(default_factory=list)  # (t, value)
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "predicted": self.predicted,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
        }


def judge(measured: float, predicted: float, tol: float, relation: str = "abs") -> bool:
    if not math.isfinite(measured):
        return False
    if relation == "abs":
        return abs(measured - predicted) <= tol
    if relation == "upper":
        return measured <= predicted + tol
    if relation == "rel":
        return abs(measured - predicted) <= tol * abs(predicted)
    raise ValueError(f"unknown relation {relation!r}")


def write_report(path: str | Path, results) -> None:
    """JSON array of {case_id, predicted, measured, tolerance, pass}."""
    Path(path).write_text(json.dumps([r.as_dict() for r in results], indent=2) + "\n", encoding="utf-8")


def write_series_csv(path: str | Path, results) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["case_id", "t", "value"])
        for r in results:
            for t, v in r.series:
                w.writerow([r.case_id, repr(float(t)), repr(float(v))])


# --------------------------------------------------------------------------
# linear decay


def _active_data(data: RadialData) -> list[int]:
    active = [i for i, f in enumerate((data.w0_hat, data.w1_hat)) if f is not None]
    if not active:
        raise ValueError("data spec has no nonzero datum")
    return active


def linear_norm_series(params, data: RadialData, j, a, times, m_choice=1, quadrature=QuadratureSpec()):
    """Norm samples of the linear solution.

    m = 1: the L^2 norm of the solution from ``data`` by radial quadrature.
    m = 2: the operator norm over low frequencies of the solution map of the
    active datum (largest one when both are present), the quantity bounded by
    the L^2 - L^2 estimate.
    """
    if m_choice == 1:
        return np.array([radial_norm(data, t, j, a, params, quadrature) for t in times])
    if m_choice == 2:
        act = _active_data(data)
        return np.array([max(multiplier_sup(t, j, a, i, params) for i in act) for t in times])
    raise DomainError(f"simulated decay supports m in {{1, 2}}, got {m_choice}")


def predicted_linear_exponent(params: ModelParams, data: RadialData, j, a, m_choice=1):
    """Exponent of the estimate matching the data, with the corollary it comes from."""
    dc = derive_constants(params)
    if m_choice == 2:
        cor = Corollary.C22
    else:
        cor = Corollary.C22 if params.n > dc.m0 * dc.k_minus else Corollary.C21
    pred = decay_prediction(params, j, a, corollary=cor, m=m_choice)
    exps = [(pred.exponent_data0, pred.exponent_data1)[i] for i in _active_data(data)]
    return max(exps), pred


def verify_linear_decay(
    params: ModelParams,
    data_spec: RadialData,
    j: int,
    a,
    m_choice=1,
    window=(1e2, 1e4),
    tol: float = 0.05,
    points: int = 16,
    quadrature: QuadratureSpec = QuadratureSpec(),
):
    """Fitted slope vs predicted exponent; returns ``(SlopeFit, DecayPrediction, pass)``."""
    predicted, pred = predicted_linear_exponent(params, data_spec, j, a, m_choice)
    times = np.geomspace(window[0], window[1], points)
    norms = linear_norm_series(params, data_spec, j, a, times, m_choice, quadrature)
    fit = fit_decay(times, norms, window)
    return fit, pred, judge(fit.slope, float(predicted), tol)


@dataclass(frozen=True)
class LinearCase:
    case_id: str
    sigma: str
    delta: str
    n: int
    datum: int  # 0: displacement, 1: velocity
    j: int
    a: str
    m: int = 1

    def params(self) -> ModelParams:
        return ModelParams(self.sigma, self.delta, self.n)

    def data(self) -> RadialData:
        return gaussian_data(1.0 if self.datum == 0 else 0.0, 1.0 if self.datum == 1 else 0.0)


def ci_matrix() -> list[LinearCase]:
    """Linear decay configurations over the three damping regimes."""
    rows = [
        # sigma, delta, n, datum, j, a, m
        ("1", "1/2", 3, 1, 0, "0", 1),
        ("1", "1/2", 3, 1, 0, "1", 1),
        ("1", "1/2", 1, 0, 1, "0", 1),
        ("1", "1/2", 2, 0, 0, "1", 1),
        ("1", "1/4", 2, 0, 0, "0", 1),
        ("1", "1/4", 2, 1, 0, "0", 1),
        ("1", "1/4", 3, 0, 1, "1", 1),
        ("1", "1/4", 4, 1, 1, "0", 1),
        ("1", "3/4", 3, 0, 0, "0", 1),
        ("1", "3/4", 3, 1, 0, "0", 1),
        ("1", "3/4", 4, 1, 1, "3/2", 1),
        ("1", "3/4", 4, 0, 1, "0", 1),
        ("1", "1/2", 3, 1, 0, "0", 2),
        ("1", "1/4", 3, 0, 0, "1", 2),
        ("1", "3/4", 3, 0, 1, "0", 2),
        ("1", "1/2", 3, 1, 1, "1", 2),
    ]
    out = []
    for s, d, n, datum, j, a, m in rows:
        cid = f"linear:sigma={s},delta={d},n={n},w{datum},j={j},a={a},m={m}"
        out.append(LinearCase(cid, s, d, n, datum, j, a, m))
    return out


def run_linear_case(case: LinearCase, window=(1e2, 1e4), tol=0.05, points=16) -> CheckResult:
    params = case.params()
    data = case.data()
    a = Fraction(case.a)
    predicted, _ = predicted_linear_exponent(params, data, case.j, a, case.m)
    times = np.geomspace(window[0], window[1], points)
    norms = linear_norm_series(params, data, case.j, a, times, case.m)
    fit = fit_decay(times, norms, window)
    return CheckResult(
        case.case_id,
        float(predicted),
        fit.slope,
        tol,
        judge(fit.slope, float(predicted), tol),
        series=list(zip(times.tolist(), norms.tolist())),
        detail={"r_squared": fit.r_squared, "regime": derive_constants(params).regime.value},
    )


def run_cases(fn, cases, workers: int = 1):
    """Map ``fn`` over independent cases, optionally in worker processes; order is kept."""
    if workers <= 1:
        return [fn(c) for c in cases]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, cases))


# --------------------------------------------------------------------------
# lifespan


@dataclass(frozen=True)
class LifespanCurve:
    eps_values: tuple[float, ...]
    t_detect: tuple[float, ...]
    fitted_slope: float
    predicted_slope: float
    tolerance: float = 0.25

    @property
    def passed(self) -> bool:
        return judge(self.fitted_slope, self.predicted_slope, self.tolerance, "rel")

    def inversions(self) -> int:
        """Number of adjacent pairs where t_detect fails to decrease with eps."""
        t = self.t_detect
        return sum(1 for x, y in zip(t[:-1], t[1:]) if y >= x)


@dataclass(frozen=True)
class SimConfig:
    horizon: float = 1e4
    dt: float = 0.05
    blowup_threshold: float | None = 1e6
    samples: int = 40
    dt_min: float = 1e-6


def _lifespan_run(args):
    fields, e, kind, params, cfg = args
    u0, u1, v0, v1 = (f * e for f in fields)
    rec, rep = integrate(
        SystemState(0.0, u0, u1, v0, v1),
        kind,
        params,
        cfg.horizon,
        cfg.dt,
        blowup_threshold=cfg.blowup_threshold,
        samples=cfg.samples,
        dt_min=cfg.dt_min,
    )
    return rep


def lifespan_sweep(
    params: ModelParams,
    base_data,
    eps_values,
    kind=CouplingKind.UU,
    sim: SimConfig = SimConfig(),
    tol: float = 0.25,
    workers: int = 1,
) -> LifespanCurve:
    """Blow-up times for data ``eps * base_data``; slope of log T against log eps.

    ``base_data`` is the tuple ``(u0, u1, v0, v1)`` of fields.
    """
    predicted = float(lifespan_exponent(params))
    eps = np.sort(np.asarray(eps_values, dtype=float))
    if eps.size < 5 or eps[-1] / eps[0] < 10 * (1 - 1e-12):
        raise ValueError("eps_values need at least 5 points spanning one decade")
    kind = CouplingKind.parse(kind)
    jobs = [(tuple(base_data), float(e), kind, params, sim) for e in eps]
    reports = run_cases(_lifespan_run, jobs, workers)
    missing = [float(e) for e, r in zip(eps, reports) if not r.blew_up]
    if missing:
        raise NoBlowupObserved(f"no blow-up before horizon {sim.horizon:g} for eps = {missing}")
    t = np.array([r.t_detect for r in reports], dtype=float)
    slope = float(np.polyfit(np.log(eps), np.log(t), 1)[0])
    return LifespanCurve(tuple(eps.tolist()), tuple(t.tolist()), slope, predicted, tol)


# --------------------------------------------------------------------------
# auxiliary kernel estimates


def _log_quad(f, lo, hi, breaks=(), rel_tol=1e-10, limit=400):
    """int_lo^hi f(rho) drho, integrated in log rho with panels at ``breaks``."""
    pts = sorted({lo, hi, *[b for b in breaks if lo < b < hi]})
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", spi.IntegrationWarning)
        for r0, r1 in zip(pts[:-1], pts[1:]):
            try:
                val, _ = spi.quad(
                    lambda u: math.exp(u) * f(math.exp(u)), math.log(r0), math.log(r1), epsabs=0.0, epsrel=rel_tol, limit=limit
                )
            except spi.IntegrationWarning as exc:
                raise QuadratureFailure(str(exc)) from exc
            total += val
    return total


def small_freq_integral_value(beta, alpha, c, n, t) -> float:
    """int_{|xi| <= 1} |xi|^beta exp(-c |xi|^alpha t) dxi."""
    if not n + beta > 0:
        raise DomainError("need n + beta > 0")
    depth = 1e-16 ** (1.0 / (n + beta))
    scale = t ** (-1.0 / alpha) if t > 0 else 1.0
    lo = depth * min(1.0, scale)
    core = _log_quad(lambda r: r ** (n - 1 + beta) * math.exp(-c * r**alpha * t), lo, 1.0, breaks=(scale,))
    return sphere_area(n) * core


def small_freq_integral(beta, alpha, c, n, t_samples=None, window=(1e2, 1e5), tol=0.02) -> CheckResult:
    if t_samples is None:
        t_samples = np.geomspace(window[0], window[1], 16)
    t = np.asarray(t_samples, dtype=float)
    vals = np.array([small_freq_integral_value(beta, alpha, c, n, tt) for tt in t])
    fit = fit_decay(t, vals, window)
    predicted = -(n + beta) / alpha
    return CheckResult(
        f"small_freq/beta{beta:g}-alpha{alpha:g}-c{c:g}-n{n}",
        predicted,
        fit.slope,
        tol,
        judge(fit.slope, predicted, tol),
        relation="abs",
        series=list(zip(t.tolist(), vals.tolist())),
    )


def kernel_lr_value(a, alpha, r, c1, c2, n, t, variant="cos", grid_points=4096, half_length=400.0) -> float:
    """L^r norm of the inverse transform of |xi|^a e^{-c1 |xi|^alpha t} cos/sin(c2 |xi|^alpha t).

    r = 2 uses Plancherel as a radial integral; r = inf with c2 = 0 uses the
    value at the origin (the transform of a positive function peaks there);
    other cases are sampled on a periodic 1-D or 2-D grid.
    """
    trig = {"cos": np.cos, "sin": np.sin}[variant]
    scale = t ** (-1.0 / alpha)
    if r == 2:
        def f(rho):
            return rho ** (n - 1 + 2 * a) * math.exp(-2 * c1 * rho**alpha * t) * float(trig(c2 * rho**alpha * t)) ** 2

        hi = scale * (60.0 / c1) ** (1.0 / alpha)
        lo = scale * 1e-16 ** (1.0 / (n + 2 * a))
        val = _log_quad(f, lo, hi, breaks=(scale,))
        return math.sqrt(sphere_area(n) / (2 * math.pi) ** n * val)
    if math.isinf(r) and c2 == 0 and variant == "cos":
        hi = scale * (80.0 / c1) ** (1.0 / alpha)
        lo = scale * 1e-16 ** (1.0 / (n + a))
        val = _log_quad(lambda rho: rho ** (n - 1 + a) * math.exp(-c1 * rho**alpha * t), lo, hi, breaks=(scale,))
        return sphere_area(n) / (2 * math.pi) ** n * val
    if n not in (1, 2):
        raise DomainError("grid evaluation supports n in {1, 2}")
    grid = SpectralGrid(n, grid_points, half_length)
    rho = grid.xi_mag
    mult = frac_symbol(grid, a) * np.exp(-c1 * rho**alpha * t) * trig(c2 * rho**alpha * t)
    field_ = SpectralField(grid, mult / grid.volume)
    return lr_norm(field_, r)


def kernel_lr_scaling(
    a, alpha, r, c1, c2, n, t_samples=None, variant="cos", tol=0.05, relation="upper", **grid_kw
) -> CheckResult:
    """Fitted t-slope of the kernel L^r norm against -a/alpha - (n/alpha)(1 - 1/r)."""
    if not (a >= 0 and alpha > 0 and c1 > 0 and r >= 1):
        raise DomainError("need a >= 0, alpha > 0, c1 > 0, r >= 1")
    if t_samples is None:
        t_samples = np.geomspace(1.0, 100.0, 12)
    t = np.asarray(t_samples, dtype=float)
    vals = np.array([kernel_lr_value(a, alpha, r, c1, c2, n, tt, variant, **grid_kw) for tt in t])
    fit = fit_decay(t, vals, (t.min(), t.max()), shift=0.0)
    inv_r = 0.0 if math.isinf(r) else 1.0 / r
    predicted = -a / alpha - (n / alpha) * (1 - inv_r)
    return CheckResult(
        f"kernel_lr/{variant}-a{a:g}-alpha{alpha:g}-r{r:g}-c1{c1:g}-c2{c2:g}-n{n}",
        predicted,
        fit.slope,
        tol,
        judge(fit.slope, predicted, tol, relation),
        relation=relation,
        series=list(zip(t.tolist(), vals.tolist())),
    )


def gn_theta(p_out, p0, p1, s, sigma_reg, n) -> float:
    return (1 / p0 - 1 / p_out + s / n) / (1 / p0 - 1 / p1 + sigma_reg / n)


def random_band_limited(grid: SpectralGrid, rng: np.random.Generator, band: float | None = None) -> SpectralField:
    """Real field with random coefficients on the modes |k_i| <= band (default N/4)."""
    band = grid.points_per_axis / 4 if band is None else band
    f = SpectralField.from_real(grid, rng.standard_normal(grid.shape))
    keep = np.ones(grid.shape, dtype=bool)
    for axis in range(grid.n):
        s = [1] * grid.n
        s[axis] = -1
        keep &= (np.abs(grid.wavenumbers) <= band).reshape(s)
    f.values[~keep] = 0.0
    return f


def gn_ratio(u: SpectralField, s, sigma_reg, theta) -> float:
    lhs = sobolev_norm(u, s)
    rhs = sobolev_norm(u, 0.0) ** (1 - theta) * sobolev_norm(u, sigma_reg) ** theta
    return lhs / rhs


def gn_check(p_out, p0, p1, s, sigma_reg, n, samples=1000, seed=0, points_per_axis=32, half_length=math.pi) -> float:
    """Worst ratio ||u||_{H^s} / (||u||^{1-theta} ||u||_{H^sigma}^theta) over random fields.

    Only the L^2 scale p = p0 = p1 = 2 is evaluable; there the inequality
    holds with constant 1 by Hoelder's inequality on the Fourier side.
    """
    if not (0 <= s <= sigma_reg):
        raise ThetaOutOfRange(f"need 0 <= s <= sigma, got s={s}, sigma={sigma_reg}")
    theta = gn_theta(p_out, p0, p1, s, sigma_reg, n)
    lo = s / sigma_reg
    if not (lo - 1e-15 <= theta <= 1 + 1e-15):
        raise ThetaOutOfRange(f"theta={theta:.6g} outside [{lo:.6g}, 1]")
    if not (p_out == p0 == p1 == 2):
        raise DomainError("only the L^2 scale p = p0 = p1 = 2 is computable by Plancherel")
    grid = SpectralGrid(n, points_per_axis, half_length)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        u = random_band_limited(grid, rng)
        worst = max(worst, gn_ratio(u, s, sigma_reg, theta))
    return worst
