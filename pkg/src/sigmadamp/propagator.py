"""Exact Fourier-space propagator of ``w_tt + (-Delta)^sigma w + (-Delta)^delta w_t = 0``.

At frequency magnitude rho the mode obeys ``w'' + b w' + c w = 0`` with
``b = rho^(2 delta)``, ``c = rho^(2 sigma)``; its roots are
``lambda_{1,2} = (-b +- sqrt(b^2 - 4c)) / 2`` and

    K0 = (lambda1 e^{lambda2 t} - lambda2 e^{lambda1 t}) / (lambda1 - lambda2)
    K1 = (e^{lambda1 t} - e^{lambda2 t}) / (lambda1 - lambda2)

propagate the initial displacement and velocity.  Writing the roots as
``lbar +- d/2`` gives the equivalent forms

    K1 = t e^{lbar t} sinhc(d t / 2)
    K0 = e^{lbar t} (cosh(d t / 2) - lbar t sinhc(d t / 2))

which are used whenever ``|Re(d t / 2)| <= 1``: they have no cancellation
near the degenerate radius and reduce to ``t e^{lambda t}``,
``(1 - lambda t) e^{lambda t}`` there.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import QuadratureFailure
from .model import ModelParams, derive_constants
from .spectral import SpectralField

DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class RootPair:
    lambda1: np.ndarray
    lambda2: np.ndarray
    discriminant: np.ndarray
    degenerate: np.ndarray


@dataclass(frozen=True)
class KernelValues:
    k0: np.ndarray
    k1: np.ndarray
    dt_k0: np.ndarray
    dt_k1: np.ndarray


def _symbols(rho, params: ModelParams):
    rho = np.asarray(rho, dtype=float)
    b = rho ** (2 * float(params.delta))
    c = rho ** (2 * float(params.sigma))
    return rho, b, c


def char_roots(xi_mag, params: ModelParams) -> RootPair:
    """Characteristic roots at |xi| = xi_mag (scalar or array)."""
    rho, b, c = _symbols(xi_mag, params)
    if np.any(rho < 0):
        raise ValueError("xi_mag must be non-negative")
    disc = b * b - 4.0 * c
    real = disc >= 0
    sq = np.sqrt(np.abs(disc))
    # real roots: take the large-magnitude root directly, the small one from the product
    big = -0.5 * (b + sq)
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big != 0, c / np.where(big != 0, big, 1.0), 0.0)
    lam1 = np.where(real, small, -0.5 * b + 0.5j * sq)
    lam2 = np.where(real, big, -0.5 * b - 0.5j * sq)
    degenerate = np.abs(disc) <= DEGENERACY_RTOL * np.maximum(b * b, 4.0 * c)
    return RootPair(lam1.astype(complex), lam2.astype(complex), disc, degenerate)


def _sinhc(z):
    z = np.asarray(z, dtype=complex)
    tiny = np.abs(z) < 1e-4
    safe = np.where(tiny, 1.0, z)
    z2 = z * z
    return np.where(tiny, 1.0 + z2 / 6.0 + z2 * z2 / 120.0, np.sinh(safe) / safe)


def kernels(t, xi_mag, params: ModelParams, roots: RootPair | None = None) -> KernelValues:
    """K0, K1 and their time derivatives; ``t`` and ``xi_mag`` broadcast."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    rho, b, c = _symbols(xi_mag, params)
    if roots is None:
        roots = char_roots(rho, params)
    lam1, lam2 = roots.lambda1, roots.lambda2
    d = np.where(roots.degenerate, 0.0, lam1 - lam2)
    lbar = np.where(roots.degenerate, -0.5 * b, 0.5 * (lam1 + lam2))

    z = 0.5 * d * t
    near = np.abs(z.real) <= 1.0

    zn = np.where(near, z, 0.0)
    E = np.exp(lbar * t)
    S = _sinhc(zn)
    C = np.cosh(zn)
    k1_n = t * E * S
    k0_n = E * (C - lbar * t * S)
    dk1_n = E * (C + lbar * t * S)

    safe_d = np.where(near, 1.0, d)
    e1 = np.exp(lam1 * t)
    e2 = np.exp(lam2 * t)
    k1_f = (e1 - e2) / safe_d
    k0_f = (lam1 * e2 - lam2 * e1) / safe_d
    dk1_f = (lam1 * e1 - lam2 * e2) / safe_d

    k1 = np.where(near, k1_n, k1_f)
    k0 = np.where(near, k0_n, k0_f)
    dk1 = np.where(near, dk1_n, dk1_f)
    dk0 = -c * k1
    return KernelValues(k0, k1, dk0, dk1)


def evolve_linear(w0: SpectralField, w1: SpectralField, t: float, params: ModelParams):
    """Exact solution of the semi-discrete linear problem at time ``t``.

    Returns ``(w, w_t)``.
    """
    w0.check_grid(w1)
    if t == 0:
        return w0.copy(), w1.copy()
    K = kernels(t, w0.grid.xi_mag, params)
    w = K.k0 * w0.values + K.k1 * w1.values
    wt = K.dt_k0 * w0.values + K.dt_k1 * w1.values
    return SpectralField(w0.grid, w), SpectralField(w0.grid, wt)


# --------------------------------------------------------------------------
# radial quadrature, any dimension


@dataclass(frozen=True)
class RadialData:
    """Radially symmetric data given through their Fourier transforms.

    ``w0_hat`` / ``w1_hat`` map an array of rho to spectrum values; ``None``
    means the datum vanishes.  Transform convention:
    ``w_hat(xi) = int e^{-i x.xi} w(x) dx``.
    """

    w0_hat: Callable[[np.ndarray], np.ndarray] | None = None
    w1_hat: Callable[[np.ndarray], np.ndarray] | None = None
    label: str = "custom"


def gaussian_data(c0: float = 0.0, c1: float = 1.0, kappa: float = 0.0) -> RadialData:
    """Spectra ``c_i rho^kappa exp(-rho^2)``; kappa > 0 gives data with vanishing moments."""

    def make(coef):
        if coef == 0:
            return None
        if kappa == 0:
            return lambda r: coef * np.exp(-np.asarray(r) ** 2)
        return lambda r: coef * np.asarray(r) ** kappa * np.exp(-np.asarray(r) ** 2)

    return RadialData(make(c0), make(c1), label=f"gaussian(c0={c0}, c1={c1}, kappa={kappa})")


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 0.0
    limit: int = 400
    rho_max: float = 12.0
    depth: float = 1e-14  # lower cut-off relative to the smallest characteristic radius


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1}."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def characteristic_radii(t: float, params: ModelParams) -> list[float]:
    """Radii where the integrands change behaviour: time scales, degenerate radius, |xi| = 1."""
    sigma, delta = float(params.sigma), float(params.delta)
    radii = [1.0]
    if t > 0:
        for e in {2 * delta, 2 * (sigma - delta), sigma}:
            radii.append(t ** (-1.0 / e))
    if params.delta * 2 != params.sigma:
        radii.append(4.0 ** (1.0 / (4 * delta - 2 * sigma)))
    return sorted(set(radii))


def _mode_spectrum(rho, t, j, data: RadialData, params: ModelParams):
    K = kernels(t, rho, params)
    out = np.zeros(np.shape(rho), dtype=complex)
    if data.w0_hat is not None:
        out = out + (K.dt_k0 if j else K.k0) * data.w0_hat(rho)
    if data.w1_hat is not None:
        out = out + (K.dt_k1 if j else K.k1) * data.w1_hat(rho)
    return out


def radial_norm(
    data: RadialData,
    t: float,
    j: int,
    a: float,
    params: ModelParams,
    quadrature: QuadratureSpec = QuadratureSpec(),
) -> float:
    """``||d_t^j |D|^a w(t)||_{L^2(R^n)}`` by Plancherel as a 1-D radial integral.

    The integral ``|S^{n-1}| (2 pi)^{-n} int rho^{n-1+2a} |d_t^j w_hat|^2 drho``
    is done in ``u = log rho`` with adaptive Gauss-Kronrod (QUADPACK) on
    panels split at the characteristic radii.
    """
    if j not in (0, 1):
        raise ValueError("j must be 0 or 1")
    n = params.n
    a = float(a)
    radii = [r for r in characteristic_radii(t, params) if r < quadrature.rho_max]
    lo = quadrature.depth * min(radii)
    edges = np.log([lo] + radii + [quadrature.rho_max])

    def integrand(u):
        rho = np.exp(u)
        val = _mode_spectrum(np.array([rho]), t, j, data, params)[0]
        return rho ** (n + 2 * a) * (val.real**2 + val.imag**2)

    total = 0.0
    err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for u0, u1 in zip(edges[:-1], edges[1:]):
            if u1 <= u0:
                continue
            try:
                val, e = integrate.quad(
                    integrand, u0, u1, epsabs=quadrature.abs_tol, epsrel=quadrature.rel_tol, limit=quadrature.limit
                )
            except integrate.IntegrationWarning as exc:
                raise QuadratureFailure(f"panel [{math.exp(u0):.3g}, {math.exp(u1):.3g}] at t={t}: {exc}") from exc
            total += val
            err += e
    if err > max(quadrature.abs_tol, 10 * quadrature.rel_tol * abs(total)):
        raise QuadratureFailure(f"error estimate {err:.3g} exceeds tolerance for value {total:.3g}")
    return math.sqrt(sphere_area(n) / (2 * math.pi) ** n * total)


def multiplier_sup(
    t: float,
    j: int,
    a: float,
    datum: int,
    params: ModelParams,
    rho_max: float = 1.0,
    samples: int = 4000,
) -> float:
    """``sup_{0 < rho <= rho_max} rho^a |d_t^j K_datum(t, rho)|``.

    This is the exact L^2 -> L^2 operator norm of the low-frequency part of
    the solution map (datum 0: displacement, datum 1: velocity).
    """
    radii = characteristic_radii(t, params)
    lo = 1e-12 * min(radii + [rho_max])
    u = np.linspace(math.log(lo), math.log(rho_max), samples)

    def value(uu):
        rho = np.exp(uu)
        K = kernels(t, rho, params)
        kern = {(0, 0): K.k0, (1, 0): K.dt_k0, (0, 1): K.k1, (1, 1): K.dt_k1}[(j, datum)]
        return rho ** float(a) * np.abs(kern)

    vals = value(u)
    i = int(np.argmax(vals))
    best = float(vals[i])
    if 0 < i < samples - 1:
        res = optimize.minimize_scalar(
            lambda uu: -float(value(np.array([uu]))[0]),
            bounds=(u[i - 1], u[i + 1]),
            method="bounded",
            options={"xatol": 1e-12},
        )
        best = max(best, -float(res.fun))
    return best


def kernel_regime(params: ModelParams) -> str:
    return derive_constants(params).regime.value
