"""Weakly coupled semilinear systems driven through the exact linear propagator.

Each unknown obeys ``w_tt + (-Delta)^sigma w + (-Delta)^delta w_t = F`` with
the right-hand sides chosen by ``CouplingKind``:

    UU:  F_u = |v|^p,    F_v = |u|^q
    TT:  F_u = |v_t|^p,  F_v = |u_t|^q
    UT:  F_u = |v|^p,    F_v = |u_t|^q

One step of length h combines the exact kernels with a trapezoidal rule on
the Duhamel integral ``int_0^h K1(h - tau) F(tau) dtau``.  A predictor
supplies F at the end of the step; since K1(0) = 0 the corrected
displacement only needs F at the start, while the velocity picks up both
ends (dK1(0) = 1).
"""

from __future__ import annotations

import csv
import enum
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import NonFiniteState
from .model import ModelParams, derive_constants
from .propagator import kernels
from .spectral import SpectralField, SpectralGrid, sobolev_norm

ABS_FLOOR = 1e-300


class CouplingKind(enum.Enum):
    UU = "UU"
    TT = "TT"
    UT = "UT"

    @classmethod
    def parse(cls, value) -> "CouplingKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown coupling kind {value!r}; expected one of UU, TT, UT") from None


class Trigger(enum.Enum):
    NORM_THRESHOLD = "NormThreshold"
    NON_FINITE = "NonFinite"


@dataclass
class SystemState:
    t: float
    u: SpectralField
    ut: SpectralField
    v: SpectralField
    vt: SpectralField
    step_count: int = 0

    def __post_init__(self):
        for other in (self.ut, self.v, self.vt):
            self.u.check_grid(other)

    @property
    def grid(self) -> SpectralGrid:
        return self.u.grid

    def fields(self) -> dict[str, SpectralField]:
        return {"u": self.u, "ut": self.ut, "v": self.v, "vt": self.vt}

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(f.values)) for f in self.fields().values())

    def size(self) -> float:
        """Largest L^2 norm among the four components; the blow-up monitor."""
        return max(sobolev_norm(f, 0.0) for f in self.fields().values())

    def swapped(self) -> "SystemState":
        return SystemState(self.t, self.v, self.vt, self.u, self.ut, self.step_count)


@dataclass(frozen=True)
class BlowupReport:
    blew_up: bool
    t_detect: float | None = None
    trigger: Trigger | None = None
    peak_norm: float = 0.0

    def __post_init__(self):
        if self.blew_up and self.t_detect is None:
            raise ValueError("a blow-up report needs a detection time")

    def as_dict(self) -> dict:
        return {
            "blew_up": self.blew_up,
            "t_detect": self.t_detect,
            "trigger": None if self.trigger is None else self.trigger.value,
            "peak_norm": self.peak_norm,
        }


def _power(x: np.ndarray, p: float) -> np.ndarray:
    return np.exp(p * np.log(np.maximum(np.abs(x), ABS_FLOOR)))


def _power_field(f: SpectralField, p: float) -> SpectralField:
    g = f.grid
    out = SpectralField.from_real(g, _power(f.real_view(), p))
    out.values[~g.dealias_mask] = 0.0
    return out


def nonlinearity(state: SystemState, kind: CouplingKind, params: ModelParams):
    """Dealiased right-hand sides ``(F_u, F_v)`` for the given coupling."""
    kind = CouplingKind.parse(kind)
    p, q = (float(x) for x in params.exponents)
    if kind is CouplingKind.UU:
        src_u, src_v = state.v, state.u
    elif kind is CouplingKind.TT:
        src_u, src_v = state.vt, state.ut
    elif kind is CouplingKind.UT:
        src_u, src_v = state.v, state.ut
    else:  # pragma: no cover
        raise AssertionError(kind)
    return _power_field(src_u, p), _power_field(src_v, q)


class KernelCache:
    """Kernel arrays on one grid, memoized per step length."""

    def __init__(self, grid: SpectralGrid, params: ModelParams, max_entries: int = 64):
        self.grid = grid
        self.params = params
        self.max_entries = max_entries
        self._store = {}

    def __call__(self, h: float):
        K = self._store.get(h)
        if K is None:
            if len(self._store) >= self.max_entries:
                self._store.pop(next(iter(self._store)))
            K = kernels(h, self.grid.xi_mag, self.params)
            # coefficients stay Hermitian only if the multipliers are real
            K = tuple(np.ascontiguousarray(k.real) for k in (K.k0, K.k1, K.dt_k0, K.dt_k1))
            self._store[h] = K
        return K


def _propagate(K, w, wt, h, f0, f1=None):
    k0, k1, dk0, dk1 = K
    lin = k0 * w + k1 * wt
    lin_t = dk0 * w + dk1 * wt
    if f0 is None:
        return lin, lin_t
    if f1 is None:  # predictor: freeze F over the step
        return lin + h * k1 * f0, lin_t + h * dk1 * f0
    return lin + 0.5 * h * k1 * f0, lin_t + 0.5 * h * (dk1 * f0 + f1)


def step(
    state: SystemState,
    dt: float,
    kind: CouplingKind,
    params: ModelParams,
    linear: bool = False,
    cache: KernelCache | None = None,
) -> SystemState:
    """Advance by ``dt`` with the exponential predictor-corrector.

    ``linear=True`` suppresses the nonlinearity, which reduces the step to
    the exact linear flow.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    kind = CouplingKind.parse(kind)
    cache = cache or KernelCache(state.grid, params)
    K = cache(dt)
    g = state.grid
    u, ut, v, vt = state.u.values, state.ut.values, state.v.values, state.vt.values

    if linear:
        nu, nut = _propagate(K, u, ut, dt, None)
        nv, nvt = _propagate(K, v, vt, dt, None)
    else:
        fu0, fv0 = (f.values for f in nonlinearity(state, kind, params))
        pu, put = _propagate(K, u, ut, dt, fu0)
        pv, pvt = _propagate(K, v, vt, dt, fv0)
        pred = SystemState(
            state.t + dt, SpectralField(g, pu), SpectralField(g, put), SpectralField(g, pv), SpectralField(g, pvt)
        )
        fu1, fv1 = (f.values for f in nonlinearity(pred, kind, params))
        nu, nut = _propagate(K, u, ut, dt, fu0, fu1)
        nv, nvt = _propagate(K, v, vt, dt, fv0, fv1)

    out = SystemState(
        state.t + dt,
        SpectralField(g, nu),
        SpectralField(g, nut),
        SpectralField(g, nv),
        SpectralField(g, nvt),
        state.step_count + 1,
    )
    if not out.is_finite():
        raise NonFiniteState(f"non-finite coefficients after step at t={out.t:.6g}")
    return out


# --------------------------------------------------------------------------
# driver


def norm_id(component: str, j: int, a: float) -> str:
    return f"{component}:j{j}:a{float(a):g}"


def scheduled_norms(state: SystemState, schedule) -> dict[str, float]:
    out = {}
    for j, a in schedule:
        for comp, (w, wt) in (("u", (state.u, state.ut)), ("v", (state.v, state.vt))):
            out[norm_id(comp, j, a)] = sobolev_norm(wt if j else w, float(a))
    return out


def sample_times(horizon: float, first: float, count: int) -> np.ndarray:
    """0 followed by ``count`` log-spaced times from ``first`` to ``horizon``."""
    first = min(first, horizon)
    ts = np.geomspace(first, horizon, count) if count > 1 else np.array([horizon])
    return np.unique(np.concatenate([[0.0], ts]))


def config_hash(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class RunRecord:
    """Sampled norm series of one integration plus its metadata."""

    rows: list = field(default_factory=list)  # (t, norm_id, value)
    meta: dict = field(default_factory=dict)
    final_state: SystemState | None = None

    def add(self, t: float, norms: dict[str, float]):
        for k, val in norms.items():
            self.rows.append((t, k, val))

    def series(self, nid: str):
        pts = [(t, val) for t, k, val in self.rows if k == nid]
        t, val = zip(*pts) if pts else ((), ())
        return np.array(t), np.array(val)

    def norm_ids(self) -> list[str]:
        return list(dict.fromkeys(k for _, k, _ in self.rows))

    def write_csv(self, path: str | Path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "norm_id", "value"])
            for t, k, val in self.rows:
                w.writerow([repr(float(t)), k, repr(float(val))])

    def write_sidecar(self, path: str | Path):
        Path(path).write_text(json.dumps(self.meta, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")

    @classmethod
    def read_csv(cls, path: str | Path) -> "RunRecord":
        rec = cls()
        with open(path, newline="") as fh:
            r = csv.reader(fh)
            next(r)
            for t, k, val in r:
                rec.rows.append((float(t), k, float(val)))
        return rec


def integrate(
    initial: SystemState,
    kind: CouplingKind,
    params: ModelParams,
    horizon: float,
    dt: float,
    norm_schedule=((0, 0.0),),
    blowup_threshold: float | None = None,
    blowup_factor: float = 1e6,
    samples: int = 60,
    linear: bool = False,
    adaptive: bool = True,
    dt_min: float = 1e-6,
    growth_limit: float = 2.0,
):
    """Advance to ``horizon`` or until blow-up; returns ``(RunRecord, BlowupReport)``.

    The last state reached is kept on ``RunRecord.final_state``.

    Norms in ``norm_schedule`` (pairs ``(j, a)``) are recorded for u and v at
    log-spaced sample times.  The monitor is the largest L^2 norm of
    (u, u_t, v, v_t); it is checked after every step against
    ``blowup_threshold`` (default ``blowup_factor`` times its initial
    value).  A step that more than doubles the monitor is retried with half
    the step size, down to ``dt_min``.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    kind = CouplingKind.parse(kind)
    schedule = [(int(j), float(a)) for j, a in norm_schedule]
    grid = initial.grid
    cache = KernelCache(grid, params)

    size0 = initial.size()
    if blowup_threshold is None:
        blowup_threshold = blowup_factor * size0 if size0 > 0 else blowup_factor
    record = RunRecord()
    record.meta = {
        "params": params.as_dict(),
        "grid": grid.spec(),
        "regime": derive_constants(params).regime.value,
        "kind": kind.value,
        "horizon": horizon,
        "dt": dt,
        "dt_min": dt_min,
        "schedule": schedule,
        "blowup_threshold": blowup_threshold,
        "linear": linear,
        "samples": samples,
    }
    record.meta["config_hash"] = config_hash(record.meta)

    times = sample_times(horizon, min(dt, horizon), samples)
    state = initial
    record.add(state.t, scheduled_norms(state, schedule))
    size = size0
    peak = size0
    h = dt
    report = BlowupReport(False, peak_norm=peak)

    for target in times[1:]:
        while state.t < target * (1 - 1e-14):
            hh = min(h, target - state.t)
            try:
                new = step(state, hh, kind, params, linear=linear, cache=cache)
                new_size = new.size()
            except NonFiniteState:
                if adaptive and hh > dt_min:
                    h = max(hh / 2, dt_min)
                    continue
                report = BlowupReport(True, state.t + hh, Trigger.NON_FINITE, peak)
                break
            if not math.isfinite(new_size):
                report = BlowupReport(True, new.t, Trigger.NON_FINITE, peak)
                break
            if adaptive and size > 0 and new_size > growth_limit * size and hh > dt_min:
                h = max(hh / 2, dt_min)
                continue
            state, size = new, new_size
            peak = max(peak, size)
            if size >= blowup_threshold:
                report = BlowupReport(True, state.t, Trigger.NORM_THRESHOLD, peak)
                break
        if report.blew_up:
            break
        record.add(state.t, scheduled_norms(state, schedule))

    if not report.blew_up:
        report = BlowupReport(False, peak_norm=peak)
    record.meta["blowup"] = report.as_dict()
    record.meta["steps"] = state.step_count
    record.meta["t_final"] = state.t
    record.final_state = state
    return record, report


def initial_state(u0: SpectralField, u1: SpectralField, v0: SpectralField, v1: SpectralField) -> SystemState:
    return SystemState(0.0, u0, u1, v0, v1)
