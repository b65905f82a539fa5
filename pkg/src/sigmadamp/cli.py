"""Command-line front end.

Every command reads an optional YAML config, expands it against the
defaults below, and writes a run directory ``<out>/<command>-<run_id>``
holding ``manifest.json`` (the resolved config) plus the command's outputs.
``run_id`` is a hash of the resolved config, so identical configs map to the
same directory with identical contents.  Exit status is 0 iff every check
the command performed passed; 2 signals an invalid config.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import yaml

from . import analysis, model
from .errors import ConfigError, DomainError, NoBlowupObserved, SigmaDampError
from .model import Corollary, ModelParams, Theorem, exact
from .propagator import evolve_linear
from .semilinear import CouplingKind, SystemState, integrate
from .spectral import SpectralGrid, profile, sobolev_norm, write_slice_csv, write_snapshot

COMMANDS = ("rates", "regions", "simulate", "sweep-lifespan", "verify-linear", "verify-lemmas", "report")

_DATA_DEFAULT = {"profile": "zero", "amplitude": 1.0, "width": 1.0, "mode": 1}

DEFAULTS = {
    "params": {"sigma": "1", "delta": "1/2", "n": 1, "p": None, "q": None, "m": "1", "s1": None, "s2": None},
    "seed": 0,
    "rates": {"pairs": None, "corollary": "auto", "eps_slack": "1/1000", "theorems": []},
    "regions": {"p": ["1.1", "6", "0.1"], "q": ["1.1", "6", "0.1"], "theorems": None},
    "grid": {"points_per_axis": 256, "half_length": 50.0},
    "data": {
        "u0": dict(_DATA_DEFAULT, profile="bump"),
        "u1": dict(_DATA_DEFAULT),
        "v0": dict(_DATA_DEFAULT, profile="bump"),
        "v1": dict(_DATA_DEFAULT),
    },
    "simulate": {
        "kind": "UU",
        "horizon": 100.0,
        "dt": 0.05,
        "schedule": [[0, 0]],
        "linear": False,
        "samples": 40,
        "blowup_threshold": None,
        "blowup_factor": 1e6,
        "dt_min": 1e-6,
        "linear_tolerance": 1e-9,
    },
    "lifespan": {
        "eps": [0.1, 0.1778279410038923, 0.31622776601683794, 0.5623413251903491, 1.0],
        "tolerance": 0.25,
        "horizon": 1e4,
        "dt": 0.05,
        "blowup_threshold": 1e6,
        "samples": 40,
    },
    "verify_linear": {"cases": "ci", "window": [100.0, 10000.0], "tolerance": 0.05, "points": 16},
    "verify_lemmas": {"gn_samples": 1000, "small_freq_tolerance": 0.02, "kernel_tolerance": 0.05},
    "report": {"inputs": []},
}

# per-command config sections that enter the manifest
SECTIONS = {
    "rates": ("params", "rates"),
    "regions": ("params", "regions"),
    "simulate": ("params", "grid", "data", "simulate"),
    "sweep-lifespan": ("params", "grid", "data", "simulate", "lifespan"),
    "verify-linear": ("verify_linear",),
    "verify-lemmas": ("verify_lemmas", "seed"),
    "report": ("report",),
}


# --------------------------------------------------------------------------
# configuration


def _merge(base, override, path=""):
    if not isinstance(override, dict):
        raise ConfigError(f"{path or 'config'}: expected a mapping, got {type(override).__name__}")
    out = copy.deepcopy(base)
    for key, val in override.items():
        where = f"{path}.{key}" if path else str(key)
        if key not in base:
            raise ConfigError(f"{where}: unknown field")
        if isinstance(base[key], dict) and val is not None:
            out[key] = _merge(base[key], val, where)
        else:
            out[key] = val
    return out


def _canonical(x):
    """JSON-friendly form with exact rationals kept as strings."""
    if isinstance(x, dict):
        return {str(k): _canonical(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_canonical(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.generic):
        return x.item()
    return x


def resolve_config(command: str, raw: dict | None, seed: int | None = None) -> dict:
    if command not in COMMANDS:
        raise ConfigError(f"command: unknown command {command!r}")
    raw = dict(raw or {})
    raw.pop("command", None)
    merged = _merge(DEFAULTS, raw)
    if seed is not None:
        merged["seed"] = seed
    resolved = {"command": command}
    for sec in SECTIONS[command]:
        resolved[sec] = merged[sec]
    return _canonical(resolved)


def run_id(resolved: dict) -> str:
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def build_params(cfg: dict) -> ModelParams:
    raw = cfg["params"]
    kw = {}
    for key, val in raw.items():
        if val is None:
            continue
        try:
            kw[key] = exact(val)
        except (TypeError, ValueError, ZeroDivisionError):
            raise ConfigError(f"params.{key}: not a number: {val!r}") from None
    for key in ("sigma", "delta", "n"):
        if key not in kw:
            raise ConfigError(f"params.{key}: required")
    try:
        return ModelParams(**kw)
    except ValueError as exc:
        field = str(exc).split()[0]
        raise ConfigError(f"params.{field}: {exc}") from None


def build_grid(cfg: dict, n: int) -> SpectralGrid:
    g = cfg["grid"]
    try:
        return SpectralGrid(n, int(g["points_per_axis"]), float(g["half_length"]))
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from None


def build_data(cfg: dict, grid: SpectralGrid):
    out = []
    for name in ("u0", "u1", "v0", "v1"):
        d = cfg["data"][name]
        try:
            out.append(profile(grid, d["profile"], float(d["amplitude"]), float(d["width"]), int(d["mode"])))
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"data.{name}: {exc}") from None
    return out


def _range(spec, where):
    try:
        lo, hi, st = (exact(x) for x in spec)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected [start, stop, step]") from None
    if st <= 0 or hi < lo:
        raise ConfigError(f"{where}: need step > 0 and stop >= start")
    vals = []
    x = lo
    while x <= hi:
        vals.append(x)
        x += st
    return vals


# --------------------------------------------------------------------------
# output helpers


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _write_json(path: Path, obj):
    path.write_text(json.dumps(_canonical(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x) if x.denominator == 1 else f"{x} ({float(x):.6g})"
    return str(x)


class Outcome:
    def __init__(self):
        self.checks = []  # (id, pass, detail)
        self.lines = []

    def check(self, cid, ok, detail=""):
        self.checks.append({"id": cid, "pass": bool(ok), "detail": detail})

    def say(self, line=""):
        self.lines.append(line)

    @property
    def ok(self) -> bool:
        return all(c["pass"] for c in self.checks)


# --------------------------------------------------------------------------
# commands


def cmd_rates(cfg, run_dir: Path, workers: int) -> Outcome:
    out = Outcome()
    params = build_params(cfg)
    dc = model.derive_constants(params)
    rc = cfg["rates"]
    out.say(f"sigma={_fmt(params.sigma)} delta={_fmt(params.delta)} n={params.n} m={_fmt(params.m)}")
    out.say(f"k- = {_fmt(dc.k_minus)}, k+ = {_fmt(dc.k_plus)}, m0 = {_fmt(dc.m0)}, regime = {dc.regime.value}")
    if dc.k_minus == dc.k_plus:
        out.say("k- = k+: single regime, both frequency zones decay alike")
    try:
        out.say(f"critical exponent = {_fmt(model.critical_exponent(params))}")
    except DomainError as exc:
        out.say(f"critical exponent undefined: {exc}")

    requested = str(rc["corollary"]).upper()
    sharp_ok = params.n > dc.m0 * dc.k_minus
    if requested == "AUTO":
        cor = Corollary.C22 if sharp_ok else Corollary.C21
    elif requested in ("C21", "C22"):
        cor = Corollary(requested)
    else:
        raise ConfigError(f"rates.corollary: expected auto, C21 or C22, got {rc['corollary']!r}")
    if cor is Corollary.C22 and not sharp_ok:
        raise ConfigError(
            f"rates.corollary: C22 needs n > m0*k_minus = {_fmt(dc.m0 * dc.k_minus)}, got n = {params.n}"
        )
    pairs = rc["pairs"] or [[0, "0"], [0, str(dc.k_plus)], [1, "0"], [1, str(dc.k_plus)]]
    eps_slack = exact(rc["eps_slack"])
    rows = []
    for j, a in pairs:
        pred = model.decay_prediction(params, int(j), exact(a), cor)
        losses = []
        for name in ("p", "q"):
            val = getattr(params, name)
            losses.append("" if val is None else str(model.loss_of_decay(params, val, eps_slack)))
        rows.append([
            cor.value, pred.j, str(pred.a), str(pred.exponent_data0), str(pred.exponent_data1),
            str(pred.reg_data0), str(pred.reg_data1), losses[0], losses[1],
        ])
    header = ["corollary", "j", "a", "exponent_data0", "exponent_data1", "reg_data0", "reg_data1", "loss_p", "loss_q"]
    text = _csv_text(header, rows)
    (run_dir / "rates.csv").write_text(text, encoding="utf-8", newline="")
    out.say(text.replace("\r\n", "\n").rstrip())
    for th in rc["theorems"] or []:
        for line in model.theorem_rates(params, th, eps_slack):
            out.say(f"{th} {line.component}: j={line.j} a={_fmt(line.a)} exponent={_fmt(line.exponent)} loss={_fmt(line.loss)}")
    return out


def cmd_regions(cfg, run_dir: Path, workers: int) -> Outcome:
    out = Outcome()
    params = build_params(cfg)
    rc = cfg["regions"]
    ps = _range(rc["p"], "regions.p")
    qs = _range(rc["q"], "regions.q")
    try:
        theorems = None if rc["theorems"] is None else [Theorem.parse(t) for t in rc["theorems"]]
    except ValueError as exc:
        raise ConfigError(f"regions.theorems: {exc}") from None
    rows = model.phase_diagram(params, ps, qs, theorems)
    text = model.phase_csv(rows)
    (run_dir / "regions.csv").write_text(text, encoding="utf-8", newline="")
    counts = {}
    for r in rows:
        counts.setdefault(r["theorem"], [0, 0])
        counts[r["theorem"]][1] += 1
        if r["admissible"]:
            counts[r["theorem"]][0] += 1
    out.say(f"{len(ps)} x {len(qs)} grid, {len(rows)} rows -> regions.csv")
    for th, (k, tot) in counts.items():
        out.say(f"  {th}: admissible at {k}/{tot} points")
    return out


def _sim_settings(cfg):
    s = cfg["simulate"]
    try:
        kind = CouplingKind.parse(s["kind"])
    except ValueError as exc:
        raise ConfigError(f"simulate.kind: {exc}") from None
    for key in ("horizon", "dt"):
        if not float(s[key]) > 0:
            raise ConfigError(f"simulate.{key}: must be positive, got {s[key]}")
    return s, kind


def cmd_simulate(cfg, run_dir: Path, workers: int) -> Outcome:
    out = Outcome()
    params = build_params(cfg)
    s, kind = _sim_settings(cfg)
    linear = bool(s["linear"])
    if not linear and (params.p is None or params.q is None):
        raise ConfigError("params.p: nonlinear runs need both p and q")
    grid = build_grid(cfg, params.n)
    u0, u1, v0, v1 = build_data(cfg, grid)
    rec, rep = integrate(
        SystemState(0.0, u0, u1, v0, v1),
        kind,
        params,
        float(s["horizon"]),
        float(s["dt"]),
        norm_schedule=[(int(j), float(exact(a))) for j, a in s["schedule"]],
        blowup_threshold=s["blowup_threshold"],
        blowup_factor=float(s["blowup_factor"]),
        samples=int(s["samples"]),
        linear=linear,
        dt_min=float(s["dt_min"]),
    )
    rec.write_csv(run_dir / "series.csv")
    rec.write_sidecar(run_dir / "series.json")
    final = rec.final_state
    write_snapshot(run_dir / "u_final.bin", final.u)
    write_slice_csv(run_dir / "u_final_slice.csv", final.u)
    out.say(f"t_final = {final.t:.6g} after {final.step_count} steps; {rep.as_dict()}")
    if linear:
        w, _ = evolve_linear(u0, u1, final.t, params)
        z, _ = evolve_linear(v0, v1, final.t, params)
        scale = max(sobolev_norm(w), sobolev_norm(z), 1e-300)
        err = max(sobolev_norm(final.u - w), sobolev_norm(final.v - z)) / scale
        tol = float(s["linear_tolerance"])
        out.check("linear_consistency", err <= tol, f"relative error {err:.3e} (tolerance {tol:g})")
        out.say(f"linear consistency: relative error {err:.3e}")
    out.check("finite_run", rep.trigger is None or rep.trigger.value != "NonFinite", rep.as_dict())
    return out


def cmd_sweep_lifespan(cfg, run_dir: Path, workers: int) -> Outcome:
    out = Outcome()
    params = build_params(cfg)
    _, kind = _sim_settings(cfg)
    lc = cfg["lifespan"]
    grid = build_grid(cfg, params.n)
    fields = build_data(cfg, grid)
    try:
        verdict = model.blowup_condition(params)
        predicted = model.lifespan_exponent(params)
    except (DomainError, SigmaDampError) as exc:
        raise ConfigError(f"params: {exc}") from None
    if not verdict.admissible:
        raise ConfigError(f"params: blow-up condition fails ({verdict.first_violated})")
    sim = analysis.SimConfig(
        horizon=float(lc["horizon"]),
        dt=float(lc["dt"]),
        blowup_threshold=None if lc["blowup_threshold"] is None else float(lc["blowup_threshold"]),
        samples=int(lc["samples"]),
    )
    try:
        curve = analysis.lifespan_sweep(params, fields, lc["eps"], kind, sim, float(lc["tolerance"]), workers)
    except NoBlowupObserved as exc:
        out.check("blowup_observed", False, str(exc))
        return out
    except ValueError as exc:
        raise ConfigError(f"lifespan.eps: {exc}") from None
    rows = [[repr(e), repr(t)] for e, t in zip(curve.eps_values, curve.t_detect)]
    (run_dir / "lifespan.csv").write_text(_csv_text(["eps", "t_detect"], rows), encoding="utf-8", newline="")
    res = analysis.CheckResult(
        "lifespan_slope", curve.predicted_slope, curve.fitted_slope, curve.tolerance, curve.passed, "rel",
        series=list(zip(curve.eps_values, curve.t_detect)),
    )
    analysis.write_report(run_dir / "report.json", [res])
    out.say(f"predicted slope {_fmt(predicted)}, fitted {curve.fitted_slope:.4f}")
    for e, t in zip(curve.eps_values, curve.t_detect):
        out.say(f"  eps={e:.4g}  t_detect={t:.4g}")
    out.check("lifespan_slope", curve.passed, f"fitted {curve.fitted_slope:.4f} vs {float(predicted):.4f}")
    out.check("lifespan_monotone", curve.inversions() <= 1, f"{curve.inversions()} inversions")
    return out


def _linear_job(args):
    case, window, tol, points = args
    return analysis.run_linear_case(case, tuple(window), tol, points)


def cmd_verify_linear(cfg, run_dir: Path, workers: int) -> Outcome:
    out = Outcome()
    vc = cfg["verify_linear"]
    if vc["cases"] == "ci":
        cases = analysis.ci_matrix()
    else:
        try:
            cases = [
                analysis.LinearCase(
                    c.get("case_id", f"case{i}"), str(c["sigma"]), str(c["delta"]), int(c["n"]),
                    int(c["datum"]), int(c["j"]), str(c["a"]), int(c.get("m", 1)),
                )
                for i, c in enumerate(vc["cases"])
            ]
        except (KeyError, TypeError, AttributeError) as exc:
            raise ConfigError(f"verify_linear.cases: malformed case ({exc})") from None
    jobs = [(c, vc["window"], float(vc["tolerance"]), int(vc["points"])) for c in cases]
    results = analysis.run_cases(_linear_job, jobs, workers)
    analysis.write_report(run_dir / "report.json", results)
    analysis.write_series_csv(run_dir / "series.csv", results)
    for r in results:
        out.say(f"{'PASS' if r.passed else 'FAIL'}  {r.case_id}: predicted {r.predicted:.4f}, measured {r.measured:.4f}")
        out.check(r.case_id, r.passed)
    return out


def lemma_results(cfg) -> list:
    lc = cfg["verify_lemmas"]
    res = []
    sf_tol = float(lc["small_freq_tolerance"])
    for beta, alpha, c, n in ((0, 2, 1, 1), (-0.5, 1, 1, 1), (1, 2, 1, 3), (0.5, 1.5, 2, 2)):
        res.append(analysis.small_freq_integral(beta, alpha, c, n, tol=sf_tol))
    k_tol = float(lc["kernel_tolerance"])
    res.append(analysis.kernel_lr_scaling(0, 2, 2, 1, 1, 1, tol=k_tol, relation="abs"))
    exact_case = analysis.kernel_lr_scaling(0, 1, math.inf, 1, 0, 2, tol=1e-3, relation="abs")
    res.append(exact_case)
    res.append(analysis.kernel_lr_scaling(1, 2, 2, 1, 1, 3, variant="sin", tol=k_tol))
    res.append(analysis.kernel_lr_scaling(0, 2, 4, 1, 1, 1, tol=k_tol))
    seed = int(cfg["seed"])
    samples = int(lc["gn_samples"])
    for s, sig, n in ((0.7, 1.5, 1), (0.5, 1.0, 2)):
        worst = analysis.gn_check(2, 2, 2, s, sig, n, samples=samples, seed=seed)
        res.append(analysis.CheckResult(f"gn/s{s:g}-sigma{sig:g}-n{n}", 1.0, worst, 1e-9, worst <= 1 + 1e-9, "upper"))
    for s in (0.0, 1.5):
        worst = analysis.gn_check(2, 2, 2, s, 1.5, 1, samples=20, seed=seed)
        res.append(analysis.CheckResult(f"gn/endpoint-s{s:g}", 1.0, worst, 1e-12, abs(worst - 1) <= 1e-12))
    return res


def cmd_verify_lemmas(cfg, run_dir: Path, workers: int) -> Outcome:
    out = Outcome()
    results = lemma_results(cfg)
    analysis.write_report(run_dir / "report.json", results)
    analysis.write_series_csv(run_dir / "series.csv", results)
    for r in results:
        out.say(f"{'PASS' if r.passed else 'FAIL'}  {r.case_id}: predicted {r.predicted:.6g}, measured {r.measured:.6g}")
        out.check(r.case_id, r.passed)
    return out


def cmd_report(cfg, run_dir: Path, workers: int) -> Outcome:
    out = Outcome()
    inputs = cfg["report"]["inputs"]
    if not inputs:
        raise ConfigError("report.inputs: list at least one run directory or report.json")
    rows = []
    for item in inputs:
        path = Path(item)
        files = sorted(path.rglob("report.json")) if path.is_dir() else [path]
        if not files:
            raise ConfigError(f"report.inputs: no report.json under {item}")
        for f in files:
            for entry in json.loads(f.read_text(encoding="utf-8")):
                rows.append([str(f.parent.name), entry["case_id"], repr(entry["predicted"]), repr(entry["measured"]),
                             repr(entry["tolerance"]), str(bool(entry["pass"])).lower()])
                out.check(entry["case_id"], entry["pass"])
    header = ["run", "case_id", "predicted", "measured", "tolerance", "pass"]
    (run_dir / "summary.csv").write_text(_csv_text(header, rows), encoding="utf-8", newline="")
    n_pass = sum(1 for c in out.checks if c["pass"])
    out.say(f"{n_pass}/{len(out.checks)} checks pass")
    return out


HANDLERS = {
    "rates": cmd_rates,
    "regions": cmd_regions,
    "simulate": cmd_simulate,
    "sweep-lifespan": cmd_sweep_lifespan,
    "verify-linear": cmd_verify_linear,
    "verify-lemmas": cmd_verify_lemmas,
    "report": cmd_report,
}


# --------------------------------------------------------------------------
# entry point


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"--config: cannot read {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"--config: invalid YAML: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a mapping")
    return data


def execute(command: str, raw: dict | None, out_dir: str | Path, workers: int = 1, seed: int | None = None):
    """Run one command; returns ``(exit_code, run_dir, Outcome)``."""
    resolved = resolve_config(command, raw, seed)
    rid = run_id(resolved)
    run_dir = Path(out_dir) / f"{command}-{rid}"
    run_dir.mkdir(parents=True, exist_ok=True)
    _write_json(run_dir / "manifest.json", {"run_id": rid, "config": resolved})
    outcome = HANDLERS[command](resolved, run_dir, workers)
    _write_json(run_dir / "checks.json", {"pass": outcome.ok, "checks": outcome.checks})
    return (0 if outcome.ok else 1), run_dir, outcome


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sigmadamp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="YAML experiment config")
        sp.add_argument("--out", default="runs", help="parent directory for run directories")
        sp.add_argument("--workers", type=int, default=1, help="worker processes for independent cases")
        sp.add_argument("--seed", type=int, default=None, help="seed for sampled checks")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = load_config(args.config)
        code, run_dir, outcome = execute(args.command, raw, args.out, max(1, args.workers), args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for line in outcome.lines:
        print(line)
    failed = [c for c in outcome.checks if not c["pass"]]
    if failed:
        print(json.dumps({"failed": failed}, default=str), file=sys.stderr)
    print(f"run directory: {run_dir}")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
