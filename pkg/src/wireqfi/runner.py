"""Sweep execution, fits, checks and output files."""
from __future__ import annotations

import csv
import io
import itertools
import json
import os
import platform
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import scipy

from . import __version__
from .config import GRID_KEYS, PROBES, ConfigError, ExperimentConfig, validate
from .fock import SECTOR_CAP_ENV
from .lattice import ModelParams
from .metrology import derivative_step
from .probes import current_basis_cfi, probe_gap, probe_qfi, probe_qfim, probe_spectrum
from .scaling import FitError, fit_gap_scaling, fit_power_law, thermal_window
from .spectral import DegeneracyWarning, degeneracy_threshold

COORDS = ("L", "N", "t", "alpha_y", "alpha_z", "B", "U", "V", "T")
THERMAL_FIT_LOW = 3.0
THERMAL_FIT_HIGH = 100.0


@dataclass
class Sweep:
    name: str
    probe: str
    target: tuple
    points: list
    measure: str = "none"
    spectrum: int = 0
    fit: tuple = ()

    def columns(self) -> list[str]:
        cols = ["index", *COORDS, "probe", "target", "gap"]
        if len(self.target) == 1:
            cols.append("qfi")
        else:
            cols += qfim_columns(self.target)
        if self.measure == "current":
            cols.append("cfi")
        cols += [f"E{k}" for k in range(self.spectrum)]
        cols += ["method", "step", "truncation", "status", "message", "config_hash"]
        return cols


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    tolerance: str

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "detail": self.detail, "tolerance": self.tolerance}


@dataclass
class SweepResult:
    sweep: Sweep
    records: list
    fits: list = field(default_factory=list)
    wall_time: float = 0.0


@dataclass
class RunResult:
    results: dict
    checks: list
    summary: dict
    manifest: dict
    exit_code: int


def qfim_columns(target) -> list[str]:
    return [f"qfim_{a}_{b}" for i, a in enumerate(target) for b in target[i:]]


def params_from_coords(coords: dict) -> ModelParams:
    c = dict(coords)
    if "alpha" in c:
        c["alpha_y"] = c["alpha_z"] = c.pop("alpha")
    if "L" in c:
        c["L"] = int(c["L"])
    if "N" in c and c["N"] is not None:
        c["N"] = int(c["N"])
    return ModelParams(**c)


def expand_grid(grid: dict, mode: str = "product") -> list[ModelParams]:
    keys = [k for k in GRID_KEYS if k in grid]
    if mode == "zip":
        n = max((len(grid[k]) for k in keys), default=1)
        rows = [{k: (grid[k][i] if len(grid[k]) > 1 else grid[k][0]) for k in keys} for i in range(n)]
    else:
        rows = [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]
    return [params_from_coords(r) for r in rows]


def evaluate_point(task) -> dict:
    """Compute one record; exceptions become an error record."""
    probe, target, measure, n_levels, p = task
    rec: dict = {k: getattr(p, k) for k in COORDS}
    rec["probe"] = probe
    rec["target"] = "+".join(target)
    messages: list[str] = []
    start = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            spec = probe_spectrum(p, probe)
            gap = probe_gap(p, probe, spec)
            rec["gap"] = gap
            ref = spec.eigenvalues[p.N - 1] if probe == "slater" else spec.ground_energy
            if gap < 10 * degeneracy_threshold(float(ref)):
                messages.append("near-degenerate gap; increase B")
            if len(target) == 1:
                res = probe_qfi(p, target[0], probe)
                rec["qfi"] = res.value
            else:
                res = probe_qfim(p, target, probe)
                for (i, a), (j, b) in itertools.combinations_with_replacement(enumerate(target), 2):
                    rec[f"qfim_{a}_{b}"] = float(res.value[i, j])
            rec["method"] = res.method
            rec["step"] = res.step
            rec["truncation"] = res.truncation
            if measure == "current":
                rec["cfi"] = current_basis_cfi(p, target[0], probe).value
            for k in range(n_levels):
                rec[f"E{k}"] = float(spec.eigenvalues[k]) if k < len(spec.eigenvalues) else None
        for w in caught:
            if issubclass(w.category, DegeneracyWarning) or "probability floor" in str(w.message):
                messages.append(str(w.message))
        rec["status"] = "ok"
    except Exception as exc:  # fail-soft: record and keep going
        rec["status"] = "error"
        messages.append(f"{type(exc).__name__}: {exc}")
    rec["message"] = " | ".join(dict.fromkeys(messages))
    rec["wall_time"] = time.perf_counter() - start
    return rec


def _worker_init(cap):
    if cap is not None:
        os.environ[SECTOR_CAP_ENV] = str(cap)


def run_sweep(sweep: Sweep, workers: int = 1, sector_cap: int | None = None) -> SweepResult:
    tasks = [(sweep.probe, sweep.target, sweep.measure, sweep.spectrum, p) for p in sweep.points]
    start = time.perf_counter()
    if workers <= 1 or len(tasks) <= 1:
        records = [evaluate_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_worker_init, initargs=(sector_cap,)) as ex:
            # map preserves task order, so the merge is deterministic
            records = list(ex.map(evaluate_point, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    for i, rec in enumerate(records):
        rec["index"] = i
    result = SweepResult(sweep, records, wall_time=time.perf_counter() - start)
    result.fits = fit_sweep(sweep, records)
    return result


def _groups(records, vary: str):
    # N follows L at fixed filling, so size scans ignore it too
    skip = {vary, "N"} if vary == "L" else {vary}
    groups: dict = {}
    for rec in records:
        key = tuple((k, rec[k]) for k in COORDS if k not in skip)
        groups.setdefault(key, []).append(rec)
    return groups


def fit_sweep(sweep: Sweep, records: list) -> list[dict]:
    fits = []
    for kind in sweep.fit:
        vary = "T" if kind == "qfi-T" else "L"
        for key, recs in _groups(records, vary).items():
            recs = [r for r in recs if r["status"] == "ok"]
            entry = {"fit": kind, "group": dict(key)}
            try:
                entry.update(_fit_group(kind, sweep, recs))
            except (ValueError, FitError) as exc:
                entry["error"] = str(exc)
            fits.append(entry)
    return fits


def _fit_group(kind: str, sweep: Sweep, recs: list) -> dict:
    if kind in ("gap", "gap-power"):
        L = [r["L"] for r in recs]
        gap = [r["gap"] for r in recs]
        fit = fit_gap_scaling(L, gap) if kind == "gap" else fit_power_law(L, gap, expect_decay=True)
        return {"result": fit.as_dict(), "exponent": fit.exponent}
    if kind == "qfi":
        fit = fit_power_law([r["L"] for r in recs], [r["qfi"] for r in recs])
        return {"result": fit.as_dict(), "exponent": fit.exponent}
    if kind == "qfim":
        out = {}
        for col in qfim_columns(sweep.target):
            fit = fit_power_law([r["L"] for r in recs], [abs(r[col]) for r in recs])
            out[col] = {"result": fit.as_dict(), "exponent": fit.exponent}
        return {"components": out}
    if kind == "qfi-T":
        gap = float(np.median([r["gap"] for r in recs]))
        T = [r["T"] for r in recs]
        F = [r["qfi"] for r in recs]
        Tw, Fw = thermal_window(T, F, gap, THERMAL_FIT_LOW, THERMAL_FIT_HIGH)
        fit = fit_power_law(Tw, Fw, expect_decay=True)
        return {"result": fit.as_dict(), "exponent": fit.exponent, "window": [THERMAL_FIT_LOW * gap, THERMAL_FIT_HIGH * gap]}
    raise ValueError(f"unknown fit {kind!r}")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def records_to_csv(sweep: Sweep, records: list, config_hash: str | None = None) -> str:
    # wall times stay out of the CSV so identical configs give identical bytes
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = sweep.columns()
    writer.writerow(cols)
    for rec in records:
        writer.writerow([_fmt(config_hash if c == "config_hash" else rec.get(c)) for c in cols])
    return buf.getvalue()


def _custom_sweeps(cfg: ExperimentConfig) -> list[Sweep]:
    return [
        Sweep(
            name=cfg.name,
            probe=PROBES[cfg.probe],
            target=tuple(cfg.target),
            points=expand_grid(cfg.grid, cfg.mode),
            measure=cfg.measure,
            spectrum=cfg.spectrum,
            fit=tuple(cfg.fit),
        )
    ]


def _custom_checks(cfg: ExperimentConfig) -> list[Callable]:
    if cfg.check_exponent is None:
        return []
    lo, hi = cfg.check_exponent

    def check(results):
        out = []
        for res in results.values():
            for f in res.fits:
                exps = [f["exponent"]] if "exponent" in f else [c["exponent"] for c in f.get("components", {}).values()]
                ok = "error" not in f and all(lo <= e <= hi for e in exps)
                out.append(Check(f"{res.sweep.name}:{f['fit']}:{f['group']}", ok, f"exponents {exps}", f"[{lo}, {hi}]"))
        return out

    return [check]


def build_plan(cfg: ExperimentConfig):
    from .presets import preset_plan

    if cfg.preset == "custom":
        return _custom_sweeps(cfg), _custom_checks(cfg)
    return preset_plan(cfg.preset, cfg.scale)


def run(
    cfg: ExperimentConfig,
    out: str | os.PathLike | None = None,
    workers: int | None = None,
    check: bool = False,
) -> RunResult:
    report = validate(cfg)
    if not report.ok:
        raise ConfigError(report.errors)
    out_dir = Path(out if out is not None else cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = cfg.workers if workers is None else workers
    if cfg.sector_cap is not None:
        os.environ[SECTOR_CAP_ENV] = str(cfg.sector_cap)

    sweeps, check_fns = build_plan(cfg)
    config_hash = cfg.config_hash()
    started = time.perf_counter()
    results = {}
    for sweep in sweeps:
        res = run_sweep(sweep, workers, cfg.sector_cap)
        results[sweep.name] = res
        (out_dir / f"{sweep.name}.csv").write_text(records_to_csv(sweep, res.records, config_hash))

    checks: list[Check] = []
    for fn in check_fns:
        checks.extend(fn(results))
    n_failed = sum(r["status"] != "ok" for res in results.values() for r in res.records)
    summary = {
        "config_hash": config_hash,
        "preset": cfg.preset,
        "fits": {name: res.fits for name, res in results.items()},
        "checks": [c.as_dict() for c in checks],
        "all_checks_passed": all(c.passed for c in checks),
        "failed_points": n_failed,
        "warnings": report.warnings,
        "numerics": {
            "derivative_step": "1e-5 * max(1, |coupling|)",
            "mixed_floor": 1e-14,
            "probability_floor": 1e-12,
            "grouping_tol": 1e-8,
            "example_step": derivative_step(0.1),
        },
    }
    manifest = {
        "config_hash": config_hash,
        "config": cfg.canonical(),
        "versions": {
            "wireqfi": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "workers": workers,
        "timings": {name: res.wall_time for name, res in results.items()},
        "point_wall_times": {name: [r["wall_time"] for r in res.records] for name, res in results.items()},
        "total_wall_time": time.perf_counter() - started,
        "outputs": [f"{name}.csv" for name in results],
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True, default=_json_default))
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_json_default))

    if n_failed:
        code = 1
    elif check and not summary["all_checks_passed"]:
        code = 2
    else:
        code = 0
    return RunResult(results, checks, summary, manifest, code)


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")
