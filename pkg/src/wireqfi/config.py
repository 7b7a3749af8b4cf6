"""Experiment configuration: parsing and validation.

Config files are flat ``key = value`` text, one entry per line, ``#``
starts a comment. Values are Python literals (numbers, strings, lists) or
one of ``linspace(a, b, n)``, ``geomspace(a, b, n)``, ``range(a, b, step)``.
Bare words are read as strings. Example::

    name = alpha_scan
    probe = single-particle
    target = alpha
    L = [40, 60, 80, 100]
    alpha = linspace(0.1, 0.9, 5)
    B = 0.05
    fit = gap, qfi

Grid keys: L, N, t, alpha, alpha_y, alpha_z, B, U, V, T (``alpha`` sets
alpha_y = alpha_z). Other keys: name, preset, scale, probe, target, mode,
measure, spectrum, fit, out, workers, sector_cap, check_exponent.
"""
from __future__ import annotations

import ast
import hashlib
import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .fock import sector_cap as default_sector_cap
from .fock import sector_dimension
from .lattice import COUPLINGS
from .spectral import DENSE_THRESHOLD

PRESETS = ("fig1", "fig2", "fig3", "fig4", "fig5", "custom")
PROBES = {
    "single-particle": "ground",
    "thermal": "thermal",
    "slater": "slater",
    "many-body-ed": "many-body",
    "many-body-thermal": "many-body-thermal",
}
GRID_KEYS = ("L", "N", "t", "alpha", "alpha_y", "alpha_z", "B", "U", "V", "T")
FITS = ("gap", "gap-power", "qfi", "qfim", "qfi-T")
SCALAR_KEYS = (
    "name", "preset", "scale", "probe", "target", "mode", "measure", "spectrum", "fit",
    "out", "workers", "sector_cap", "check_exponent",
)
KNOWN_KEYS = GRID_KEYS + SCALAR_KEYS

# warn when B < ZEEMAN_FLOOR * t / L**2 (B > 0.005 t at L = 100)
ZEEMAN_FLOOR = 50.0


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass
class ExperimentConfig:
    name: str = "custom"
    preset: str = "custom"
    scale: str = "full"
    probe: str = "single-particle"
    target: tuple = ("alpha",)
    grid: dict = field(default_factory=dict)
    mode: str = "product"
    measure: str = "none"
    spectrum: int = 0
    fit: tuple = ()
    out: str = "results"
    workers: int = 1
    sector_cap: int | None = None
    check_exponent: tuple | None = None
    lines: dict = field(default_factory=dict, repr=False, compare=False)

    def canonical(self) -> dict:
        return {
            "name": self.name,
            "preset": self.preset,
            "scale": self.scale,
            "probe": self.probe,
            "target": list(self.target),
            "grid": {k: list(v) for k, v in sorted(self.grid.items())},
            "mode": self.mode,
            "measure": self.measure,
            "spectrum": self.spectrum,
            "fit": list(self.fit),
            "sector_cap": self.sector_cap,
            "check_exponent": None if self.check_exponent is None else list(self.check_exponent),
        }

    def config_hash(self) -> str:
        # output dir and worker count do not change results
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


_CALL = re.compile(r"^(linspace|geomspace|range)\((.*)\)$")


def _parse_value(text: str):
    text = text.strip()
    m = _CALL.match(text)
    if m:
        fn, args = m.groups()
        args = ast.literal_eval(f"({args},)")
        if fn == "linspace":
            return np.linspace(*args).tolist()
        if fn == "geomspace":
            return np.geomspace(*args).tolist()
        return list(range(*args))
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        if "," in text:
            return [_parse_value(part) for part in text.split(",")]
        return text


def parse_config(text: str) -> ExperimentConfig:
    """Parse config text; raises ConfigError listing every problem with its line."""
    raw: dict = {}
    lines: dict = {}
    errors: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value', got {line!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in raw:
            errors.append(f"line {lineno}: duplicate key {key!r} (first on line {lines[key]})")
            continue
        try:
            raw[key] = _parse_value(value)
        except (ValueError, SyntaxError, TypeError) as exc:
            errors.append(f"line {lineno}: cannot parse value for {key!r}: {exc}")
            continue
        lines[key] = lineno
    if errors:
        raise ConfigError(errors)
    return config_from_mapping(raw, lines)


def _as_list(value) -> list:
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def config_from_mapping(raw: dict, lines: dict | None = None) -> ExperimentConfig:
    lines = dict(lines or {})
    errors: list[str] = []

    def where(key):
        return f"line {lines[key]}: " if key in lines else ""

    cfg = ExperimentConfig(lines=lines)
    for key in ("name", "preset", "scale", "probe", "mode", "measure", "out"):
        if key in raw:
            setattr(cfg, key, str(raw[key]))
    if "target" in raw:
        cfg.target = tuple(str(t).strip() for t in _as_list(raw["target"]))
    if "fit" in raw:
        cfg.fit = tuple(str(f).strip() for f in _as_list(raw["fit"]) if str(f).strip() != "none")
    for key in ("workers", "spectrum", "sector_cap"):
        if key in raw:
            value = raw[key]
            if isinstance(value, bool) or not isinstance(value, int):
                errors.append(f"{where(key)}{key} must be an integer, got {value!r}")
            else:
                setattr(cfg, key, value)
    if "check_exponent" in raw:
        value = _as_list(raw["check_exponent"])
        if len(value) != 2 or not all(isinstance(v, (int, float)) for v in value):
            errors.append(f"{where('check_exponent')}check_exponent must be [low, high]")
        else:
            cfg.check_exponent = (float(value[0]), float(value[1]))
    for key in GRID_KEYS:
        if key in raw:
            values = _as_list(raw[key])
            if not values:
                errors.append(f"{where(key)}grid {key!r} is empty")
            elif not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
                errors.append(f"{where(key)}grid {key!r} must hold numbers, got {values!r}")
            else:
                cfg.grid[key] = values
    if errors:
        raise ConfigError(errors)
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def _grid_values(cfg: ExperimentConfig, key: str, default):
    return cfg.grid.get(key, [default])


def validate(cfg: ExperimentConfig) -> ValidationReport:
    """Collect every invariant violation and advisory warning at once."""
    rep = ValidationReport()

    def where(key):
        return f"line {cfg.lines[key]}: " if key in cfg.lines else ""

    if cfg.preset not in PRESETS:
        rep.errors.append(f"{where('preset')}unknown preset {cfg.preset!r}; expected one of {PRESETS}")
    if cfg.scale not in ("full", "quick"):
        rep.errors.append(f"{where('scale')}scale must be 'full' or 'quick', got {cfg.scale!r}")
    if cfg.workers < 1:
        rep.errors.append(f"{where('workers')}workers must be >= 1")
    if cfg.sector_cap is not None and cfg.sector_cap < 1:
        rep.errors.append(f"{where('sector_cap')}sector_cap must be positive")
    if cfg.preset != "custom":
        extra = [k for k in cfg.lines if k not in ("preset", "scale", "out", "workers", "sector_cap", "name")]
        for key in extra:
            rep.errors.append(f"{where(key)}key {key!r} cannot be combined with preset {cfg.preset!r}")
        return rep

    if cfg.probe not in PROBES:
        rep.errors.append(f"{where('probe')}unknown probe {cfg.probe!r}; expected one of {tuple(PROBES)}")
    if cfg.mode not in ("product", "zip"):
        rep.errors.append(f"{where('mode')}mode must be 'product' or 'zip', got {cfg.mode!r}")
    if cfg.measure not in ("none", "current"):
        rep.errors.append(f"{where('measure')}measure must be 'none' or 'current', got {cfg.measure!r}")
    if cfg.spectrum < 0:
        rep.errors.append(f"{where('spectrum')}spectrum must be >= 0")
    if not cfg.target:
        rep.errors.append(f"{where('target')}target must name at least one coupling")
    for t in cfg.target:
        if t not in COUPLINGS:
            rep.errors.append(f"{where('target')}unknown target {t!r}; expected one of {COUPLINGS}")
    for f in cfg.fit:
        if f not in FITS:
            rep.errors.append(f"{where('fit')}unknown fit {f!r}; expected one of {FITS}")
    probe = PROBES.get(cfg.probe)
    if len(cfg.target) > 1 and probe not in ("ground", "many-body"):
        rep.errors.append(f"{where('target')}multi-parameter targets need a pure probe (single-particle or many-body-ed)")
    if cfg.measure == "current" and (probe == "slater" or len(cfg.target) > 1):
        rep.errors.append(f"{where('measure')}current measurement needs a single target and a non-Slater probe")
    if "alpha" in cfg.grid and ("alpha_y" in cfg.grid or "alpha_z" in cfg.grid):
        rep.errors.append(f"{where('alpha')}'alpha' ties alpha_y = alpha_z and cannot be mixed with them")

    for key, values in cfg.grid.items():
        for v in values:
            if not math.isfinite(v):
                rep.errors.append(f"{where(key)}{key} values must be finite, got {v}")
    Ls = _grid_values(cfg, "L", None)
    if "L" not in cfg.grid:
        rep.errors.append("L grid is required")
        Ls = []
    for L in Ls:
        if int(L) != L or L < 2:
            rep.errors.append(f"{where('L')}L >= 2 required, got L={L}")
    for T in _grid_values(cfg, "T", 0.0):
        if T < 0:
            rep.errors.append(f"{where('T')}T >= 0 required, got T={T}")
    if probe in ("thermal", "many-body-thermal") and "T" not in cfg.grid:
        rep.warnings.append("thermal probe without a T grid runs at T = 0")
    if cfg.mode == "zip":
        sizes = {k: len(v) for k, v in cfg.grid.items()}
        if len(set(sizes.values()) - {1}) > 1:
            rep.errors.append(f"zip mode needs grids of equal length (or length 1), got {sizes}")

    valid_L = [int(L) for L in Ls if int(L) == L and L >= 2]
    ts = [abs(t) for t in _grid_values(cfg, "t", 1.0)]
    for L in valid_L:
        floor = ZEEMAN_FLOOR * max(ts) / L**2
        for B in _grid_values(cfg, "B", 0.0):
            if abs(B) < floor:
                rep.warnings.append(
                    f"{where('B')}B = {B:g} is below the degeneracy-safe floor {floor:.3g} at L = {L}; "
                    "the gap may reflect the Zeeman splitting"
                )
    for N in _grid_values(cfg, "N", None):
        for L in valid_L:
            if N is not None and not 0 <= N <= 2 * L:
                rep.errors.append(f"{where('N')}0 <= N <= 2L required, got N={N} at L={L}")

    if probe in ("many-body", "many-body-thermal"):
        cap = cfg.sector_cap or default_sector_cap()
        for L in valid_L:
            for N in _grid_values(cfg, "N", None):
                n = L if N is None else int(N)
                if not 0 <= n <= 2 * L:
                    continue
                dim = sector_dimension(L, n)
                if dim > cap:
                    rep.errors.append(f"{where('L')}sector C({2 * L},{n}) = {dim} exceeds the cap {cap}")
                elif dim > DENSE_THRESHOLD:
                    if probe == "many-body-thermal":
                        rep.errors.append(
                            f"{where('L')}thermal probe needs the full spectrum; sector dimension {dim} "
                            f"is above the dense limit {DENSE_THRESHOLD}"
                        )
                    else:
                        rep.warnings.append(
                            f"{where('L')}sector dimension {dim} at L = {L} uses the iterative solver; "
                            "expect long runtimes"
                        )
    return rep
