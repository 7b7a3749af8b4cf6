"""Named presets ``fig1``..``fig5``: fixed sweep grids plus their checks.

``scale="quick"`` shrinks every grid for smoke runs; ``"full"`` is the
desk-scale reproduction.
"""
from __future__ import annotations

import numpy as np

from .lattice import ModelParams
from .runner import Check, Sweep, expand_grid

SINGLE_PARTICLE_L = [40, 60, 80, 100, 140, 200]
SLATER_L = [20, 40, 60, 80, 100]
# {4, 5, 6} plus L = 7 so the log-log fit has the four points it needs
INTERACTING_L = [4, 5, 6, 7]

FIG1_POINTS = [(0.05, 0.1), (0.05, 0.9), (0.9, 0.9), (0.9, 0.05)]  # (B, alpha_z)
FIG4_POINTS = [(0.05, 0.1), (0.9, 0.05), (0.9, 0.9), (0.05, 0.9)]  # (alpha_y, alpha_z)


def _label(**kw) -> str:
    return "_".join(f"{k}{v:g}" for k, v in kw.items())


def _interval(name, value, lo, hi) -> Check:
    ok = bool(np.isfinite(value) and lo <= value <= hi)
    return Check(name, ok, f"{value:.4f}", f"[{lo}, {hi}]")


def _fit_exponent(results, sweep, kind, component=None) -> float:
    for f in results[sweep].fits:
        if f["fit"] != kind or "error" in f:
            continue
        if component is not None:
            return f["components"][component]["exponent"]
        return f["exponent"]
    return float("nan")


def _ok_records(results, sweep):
    return [r for r in results[sweep].records if r["status"] == "ok"]


def _cfi_le_qfi(results) -> list[Check]:
    worst, name = -np.inf, ""
    for sname, res in results.items():
        for r in res.records:
            if r.get("cfi") is not None and r.get("qfi") is not None:
                excess = r["cfi"] - r["qfi"]
                if excess > worst:
                    worst, name = excess, sname
    if worst == -np.inf:
        return []
    return [Check("cfi <= qfi + 1e-8", worst <= 1e-8, f"max(cfi - qfi) = {worst:.3e} ({name})", "<= 1e-8")]


def fig1(scale):
    n = 20 if scale == "full" else 5
    Ls = SINGLE_PARTICLE_L if scale == "full" else [40, 60, 80, 100]
    sweeps = [
        Sweep(
            "fig1_heatmap",
            "ground",
            ("alpha",),
            expand_grid({"L": [100], "alpha": np.linspace(0.05, 1.0, n).tolist(), "B": np.linspace(0.01, 1.0, n).tolist()}),
        )
    ]
    for B, az in FIG1_POINTS:
        sweeps.append(
            Sweep(
                f"fig1_scaling_{_label(B=B, alpha_z=az)}",
                "ground",
                ("alpha",),
                [ModelParams(L=L, alpha_y=az, alpha_z=az, B=B) for L in Ls],
                fit=("gap", "qfi"),
            )
        )

    def checks(results):
        out = []
        for B, az in FIG1_POINTS:
            s = f"fig1_scaling_{_label(B=B, alpha_z=az)}"
            out.append(_interval(f"{s}: gap exponent mu", _fit_exponent(results, s, "gap"), 1.7, 2.3))
            out.append(_interval(f"{s}: QFI exponent beta", _fit_exponent(results, s, "qfi"), 1.8, 2.2))
            r2 = next((f["result"]["r2"] for f in results[s].fits if f["fit"] == "qfi" and "error" not in f), 0.0)
            out.append(Check(f"{s}: QFI fit r2", r2 > 0.99, f"{r2:.5f}", "> 0.99"))
        return out

    return sweeps, [checks]


def fig2(scale):
    full = scale == "full"
    Us = [-4, -3, -2, -1, 0, 0.5, 1, 2, 3, 4, 5, 6, 8, 10] if full else [-2, 0, 2, 5, 8]
    Vs = np.linspace(0, 2, 9).tolist() if full else [0, 1, 2]
    L_ed = 6 if full else 4
    sweeps = []
    for az in (0.1, 0.5, 0.9):
        sweeps.append(
            Sweep(
                f"fig2_slater_{_label(alpha_z=az)}",
                "slater",
                ("alpha",),
                [ModelParams(L=L, alpha_y=az, alpha_z=az, B=0.01) for L in (SLATER_L if full else [20, 30, 40, 50])],
                fit=("gap-power", "qfi"),
            )
        )
    base = dict(alpha_y=0.1, alpha_z=0.1, B=0.01)
    sweeps.append(Sweep("fig2_U", "many-body", ("alpha",), [ModelParams(L=L_ed, U=U, **base) for U in Us]))
    sweeps.append(Sweep("fig2_V", "many-body", ("alpha",), [ModelParams(L=L_ed, V=V, **base) for V in Vs]))
    sweeps.append(
        Sweep(
            "fig2_U_scaling",
            "many-body",
            ("alpha",),
            [ModelParams(L=L, U=U, **base) for U in ([0, 1, 2, 5] if full else [0, 2]) for L in (INTERACTING_L if full else [3, 4, 5, 6])],
            fit=("qfi",),
        )
    )
    sweeps.append(
        Sweep("fig2_spectrum", "many-body", ("alpha",), [ModelParams(L=L_ed, U=U, **base) for U in Us], spectrum=8)
    )

    def checks(results):
        out = []
        for az in (0.1, 0.5, 0.9):
            s = f"fig2_slater_{_label(alpha_z=az)}"
            out.append(_interval(f"{s}: QFI exponent beta", _fit_exponent(results, s, "qfi"), 1.8, 2.2))
        recs = {r["U"]: r["qfi"] for r in _ok_records(results, "fig2_U")}
        pos = [recs[u] for u in sorted(recs) if u >= 0]
        out.append(Check("fig2_U: QFI increasing for U >= 0", bool(np.all(np.diff(pos) > 0)), f"{np.round(pos, 4).tolist()}", "strictly increasing"))
        if 5 in recs:
            last = recs[max(recs)]
            out.append(Check("fig2_U: saturation", abs(last - recs[5]) <= 0.1 * recs[5], f"F(U={max(recs):g}) / F(U=5) = {last / recs[5]:.4f}", "within 10%"))
        if -2 in recs and 0 in recs:
            ratio = recs[-2] / recs[0]
            out.append(Check("fig2_U: attractive suppression", ratio < 0.1, f"F(U=-2) / F(U=0) = {ratio:.4f}", "< 0.1"))
        vrec = [r["qfi"] for r in sorted(_ok_records(results, "fig2_V"), key=lambda r: r["V"])]
        out.append(Check("fig2_V: QFI decreasing in V", bool(np.all(np.diff(vrec) < 0)), f"{np.round(vrec, 4).tolist()}", "strictly decreasing"))
        return out

    return sweeps, [checks]


def fig3(scale):
    full = scale == "full"
    Ts = [0.0] + np.geomspace(1e-5, 1.0, 31 if full else 16).tolist()
    sweeps = []
    for L in ([100, 200] if full else [60]):
        sweeps.append(
            Sweep(
                f"fig3_thermal_L{L}",
                "thermal",
                ("alpha",),
                [ModelParams(L=L, alpha_y=0.1, alpha_z=0.1, B=0.01, T=T) for T in Ts],
                fit=("qfi-T",),
            )
        )
    Ls = 6 if full else 4
    T_mb = [0.0] + np.geomspace(1e-3, 1.0, 7 if full else 3).tolist()
    sweeps.append(
        Sweep(
            "fig3_thermal_U",
            "many-body-thermal",
            ("alpha",),
            [ModelParams(L=Ls, alpha_y=0.1, alpha_z=0.1, B=0.01, U=U, T=T) for U in ([0, 1, 2, 5] if full else [0, 2]) for T in T_mb],
        )
    )

    def checks(results):
        out = []
        for s in [n for n in results if n.startswith("fig3_thermal_L")]:
            out.append(_interval(f"{s}: decay slope", -_fit_exponent(results, s, "qfi-T"), -1.15, -0.85))
            recs = _ok_records(results, s)
            ground = next(r for r in recs if r["T"] == 0.0)
            low = [r for r in recs if 0 < r["T"] < ground["gap"] / 3]
            dev = max(abs(r["qfi"] / ground["qfi"] - 1) for r in low) if low else float("nan")
            out.append(Check(f"{s}: ground plateau for T < gap/3", bool(dev <= 0.05), f"max deviation {dev:.4f}", "<= 0.05"))
        return out

    return sweeps, [checks]


def fig4(scale):
    full = scale == "full"
    n = 15 if full else 4
    Ls = SINGLE_PARTICLE_L if full else [40, 60, 80, 100]
    grid = np.linspace(0.05, 1.0, n).tolist()
    target = ("alpha_y", "alpha_z")
    sweeps = [Sweep("fig4_heatmap", "ground", target, expand_grid({"L": [100], "alpha_y": grid, "alpha_z": grid, "B": [0.01]}))]
    for ay, az in FIG4_POINTS:
        sweeps.append(
            Sweep(
                f"fig4_scaling_{_label(alpha_y=ay, alpha_z=az)}",
                "ground",
                target,
                [ModelParams(L=L, alpha_y=ay, alpha_z=az, B=0.01) for L in Ls],
                fit=("qfim",),
            )
        )

    def checks(results):
        out = []
        for ay, az in FIG4_POINTS:
            s = f"fig4_scaling_{_label(alpha_y=ay, alpha_z=az)}"
            for col in ("qfim_alpha_z_alpha_z", "qfim_alpha_y_alpha_y", "qfim_alpha_y_alpha_z"):
                out.append(_interval(f"{s}: {col} exponent", _fit_exponent(results, s, "qfim", col), 1.6, 2.2))
        worst = np.inf
        for name, res in results.items():
            for r in res.records:
                if r["status"] != "ok":
                    continue
                m = np.array([[r["qfim_alpha_y_alpha_y"], r["qfim_alpha_y_alpha_z"]], [r["qfim_alpha_y_alpha_z"], r["qfim_alpha_z_alpha_z"]]])
                worst = min(worst, float(np.linalg.eigvalsh(m)[0]))
        out.append(Check("fig4: QFIM positive semidefinite", worst >= -1e-10, f"min eigenvalue {worst:.3e}", ">= -1e-10"))
        return out

    return sweeps, [checks]


def fig5(scale):
    full = scale == "full"
    alphas = np.round(np.linspace(0.05, 1.0, 20 if full else 5), 10).tolist()
    L = 100 if full else 40
    sweeps = [
        Sweep("fig5_ground", "ground", ("alpha",), [ModelParams(L=L, alpha_y=a, alpha_z=a, B=0.01) for a in alphas], measure="current"),
        Sweep("fig5_thermal", "thermal", ("alpha",), [ModelParams(L=L, alpha_y=a, alpha_z=a, B=0.01, T=0.01) for a in alphas], measure="current"),
        Sweep(
            "fig5_many_body",
            "many-body",
            ("alpha",),
            [ModelParams(L=6 if full else 4, alpha_y=a, alpha_z=a, B=0.01, U=5.0) for a in alphas],
            measure="current",
        ),
    ]

    def checks(results):
        out = _cfi_le_qfi(results)
        ground = [r for r in _ok_records(results, "fig5_ground") if 0.1 <= r["alpha_z"] <= 1.0]
        ratio = min(r["cfi"] / r["qfi"] for r in ground) if ground else float("nan")
        out.append(Check("fig5_ground: current-basis CFI / QFI for alpha_z in [0.1, 1]", bool(ratio >= 0.95), f"min ratio {ratio:.4f}", ">= 0.95"))
        thermal = _ok_records(results, "fig5_thermal")
        if thermal:
            r = min(thermal, key=lambda r: r["alpha_z"])
            out.append(Check("fig5_thermal: CFI below QFI at smallest alpha_z", r["cfi"] / r["qfi"] < 1, f"ratio {r['cfi'] / r['qfi']:.4f}", "< 1"))
        return out

    return sweeps, [checks]


PRESET_BUILDERS = {"fig1": fig1, "fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5}


def preset_plan(preset: str, scale: str = "full"):
    try:
        builder = PRESET_BUILDERS[preset]
    except KeyError:
        raise ValueError(f"unknown preset {preset!r}") from None
    return builder(scale)
