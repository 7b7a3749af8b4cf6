"""Power-law fits of gaps and Fisher information."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.optimize import OptimizeWarning, curve_fit

MIN_POINTS = 4


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class ScalingFit:
    """Result of a scaling fit.

    ``model`` is ``offset-power-law`` (y = a x^-mu + b), ``pure-power``
    (y = c x^beta) or ``decay`` (y = c x^-gamma).
    """

    model: str
    params: dict
    stderr: dict
    r2: float
    points: tuple

    @property
    def exponent(self) -> float:
        return self.params[{"offset-power-law": "mu", "pure-power": "beta", "decay": "gamma"}[self.model]]

    @property
    def exponent_stderr(self) -> float:
        return self.stderr[{"offset-power-law": "mu", "pure-power": "beta", "decay": "gamma"}[self.model]]

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "params": dict(self.params),
            "stderr": dict(self.stderr),
            "r2": self.r2,
            "n_points": len(self.points),
        }


def _prepare(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D arrays of equal length")
    if len(x) < MIN_POINTS:
        raise ValueError(f"need at least {MIN_POINTS} points, got {len(x)}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("data must be finite")
    return x, y


def _r2(y, fitted) -> float:
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot == 0:
        return 1.0 if ss_res == 0 else 0.0
    return float(np.clip(1.0 - ss_res / ss_tot, 0.0, 1.0))


def _offset_power(x, a, mu, b):
    return a * x ** (-mu) + b


def fit_gap_scaling(L, gap) -> ScalingFit:
    """Nonlinear least squares of gap = a L^-mu + b.

    Residuals are relative to the data so every size weighs the same.
    """
    x, y = _prepare(L, gap)
    if np.any(np.diff(x) <= 0):
        raise ValueError("L must be strictly increasing")
    if np.any(y <= 0):
        raise ValueError("gaps must be positive")
    shifted = y - 0.99 * y.min()
    slope, intercept = np.polyfit(np.log(x), np.log(shifted), 1)
    p0 = (float(np.exp(intercept)), float(-slope), 0.99 * float(y.min()))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OptimizeWarning)
        try:
            popt, pcov = curve_fit(
                _offset_power, x, y, p0=p0, sigma=y, maxfev=20000, xtol=1e-15, ftol=1e-15, gtol=1e-15
            )
        except RuntimeError as exc:
            raise FitError(f"gap fit did not converge: {exc}") from exc
    fitted = _offset_power(x, *popt)
    rel_res = float(np.max(np.abs(fitted - y) / y))
    if not np.all(np.isfinite(popt)):
        raise FitError(f"gap fit produced non-finite parameters (max relative residual {rel_res:.3e})")
    err = np.sqrt(np.clip(np.diag(pcov), 0, None)) if np.all(np.isfinite(pcov)) else np.full(3, np.nan)
    return ScalingFit(
        "offset-power-law",
        {"a": float(popt[0]), "mu": float(popt[1]), "b": float(popt[2])},
        {"a": float(err[0]), "mu": float(err[1]), "b": float(err[2])},
        _r2(y, fitted),
        tuple(zip(x.tolist(), y.tolist())),
    )


def fit_power_law(x, y, expect_decay: bool = False) -> ScalingFit:
    """Ordinary least squares of log y against log x."""
    x, y = _prepare(x, y)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit needs positive data")
    reg = stats.linregress(np.log(x), np.log(y))
    c = float(np.exp(reg.intercept))
    c_err = c * float(reg.intercept_stderr)
    r2 = float(np.clip(reg.rvalue**2, 0.0, 1.0))
    points = tuple(zip(x.tolist(), y.tolist()))
    if expect_decay:
        return ScalingFit("decay", {"c": c, "gamma": -float(reg.slope)}, {"c": c_err, "gamma": float(reg.stderr)}, r2, points)
    return ScalingFit("pure-power", {"c": c, "beta": float(reg.slope)}, {"c": c_err, "beta": float(reg.stderr)}, r2, points)


def thermal_window(T, values, gap: float, factor: float = 3.0, upper: float | None = None):
    """Points with T above ``factor * gap`` (and at most ``upper * gap`` if given)."""
    T = np.asarray(T, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = T > factor * gap
    if upper is not None:
        keep &= T <= upper * gap
    return T[keep], values[keep]
