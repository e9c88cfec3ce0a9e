"""Least-squares power-law and exponential fits in transformed space.

``fit_power`` regresses ``log y`` on ``log x``; ``fit_exponential`` regresses
``log y`` on ``x``. R-squared is reported in the same transformed space.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np

from likecent.errors import DomainError

Family = Literal["power", "exponential"]


@dataclass(frozen=True)
class FitResult:
    """``y = a * x**b`` (power) or ``y = a * exp(b * x)`` (exponential)."""

    family: Family
    a: float
    b: float
    r_squared: float
    n_points: int

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        if self.family == "power":
            return self.a * x**self.b
        return self.a * np.exp(self.b * x)

    def to_dict(self) -> dict:
        return asdict(self)


def _as_xy(points) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError(f"points must be an (n, 2) array, got shape {arr.shape}")
    return arr[:, 0], arr[:, 1]


def _transform(family: Family, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(y)):
        raise DomainError("coordinates must be finite")
    if np.any(y <= 0):
        raise DomainError("y values must be strictly positive")
    if family == "power":
        if np.any(x <= 0):
            raise DomainError("x values must be strictly positive for a power-law fit")
        return np.log(x), np.log(y)
    return x, np.log(y)


def _weighted_line(u, v, w) -> tuple[float, float]:
    wsum = w.sum()
    ubar = (w * u).sum() / wsum
    vbar = (w * v).sum() / wsum
    suu = (w * (u - ubar) ** 2).sum()
    if suu == 0:
        raise DomainError("x values are all equal; slope undefined")
    slope = (w * (u - ubar) * (v - vbar)).sum() / suu
    return vbar - slope * ubar, slope


def _r2_transformed(v, vhat, w) -> float:
    vbar = (w * v).sum() / w.sum()
    ss_tot = (w * (v - vbar) ** 2).sum()
    if ss_tot == 0:
        return math.nan
    return float(1.0 - (w * (v - vhat) ** 2).sum() / ss_tot)


def _fit(family: Family, points, weights) -> FitResult:
    x, y = _as_xy(points)
    if x.size < 3:
        raise DomainError(f"need at least 3 points, got {x.size}")
    u, v = _transform(family, x, y)
    w = np.ones_like(u) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != u.shape or np.any(w < 0) or w.sum() == 0:
        raise DomainError("weights must be nonnegative, one per point, not all zero")
    intercept, slope = _weighted_line(u, v, w)
    r2 = _r2_transformed(v, intercept + slope * u, w)
    return FitResult(family, math.exp(intercept), float(slope), r2, int(x.size))


def fit_power(points, weights=None) -> FitResult:
    """Fit ``y = a x^b`` by least squares on ``(log x, log y)``.

    Args:
        points: ``(n, 2)`` array-like of strictly positive ``(x, y)``.
        weights: Optional nonnegative weight per point (e.g. bin counts).
    """
    return _fit("power", points, weights)


def fit_exponential(points, weights=None) -> FitResult:
    """Fit ``y = a exp(b x)`` by least squares on ``(x, log y)``."""
    return _fit("exponential", points, weights)


def r_squared(points, model: FitResult) -> float:
    """``1 - SS_res / SS_tot`` of ``model`` on ``points`` in its transformed space.

    Returns NaN when the transformed ``y`` has zero variance.
    """
    x, y = _as_xy(points)
    if x.size < 2:
        raise DomainError(f"need at least 2 points, got {x.size}")
    u, v = _transform(model.family, x, y)
    vhat = math.log(model.a) + model.b * u
    return _r2_transformed(v, vhat, np.ones_like(v))
