"""Decay-law fitting for scale-indexed magnitude sequences.

Given |A(tau)| on a grid, three laws compete: a power law C * tau^-k, an
exponential C * exp(-r tau), and "faster than any power", which shows up as
windowed power exponents that keep growing with tau.  Selection: a clean
exponential (only meaningful when a width parameter gamma > 0 drives it)
wins on residual; otherwise monotonically growing window exponents indicate
super-polynomial decay; otherwise the power law stands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UNDERFLOW_FLOOR = 1e-300


@dataclass(frozen=True)
class FalloffFit:
    """Fitted decay law of a tau-indexed magnitude sequence.

    ``exponent_or_rate`` is the power exponent k, the exponential rate r, or
    the final-window exponent for the super-polynomial kind.  ``alpha`` is
    r / gamma for exponential fits (the width-normalized rate).  ``residual``
    is the RMS misfit of log-magnitude under the selected law.
    """

    kind: str  # "power" | "exponential" | "superpoly" | "underflow"
    exponent_or_rate: float
    C: float
    alpha: float | None
    residual: float
    tau_range: tuple[float, float]
    windowed_exponents: tuple[float, ...] = ()
    gamma: float = 0.0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "exponent_or_rate": self.exponent_or_rate,
            "C": self.C,
            "alpha": self.alpha,
            "residual": self.residual,
            "tau_range": list(self.tau_range),
            "windowed_exponents": list(self.windowed_exponents),
            "gamma": self.gamma,
        }


def _linefit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line y = a + b x; returns (a, b, rms residual)."""
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid**2)))


def windowed_power_exponents(taus: np.ndarray, mags: np.ndarray, n_windows: int = 4) -> list[float]:
    """Power exponents fitted on consecutive log-tau windows."""
    logt = np.log(taus)
    edges = np.linspace(logt[0], logt[-1], n_windows + 1)
    out = []
    for i in range(n_windows):
        lo, hi = edges[i], edges[i + 1]
        mask = (logt >= lo - 1e-12) & (logt <= hi + 1e-12)
        if np.sum(mask) < 3:
            continue
        _, slope, _ = _linefit(logt[mask], np.log(mags[mask]))
        out.append(-slope)
    return out


def fit_falloff(
    taus,
    mags,
    gamma: float = 0.0,
    n_windows: int = 4,
    superpoly_margin: float = 0.15,
) -> FalloffFit:
    """Fit the decay kind and rate of |A(tau)|.

    Magnitudes at or below the underflow floor are dropped; if nothing
    survives the fit degenerates to kind "underflow".
    """
    taus = np.asarray(taus, dtype=float)
    mags = np.asarray(mags, dtype=float)
    order = np.argsort(taus)
    taus, mags = taus[order], mags[order]
    keep = mags > UNDERFLOW_FLOOR
    tau_range = (float(taus[0]), float(taus[-1])) if taus.size else (math.nan, math.nan)
    if np.sum(keep) < 4:
        return FalloffFit("underflow", math.nan, math.nan, None, math.nan, tau_range, (), gamma)
    taus, mags = taus[keep], mags[keep]
    tau_range = (float(taus[0]), float(taus[-1]))
    logm = np.log(mags)

    a_pow, b_pow, rms_pow = _linefit(np.log(taus), logm)
    a_exp, b_exp, rms_exp = _linefit(taus, logm)
    windows = windowed_power_exponents(taus, mags, n_windows)

    growing = len(windows) >= 3 and all(
        w2 - w1 > superpoly_margin for w1, w2 in zip(windows, windows[1:])
    )

    if gamma > 0 and -b_exp > 0 and rms_exp <= rms_pow:
        rate = -b_exp
        return FalloffFit(
            "exponential", rate, math.exp(a_exp), rate / gamma, rms_exp, tau_range, tuple(windows), gamma
        )
    if growing:
        return FalloffFit(
            "superpoly",
            windows[-1],
            math.exp(a_pow),
            None,
            rms_pow,
            tau_range,
            tuple(windows),
            gamma,
        )
    return FalloffFit("power", -b_pow, math.exp(a_pow), None, rms_pow, tau_range, tuple(windows), gamma)
