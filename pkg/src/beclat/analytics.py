"""Closed-form references and estimators for the coherent regime, plus
generic power-law fitting and Lyapunov-exponent extraction.

In the strong-force limit the site populations freeze and the phases
advance at the local interaction rate, which turns the Bloch-wave spectrum
of a Thomas-Fermi packet into a quadratic Gauss sum: exactly periodic with
period T_rev = 2 pi / (g alpha), with n compressed copies of the initial
distribution at rational times (m/n) T_rev.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import Frame, LatticeState, ThomasFermiSpec
from .observables import ObservableSeries, quasimomenta

__all__ = [
    "RevivalStructure",
    "revival_structure",
    "revival_time",
    "FitResult",
    "frozen_phase_state",
    "gauss_sum_spectrum",
    "uniform_closed_form",
    "carpet_fidelity",
    "CoherenceResult",
    "coherence_score",
    "coherence_time",
    "lyapunov_series",
    "fit_power_law",
    "default_fit_window",
    "fractional_revival_overlaps",
]

TWO_PI = 2.0 * math.pi


def revival_time(g: float, alpha: float) -> float:
    """Exact spectrum revival period T_rev = 2 pi / (g alpha)."""
    if not g * alpha > 0:
        raise ValueError(f"revival time requires g*alpha > 0, got g={g}, alpha={alpha}")
    return TWO_PI / (g * alpha)


@dataclass(frozen=True)
class RevivalStructure:
    """Revival period plus the rational times carrying fractional revivals.

    fractions holds reduced (m, n) pairs; at t = (m/n) T_rev the spectrum
    splits into n compressed copies of the initial distribution.
    """

    T_rev: float
    fractions: tuple[tuple[int, int], ...]


def revival_structure(g: float, alpha: float, max_denominator: int = 6) -> RevivalStructure:
    tr = revival_time(g, alpha)
    seen = set()
    for n in range(1, max_denominator + 1):
        for m in range(1, n + 1):
            f = Fraction(m, n)
            seen.add((f.numerator, f.denominator))
    fracs = tuple(sorted(seen, key=lambda mn: mn[0] / mn[1]))
    return RevivalStructure(T_rev=tr, fractions=fracs)


def frozen_phase_state(initial: LatticeState, g: float, t: float) -> LatticeState:
    """Strong-force limit: populations frozen, phases linear in time.

    a_l(t) = a_l(0) exp(-i g |a_l(0)|^2 t), valid in the gauge frame where
    the drive averages the hopping away.  `initial` must be at t = 0.
    """
    if initial.time != 0.0:
        raise ValueError("frozen-phase evolution starts from a t=0 state")
    a0 = initial.amplitudes
    a = a0 * np.exp(-1j * g * (a0.real**2 + a0.imag**2) * t)
    return LatticeState(a, time=t, frame=Frame.GAUGE)


def gauss_sum_spectrum(tf: ThomasFermiSpec, g: float, t: float, L: int) -> np.ndarray:
    """Frozen-phase Bloch-wave amplitudes of a Thomas-Fermi packet.

    b_k(t) proportional to exp(-i g beta t) sum_l a_l(0) exp[i(kappa l +
    g alpha l^2 t)], returned zone-ordered and normalized to unit total
    weight.  At t = 0 this equals the Bloch spectrum of the packet; the
    magnitudes are exactly T_rev-periodic.
    """
    l = np.arange(-tf.radius, tf.radius + 1)
    w = np.sqrt(tf.beta - tf.alpha * l.astype(float) ** 2)
    kappa = quasimomenta(L)
    # reduce the quadratic phase mod 2 pi: g*alpha*t can be huge at t ~ T_rev
    quad = np.mod(g * tf.alpha * t, TWO_PI) * l.astype(float) ** 2
    phases = np.exp(1j * (kappa[:, None] * l[None, :] + quad[None, :]))
    b = phases @ w.astype(complex)
    b *= np.exp(-1j * math.fmod(g * tf.beta * t, TWO_PI))
    return b / np.linalg.norm(b)


def uniform_closed_form(J: float, F: float, g: float, L: int, t: float) -> complex:
    """Zero-quasimomentum amplitude for the uniform initial condition.

    b_0(t) = exp(i (J/F) sin(F t) - i (g/L) t); all other modes vanish
    identically.  The overall constant is fixed by b_0(0) = 1.
    """
    if F == 0:
        raise ValueError("closed form requires F > 0")
    ang = math.sin(math.fmod(F * t, TWO_PI)) * J / F - math.fmod(g * t / L, TWO_PI)
    return complex(math.cos(ang), math.sin(ang))


def carpet_fidelity(p: np.ndarray, q: np.ndarray) -> float:
    """Bhattacharyya overlap sum_k sqrt(p_k q_k) between normalized spectra."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return float(np.sum(np.sqrt(np.clip(p / p.sum(), 0, None) * np.clip(q / q.sum(), 0, None))))


@dataclass(frozen=True)
class CoherenceResult:
    time: float
    censored: bool


def coherence_score(series: ObservableSeries, tf: ThomasFermiSpec, g: float) -> np.ndarray:
    """Per-sample carpet coherence: prediction fidelity rescaled by the
    decohered background.

    The raw Bhattacharyya overlap between a recorded spectrum and the
    Gauss-sum prediction does not drop to zero on decoherence: a featureless
    spectrum still overlaps the prediction by an amount set by how spread
    out the prediction is at that instant.  The score subtracts that floor,
    score = (fid - fid_flat) / (1 - fid_flat), where fid_flat is the
    overlap a flat spectrum would have, so it runs from 1 (carpet intact)
    to about 0 (fully decohered) at every time.
    """
    if series.bk2 is None:
        raise ValueError("series was recorded without spectra")
    times = np.asarray(series.times, dtype=float)
    L = series.bk2.shape[1]
    flat = np.full(L, 1.0 / L)
    score = np.empty(times.size)
    for i, t in enumerate(times):
        pred = np.abs(gauss_sum_spectrum(tf, g, t, L)) ** 2
        fid = carpet_fidelity(series.bk2[i], pred)
        floor = carpet_fidelity(flat, pred)
        score[i] = (fid - floor) / (1.0 - floor)
    return score


def coherence_time(
    series: ObservableSeries,
    revival: RevivalStructure,
    tf: ThomasFermiSpec,
    g: float,
    threshold: float = 0.5,
    dwell_fraction: float = 0.02,
) -> CoherenceResult:
    """First time the carpet coherence drops below `threshold` and stays there.

    Uses the background-rescaled prediction fidelity of coherence_score; a
    dip only counts if it persists for the dwell window dwell_fraction *
    T_rev.  If the score never crosses, the run horizon is returned with
    the censored flag set.
    """
    times = np.asarray(series.times, dtype=float)
    if times.size == 0:
        raise ValueError("empty series")
    score = coherence_score(series, tf, g)
    below = score < threshold
    dwell = dwell_fraction * revival.T_rev
    for i in np.flatnonzero(below):
        window = (times >= times[i]) & (times <= times[i] + dwell)
        if np.all(below[window]):
            return CoherenceResult(time=float(times[i]), censored=False)
    return CoherenceResult(time=float(times[-1]), censored=True)


def lyapunov_series(log_rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Finite-time Lyapunov exponent lambda(t) = ln|delta a(t)| / t.

    log_rows is an array of (t, ln|delta a|) rows, as produced by the
    tangent propagation; t = 0 entries are excluded.
    """
    rows = np.asarray(log_rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != 2:
        raise ValueError("expected an array of (t, log magnitude) rows")
    mask = rows[:, 0] > 0
    t = rows[mask, 0]
    return t, rows[mask, 1] / t


@dataclass(frozen=True)
class FitResult:
    """Least-squares power law v = prefactor * t^exponent over a time window."""

    exponent: float
    prefactor: float
    fit_window: tuple[float, float]
    residual: float


def default_fit_window(times: np.ndarray, values: np.ndarray, transient_ratio: float = 1.05) -> tuple[float, float]:
    """Last half-decade of time, past the transient where spreading begins.

    The transient end is the first time the value exceeds transient_ratio
    times its initial value.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    t_end = times[-1]
    t_min = t_end / math.sqrt(10.0)
    grown = np.flatnonzero(values > transient_ratio * values[0])
    if grown.size:
        t_min = max(t_min, float(times[grown[0]]))
    return (t_min, float(t_end))


def fit_power_law(
    times: np.ndarray,
    values: np.ndarray,
    window: tuple[float, float] | None = None,
) -> FitResult:
    """Fit ln(v) = exponent * ln(t) + ln(prefactor) over the window.

    All values in the window must be positive; fewer than 8 points in the
    window is an error.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is None:
        window = default_fit_window(times, values)
    lo, hi = window
    if not lo < hi:
        raise ValueError(f"empty fit window {window}")
    mask = (times >= lo) & (times <= hi) & (times > 0)
    if int(mask.sum()) < 8:
        raise ValueError(f"fewer than 8 samples in fit window {window}")
    v = values[mask]
    if np.any(v <= 0):
        raise ValueError("power-law fit requires positive values in the window")
    lt = np.log(times[mask])
    lv = np.log(v)
    slope, intercept = np.polyfit(lt, lv, 1)
    resid = float(np.sqrt(np.mean((lv - (slope * lt + intercept)) ** 2)))
    return FitResult(
        exponent=float(slope),
        prefactor=float(np.exp(intercept)),
        fit_window=(float(lo), float(hi)),
        residual=resid,
    )


def fractional_revival_overlaps(
    series: ObservableSeries,
    revival: RevivalStructure,
    tf: ThomasFermiSpec,
    g: float,
) -> list[dict]:
    """Fidelity against the Gauss-sum prediction at each rational (m/n) T_rev.

    Descriptive diagnostic: the copies are approximate, so this reports
    numbers rather than gating anything.
    """
    if series.bk2 is None:
        raise ValueError("series was recorded without spectra")
    times = np.asarray(series.times, dtype=float)
    L = series.bk2.shape[1]
    out = []
    for m, n in revival.fractions:
        t_frac = revival.T_rev * m / n
        if t_frac > times[-1] + 1e-9:
            continue
        i = int(np.argmin(np.abs(times - t_frac)))
        pred = np.abs(gauss_sum_spectrum(tf, g, times[i], L)) ** 2
        out.append(
            {
                "m": m,
                "n": n,
                "time": float(times[i]),
                "fidelity": carpet_fidelity(series.bk2[i], pred),
            }
        )
    return out
