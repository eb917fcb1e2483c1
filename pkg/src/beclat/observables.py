"""Diagnostics computed from lattice states: populations, Bloch-wave spectra,
dispersion, total-variation fluctuation, energy, and time-series recording.

Quasimomentum convention: kappa = 2 pi k / L with k ordered so that kappa
runs over [-pi, pi) ascending ("zone" order).  The raw transform's natural
DFT order is exposed for the momentum-space propagator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Frame, FrameError, LatticeState, ModelParams, to_frame

__all__ = [
    "quasimomenta",
    "bloch_spectrum",
    "dispersion",
    "fluctuation",
    "energy",
    "ObservableSeries",
    "SeriesRecorder",
    "carpet_grid",
    "trailing_average_profile",
]


def quasimomenta(L: int) -> np.ndarray:
    """Zone-ordered quasimomentum grid kappa in [-pi, pi)."""
    return 2.0 * np.pi * np.arange(-(L // 2), L // 2) / L


def bloch_spectrum(
    state: LatticeState,
    params: ModelParams | None = None,
    order: str = "zone",
) -> np.ndarray:
    """Bloch-wave amplitudes b_k = L^{-1/2} sum_l exp(-i kappa l) a_l.

    The transform is unitary and uses the physical (symmetric-window) site
    index, so real even profiles give real even spectra.  The state must be
    in the gauge frame; a static-frame state is converted first, which
    requires params.
    """
    if state.frame is not Frame.GAUGE:
        if params is None:
            raise FrameError("bloch_spectrum needs a gauge-frame state (or params to convert one)")
        state = to_frame(state, Frame.GAUGE, params)
    L = state.amplitudes.size
    # physical l = storage index - L/2 shifts each mode by (-1)^k
    b = np.fft.fft(state.amplitudes) / np.sqrt(L)
    b *= (-1.0) ** np.arange(L)
    if order == "natural":
        return b
    if order == "zone":
        return np.fft.fftshift(b)
    raise ValueError(f"unknown order {order!r}, expected 'zone' or 'natural'")


def dispersion(P: np.ndarray, sites: np.ndarray | None = None) -> float:
    """Second central moment M = sum l^2 P_l - (sum l P_l)^2 in site units^2."""
    P = np.asarray(P, dtype=float)
    if sites is None:
        sites = np.arange(-(P.size // 2), P.size // 2)
    l = sites.astype(float)
    return float(np.sum(l**2 * P) - np.sum(l * P) ** 2)


def fluctuation(P: np.ndarray) -> float:
    """Total variation C = sum_l |P_{l+1} - P_l| over the periodic ring."""
    P = np.asarray(P, dtype=float)
    return float(np.sum(np.abs(np.diff(P))) + abs(P[0] - P[-1]))


def energy(state: LatticeState, params: ModelParams) -> float:
    """Hamiltonian of the static-frame equation (a constant of motion):

    H = sum_l F l P_l - (J/2) sum_l (conj(a_{l+1}) a_l + c.c.) + (g/2) sum_l P_l^2
    """
    state.require_frame(Frame.STATIC, "energy")
    a = state.amplitudes
    P = a.real**2 + a.imag**2
    hop = np.sum(np.conj(np.roll(a, -1)) * a).real
    return float(params.F * np.sum(params.sites * P) - params.J * hop + 0.5 * params.g * np.sum(P**2))


@dataclass
class ObservableSeries:
    """Time-stamped observable records from one run.

    P has one row per sample (columns are sites l = -L/2 ... L/2-1); bk2
    likewise with zone-ordered modes.  lam is filled only for runs with a
    co-propagated tangent vector.
    """

    times: np.ndarray
    P: np.ndarray
    bk2: np.ndarray | None
    M: np.ndarray
    C: np.ndarray
    H: np.ndarray
    norm: np.ndarray
    lam: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self) -> int:
        return int(np.asarray(self.times).size)


class SeriesRecorder:
    """Observer that accumulates an ObservableSeries during propagation.

    Accepts states in either frame: populations are frame independent, the
    spectrum is taken in the gauge frame and the energy in the static frame.
    """

    def __init__(self, params: ModelParams, record_spectrum: bool = True):
        self.params = params
        self.record_spectrum = record_spectrum
        self._times: list[float] = []
        self._P: list[np.ndarray] = []
        self._bk2: list[np.ndarray] = []
        self._M: list[float] = []
        self._C: list[float] = []
        self._H: list[float] = []
        self._norm: list[float] = []

    def __call__(self, state: LatticeState) -> None:
        P = state.populations
        sites = self.params.sites
        self._times.append(state.time)
        self._P.append(P)
        self._M.append(dispersion(P, sites))
        self._C.append(fluctuation(P))
        self._norm.append(float(P.sum()))
        self._H.append(energy(to_frame(state, Frame.STATIC, self.params), self.params))
        if self.record_spectrum:
            b = bloch_spectrum(state, self.params)
            self._bk2.append(b.real**2 + b.imag**2)

    def series(self) -> ObservableSeries:
        return ObservableSeries(
            times=np.array(self._times),
            P=np.array(self._P) if self._P else np.empty((0, self.params.L)),
            bk2=np.array(self._bk2) if self.record_spectrum else None,
            M=np.array(self._M),
            C=np.array(self._C),
            H=np.array(self._H),
            norm=np.array(self._norm),
        )


def carpet_grid(series: ObservableSeries, time_unit: float = 1.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dense |b_k|^2 matrix over (time, mode) for heatmap export.

    Requires spectra on a uniform time grid; returns (times/time_unit,
    kappa, matrix) with matrix[i, k] the spectrum at sample i.
    """
    if series.bk2 is None:
        raise ValueError("series was recorded without spectra")
    n = len(series)
    if n == 0:
        return np.empty(0), np.empty(0), np.empty((0, 0))
    times = np.asarray(series.times, dtype=float)
    if n > 2:
        steps = np.diff(times)
        if not np.allclose(steps, steps[0], rtol=1e-6, atol=1e-12 * max(1.0, abs(times[-1]))):
            raise ValueError("carpet grid requires a uniform sample grid")
    L = series.bk2.shape[1]
    return times / time_unit, quasimomenta(L), np.asarray(series.bk2)


def trailing_average_profile(series: ObservableSeries, window: float) -> np.ndarray:
    """Population profile averaged over samples in the trailing time window."""
    times = np.asarray(series.times, dtype=float)
    if times.size == 0:
        raise ValueError("empty series")
    mask = times >= times[-1] - window
    return np.asarray(series.P)[mask].mean(axis=0)
