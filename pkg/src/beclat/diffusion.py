"""Effective transport models for the incoherent regime.

Two explicit flux-form steppers on the periodic ring:

* linear:     dP_l/dt = D (P_{l+1} - 2 P_l + P_{l-1}),   stable for dt <= 1/(2D)
* nonlinear:  dP_l/dt = D~ (P^3_{l+1} - 2 P^3_l + P^3_{l-1}),
              stable (and positivity preserving) for dt <= 1/(6 D~ max P^2)

The nonlinear equation discretizes a porous-medium law whose self-similar
solution is a compact semicircle-like profile with radius growing as
t^(1/4), hence dispersion M(t) ~ sqrt(t); the linear one gives ordinary
diffusion, M(t) = M(0) + 2 D t exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analytics import FitResult, default_fit_window, fit_power_law
from .observables import dispersion

__all__ = [
    "DiffusionProfile",
    "DiffusionParams",
    "DiffusionSeries",
    "ScalingResult",
    "diffusion_coefficient",
    "linear_step",
    "nonlinear_step",
    "support_radius",
    "run_linear",
    "run_nonlinear",
    "scaling_check",
]


def diffusion_coefficient(gamma: float, F: float) -> float:
    """D = gamma / (F^2 + gamma^2), approximately gamma / F^2 for weak noise."""
    if gamma < 0 or F < 0:
        raise ValueError("gamma and F must be nonnegative")
    if gamma == 0 and F == 0:
        raise ValueError("diffusion coefficient undefined for gamma = F = 0")
    return gamma / (F * F + gamma * gamma)


@dataclass(frozen=True)
class DiffusionParams:
    """Transport coefficients; D is derived from gamma and F when not given."""

    gamma: float = 0.0
    F: float = 0.0
    D_tilde: float = 0.0
    D: float | None = None

    def __post_init__(self):
        if self.gamma < 0 or self.F < 0 or self.D_tilde < 0:
            raise ValueError("diffusion parameters must be nonnegative")
        if self.D is None:
            object.__setattr__(self, "D", diffusion_coefficient(self.gamma, self.F))
        elif self.D < 0:
            raise ValueError("D must be nonnegative")


@dataclass(frozen=True)
class DiffusionProfile:
    """Nonnegative population profile on the ring at a given time."""

    P: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        if np.any(P < 0):
            raise ValueError("populations must be nonnegative")
        object.__setattr__(self, "P", P)

    @property
    def mass(self) -> float:
        return float(self.P.sum())


def _laplacian_flux(u: np.ndarray) -> np.ndarray:
    # flux through the right face of each site; taking its divergence below
    # conserves total mass to rounding by construction
    flux = np.roll(u, -1) - u
    return flux - np.roll(flux, 1)


def linear_step(profile: DiffusionProfile, D: float, dt: float) -> DiffusionProfile:
    """One explicit flux-form step of the linear equation."""
    if D < 0:
        raise ValueError("D must be nonnegative")
    if D > 0 and dt > 1.0 / (2.0 * D) * (1.0 + 1e-12):
        raise ValueError(f"dt={dt} violates the stability bound 1/(2D)={1.0 / (2.0 * D)}")
    P = profile.P + (dt * D) * _laplacian_flux(profile.P)
    return DiffusionProfile(P, time=profile.time + dt)


def nonlinear_step(profile: DiffusionProfile, D_tilde: float, dt: float) -> DiffusionProfile:
    """One explicit flux-form step of the cubic (porous-medium) equation."""
    if D_tilde < 0:
        raise ValueError("D_tilde must be nonnegative")
    peak = float(profile.P.max(initial=0.0))
    if D_tilde > 0 and peak > 0:
        bound = 1.0 / (6.0 * D_tilde * peak * peak)
        if dt > bound * (1.0 + 1e-12):
            raise ValueError(f"dt={dt} violates the stability bound 1/(6 D~ max P^2)={bound}")
    P = profile.P + (dt * D_tilde) * _laplacian_flux(profile.P**3)
    if np.any(P < 0):
        raise ValueError("negative population after step; reduce dt")
    return DiffusionProfile(P, time=profile.time + dt)


def support_radius(P: np.ndarray, rel_threshold: float = 1e-10) -> int:
    """Largest |l| with P_l above rel_threshold times the peak.

    The discrete front has steep but not strictly compact tails, so the
    support is defined by a relative floor rather than exact zeros.
    """
    P = np.asarray(P, dtype=float)
    l = np.arange(-(P.size // 2), P.size // 2)
    occupied = P > rel_threshold * P.max()
    if not occupied.any():
        return 0
    return int(np.max(np.abs(l[occupied])))


@dataclass
class DiffusionSeries:
    """Sampled records of a diffusion run."""

    times: np.ndarray
    P: np.ndarray
    M: np.ndarray
    radius: np.ndarray
    mass: np.ndarray


def _run(
    profile: DiffusionProfile,
    t_final: float,
    sample_times,
    max_step: Callable[[DiffusionProfile], float],
    stepper: Callable[[DiffusionProfile, float], DiffusionProfile],
) -> tuple[DiffusionProfile, DiffusionSeries]:
    grid = sorted({float(t) for t in sample_times})
    if grid and grid[0] < profile.time - 1e-12:
        raise ValueError("sample time before the initial profile time")
    if not grid or grid[-1] < t_final - 1e-12:
        grid.append(t_final)
    rec_t, rec_P, rec_M, rec_r, rec_m = [], [], [], [], []
    for t_next in grid:
        while profile.time < t_next - 1e-12 * max(1.0, t_next):
            dt = min(max_step(profile), t_next - profile.time)
            profile = stepper(profile, dt)
        rec_t.append(profile.time)
        rec_P.append(profile.P.copy())
        rec_M.append(dispersion(profile.P))
        rec_r.append(support_radius(profile.P))
        rec_m.append(profile.mass)
    series = DiffusionSeries(
        times=np.array(rec_t),
        P=np.array(rec_P),
        M=np.array(rec_M),
        radius=np.array(rec_r, dtype=float),
        mass=np.array(rec_m),
    )
    return profile, series


def run_linear(
    profile: DiffusionProfile,
    D: float,
    t_final: float,
    sample_times,
    safety: float = 0.5,
) -> tuple[DiffusionProfile, DiffusionSeries]:
    """Evolve the linear equation, recording observables on the sample grid."""
    if not 0 < safety <= 1:
        raise ValueError("safety factor must be in (0, 1]")
    dt_max = safety / (2.0 * D) if D > 0 else max(t_final, 1.0)
    return _run(profile, t_final, sample_times, lambda p: dt_max, lambda p, dt: linear_step(p, D, dt))


def run_nonlinear(
    profile: DiffusionProfile,
    D_tilde: float,
    t_final: float,
    sample_times,
    safety: float = 0.5,
) -> tuple[DiffusionProfile, DiffusionSeries]:
    """Evolve the cubic equation with the step adapted to the current peak."""
    if not 0 < safety <= 1:
        raise ValueError("safety factor must be in (0, 1]")

    def max_step(p: DiffusionProfile) -> float:
        peak = float(p.P.max(initial=0.0))
        if D_tilde <= 0 or peak <= 0:
            return max(t_final, 1.0)
        return safety / (6.0 * D_tilde * peak * peak)

    return _run(profile, t_final, sample_times, max_step, lambda p, dt: nonlinear_step(p, D_tilde, dt))


@dataclass(frozen=True)
class ScalingResult:
    """Asymptotic power laws of the dispersion and the support radius."""

    M_fit: FitResult
    radius_fit: FitResult


def scaling_check(series: DiffusionSeries, window: tuple[float, float] | None = None) -> ScalingResult:
    """Fit M(t) and radius(t) power laws over the asymptotic window.

    Requires the run to have spread to at least 10x the initial dispersion.
    """
    M = np.asarray(series.M, dtype=float)
    if M[-1] < 10.0 * M[0]:
        raise ValueError(f"insufficient spreading for a scaling fit: M grew only {M[-1] / M[0]:.2f}x")
    if window is None:
        window = default_fit_window(series.times, M)
    return ScalingResult(
        M_fit=fit_power_law(series.times, M, window),
        radius_fit=fit_power_law(series.times, series.radius.astype(float), window),
    )
