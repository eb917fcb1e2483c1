"""Lattice state, model parameters, and initial conditions.

The model lives on a periodic ring of L sites with physical site indices
l = -L/2 ... L/2-1, so wave packets are centered at l = 0.  Amplitudes can
be expressed in two frames: the static frame, where the tilt enters as an
on-site energy F*l, and the gauge frame, where the tilt is traded for a
periodic driving of the hopping.  Units: hbar = 1, lattice period d = 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Frame",
    "ModelParams",
    "LatticeState",
    "ThomasFermiSpec",
    "solve_thomas_fermi",
    "thomas_fermi_init",
    "uniform_init",
    "gaussian_init",
    "single_site_init",
    "to_frame",
    "FrameError",
]


class FrameError(ValueError):
    """Raised when an operation receives a state in the wrong frame."""


class Frame(enum.Enum):
    STATIC = "static"
    GAUGE = "gauge"


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the tilted-lattice mean-field model.

    J : hopping energy, J >= 0 (J = 0 decouples the wells)
    g : interaction strength (absorbs the atom number), g >= 0
    F : static force, F >= 0
    L : number of lattice sites, even and >= 4
    """

    J: float
    g: float
    F: float
    L: int

    def __post_init__(self):
        if self.L < 4 or self.L % 2 != 0:
            raise ValueError(f"L must be even and >= 4, got {self.L}")
        if self.J < 0:
            raise ValueError(f"J must be nonnegative, got {self.J}")
        if self.g < 0:
            raise ValueError(f"g must be nonnegative, got {self.g}")
        if self.F < 0:
            raise ValueError(f"F must be nonnegative, got {self.F}")

    @property
    def sites(self) -> np.ndarray:
        """Physical site indices l = -L/2 ... L/2-1."""
        return np.arange(-(self.L // 2), self.L // 2)

    @property
    def bloch_period(self) -> float:
        """T_B = 2 pi / F; requires F > 0."""
        if self.F == 0:
            raise ValueError("Bloch period is undefined for F = 0")
        return 2.0 * np.pi / self.F


@dataclass(frozen=True)
class LatticeState:
    """Complex amplitudes on the ring at a given time, tagged with a frame.

    The amplitude array is treated as immutable; operations return new states.
    """

    amplitudes: np.ndarray
    time: float
    frame: Frame

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=np.complex128)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def populations(self) -> np.ndarray:
        """Site populations P_l = |a_l|^2 (frame independent)."""
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def require_frame(self, frame: Frame, op: str) -> None:
        if self.frame is not frame:
            raise FrameError(f"{op} requires a {frame.value}-frame state, got {self.frame.value}")


@dataclass(frozen=True)
class ThomasFermiSpec:
    """Inverted-parabola initial profile a_l(0) = sqrt(beta - alpha l^2).

    beta is always derived from the unit-norm condition, never user supplied;
    radius is the largest |l| inside the support.
    """

    alpha: float
    beta: float
    radius: int

    def amplitudes(self, L: int) -> np.ndarray:
        l = np.arange(-(L // 2), L // 2)
        prof = self.beta - self.alpha * l.astype(float) ** 2
        return np.sqrt(np.clip(prof, 0.0, None)) * (prof > 0)


def solve_thomas_fermi(alpha: float, max_iter: int = 200) -> ThomasFermiSpec:
    """Solve the normalization sum for beta by iterating support membership.

    For a support of half-width m, sum_{|l|<=m} (beta - alpha l^2) = 1 gives
    beta(m) = (1 + 2 alpha sum_{1..m} l^2) / (2m + 1); the support predicate
    alpha l^2 < beta is then re-evaluated until it reproduces m.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    m = 0
    for _ in range(max_iter):
        beta = (1.0 + 2.0 * alpha * (m * (m + 1) * (2 * m + 1) // 6)) / (2 * m + 1)
        m_new = int(np.floor(np.sqrt(beta / alpha)))
        if alpha * m_new**2 >= beta:  # floor can land exactly on the edge
            m_new -= 1
        if m_new == m:
            break
        m = m_new
    else:
        raise RuntimeError(f"Thomas-Fermi support iteration did not converge for alpha={alpha}")
    resid = (2 * m + 1) * beta - 2 * alpha * (m * (m + 1) * (2 * m + 1) // 6) - 1.0
    if abs(resid) > 1e-12 or alpha * m**2 >= beta or alpha * (m + 1) ** 2 < beta:
        raise RuntimeError(f"inconsistent Thomas-Fermi solution for alpha={alpha}")
    return ThomasFermiSpec(alpha=alpha, beta=beta, radius=m)


def thomas_fermi_init(alpha: float, params: ModelParams) -> LatticeState:
    """Unit-norm Thomas-Fermi state at t = 0 in the static frame.

    Rejects profiles whose support touches the lattice boundary; runs must
    choose L with at least one empty site beyond each edge of the packet.
    """
    tf = solve_thomas_fermi(alpha)
    if tf.radius > params.L // 2 - 2:
        raise ValueError(
            f"Thomas-Fermi support |l| <= {tf.radius} touches the lattice boundary "
            f"for L={params.L}; use L >= {2 * tf.radius + 4}"
        )
    return LatticeState(tf.amplitudes(params.L), time=0.0, frame=Frame.STATIC)


def uniform_init(params: ModelParams) -> LatticeState:
    """Uniform state a_l = 1/sqrt(L) at t = 0."""
    a = np.full(params.L, 1.0 / np.sqrt(params.L), dtype=np.complex128)
    return LatticeState(a, time=0.0, frame=Frame.STATIC)


def gaussian_init(sigma: float, params: ModelParams) -> LatticeState:
    """Normalized Gaussian packet exp(-l^2 / (4 sigma^2)) centered at l = 0.

    Utility profile; sigma is the rms width of the population distribution.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    l = params.sites.astype(float)
    a = np.exp(-(l**2) / (4.0 * sigma**2)).astype(np.complex128)
    a /= np.linalg.norm(a)
    return LatticeState(a, time=0.0, frame=Frame.STATIC)


def single_site_init(params: ModelParams, site: int = 0) -> LatticeState:
    """All population on one site."""
    if not -(params.L // 2) <= site < params.L // 2:
        raise ValueError(f"site {site} outside the lattice window for L={params.L}")
    a = np.zeros(params.L, dtype=np.complex128)
    a[site + params.L // 2] = 1.0
    return LatticeState(a, time=0.0, frame=Frame.STATIC)


def _gauge_phase(params: ModelParams, t: float) -> np.ndarray:
    # exp(+i F l t), with F t reduced mod 2 pi before multiplying by integer l
    # to keep phase arguments small on long runs.
    phi = np.mod(params.F * t, 2.0 * np.pi)
    return np.exp(1j * phi * params.sites)


def to_frame(state: LatticeState, target: Frame, params: ModelParams) -> LatticeState:
    """Exact phase map between the static and gauge frames.

    Gauge amplitudes are exp(+i F l t) times static ones, so that the tilt
    term turns into the periodic hopping drive.  Populations are unchanged
    and the round trip is the identity.
    """
    if state.frame is target:
        return state
    phase = _gauge_phase(params, state.time)
    if target is Frame.GAUGE:
        a = state.amplitudes * phase
    else:
        a = state.amplitudes * np.conj(phase)
    return LatticeState(a, time=state.time, frame=target)
