"""Temporal rotary-embedding frequency ladders and extension modes.

Each rotary plane m rotates a (2m, 2m+1) coordinate pair at its own angular
rate theta_m = base^(-2m/d_f).  Three ways to drive positions past the
training horizon are supported:

* ``vanilla``  -- extrapolate, positions and frequencies untouched;
* ``pi``       -- uniform position interpolation, every index divided by the
                  length ratio S;
* ``flex``     -- frequency-selective (ntk-by-parts style) modulation that
                  interpolates only planes whose training exposure is low and
                  leaves well-exercised high-frequency planes alone.

All analytic computations run in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError

TWO_PI = 2.0 * math.pi


class ModulationMode(Enum):
    """Position/frequency remapping applied when inference exceeds training length."""

    VANILLA = "vanilla"
    PI = "pi"
    FLEX = "flex"

    @classmethod
    def from_name(cls, name: str) -> "ModulationMode":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ConfigurationError(
                f"unknown modulation mode {name!r}; expected one of "
                + ", ".join(m.value for m in cls)
            ) from None


@dataclass(frozen=True)
class RopeSpec:
    """Temporal rotary configuration.

    d_f must be even (d_f/2 rotary planes).  alpha/beta are the exposure
    thresholds of the gating ramp, in completed rotation cycles.
    """

    d_f: int = 16
    base: float = 10000.0
    l_train: int = 21
    alpha: float = 0.1
    beta: float = 2.5

    def __post_init__(self):
        if self.d_f < 2 or self.d_f % 2 != 0:
            raise ConfigurationError(f"d_f must be even and >= 2, got {self.d_f}")
        if not self.base > 1.0:
            raise ConfigurationError(f"base must exceed 1, got {self.base}")
        if self.l_train < 1:
            raise ConfigurationError(f"l_train must be >= 1, got {self.l_train}")
        if not 0.0 <= self.alpha < self.beta:
            raise ConfigurationError(
                f"need 0 <= alpha < beta, got alpha={self.alpha}, beta={self.beta}"
            )

    @property
    def n_planes(self) -> int:
        return self.d_f // 2


@dataclass(frozen=True)
class RotaryState:
    """A global frame position together with the run's fixed length scale."""

    position: int
    scale_s: float

    def __post_init__(self):
        if self.position < 0:
            raise ConfigurationError(f"position must be >= 0, got {self.position}")
        if self.scale_s < 1.0:
            raise ConfigurationError(f"scale_s must be >= 1, got {self.scale_s}")

    def mapped(self, mode: ModulationMode) -> float:
        return position_map(mode, self.position, self.scale_s)


@dataclass(frozen=True)
class PlaneTable:
    """Per-plane derived quantities for one (spec, target length) pair."""

    theta: np.ndarray       # rad/frame, strictly decreasing
    wavelength: np.ndarray  # frames per full rotation, 2*pi/theta
    exposure_r: np.ndarray  # rotation cycles completed within l_train
    gate_g: np.ndarray      # 0 = interpolate fully, 1 = leave untouched
    theta_mod: np.ndarray   # gated frequency, in [theta/S, theta]
    scale_s: float

    def __len__(self) -> int:
        return len(self.theta)


def plane_frequencies(spec: RopeSpec) -> np.ndarray:
    """Angular rates theta_m = base^(-2m/d_f) for m in [0, d_f/2)."""
    m = np.arange(spec.n_planes)
    return spec.base ** (-2.0 * m / spec.d_f)


def exposure_table(spec: RopeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Per-plane (wavelength, exposure): frames per rotation and cycles seen in training."""
    theta = plane_frequencies(spec)
    wavelength = TWO_PI / theta
    exposure = spec.l_train * theta / TWO_PI
    return wavelength, exposure


def gate(exposure_r, alpha: float, beta: float):
    """Ramp gate on training exposure: 0 below alpha, 1 above beta, linear between.

    Boundary convention: gate(alpha) = 0 and gate(beta) = 1 (continuous ramp).
    Accepts a scalar or an array of exposures.
    """
    if not alpha < beta:
        raise ConfigurationError(f"need alpha < beta, got alpha={alpha}, beta={beta}")
    r = np.asarray(exposure_r, dtype=float)
    g = np.clip((r - alpha) / (beta - alpha), 0.0, 1.0)
    if np.isscalar(exposure_r) or getattr(exposure_r, "ndim", 1) == 0:
        return float(g)
    return g


def scale_for_length(spec: RopeSpec, target_len_l: int) -> float:
    """Length ratio S = max(1, L / l_train) for a fixed inference length L."""
    if target_len_l < 1:
        raise ConfigurationError(f"target length must be >= 1, got {target_len_l}")
    return max(1.0, target_len_l / spec.l_train)


def modulated_frequencies(spec: RopeSpec, target_len_l: int) -> tuple[float, np.ndarray]:
    """Scale S and gated per-plane frequencies for a target length.

    Within the training horizon (S == 1) the base frequencies are returned
    unchanged, bit for bit.  Beyond it, each plane is blended between its
    interpolated rate theta/S (gate 0) and its original rate theta (gate 1);
    the blend is exact at both gate endpoints.
    """
    theta = plane_frequencies(spec)
    scale_s = scale_for_length(spec, target_len_l)
    if scale_s <= 1.0:
        return scale_s, theta.copy()
    _, exposure = exposure_table(spec)
    g = gate(exposure, spec.alpha, spec.beta)
    return scale_s, (1.0 - g) * theta / scale_s + g * theta


def build_plane_table(spec: RopeSpec, target_len_l: int) -> PlaneTable:
    """Assemble the full per-plane table for one run."""
    theta = plane_frequencies(spec)
    wavelength, exposure = exposure_table(spec)
    g = gate(exposure, spec.alpha, spec.beta)
    scale_s, theta_mod = modulated_frequencies(spec, target_len_l)
    return PlaneTable(theta, wavelength, exposure, np.asarray(g), theta_mod, scale_s)


def position_map(mode: ModulationMode, n, scale_s: float):
    """Map a global frame index to the position fed to the rotary angles.

    ``pi`` divides by S; ``vanilla`` and ``flex`` keep the raw index (the
    flex route reshapes frequencies instead of positions).  Vectorized over n.
    """
    n = np.asarray(n, dtype=float)
    mapped = n / scale_s if mode is ModulationMode.PI else n
    if mapped.ndim == 0:
        return float(mapped)
    return mapped


def effective_frequencies(spec: RopeSpec, mode: ModulationMode, target_len_l: int) -> tuple[float, np.ndarray]:
    """Scale S and the frequencies actually used for rotations under a mode."""
    scale_s, theta_mod = modulated_frequencies(spec, target_len_l)
    if mode is ModulationMode.FLEX:
        return scale_s, theta_mod
    return scale_s, plane_frequencies(spec)


def apply_rotary(vec, spec: RopeSpec, mode: ModulationMode, n: int, target_len_l: int) -> np.ndarray:
    """Rotate each (2m, 2m+1) pair of ``vec`` by its plane angle at position n."""
    v = np.asarray(vec, dtype=float)
    if v.shape != (spec.d_f,):
        raise ValueError(f"vector must have shape ({spec.d_f},), got {v.shape}")
    scale_s, theta = effective_frequencies(spec, mode, target_len_l)
    pos = RotaryState(n, scale_s).mapped(mode)
    ang = pos * theta
    c, s = np.cos(ang), np.sin(ang)
    out = np.empty_like(v)
    out[0::2] = v[0::2] * c - v[1::2] * s
    out[1::2] = v[0::2] * s + v[1::2] * c
    return out


def relative_logit(q, k, n_q: int, n_k: int, spec: RopeSpec, mode: ModulationMode,
                   target_len_l: int) -> float:
    """Attention logit between rotated q at n_q and rotated k at n_k.

    For fixed mode and frequencies this depends only on n_q - n_k (up to
    double-precision roundoff), which is the property the tests pin down.
    """
    rq = apply_rotary(q, spec, mode, n_q, target_len_l)
    rk = apply_rotary(k, spec, mode, n_k, target_len_l)
    return float(rq @ rk)


def phase_step_report(spec: RopeSpec, mode: ModulationMode, target_len_l: int) -> np.ndarray:
    """Per-plane phase advance between adjacent frames.

    Defined as the angle at position 1 minus the angle at position 0,
    evaluated in closed form so the mode comparisons are exact:
    theta/S under ``pi``, the gated theta_mod under ``flex``, theta otherwise.
    """
    scale_s, theta_mod = modulated_frequencies(spec, target_len_l)
    if mode is ModulationMode.PI:
        return plane_frequencies(spec) / scale_s
    if mode is ModulationMode.FLEX:
        return theta_mod
    return plane_frequencies(spec)


class RotaryEncoder:
    """Per-run rotation tables shared by repeated attention calls.

    Precomputes cos/sin for positions [0, target_len_l); positions past the
    table fall back to direct evaluation with identical arithmetic, so cached
    and uncached angles agree bit for bit.
    """

    def __init__(self, spec: RopeSpec, mode: ModulationMode, target_len_l: int):
        self.spec = spec
        self.mode = mode
        self.target_len_l = target_len_l
        self.scale_s, self.theta_eff = effective_frequencies(spec, mode, target_len_l)
        table_angles = self._angles(np.arange(target_len_l))
        self._cos = np.cos(table_angles)
        self._sin = np.sin(table_angles)

    def _angles(self, positions: np.ndarray) -> np.ndarray:
        mapped = np.asarray(position_map(self.mode, positions, self.scale_s))
        return mapped[:, None] * self.theta_eff[None, :]

    def tables(self, positions) -> tuple[np.ndarray, np.ndarray]:
        """(cos, sin) arrays of shape (len(positions), n_planes)."""
        positions = np.atleast_1d(np.asarray(positions, dtype=int))
        if positions.size and (positions.min() < 0):
            raise ValueError("positions must be non-negative")
        if positions.size and positions.max() >= self.target_len_l:
            ang = self._angles(positions)
            return np.cos(ang), np.sin(ang)
        return self._cos[positions], self._sin[positions]

    def rotate(self, vecs, positions) -> np.ndarray:
        """Rotate rows of (n, d_f) ``vecs`` at the given global positions (double precision)."""
        v = np.asarray(vecs, dtype=float)
        if v.ndim != 2 or v.shape[1] != self.spec.d_f:
            raise ValueError(f"expected (n, {self.spec.d_f}) array, got {v.shape}")
        c, s = self.tables(positions)
        out = np.empty_like(v)
        out[:, 0::2] = v[:, 0::2] * c - v[:, 1::2] * s
        out[:, 1::2] = v[:, 0::2] * s + v[:, 1::2] * c
        return out
