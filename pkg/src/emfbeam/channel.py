"""Propagation channel synthesis.

Builds the scatterer channel, the RIS cascade channel, their composite, and
the near-field (Friis, spherical wave) channel toward points close to the
base station. Also draws random scenario realizations and self-configures
the RIS phase weights toward the target user.

Distances are in wavelength units, so the steering phase of a planar wave
over an element offset v toward direction u is simply 2*pi*(u . v).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .geometry import ArrayLayout, linear_array, perpendicular, unit_vector

TWO_PI = 2.0 * np.pi

#: minimum distance (in wavelengths) between a field point and an element
#: before the 1/d near-field channel is considered singular
SINGULAR_DISTANCE = 1e-9


@dataclass(frozen=True)
class ScenarioParams:
    """Static experiment configuration (defaults follow the reference setup)."""

    antenna_count: int = 64        # M
    scatterer_count: int = 3       # N
    ris_count: int = 3             # K
    ris_element_count: int = 16    # P
    circle_radius: float = 650.0   # R, in wavelengths
    threshold_ratio: float = 1e-7  # exposure threshold / max transmit power (-70 dB)
    max_power: float = 1.0         # transmit power budget, normalized

    def __post_init__(self):
        if self.antenna_count < 1:
            raise ValueError("antenna_count must be >= 1")
        if self.scatterer_count < 1:
            raise ValueError("scatterer_count must be >= 1")
        if self.ris_count < 0:
            raise ValueError("ris_count must be >= 0")
        if self.ris_element_count < 1:
            raise ValueError("ris_element_count must be >= 1")
        if self.circle_radius <= 0:
            raise ValueError("circle_radius must be positive")
        if self.threshold_ratio <= 0:
            raise ValueError("threshold_ratio must be positive")
        if self.max_power <= 0:
            raise ValueError("max_power must be positive")


@dataclass(frozen=True)
class ScenarioSample:
    """One random channel realization.

    Direction vectors are unit 2-vectors seen from the base station
    (scatterer_dirs, ris_dirs) or from each RIS toward the user
    (ris_ue_dirs). `ris_weights` is None until `configure_ris` is applied.
    """

    scatterer_dirs: np.ndarray    # (N, 2)
    scatterer_gains: np.ndarray   # (N,) complex
    ris_dirs: np.ndarray          # (K, 2)
    ris_gains: np.ndarray         # (K,) complex
    ris_ue_dirs: np.ndarray       # (K, 2)
    ris_layouts: tuple[ArrayLayout, ...]
    ris_weights: np.ndarray | None = None  # (K, P) complex, unit modulus

    @property
    def ris_count(self):
        return len(self.ris_layouts)

    @property
    def configured(self):
        return self.ris_weights is not None or self.ris_count == 0


def _steering(directions, layout):
    """Planar-wave phase matrix exp(j*2pi*(dir . offset)), shape (n_dirs, M)."""
    phases = TWO_PI * np.asarray(directions, dtype=float) @ layout.offsets.T
    return np.exp(1j * phases)


def scatterer_channel(sample, bs):
    """Channel through the scatterers: sum of gain-weighted steering rows."""
    if sample.scatterer_dirs.shape[0] != sample.scatterer_gains.shape[0]:
        raise ValueError("scatterer direction/gain count mismatch")
    return sample.scatterer_gains @ _steering(sample.scatterer_dirs, bs)


def ris_phase_terms(sample, k):
    """Per-element phase shifts of RIS k.

    Returns (phi, psi): phi from the BS-to-RIS incidence across the RIS
    aperture, psi from the RIS-to-user departure. Both are length-P arrays.
    """
    if not 0 <= k < sample.ris_count:
        raise IndexError(f"RIS index {k} out of range for {sample.ris_count} surfaces")
    offsets = sample.ris_layouts[k].offsets
    phi = TWO_PI * offsets @ sample.ris_dirs[k]
    psi = TWO_PI * offsets @ sample.ris_ue_dirs[k]
    return phi, psi


def configure_ris(sample):
    """Self-configure every RIS toward the target user.

    Each surface sets its phase weights to cancel its own RIS-to-user phase
    profile, w = exp(-j*psi), then freezes. Returns a new sample.
    """
    if sample.ris_count == 0:
        return dataclasses.replace(sample, ris_weights=np.zeros((0, 0), dtype=complex))
    weights = np.empty((sample.ris_count, sample.ris_layouts[0].element_count),
                       dtype=complex)
    for k in range(sample.ris_count):
        _, psi = ris_phase_terms(sample, k)
        weights[k] = np.exp(-1j * psi)
    return dataclasses.replace(sample, ris_weights=weights)


def ris_effective_gain(sample, k):
    """Aggregate complex gain of RIS k as seen by the BS-user link.

    delta_k = (beta_k / P) * sum_p w_kp * exp(j*(phi_kp + psi_kp)).
    """
    if sample.ris_weights is None:
        raise ValueError("RIS not configured: call configure_ris first")
    phi, psi = ris_phase_terms(sample, k)
    p_count = phi.shape[0]
    return sample.ris_gains[k] / p_count * np.sum(
        sample.ris_weights[k] * np.exp(1j * (phi + psi)))


def ris_channel(sample, bs):
    """Channel through all RIS surfaces; the zero vector when there are none."""
    h = np.zeros(bs.element_count, dtype=complex)
    if sample.ris_count == 0:
        return h
    steer = _steering(sample.ris_dirs, bs)
    for k in range(sample.ris_count):
        h += ris_effective_gain(sample, k) * steer[k]
    return h


def composite_channel(s, h):
    """Total BS-to-user channel: scatterer plus RIS contributions."""
    s = np.asarray(s)
    h = np.asarray(h)
    if s.shape != h.shape:
        raise ValueError(f"channel length mismatch: {s.shape} vs {h.shape}")
    return s + h


def element_distances(points, bs):
    """Distances from each point to each BS element, shape (n_points, count)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return np.linalg.norm(pts[:, None, :] - bs.positions[None, :, :], axis=2)


def friis_entries(distances):
    """Near-field channel entries for the given distances (wavelengths)."""
    d = np.asarray(distances, dtype=float)
    return np.exp(1j * TWO_PI * d) / (4.0 * np.pi * d)


def near_field_channel(point, bs):
    """Spherical-wave channel row toward a point close to the BS.

    Each entry has amplitude 1/(4*pi*d_m) and phase 2*pi*d_m, with d_m the
    element-to-point distance in wavelengths.
    """
    d = element_distances(point, bs)[0]
    if np.any(d < SINGULAR_DISTANCE):
        raise ValueError("point coincides with a BS element (singular channel)")
    return friis_entries(d)


def near_field_matrix(points, bs):
    """Stack of near-field channel rows for many points, shape (n, M)."""
    d = element_distances(points, bs)
    if np.any(d < SINGULAR_DISTANCE):
        raise ValueError("a point coincides with a BS element (singular channel)")
    return friis_entries(d)


def _complex_gaussian(rng, n):
    # circularly symmetric, unit variance: each part has variance 1/2
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)


def sample_scenario(params, rng_seed, angle_range=(0.0, np.pi),
                    ris_orientation_offset=0.0, min_angle_sep=1e-6):
    """Draw one random scenario, deterministically from `rng_seed`.

    Path gains are i.i.d. circularly symmetric complex Gaussian with unit
    mean power (Rayleigh fading). Departure directions are uniform over
    `angle_range` (default: the open upper half-plane, which avoids the
    linear array's front-back ambiguity). Scenarios where two departure
    directions nearly coincide are redrawn.

    Each RIS is a linear array of P elements at half-wavelength spacing,
    oriented broadside to its BS-to-RIS direction unless
    `ris_orientation_offset` (radians) rotates it away.
    """
    rng = np.random.default_rng(rng_seed)
    n = params.scatterer_count
    k = params.ris_count
    lo, hi = angle_range

    for _ in range(100):
        departure_angles = rng.uniform(lo, hi, size=n + k)
        if n + k < 2:
            break
        sorted_a = np.sort(departure_angles)
        if np.min(np.diff(sorted_a)) >= min_angle_sep:
            break
    else:
        raise RuntimeError("could not draw well-separated departure directions")

    scatterer_dirs = np.stack([unit_vector(a) for a in departure_angles[:n]])
    ris_dirs = (np.stack([unit_vector(a) for a in departure_angles[n:]])
                if k else np.zeros((0, 2)))
    ue_angles = rng.uniform(lo, hi, size=k)
    ris_ue_dirs = (np.stack([unit_vector(a) for a in ue_angles])
                   if k else np.zeros((0, 2)))
    scatterer_gains = _complex_gaussian(rng, n)
    ris_gains = _complex_gaussian(rng, k)

    layouts = []
    for i in range(k):
        orientation = perpendicular(ris_dirs[i])
        if ris_orientation_offset:
            c, s = np.cos(ris_orientation_offset), np.sin(ris_orientation_offset)
            orientation = np.array([c * orientation[0] - s * orientation[1],
                                    s * orientation[0] + c * orientation[1]])
        layouts.append(linear_array(params.ris_element_count, 0.5, orientation))

    return ScenarioSample(scatterer_dirs=scatterer_dirs,
                          scatterer_gains=scatterer_gains,
                          ris_dirs=ris_dirs,
                          ris_gains=ris_gains,
                          ris_ue_dirs=ris_ue_dirs,
                          ris_layouts=tuple(layouts))


def without_ris(sample):
    """The same scenario with every RIS removed (scatterer draws untouched)."""
    return ScenarioSample(scatterer_dirs=sample.scatterer_dirs,
                          scatterer_gains=sample.scatterer_gains,
                          ris_dirs=np.zeros((0, 2)),
                          ris_gains=np.zeros(0, dtype=complex),
                          ris_ue_dirs=np.zeros((0, 2)),
                          ris_layouts=(),
                          ris_weights=np.zeros((0, 0), dtype=complex))
