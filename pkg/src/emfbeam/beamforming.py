"""Precoders and exposure-compliant transmit powers.

Three schemes are supported:

* ``mrt``       -- conjugate matched filter at full power (no compliance).
* ``reduced``   -- the MRT precoder, with the power scaled down until the
                   received power anywhere on the limit circle meets the
                   exposure threshold.
* ``equalized`` -- matched filter on a virtual channel that keeps the true
                   departure directions but sets every path gain to 1, with
                   the same power rule as ``reduced``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .channel import (composite_channel, near_field_channel, near_field_matrix,
                      ris_channel, ris_effective_gain, scatterer_channel)
from .geometry import circle_samples, unit_vector

SCHEMES = ("mrt", "reduced", "equalized")

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class Precoder:
    weights: np.ndarray  # (M,) complex, unit norm
    scheme: str

    def __post_init__(self):
        nrm = np.linalg.norm(self.weights)
        if abs(nrm - 1.0) > 1e-9:
            raise ValueError(f"precoder must be unit-norm, got {nrm!r}")


@dataclass(frozen=True)
class PrecoderResult:
    """A precoder together with its compliant transmit power.

    `circle_max_gain` is the per-unit-power received power maximized over
    the limit circle; `clamped` is True when the power budget (rather than
    the exposure threshold) set the transmit power.
    """

    precoder: Precoder
    transmit_power: float
    circle_max_gain: float
    argmax_point: np.ndarray
    clamped: bool


def _normalized(weights, scheme):
    nrm = np.linalg.norm(weights)
    if nrm < _NORM_TOL:
        raise ValueError(f"cannot build {scheme} precoder from a zero channel")
    return Precoder(weights=np.asarray(weights, dtype=complex) / nrm, scheme=scheme)


def mrt_precoder(g):
    """Matched filter: conjugate of the channel, normalized to unit norm."""
    return _normalized(np.conj(np.asarray(g)), "mrt")


def _unit_phase(gains):
    mags = np.abs(gains)
    # a path with exactly zero gain contributes no usable phase; treat as 1
    return np.where(mags < 1e-300, 1.0, gains / np.where(mags < 1e-300, 1.0, mags))


def equalized_virtual_channel(sample, bs):
    """Virtual channel with every path gain equalized to unit strength.

    Keeps the true scatterer and RIS departure directions and the true path
    phases, but replaces each gain magnitude by 1. Equalizing the magnitude
    only (rather than setting the complex gain to 1) keeps reception
    coherent across paths, which is what lets this scheme outperform plain
    power reduction; the result depends on the drawn gains only through
    their phases.
    """
    steer_s = np.exp(1j * 2.0 * np.pi * sample.scatterer_dirs @ bs.offsets.T)
    g_prime = _unit_phase(sample.scatterer_gains) @ steer_s
    if sample.ris_count:
        steer_r = np.exp(1j * 2.0 * np.pi * sample.ris_dirs @ bs.offsets.T)
        deltas = np.array([ris_effective_gain(sample, k)
                           for k in range(sample.ris_count)])
        g_prime = g_prime + _unit_phase(deltas) @ steer_r
    return g_prime


def equalized_precoder(g_prime):
    """Matched filter on the gain-equalized virtual channel."""
    return _normalized(np.conj(np.asarray(g_prime)), "equalized")


def circle_max_gain(precoder, circle_points, bs, qmat=None, refine=True):
    """Maximum per-unit-power received power over the limit circle.

    Evaluates |q(Q) b|^2 at every sampled point, then sharpens the maximum
    with a bounded scalar search over the angular neighborhood of the coarse
    argmax. Returns (max gain, maximizing point).
    """
    pts = np.atleast_2d(np.asarray(circle_points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("circle_points must be nonempty")
    b = precoder.weights
    if qmat is None:
        qmat = near_field_matrix(pts, bs)
    gains = np.abs(qmat @ b) ** 2
    best = int(np.argmax(gains))
    best_gain = float(gains[best])
    best_point = pts[best]

    if refine and pts.shape[0] >= 8:
        center = pts.mean(axis=0)
        radius = float(np.linalg.norm(pts[best] - center))
        theta = float(np.arctan2(pts[best, 1] - center[1], pts[best, 0] - center[0]))
        dtheta = 2.0 * np.pi / pts.shape[0]

        def neg_gain(t):
            q = near_field_channel(center + radius * unit_vector(t), bs)
            return -float(np.abs(q @ b) ** 2)

        res = minimize_scalar(neg_gain, bounds=(theta - dtheta, theta + dtheta),
                              method="bounded", options={"xatol": 1e-10})
        if -res.fun > best_gain:
            best_gain = float(-res.fun)
            best_point = center + radius * unit_vector(float(res.x))
    return best_gain, best_point


def compliant_power(circle_gain, params):
    """Largest transmit power meeting the circle exposure constraint.

    chi = min(threshold / circle_gain, 1) * max_power. Returns
    (chi, clamped); clamped means the power budget was the binding limit.
    """
    if circle_gain <= 0:
        warnings.warn("circle gain is zero; pattern null on the entire circle")
        return params.max_power, True
    ratio = params.threshold_ratio / circle_gain
    if ratio >= 1.0:
        return params.max_power, True
    return ratio * params.max_power, False


def build_scheme(scheme, sample, bs, circle, params,
                 circle_points=None, circle_qmat=None, g=None):
    """Assemble the precoder and transmit power for one scheme.

    `circle_points`/`circle_qmat` allow reuse of the sampled circle and its
    precomputed near-field matrix across schemes and samples.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if g is None:
        g = composite_channel(scatterer_channel(sample, bs), ris_channel(sample, bs))
    if scheme == "equalized":
        precoder = equalized_precoder(equalized_virtual_channel(sample, bs))
    else:
        precoder = Precoder(mrt_precoder(g).weights, scheme)
    if circle_points is None:
        circle_points = circle_samples(circle)
    gain_max, argmax_point = circle_max_gain(precoder, circle_points, bs,
                                             qmat=circle_qmat)
    if scheme == "mrt":
        # full power; the circle gain is reported, not enforced
        chi, clamped = params.max_power, True
    else:
        chi, clamped = compliant_power(gain_max, params)
    return PrecoderResult(precoder=precoder, transmit_power=chi,
                          circle_max_gain=gain_max, argmax_point=argmax_point,
                          clamped=clamped)


def received_power_target(g, result):
    """Received power at the target user: |g b|^2 * chi."""
    g = np.asarray(g)
    b = result.precoder.weights
    if g.shape != b.shape:
        raise ValueError("channel/precoder dimension mismatch")
    return float(np.abs(g @ b) ** 2) * result.transmit_power
