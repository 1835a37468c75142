"""Exposure maps around the base station and snapshot metrics.

The received power |q(Q) b|^2 * chi is evaluated on a square scan grid; the
fraction of grid points outside the limit circle that exceed the exposure
threshold is the compliance metric reported alongside the received power at
the target user.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (SINGULAR_DISTANCE, composite_channel, element_distances,
                      friis_entries, near_field_matrix, ris_channel,
                      scatterer_channel, configure_ris, without_ris)
from .geometry import circle_samples
from .beamforming import SCHEMES, build_scheme, received_power_target


@dataclass(frozen=True)
class ExposureMap:
    """Received power at every grid point for one precoder/power pair.

    Points that coincide with an antenna element are flagged invalid and
    excluded from statistics; their value is 0.
    """

    grid: object                 # ScanGrid
    values: np.ndarray           # (n_points,) received power, normalized
    valid: np.ndarray            # (n_points,) bool
    scheme: str
    transmit_power: float


def grid_channel_matrix(grid, bs):
    """Near-field channel rows for every grid point, with singular rows zeroed.

    Returns (qmat, valid): qmat has shape (n_points, M); valid flags points
    that do not sit on an antenna element.
    """
    d = element_distances(grid.points, bs)
    valid = d.min(axis=1) >= SINGULAR_DISTANCE
    d_safe = np.where(d < SINGULAR_DISTANCE, 1.0, d)
    qmat = friis_entries(d_safe)
    qmat[~valid] = 0.0
    return qmat, valid


def exposure_map(result, grid, bs, qmat=None, valid=None):
    """Evaluate the received power of a precoder result over the grid."""
    if grid.points.shape[0] == 0:
        raise ValueError("grid must be nonempty")
    if qmat is None or valid is None:
        qmat, valid = grid_channel_matrix(grid, bs)
    values = np.abs(qmat @ result.precoder.weights) ** 2 * result.transmit_power
    values[~valid] = 0.0
    return ExposureMap(grid=grid, values=values, valid=valid,
                       scheme=result.precoder.scheme,
                       transmit_power=result.transmit_power)


def violation_percentage(exp_map, threshold_ratio, max_power=1.0):
    """Percent of valid points outside the limit circle above the threshold."""
    outside = exp_map.grid.outside_circle_mask & exp_map.valid
    total = int(np.count_nonzero(outside))
    if total == 0:
        raise ValueError("no grid points outside the limit circle")
    exceeding = np.count_nonzero(exp_map.values[outside] > threshold_ratio * max_power)
    return 100.0 * exceeding / total


def overexposed_mask(exp_map, threshold_ratio, max_power=1.0):
    """Boolean per grid point (inside and outside the circle) above threshold."""
    return exp_map.values > threshold_ratio * max_power


@dataclass(frozen=True)
class SnapshotRow:
    ris_enabled: bool
    scheme: str
    received_power_db: float
    violation_pct: float
    transmit_power_db: float
    circle_max_gain: float
    exposure: ExposureMap


@dataclass(frozen=True)
class SnapshotReport:
    rows: tuple[SnapshotRow, ...]


def snapshot_report(sample, params, grid, circle, bs, schemes=SCHEMES,
                    include_no_ris=True):
    """Run every requested scheme on one scenario and collect the metrics.

    When the sample carries RIS surfaces and `include_no_ris` is set, a
    paired variant with the surfaces removed (same scatterer draws) is
    reported as well, mirroring the with/without-RIS comparison.
    """
    circle_pts = circle_samples(circle)
    circle_qmat = near_field_matrix(circle_pts, bs)
    grid_qmat, grid_valid = grid_channel_matrix(grid, bs)

    variants = []
    if sample.ris_count and include_no_ris:
        variants.append((False, without_ris(sample)))
    if sample.ris_count:
        variants.append((True, sample if sample.configured else configure_ris(sample)))
    else:
        variants.append((False, sample))

    rows = []
    for ris_enabled, variant in variants:
        g = composite_channel(scatterer_channel(variant, bs),
                              ris_channel(variant, bs))
        for scheme in schemes:
            result = build_scheme(scheme, variant, bs, circle, params,
                                  circle_points=circle_pts,
                                  circle_qmat=circle_qmat, g=g)
            exp_map = exposure_map(result, grid, bs, qmat=grid_qmat,
                                   valid=grid_valid)
            rho = received_power_target(g, result)
            rows.append(SnapshotRow(
                ris_enabled=ris_enabled,
                scheme=scheme,
                received_power_db=10.0 * np.log10(rho / params.max_power),
                violation_pct=violation_percentage(exp_map, params.threshold_ratio,
                                                   params.max_power),
                transmit_power_db=10.0 * np.log10(result.transmit_power
                                                  / params.max_power),
                circle_max_gain=result.circle_max_gain,
                exposure=exp_map))
    return SnapshotReport(rows=tuple(rows))


def write_map_csv(exp_map, threshold_ratio, path, max_power=1.0):
    """Grid CSV: x, y, omega_db, outside_circle, overexposed per point."""
    over = overexposed_mask(exp_map, threshold_ratio, max_power)
    with np.errstate(divide="ignore"):
        omega_db = 10.0 * np.log10(exp_map.values / max_power)
    with open(path, "w") as f:
        f.write("x,y,omega_db,outside_circle,overexposed\n")
        for i, (x, y) in enumerate(exp_map.grid.points):
            f.write(f"{float(x)!r},{float(y)!r},{float(omega_db[i])!r},"
                    f"{int(exp_map.grid.outside_circle_mask[i])},{int(over[i])}\n")


def write_map_gray(exp_map, path, max_power=1.0, floor_db=-120.0):
    """Portable grayscale map: 2 text header lines, then one byte per point.

    Header line 1: ``<width> <height>``; line 2: the dB range mapped onto
    0..255. Points are row-major, matching the grid layout.
    """
    with np.errstate(divide="ignore"):
        omega_db = 10.0 * np.log10(exp_map.values / max_power)
    omega_db = np.maximum(omega_db, floor_db)
    top = float(omega_db.max()) if np.isfinite(omega_db.max()) else floor_db
    span = max(top - floor_db, 1e-12)
    scaled = np.clip((omega_db - floor_db) / span * 255.0, 0, 255)
    side = exp_map.grid.side
    with open(path, "wb") as f:
        f.write(f"{side} {side}\n".encode())
        f.write(f"{float(floor_db)!r} {float(top)!r}\n".encode())
        f.write(scaled.astype(np.uint8).tobytes())
