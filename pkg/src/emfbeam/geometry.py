"""Planar geometry: array layouts, limit-circle sampling and scan grids.

Everything is two-dimensional and every length is expressed in wavelength
units, so the canonical half-wavelength element spacing is simply 0.5.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: tolerance on |x^2 + y^2 - 1| for a vector to count as unit-norm
UNIT_TOL = 1e-12


def unit_vector(angle):
    """Unit 2-vector at `angle` radians, counter-clockwise from +x."""
    return np.array([np.cos(angle), np.sin(angle)])


def perpendicular(v):
    """Left-hand perpendicular of a 2-vector."""
    v = as_vec2(v)
    return np.array([-v[1], v[0]])


def as_vec2(v, name="vector"):
    a = np.asarray(v, dtype=float)
    if a.shape != (2,):
        raise ValueError(f"{name} must be a 2-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite components")
    return a


def require_unit(v, name="orientation"):
    a = as_vec2(v, name)
    if abs(float(a @ a) - 1.0) > UNIT_TOL:
        raise ValueError(f"{name} must be unit-norm, got squared norm {float(a @ a)!r}")
    return a


@dataclass(frozen=True)
class ArrayLayout:
    """Positions of the elements of a (linear) antenna array.

    `offsets[i]` is the offset of element i+1 from the reference element,
    so `offsets[0]` is always the zero vector.
    """

    offsets: np.ndarray  # (count, 2)
    origin: np.ndarray   # (2,) position of the reference element
    spacing: float = 0.5

    def __post_init__(self):
        offsets = np.atleast_2d(np.asarray(self.offsets, dtype=float))
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "origin", as_vec2(self.origin, "origin"))
        if not np.allclose(offsets[0], 0.0):
            raise ValueError("first element offset must be the zero vector")

    @property
    def element_count(self):
        return self.offsets.shape[0]

    @property
    def positions(self):
        """Absolute element positions, shape (count, 2)."""
        return self.origin[None, :] + self.offsets


def linear_array(count, spacing=0.5, orientation=(1.0, 0.0), origin=(0.0, 0.0)):
    """Uniform linear array: element i at (i-1)*spacing along `orientation`."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    direction = require_unit(orientation)
    steps = np.arange(count, dtype=float)[:, None] * float(spacing)
    return ArrayLayout(offsets=steps * direction[None, :],
                       origin=as_vec2(origin, "origin"),
                       spacing=float(spacing))


@dataclass(frozen=True)
class LimitCircle:
    """Exposure limit circle of radius `radius` around the reference element."""

    radius: float
    center: np.ndarray = (0.0, 0.0)
    sample_count: int = 3600

    def __post_init__(self):
        object.__setattr__(self, "center", as_vec2(self.center, "center"))
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.sample_count < 8:
            raise ValueError("sample_count must be >= 8")


def circle_samples(circle):
    """Points uniformly spaced in angle on the circle, CCW from angle 0.

    Returns an array of shape (sample_count, 2).
    """
    angles = 2.0 * np.pi * np.arange(circle.sample_count) / circle.sample_count
    return circle.center[None, :] + circle.radius * np.stack(
        [np.cos(angles), np.sin(angles)], axis=1)


@dataclass(frozen=True)
class ScanGrid:
    """Square grid of evaluation points around the base station.

    `points` is row-major with x varying fastest; `outside_circle_mask[i]`
    is True when point i lies strictly outside the limit circle.
    """

    half_extent: float
    step: float
    points: np.ndarray              # (side*side, 2)
    outside_circle_mask: np.ndarray  # (side*side,) bool
    side: int


def scan_grid(half_extent, step, circle, offset=(0.0, 0.0)):
    """Grid tiling [-half_extent, half_extent]^2 with the given step.

    `offset` shifts every point; the default (0, 0) tiles the square exactly
    with (2*floor(half_extent/step)+1)^2 points. A half-step offset is used
    by the exposure pipeline to keep grid points off the antenna elements.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if step > half_extent:
        raise ValueError("step must not exceed half_extent")
    offset = as_vec2(offset, "offset")
    k = int(np.floor(half_extent / step))
    coords = np.arange(-k, k + 1, dtype=float) * step
    xs = coords + offset[0]
    ys = coords + offset[1]
    gx, gy = np.meshgrid(xs, ys)  # y is the slow (row) axis
    points = np.stack([gx.ravel(), gy.ravel()], axis=1)
    dist = np.linalg.norm(points - circle.center[None, :], axis=1)
    return ScanGrid(half_extent=float(half_extent), step=float(step),
                    points=points, outside_circle_mask=dist > circle.radius,
                    side=2 * k + 1)
