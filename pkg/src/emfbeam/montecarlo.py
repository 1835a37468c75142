"""Seeded Monte Carlo batches and empirical CDFs.

Every sample index gets its own sub-seed derived from the master seed with
a SplitMix64 mix, so batch results are identical whatever the worker count
or evaluation order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .beamforming import SCHEMES, build_scheme, received_power_target
from .channel import (ScenarioParams, composite_channel, configure_ris,
                      ris_channel, sample_scenario, scatterer_channel,
                      without_ris)
from .geometry import LimitCircle, circle_samples, linear_array, scan_grid
from .channel import near_field_matrix
from .exposure import exposure_map, grid_channel_matrix, violation_percentage

METRICS = ("violation_percentage", "transmit_power_db", "received_power_db")

_MASK64 = (1 << 64) - 1


def derive_subseed(master_seed, index):
    """Deterministic 64-bit sub-seed for one sample (SplitMix64 stream)."""
    z = (int(master_seed) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class BatchConfig:
    params: ScenarioParams
    sample_count: int
    master_seed: int
    schemes: tuple = SCHEMES
    ris_enabled: bool = True
    grid_half_extent: float = 700.0
    grid_step: float = 5.0
    circle_samples: int = 3600

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}")


@dataclass(frozen=True)
class MetricSeries:
    metric: str
    scheme: str
    values: np.ndarray


@dataclass(frozen=True)
class CdfSeries:
    metric: str
    scheme: str
    sorted_values: np.ndarray
    cumulative_fractions: np.ndarray


class _BatchContext:
    """Geometry and near-field matrices shared across samples of one batch."""

    def __init__(self, config):
        p = config.params
        self.bs = linear_array(p.antenna_count)
        self.circle = LimitCircle(radius=p.circle_radius,
                                  sample_count=config.circle_samples)
        self.circle_pts = circle_samples(self.circle)
        self.circle_qmat = near_field_matrix(self.circle_pts, self.bs)
        # half-step offset keeps grid points off the antenna elements
        self.grid = scan_grid(config.grid_half_extent, config.grid_step,
                              self.circle,
                              offset=(config.grid_step / 2, config.grid_step / 2))
        self.grid_qmat, self.grid_valid = grid_channel_matrix(self.grid, self.bs)


def _sample_metrics(config, ctx, index):
    """The three per-scheme metrics for one sample, shape (n_schemes, 3)."""
    p = config.params
    sample = sample_scenario(p, derive_subseed(config.master_seed, index))
    if not config.ris_enabled:
        sample = without_ris(sample)
    elif sample.ris_count:
        sample = configure_ris(sample)
    g = composite_channel(scatterer_channel(sample, ctx.bs),
                          ris_channel(sample, ctx.bs))
    out = np.empty((len(config.schemes), len(METRICS)))
    for j, scheme in enumerate(config.schemes):
        result = build_scheme(scheme, sample, ctx.bs, ctx.circle, p,
                              circle_points=ctx.circle_pts,
                              circle_qmat=ctx.circle_qmat, g=g)
        exp_map = exposure_map(result, ctx.grid, ctx.bs,
                               qmat=ctx.grid_qmat, valid=ctx.grid_valid)
        rho = received_power_target(g, result)
        out[j, 0] = violation_percentage(exp_map, p.threshold_ratio, p.max_power)
        out[j, 1] = 10.0 * np.log10(result.transmit_power / p.max_power)
        out[j, 2] = 10.0 * np.log10(rho / p.max_power)
    return out


def _run_chunk(config, indices):
    ctx = _BatchContext(config)
    return np.stack([_sample_metrics(config, ctx, i) for i in indices])


def run_batch(config, workers=1):
    """Run the batch and return one MetricSeries per (metric, scheme).

    `workers` > 1 splits the sample indices over processes; per-sample
    sub-seeding guarantees the result is independent of the split.
    """
    indices = list(range(config.sample_count))
    if workers <= 1 or config.sample_count == 1:
        data = _run_chunk(config, indices)
    else:
        chunks = np.array_split(indices, min(workers, config.sample_count))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [config] * len(chunks), chunks))
        data = np.concatenate(parts)

    series = []
    for j, scheme in enumerate(config.schemes):
        for m, metric in enumerate(METRICS):
            series.append(MetricSeries(metric=metric, scheme=scheme,
                                       values=data[:, j, m].copy()))
    return series


def empirical_cdf(series):
    """Empirical CDF: fraction k/n at the k-th order statistic."""
    values = np.asarray(series.values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot build a CDF from an empty series")
    n = values.size
    return CdfSeries(metric=series.metric, scheme=series.scheme,
                     sorted_values=np.sort(values),
                     cumulative_fractions=np.arange(1, n + 1) / n)


def write_cdf_csv(cdf, path):
    with open(path, "w") as f:
        f.write("value,cdf\n")
        for v, c in zip(cdf.sorted_values, cdf.cumulative_fractions):
            f.write(f"{float(v)!r},{float(c)!r}\n")


def summary_lines(series_list):
    """min/median/max per series, as comment lines for the batch manifest."""
    lines = []
    for s in series_list:
        lines.append(f"# {s.metric}/{s.scheme}: min={float(np.min(s.values))!r} "
                     f"median={float(np.median(s.values))!r} "
                     f"max={float(np.max(s.values))!r}")
    return lines
