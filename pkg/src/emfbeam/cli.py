"""Command-line front end.

Subcommands:

* ``snapshot``   -- one scenario, exposure maps and a Table-style summary.
* ``montecarlo`` -- seeded batch, per-metric CDF CSVs and a manifest.
* ``validate``   -- parse and echo the configuration, then exit.

Configuration is a flat ``key = value`` text file with ``#`` comments;
command-line flags override file values.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from dataclasses import dataclass

import numpy as np

from .beamforming import SCHEMES
from .channel import ScenarioParams, configure_ris, sample_scenario
from .geometry import LimitCircle, linear_array, scan_grid
from .exposure import snapshot_report, write_map_csv, write_map_gray
from .montecarlo import (BatchConfig, derive_subseed, empirical_cdf, run_batch,
                         summary_lines, write_cdf_csv)


class ConfigError(ValueError):
    """Malformed or out-of-range configuration input."""


@dataclass(frozen=True)
class RunConfig:
    antenna_count: int = 64
    scatterer_count: int = 3
    ris_count: int = 3
    ris_element_count: int = 16
    circle_radius: float = 650.0
    threshold_db: float = -70.0
    grid_half_extent: float = 700.0
    grid_step: float = 5.0
    circle_samples: int = 3600
    sample_count: int = 1000
    seed: int = 1
    schemes: tuple = SCHEMES
    ris_enabled: bool = True
    out_dir: str = "out"

    @property
    def threshold_ratio(self):
        return 10.0 ** (self.threshold_db / 10.0)

    def to_params(self):
        return ScenarioParams(antenna_count=self.antenna_count,
                              scatterer_count=self.scatterer_count,
                              ris_count=self.ris_count,
                              ris_element_count=self.ris_element_count,
                              circle_radius=self.circle_radius,
                              threshold_ratio=self.threshold_ratio)

    def to_batch_config(self):
        return BatchConfig(params=self.to_params(),
                           sample_count=self.sample_count,
                           master_seed=self.seed,
                           schemes=self.schemes,
                           ris_enabled=self.ris_enabled,
                           grid_half_extent=self.grid_half_extent,
                           grid_step=self.grid_step,
                           circle_samples=self.circle_samples)

    def to_text(self):
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name == "schemes":
                v = ",".join(v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_schemes(text):
    if isinstance(text, (tuple, list)):
        names = tuple(text)
    else:
        names = tuple(s.strip().lower() for s in text.split(",") if s.strip())
    if not names:
        raise ValueError("schemes list is empty")
    for name in names:
        if name not in SCHEMES:
            raise ValueError(f"unknown scheme {name!r} (choose from {SCHEMES})")
    # keep canonical ordering, drop duplicates
    return tuple(s for s in SCHEMES if s in names)


_PARSERS = {
    "antenna_count": int, "scatterer_count": int, "ris_count": int,
    "ris_element_count": int, "circle_radius": float, "threshold_db": float,
    "grid_half_extent": float, "grid_step": float, "circle_samples": int,
    "sample_count": int, "seed": int, "schemes": _parse_schemes,
    "ris_enabled": _parse_bool, "out_dir": str,
}


def _validate(cfg):
    checks = [
        (cfg.antenna_count >= 1, "antenna_count must be >= 1"),
        (cfg.scatterer_count >= 1, "scatterer_count must be >= 1"),
        (cfg.ris_count >= 0, "ris_count must be >= 0"),
        (cfg.ris_element_count >= 1, "ris_element_count must be >= 1"),
        (cfg.circle_radius > 0, "circle_radius must be positive"),
        (cfg.grid_half_extent > 0, "grid_half_extent must be positive"),
        (0 < cfg.grid_step <= cfg.grid_half_extent,
         "grid_step must be in (0, grid_half_extent]"),
        (cfg.circle_samples >= 8, "circle_samples must be >= 8"),
        (cfg.sample_count >= 1, "sample_count must be >= 1"),
        (cfg.seed >= 0, "seed must be non-negative"),
    ]
    for ok, message in checks:
        if not ok:
            raise ConfigError(message)
    return cfg


def parse_config(path=None, overrides=None):
    """Build a RunConfig from an optional file plus override pairs.

    Unknown keys and malformed values are rejected with the offending key
    and line number.
    """
    values = {}
    if path is not None:
        try:
            with open(path) as f:
                lines = f.readlines()
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from e
        for lineno, raw in enumerate(lines, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, text = line.partition("=")
            key = key.strip()
            if key not in _PARSERS:
                raise ConfigError(f"{path}:{lineno}: unknown key '{key}'")
            try:
                values[key] = _PARSERS[key](text.strip())
            except ValueError as e:
                raise ConfigError(f"{path}:{lineno}: bad value for '{key}': {e}") from e
    for key, value in (overrides or {}).items():
        if key not in _PARSERS:
            raise ConfigError(f"unknown key '{key}'")
        if isinstance(value, str):
            try:
                value = _PARSERS[key](value)
            except ValueError as e:
                raise ConfigError(f"bad value for '{key}': {e}") from e
        values[key] = value
    try:
        cfg = RunConfig(**values)
    except TypeError as e:
        raise ConfigError(str(e)) from e
    return _validate(cfg)


def _print_table(report, file=None):
    file = file if file is not None else sys.stdout
    print(f"{'ris':<5} {'scheme':<10} {'rx_power_db':>12} "
          f"{'violation_pct':>14} {'tx_power_db':>12}", file=file)
    for row in report.rows:
        print(f"{('yes' if row.ris_enabled else 'no'):<5} {row.scheme:<10} "
              f"{row.received_power_db:>12.3f} {row.violation_pct:>14.5f} "
              f"{row.transmit_power_db:>12.3f}", file=file)


def cmd_snapshot(cfg, emit_maps=False):
    os.makedirs(cfg.out_dir, exist_ok=True)
    params = cfg.to_params()
    bs = linear_array(cfg.antenna_count)
    circle = LimitCircle(radius=cfg.circle_radius, sample_count=cfg.circle_samples)
    grid = scan_grid(cfg.grid_half_extent, cfg.grid_step, circle,
                     offset=(cfg.grid_step / 2, cfg.grid_step / 2))
    # index-0 sub-seed so a one-sample montecarlo run matches this snapshot
    sample = sample_scenario(params, derive_subseed(cfg.seed, 0))
    if not cfg.ris_enabled:
        from .channel import without_ris
        sample = without_ris(sample)
    elif sample.ris_count:
        sample = configure_ris(sample)

    report = snapshot_report(sample, params, grid, circle, bs,
                             schemes=cfg.schemes, include_no_ris=cfg.ris_enabled)
    _print_table(report)

    with open(os.path.join(cfg.out_dir, "table.csv"), "w") as f:
        f.write("ris,scheme,received_power_db,violation_pct,transmit_power_db\n")
        for row in report.rows:
            f.write(f"{int(row.ris_enabled)},{row.scheme},"
                    f"{float(row.received_power_db)!r},{float(row.violation_pct)!r},"
                    f"{float(row.transmit_power_db)!r}\n")

    for row in report.rows:
        tag = f"{'ris' if row.ris_enabled else 'noris'}_{row.scheme}"
        write_map_csv(row.exposure, cfg.threshold_ratio,
                      os.path.join(cfg.out_dir, f"exposure_{tag}.csv"))
        _write_mask_csv(row.exposure, cfg.threshold_ratio,
                        os.path.join(cfg.out_dir, f"overexposed_{tag}.csv"))
        if emit_maps:
            write_map_gray(row.exposure,
                           os.path.join(cfg.out_dir, f"map_{tag}.gray"))
    return 0


def _write_mask_csv(exp_map, threshold_ratio, path):
    from .exposure import overexposed_mask
    over = overexposed_mask(exp_map, threshold_ratio)
    with open(path, "w") as f:
        f.write("x,y,overexposed\n")
        for i, (x, y) in enumerate(exp_map.grid.points):
            f.write(f"{float(x)!r},{float(y)!r},{int(over[i])}\n")


def cmd_montecarlo(cfg, workers=1):
    os.makedirs(cfg.out_dir, exist_ok=True)
    series_list = run_batch(cfg.to_batch_config(), workers=workers)
    for series in series_list:
        cdf = empirical_cdf(series)
        name = f"cdf_{series.metric}_{series.scheme}.csv"
        write_cdf_csv(cdf, os.path.join(cfg.out_dir, name))
    with open(os.path.join(cfg.out_dir, "manifest.txt"), "w") as f:
        f.write("# batch manifest; key = value section re-parses as a config\n")
        f.write(cfg.to_text())
        f.write("\n".join(summary_lines(series_list)) + "\n")
    return 0


def cmd_validate(cfg):
    sys.stdout.write(cfg.to_text())
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="emfbeam",
        description="Downlink beamforming under an EMF exposure constraint: "
                    "snapshot exposure maps and Monte Carlo CDF statistics.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("snapshot", "montecarlo", "validate"):
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH", default=None)
        p.add_argument("--seed", type=int, default=None, metavar="U64")
        p.add_argument("--samples", type=int, default=None, metavar="N")
        p.add_argument("--grid-step", type=float, default=None, metavar="F")
        p.add_argument("--circle-samples", type=int, default=None, metavar="N")
        p.add_argument("--schemes", default=None, metavar="LIST",
                       help="comma-separated subset of mrt,reduced,equalized")
        p.add_argument("--no-ris", action="store_true")
        p.add_argument("--out", default=None, metavar="DIR")
        if name == "snapshot":
            p.add_argument("--emit-maps", action="store_true")
        if name == "montecarlo":
            p.add_argument("--workers", type=int, default=1, metavar="N")
    return parser


def _overrides_from_args(args):
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.samples is not None:
        overrides["sample_count"] = args.samples
    if args.grid_step is not None:
        overrides["grid_step"] = args.grid_step
    if args.circle_samples is not None:
        overrides["circle_samples"] = args.circle_samples
    if args.schemes is not None:
        overrides["schemes"] = args.schemes
    if args.no_ris:
        overrides["ris_enabled"] = False
        overrides["ris_count"] = 0
    if args.out is not None:
        overrides["out_dir"] = args.out
    return overrides


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config, _overrides_from_args(args))
        if args.command == "snapshot":
            return cmd_snapshot(cfg, emit_maps=args.emit_maps)
        if args.command == "montecarlo":
            return cmd_montecarlo(cfg, workers=args.workers)
        return cmd_validate(cfg)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # runtime failure, not a usage error
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
