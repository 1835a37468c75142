"""One random scenario, three precoders, one picture each.

Draws a 64-antenna / 3-scatterer / 3-RIS scenario, runs MRT, Reduced and
Equalized precoding, and renders the exposure map around the base station
with the limit circle and the over-exposed region highlighted.  MRT leaks
above the threshold outside the circle; the other two stay compliant by
construction, at different costs in received power.

Run from the repo root:  python3 demos/snapshot_exposure.py
Outputs land in demos/out/.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import emfbeam as eb
from emfbeam.exposure import snapshot_report
from emfbeam.geometry import LimitCircle, linear_array, scan_grid

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

params = eb.ScenarioParams()          # 64 antennas, 3 scatterers, 3 x 16 RIS
bs = linear_array(params.antenna_count)
circle = LimitCircle(params.circle_radius)
grid = scan_grid(700.0, 5.0, circle, offset=(2.5, 2.5))

sample = eb.configure_ris(eb.sample_scenario(params, rng_seed=7))
report = snapshot_report(sample, params, grid, circle, bs, include_no_ris=False)

threshold_db = 10 * np.log10(params.threshold_ratio)
side = grid.side
extent = [grid.points[:, 0].min(), grid.points[:, 0].max(),
          grid.points[:, 1].min(), grid.points[:, 1].max()]
phi = np.linspace(0, 2 * np.pi, 361)

fig, axes = plt.subplots(1, 3, figsize=(15, 4.6), sharey=True)
for ax, row in zip(axes, report.rows):
    with np.errstate(divide="ignore"):
        omega_db = 10 * np.log10(row.exposure.values).reshape(side, side)
    im = ax.imshow(omega_db, origin="lower", extent=extent, cmap="inferno",
                   vmin=threshold_db - 50, vmax=threshold_db + 20)
    # red contour marks the over-exposed region
    ax.contour(omega_db, levels=[threshold_db], colors="red", linewidths=0.8,
               extent=extent)
    ax.plot(circle.radius * np.cos(phi), circle.radius * np.sin(phi),
            "w--", lw=1)
    ax.set_title(f"{row.scheme}: rho = {row.received_power_db:.1f} dB, "
                 f"violation = {row.violation_pct:.2f}%")
    ax.set_xlabel("x [wavelengths]")
axes[0].set_ylabel("y [wavelengths]")
fig.colorbar(im, ax=axes, label="exposure [dB]", shrink=0.85)
fig.savefig(os.path.join(OUT, "snapshot_exposure.png"), dpi=130)

print(f"threshold: {threshold_db:.0f} dB at radius {circle.radius:.0f}")
for row in report.rows:
    print(f"  {row.scheme:<10} rx {row.received_power_db:7.2f} dB   "
          f"tx {row.transmit_power_db:7.2f} dB   "
          f"violation {row.violation_pct:6.3f}%")
print(f"wrote {os.path.join(OUT, 'snapshot_exposure.png')}")
