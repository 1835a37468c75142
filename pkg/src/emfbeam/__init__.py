"""Downlink massive-MIMO beamforming under an EMF exposure constraint.

Simulates MRT, Reduced and Equalized precoding over multipath Rayleigh
channels with optional self-configuring RIS assistance, and evaluates
exposure maps, compliance metrics and Monte Carlo CDF statistics.
"""

from .geometry import (ArrayLayout, LimitCircle, ScanGrid, circle_samples,
                       linear_array, scan_grid, unit_vector)
from .channel import (ScenarioParams, ScenarioSample, composite_channel,
                      configure_ris, near_field_channel, near_field_matrix,
                      ris_channel, ris_effective_gain, ris_phase_terms,
                      sample_scenario, scatterer_channel, without_ris)
from .beamforming import (SCHEMES, Precoder, PrecoderResult, build_scheme,
                          circle_max_gain, compliant_power,
                          equalized_precoder, equalized_virtual_channel,
                          mrt_precoder, received_power_target)
from .exposure import (ExposureMap, SnapshotReport, exposure_map,
                       overexposed_mask, snapshot_report,
                       violation_percentage)
from .montecarlo import (BatchConfig, CdfSeries, MetricSeries, derive_subseed,
                         empirical_cdf, run_batch)

__version__ = "0.1.0"
