import numpy as np
import pytest

from emfbeam.channel import ScenarioParams
from emfbeam.montecarlo import (BatchConfig, MetricSeries, derive_subseed,
                                empirical_cdf, run_batch, write_cdf_csv)

FAST = dict(grid_half_extent=700.0, grid_step=50.0, circle_samples=720)


def small_config(n=6, seed=123, **kw):
    merged = {**FAST, **kw}
    return BatchConfig(params=ScenarioParams(), sample_count=n,
                       master_seed=seed, **merged)


def by_key(series_list):
    return {(s.metric, s.scheme): s.values for s in series_list}


class TestSubseed:
    def test_deterministic(self):
        assert derive_subseed(42, 7) == derive_subseed(42, 7)

    def test_distinct_across_indices_and_seeds(self):
        seeds = {derive_subseed(42, i) for i in range(1000)}
        assert len(seeds) == 1000
        assert derive_subseed(42, 0) != derive_subseed(43, 0)

    def test_fits_in_64_bits(self):
        assert derive_subseed(2**64 - 1, 2**32) < 2**64


class TestRunBatch:
    def test_repeatable(self):
        a = by_key(run_batch(small_config()))
        b = by_key(run_batch(small_config()))
        for k in a:
            assert np.array_equal(a[k], b[k])

    def test_series_shapes(self):
        series = run_batch(small_config(n=4))
        assert len(series) == 9  # 3 schemes x 3 metrics
        for s in series:
            assert s.values.shape == (4,)

    def test_single_sample_matches_direct_run(self):
        import emfbeam as eb
        cfg = small_config(n=1, seed=55)
        series = by_key(run_batch(cfg))
        # recompute sample 0 by hand with the derived sub-seed
        params = cfg.params
        bs = eb.linear_array(params.antenna_count)
        circle = eb.LimitCircle(params.circle_radius,
                                sample_count=cfg.circle_samples)
        sample = eb.configure_ris(
            eb.sample_scenario(params, derive_subseed(55, 0)))
        g = eb.composite_channel(eb.scatterer_channel(sample, bs),
                                 eb.ris_channel(sample, bs))
        r = eb.build_scheme("reduced", sample, bs, circle, params)
        rho = eb.received_power_target(g, r)
        assert abs(series[("received_power_db", "reduced")][0]
                   - 10 * np.log10(rho)) < 1e-9
        assert abs(series[("transmit_power_db", "reduced")][0]
                   - 10 * np.log10(r.transmit_power)) < 1e-9

    def test_worker_count_does_not_change_results(self):
        seq = by_key(run_batch(small_config(n=5), workers=1))
        par = by_key(run_batch(small_config(n=5), workers=3))
        for k in seq:
            assert np.array_equal(seq[k], par[k])

    def test_compliant_schemes_zero_violation(self):
        series = by_key(run_batch(small_config(n=8)))
        assert np.all(series[("violation_percentage", "reduced")] == 0.0)
        assert np.all(series[("violation_percentage", "equalized")] == 0.0)

    def test_per_sample_power_ordering(self):
        series = by_key(run_batch(small_config(n=8)))
        assert np.all(series[("transmit_power_db", "reduced")] <= 0.0)
        assert np.all(series[("transmit_power_db", "equalized")] <= 0.0)
        assert np.all(series[("received_power_db", "mrt")]
                      >= series[("received_power_db", "reduced")])

    def test_no_ris_batch(self):
        series = by_key(run_batch(small_config(n=3, ris_enabled=False)))
        assert series[("received_power_db", "mrt")].shape == (3,)

    def test_bad_sample_count(self):
        with pytest.raises(ValueError):
            small_config(n=0)


class TestEmpiricalCdf:
    def test_quartile_fractions(self):
        s = MetricSeries("received_power_db", "mrt",
                         np.array([3.0, 1.0, 4.0, 2.0]))
        cdf = empirical_cdf(s)
        assert np.array_equal(cdf.sorted_values, [1, 2, 3, 4])
        assert np.array_equal(cdf.cumulative_fractions, [0.25, 0.5, 0.75, 1.0])

    def test_constant_series_single_step(self):
        cdf = empirical_cdf(MetricSeries("x", "mrt", np.array([2.0, 2.0, 2.0])))
        assert np.all(cdf.sorted_values == 2.0)
        assert cdf.cumulative_fractions[-1] == 1.0

    def test_validity_properties(self):
        rng = np.random.default_rng(3)
        cdf = empirical_cdf(MetricSeries("x", "mrt", rng.standard_normal(50)))
        assert np.all(np.diff(cdf.sorted_values) >= 0)
        assert np.all(np.diff(cdf.cumulative_fractions) > 0)
        assert cdf.cumulative_fractions[-1] == 1.0
        assert np.all((cdf.cumulative_fractions > 0)
                      & (cdf.cumulative_fractions <= 1))

    def test_compliant_violation_cdf_is_step_at_zero(self):
        series = by_key(run_batch(small_config(n=5)))
        cdf = empirical_cdf(MetricSeries("violation_percentage", "reduced",
                                         series[("violation_percentage",
                                                 "reduced")]))
        assert np.all(cdf.sorted_values == 0.0)
        assert cdf.cumulative_fractions[-1] == 1.0

    def test_empty_series_rejected(self):
        with pytest.raises(ValueError):
            empirical_cdf(MetricSeries("x", "mrt", np.array([])))

    def test_csv_writer(self, tmp_path):
        cdf = empirical_cdf(MetricSeries("x", "mrt", np.array([1.0, 2.0])))
        path = tmp_path / "cdf.csv"
        write_cdf_csv(cdf, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "value,cdf"
        assert lines[1] == "1.0,0.5"
        assert lines[2] == "2.0,1.0"
