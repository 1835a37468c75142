import numpy as np
import pytest

from emfbeam.channel import (ScenarioParams, ScenarioSample, composite_channel,
                             configure_ris, near_field_channel,
                             near_field_matrix, ris_channel,
                             ris_effective_gain, ris_phase_terms,
                             sample_scenario, scatterer_channel, without_ris)
from emfbeam.geometry import linear_array, unit_vector


def make_sample(scatterer_dirs, scatterer_gains, ris_dirs=(), ris_gains=(),
                ris_ue_dirs=(), ris_layouts=(), weights=None):
    k = len(ris_layouts)
    return ScenarioSample(
        scatterer_dirs=np.atleast_2d(np.asarray(scatterer_dirs, float)),
        scatterer_gains=np.asarray(scatterer_gains, complex),
        ris_dirs=np.asarray(ris_dirs, float).reshape(k, 2),
        ris_gains=np.asarray(ris_gains, complex).reshape(k),
        ris_ue_dirs=np.asarray(ris_ue_dirs, float).reshape(k, 2),
        ris_layouts=tuple(ris_layouts),
        ris_weights=weights)


@pytest.fixture
def bs():
    return linear_array(8, 0.5, (1.0, 0.0))


class TestScattererChannel:
    def test_orthogonal_direction_gives_ones(self, bs):
        s = scatterer_channel(make_sample([(0.0, 1.0)], [1.0]), bs)
        assert np.allclose(s, 1.0)

    def test_endfire_alternation(self, bs):
        # u . v_m = 0.5 (m-1): phases are multiples of pi
        s = scatterer_channel(make_sample([(1.0, 0.0)], [1.0]), bs)
        expected = np.exp(1j * np.pi * np.arange(8))
        assert np.allclose(s, expected)
        assert np.allclose(s.real, [1, -1, 1, -1, 1, -1, 1, -1], atol=1e-12)

    def test_superposition(self, bs):
        s = scatterer_channel(
            make_sample([(0.0, 1.0), (0.0, 1.0)], [1.0, 1.0]), bs)
        assert np.allclose(s, 2.0)


class TestRisPhaseTerms:
    def _one_ris(self, a, b, layout):
        return make_sample([(0.0, 1.0)], [1.0], ris_dirs=[a], ris_gains=[1.0],
                           ris_ue_dirs=[b], ris_layouts=[layout])

    def test_broadside_incidence_zero_phi(self):
        layout = linear_array(4, 0.5, (1.0, 0.0))
        sample = self._one_ris((0.0, 1.0), (0.0, 1.0), layout)
        phi, _ = ris_phase_terms(sample, 0)
        assert np.allclose(phi, 0.0)

    def test_single_element_ris(self):
        layout = linear_array(1, 0.5, (1.0, 0.0))
        sample = self._one_ris((0.6, 0.8), (0.0, 1.0), layout)
        phi, psi = ris_phase_terms(sample, 0)
        assert phi.shape == psi.shape == (1,)
        assert phi[0] == psi[0] == 0.0

    def test_aligned_incidence(self):
        layout = linear_array(4, 0.5, (0.0, 1.0))
        sample = self._one_ris((0.0, 1.0), (1.0, 0.0), layout)
        phi, _ = ris_phase_terms(sample, 0)
        assert np.allclose(phi, np.pi * np.arange(4))

    def test_index_out_of_range(self):
        layout = linear_array(4, 0.5, (1.0, 0.0))
        sample = self._one_ris((0.0, 1.0), (0.0, 1.0), layout)
        with pytest.raises(IndexError):
            ris_phase_terms(sample, 1)


class TestConfigureRis:
    def test_zero_psi_gives_unit_weights(self):
        layout = linear_array(4, 0.5, (1.0, 0.0))
        sample = make_sample([(0.0, 1.0)], [1.0], ris_dirs=[(0.0, 1.0)],
                             ris_gains=[1.0], ris_ue_dirs=[(0.0, 1.0)],
                             ris_layouts=[layout])
        configured = configure_ris(sample)
        assert np.allclose(configured.ris_weights, 1.0)

    def test_weights_unit_modulus(self):
        params = ScenarioParams(antenna_count=8)
        configured = configure_ris(sample_scenario(params, 3))
        assert np.allclose(np.abs(configured.ris_weights), 1.0, atol=1e-12)

    def test_psi_cancellation(self):
        # after configuration the effective gain reduces to
        # (beta/P) * sum_p exp(j*phi_p): the user-side phase drops out
        params = ScenarioParams(antenna_count=8, ris_count=2)
        sample = configure_ris(sample_scenario(params, 11,
                                               ris_orientation_offset=0.7))
        for k in range(sample.ris_count):
            phi, _ = ris_phase_terms(sample, k)
            expected = sample.ris_gains[k] / phi.size * np.sum(np.exp(1j * phi))
            assert abs(ris_effective_gain(sample, k) - expected) < 1e-12


class TestRisEffectiveGain:
    def test_broadside_full_coherence(self):
        params = ScenarioParams(antenna_count=8)
        sample = configure_ris(sample_scenario(params, 5))
        for k in range(sample.ris_count):
            assert abs(ris_effective_gain(sample, k) - sample.ris_gains[k]) < 1e-12

    def test_unconfigured_raises(self):
        params = ScenarioParams(antenna_count=8)
        sample = sample_scenario(params, 5)
        with pytest.raises(ValueError, match="not configured"):
            ris_effective_gain(sample, 0)

    def test_triangle_inequality(self):
        params = ScenarioParams(antenna_count=8, ris_element_count=16)
        for seed in range(10):
            sample = configure_ris(sample_scenario(params, seed,
                                                   ris_orientation_offset=1.1))
            for k in range(sample.ris_count):
                delta = ris_effective_gain(sample, k)
                assert abs(delta) <= abs(sample.ris_gains[k]) + 1e-12


class TestRisChannel:
    def test_no_ris_gives_null_vector(self, bs):
        sample = make_sample([(0.0, 1.0)], [1.0])
        assert np.allclose(ris_channel(sample, bs), 0.0)

    def test_single_broadside_ris(self, bs):
        layout = linear_array(1, 0.5, (1.0, 0.0))
        sample = make_sample([(0.0, 1.0)], [1.0], ris_dirs=[(0.0, 1.0)],
                             ris_gains=[1.0], ris_ue_dirs=[(0.0, 1.0)],
                             ris_layouts=[layout])
        h = ris_channel(configure_ris(sample), bs)
        assert np.allclose(h, 1.0)

    def test_two_ris_cancellation_at_even_elements(self, bs):
        # single-element surfaces so delta = beta; directions chosen so the
        # steering phases differ by pi at every second BS element
        layout = linear_array(1, 0.5, (1.0, 0.0))
        sample = make_sample([(0.0, 1.0)], [1.0],
                             ris_dirs=[(1.0, 0.0), (0.0, 1.0)],
                             ris_gains=[1.0, 1.0],
                             ris_ue_dirs=[(0.0, 1.0), (0.0, 1.0)],
                             ris_layouts=[layout, layout])
        h = ris_channel(configure_ris(sample), bs)
        assert abs(h[1]) < 1e-12
        assert abs(h[3]) < 1e-12
        assert abs(h[0] - 2.0) < 1e-12


class TestCompositeChannel:
    def test_no_ris_composite_equals_scatterer(self, bs):
        sample = make_sample([(0.6, 0.8)], [0.3 + 0.4j])
        s = scatterer_channel(sample, bs)
        g = composite_channel(s, np.zeros(8, complex))
        assert np.allclose(g, s)

    def test_zero_plus_zero(self):
        assert np.allclose(
            composite_channel(np.zeros(4, complex), np.zeros(4, complex)), 0.0)

    def test_additive_inverse(self, bs):
        s = np.arange(8) + 1j
        h = np.ones(8) * (2 - 1j)
        assert np.allclose(composite_channel(s, h) - h, s)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            composite_channel(np.zeros(4, complex), np.zeros(5, complex))


class TestNearFieldChannel:
    def test_amplitude_at_circle_radius(self, bs):
        q = near_field_channel((0.0, 650.0), bs)
        assert abs(abs(q[0]) - 1.0 / (4 * np.pi * 650.0)) < 1e-12
        assert abs(abs(q[0]) - 1.2243e-4) < 1e-8

    def test_doubling_distance_halves_amplitude(self, bs):
        q1 = near_field_channel((0.0, 100.0), linear_array(1))
        q2 = near_field_channel((0.0, 200.0), linear_array(1))
        assert abs(abs(q1[0]) / abs(q2[0]) - 2.0) < 1e-12

    def test_equidistant_points_match_per_element(self):
        one = linear_array(1)
        qa = near_field_channel((0.0, 50.0), one)
        qb = near_field_channel((50.0, 0.0), one)
        assert abs(qa[0] - qb[0]) < 1e-12

    def test_singularity_rejected(self, bs):
        with pytest.raises(ValueError, match="singular"):
            near_field_channel((0.5, 0.0), bs)

    def test_matrix_matches_rows(self, bs):
        pts = np.array([[0.0, 10.0], [5.0, 5.0], [-3.0, 8.0]])
        qmat = near_field_matrix(pts, bs)
        for i, p in enumerate(pts):
            assert np.allclose(qmat[i], near_field_channel(p, bs))


class TestSampleScenario:
    def test_deterministic_given_seed(self):
        params = ScenarioParams()
        a = sample_scenario(params, 12345)
        b = sample_scenario(params, 12345)
        assert np.array_equal(a.scatterer_dirs, b.scatterer_dirs)
        assert np.array_equal(a.scatterer_gains, b.scatterer_gains)
        assert np.array_equal(a.ris_gains, b.ris_gains)

    def test_no_ris_empty_lists(self):
        params = ScenarioParams(ris_count=0)
        s = sample_scenario(params, 1)
        assert s.ris_count == 0
        assert s.ris_dirs.shape == (0, 2)

    def test_directions_unit_and_upper_half_plane(self):
        params = ScenarioParams()
        for seed in range(20):
            s = sample_scenario(params, seed)
            dirs = np.vstack([s.scatterer_dirs, s.ris_dirs, s.ris_ue_dirs])
            assert np.allclose(np.linalg.norm(dirs, axis=1), 1.0, atol=1e-12)
            assert np.all(dirs[:, 1] > 0)

    def test_gain_mean_power(self):
        params = ScenarioParams(antenna_count=4)
        mags = np.concatenate([np.abs(sample_scenario(params, s).scatterer_gains) ** 2
                               for s in range(2000)])
        assert abs(mags.mean() - 1.0) < 0.03

    def test_without_ris_keeps_scatterer_draws(self):
        params = ScenarioParams()
        full = sample_scenario(params, 77)
        bare = without_ris(full)
        assert np.array_equal(bare.scatterer_gains, full.scatterer_gains)
        assert bare.ris_count == 0
        assert bare.configured


class TestChannelProperties:
    def test_global_gain_phase_invariance(self, bs):
        params = ScenarioParams(antenna_count=8)
        sample = configure_ris(sample_scenario(params, 21))
        g = composite_channel(scatterer_channel(sample, bs),
                              ris_channel(sample, bs))
        phase = np.exp(1j * 1.234)
        import dataclasses
        rotated = dataclasses.replace(sample,
                                      scatterer_gains=sample.scatterer_gains * phase,
                                      ris_gains=sample.ris_gains * phase)
        g2 = composite_channel(scatterer_channel(rotated, bs),
                               ris_channel(rotated, bs))
        assert np.allclose(g2, phase * g, atol=1e-12)
        assert abs(np.linalg.norm(g2) - np.linalg.norm(g)) < 1e-12
