from pathlib import Path

import numpy as np
import pytest
from scipy.stats import norm

from radon_lens.dataset import EmpiricalDistribution, sample_gaussian, sample_halfmoon
from radon_lens.defining_fn import (
    CircularProjection,
    LinearProjection,
    MlpSurface,
    SigmoidHead,
    linear_from_angle,
)
from radon_lens.empirical_radon import (
    Density1D,
    estimate_density,
    ks_distance,
    project_samples,
    radon_slice,
    rvt_pushforward,
    sinogram,
    sinogram_to_csv,
    slice_to_csv,
)
from radon_lens.nn import random_mlp, sigmoid
from radon_lens.seeding import make_rng

GOLDEN = Path(__file__).parent / "golden"


def mixture_distribution():
    """The fixed three-lobe anisotropic cloud behind the golden sinogram."""
    rng = make_rng(2024)
    parts = []
    for center, angle, scales in [((-1.0, 0.5), 0.3, (0.8, 0.15)),
                                  ((1.2, -0.3), 1.9, (0.6, 0.2)),
                                  ((0.1, 1.4), 1.0, (0.5, 0.1))]:
        z = rng.standard_normal((1000, 2)) * scales
        c, s = np.cos(angle), np.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        parts.append(z @ rot.T + center)
    return EmpiricalDistribution(np.vstack(parts))


def read_sinogram_csv(path):
    lines = Path(path).read_text().splitlines()
    phis = np.array([float(v) for v in lines[0].split(",")[1:]])
    t = np.array([float(v) for v in lines[1].split(",")[1:]])
    dens = np.array([[float(v) for v in line.split(",")] for line in lines[2:]])
    return phis, t, dens


class TestProjectSamples:
    def test_linear(self):
        dist = EmpiricalDistribution(np.array([[1.0, 2.0], [3.0, 4.0]]))
        vals = project_samples(dist, LinearProjection([1.0, 0.0]))
        np.testing.assert_array_equal(vals, [1.0, 3.0])

    def test_degenerate_circular_radius_measures_origin_distance(self):
        dist = EmpiricalDistribution(np.array([[3.0, 4.0], [0.0, 2.0]]))
        vals = project_samples(dist, CircularProjection([1.0, 0.0], r=0.0))
        np.testing.assert_allclose(vals, [5.0, 2.0])

    def test_sigmoid_node_lands_in_unit_interval(self):
        dist = sample_gaussian(200, seed=1)
        g = MlpSurface(random_mlp([2, 1], seed=0))
        vals = project_samples(dist, g)
        assert np.all((vals > 0) & (vals < 1))

    def test_dimension_mismatch(self):
        dist = sample_gaussian(10, seed=0, dim=3)
        with pytest.raises(ValueError):
            project_samples(dist, LinearProjection([1.0, 0.0]))


class TestEstimateDensity:
    def test_identical_values_make_a_spike(self):
        d = estimate_density(np.full(50, 2.5), method="kde", resolution=64)
        assert d.mass.sum() * d.dt == pytest.approx(1.0, abs=1e-12)
        assert d.t[np.argmax(d.mass)] == pytest.approx(2.5, abs=d.dt)
        assert np.count_nonzero(d.mass) == 1

    def test_kde_tracks_analytic_normal(self):
        # Monte-Carlo oracle: at 1e5 draws the observed max pointwise error
        # is ~0.009, so 0.02 has factor-two slack
        vals = make_rng(123).standard_normal(100000)
        d = estimate_density(vals, method="kde", resolution=256)
        assert np.max(np.abs(d.mass - norm.pdf(d.t))) <= 0.02

    def test_histogram_mass_sums_to_one(self):
        vals = make_rng(5).standard_normal(1000)
        d = estimate_density(vals, method="histogram", resolution=40)
        assert d.mass.sum() * d.dt == pytest.approx(1.0, abs=1e-9)
        assert np.all(d.mass >= 0)

    def test_histogram_freedman_diaconis_default(self):
        vals = make_rng(6).standard_normal(5000)
        d = estimate_density(vals, method="histogram", resolution=None)
        iqr = np.subtract(*np.quantile(vals, [0.75, 0.25]))
        assert d.width == pytest.approx(2 * iqr * 5000 ** (-1 / 3), rel=0.05)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            estimate_density(np.array([]))
        with pytest.raises(ValueError):
            estimate_density(np.array([1.0, np.nan]))
        with pytest.raises(ValueError):
            estimate_density(np.ones(3), method="splines")


class TestRadonSlice:
    def test_isotropic_gaussian_slices_are_standard_normal(self):
        dist = sample_gaussian(20000, mean=0, cov_scale=1, seed=11)
        sl = radon_slice(dist, linear_from_angle(0.0), resolution=256)
        assert ks_distance(sl.density, norm.cdf) <= 0.01

    def test_rotation_leaves_gaussian_slices_unchanged(self):
        dist = sample_gaussian(20000, mean=0, cov_scale=1, seed=11)
        for ang in (0.3, 1.1, 2.4):
            sl = radon_slice(dist, linear_from_angle(ang), resolution=256)
            assert ks_distance(sl.density, norm.cdf) <= 0.01

    def test_point_mass_spikes_at_projection(self):
        x0 = np.array([0.7, -0.2])
        dist = EmpiricalDistribution(np.tile(x0, (20, 1)))
        g = linear_from_angle(0.4)
        sl = radon_slice(dist, g, resolution=64)
        peak = sl.density.t[np.argmax(sl.density.mass)]
        assert peak == pytest.approx(float(g.eval(x0)), abs=sl.density.dt)

    def test_density_integrates_to_one(self):
        dist = sample_gaussian(500, seed=2)
        sl = radon_slice(dist, linear_from_angle(1.0), resolution=128)
        assert sl.density.mass.sum() * sl.density.dt == pytest.approx(1.0, abs=1e-6)
        assert len(sl.values) == len(dist)


class TestSinogram:
    def test_isotropic_columns_agree(self):
        dist = sample_gaussian(20000, mean=0, cov_scale=1, seed=11)
        s = sinogram(dist, 8, resolution=256)
        first = s.column(0)
        for k in range(1, 8):
            assert ks_distance(first, s.column(k)) <= 0.015

    def test_golden_mixture(self):
        s = sinogram(mixture_distribution(), 12, resolution=64)
        phis, t, dens = read_sinogram_csv(GOLDEN / "sinogram_mixture.csv")
        np.testing.assert_allclose(s.phis, phis, atol=1e-12)
        np.testing.assert_allclose(s.t, t, atol=1e-12)
        np.testing.assert_allclose(s.densities, dens, atol=1e-12)

    def test_single_angle_equals_slice(self):
        dist = sample_gaussian(2000, seed=3)
        s = sinogram(dist, 1, resolution=128)
        sl = radon_slice(dist, linear_from_angle(0.0), resolution=128)
        np.testing.assert_array_equal(s.t, sl.density.t)
        np.testing.assert_array_equal(s.densities[:, 0], sl.density.mass)

    def test_angle_grid_covers_half_circle(self):
        dist = sample_gaussian(100, seed=1)
        s = sinogram(dist, 6, resolution=32)
        np.testing.assert_allclose(s.phis, np.arange(6) * np.pi / 6, atol=1e-15)

    def test_wrong_dimension_rejected(self):
        dist = sample_gaussian(10, seed=0, dim=3)
        with pytest.raises(ValueError, match="2-D"):
            sinogram(dist, 4)


class TestRvtPushforward:
    def test_identity_pick_recovers_input_density(self):
        one_d = EmpiricalDistribution(make_rng(0).standard_normal(500)[:, None])
        direct = estimate_density(one_d.points[:, 0], resolution=128,
                                  weights=one_d.weights)
        pushed = rvt_pushforward(one_d, lambda pts: pts[:, 0], resolution=128)
        np.testing.assert_array_equal(pushed.t, direct.t)
        np.testing.assert_array_equal(pushed.mass, direct.mass)

    def test_sigmoid_composition_routes_agree_exactly(self):
        # isomorphism: pushing the linear projection values through sigma
        # is the same value list as slicing with the sigmoid perceptron
        dist = sample_gaussian(20000, seed=11)
        g = linear_from_angle(0.7)
        head = SigmoidHead(g)
        vals_linear = project_samples(dist, g)
        vals_head = project_samples(dist, head)
        assert np.array_equal(sigmoid(vals_linear), vals_head)
        via_head = rvt_pushforward(dist, head, resolution=256)
        via_linear = estimate_density(sigmoid(vals_linear), resolution=256,
                                      weights=dist.weights)
        assert np.array_equal(via_head.t, via_linear.t)
        assert np.array_equal(via_head.mass, via_linear.mass)
        assert ks_distance(via_head, via_linear) == 0.0

    def test_binary_label_oracle_gives_balanced_spikes(self):
        moons = sample_halfmoon(1000, noise=0.1, seed=1)
        dist = EmpiricalDistribution(moons.points)
        labels = moons.labels.astype(float)
        d = rvt_pushforward(dist, lambda pts: labels, resolution=101,
                            method="histogram")
        low = d.mass[d.t < 0.5].sum() * d.dt
        high = d.mass[d.t >= 0.5].sum() * d.dt
        assert low == pytest.approx(0.5, abs=1e-12)
        assert high == pytest.approx(0.5, abs=1e-12)

    def test_scalar_callable_fallback(self):
        dist = EmpiricalDistribution(np.array([[1.0, 0.0], [2.0, 0.0]]))
        d = rvt_pushforward(dist, lambda p: float(p[0]), resolution=16)
        assert d.mass.sum() * d.dt == pytest.approx(1.0, abs=1e-9)


class TestDistributionStructure:
    def test_slice_is_linear_in_the_distribution(self):
        # a 50/50 mixture projects to the concatenation of the component
        # value lists, which is the exact sense of slice linearity
        a = sample_gaussian(100, mean=(0, 0), seed=1)
        b = sample_gaussian(100, mean=(3, 0), seed=2)
        mix = EmpiricalDistribution(np.vstack([a.points, b.points]))
        g = linear_from_angle(0.7)
        np.testing.assert_array_equal(
            project_samples(mix, g),
            np.concatenate([project_samples(a, g), project_samples(b, g)]),
        )

    def test_translation_shifts_projections(self):
        dist = sample_gaussian(300, seed=4)
        v = np.array([1.5, -2.0])
        shifted = EmpiricalDistribution(dist.points + v, dist.weights)
        g = linear_from_angle(1.2)
        np.testing.assert_allclose(
            project_samples(shifted, g),
            project_samples(dist, g) + float(g.eval(v)),
            atol=1e-12,
        )


class TestExports:
    def test_slice_csv(self, tmp_path):
        dist = sample_gaussian(100, seed=1)
        sl = radon_slice(dist, linear_from_angle(0.5), resolution=32)
        path = tmp_path / "slice.csv"
        slice_to_csv(sl, path)
        rows = [line.split(",") for line in path.read_text().splitlines()]
        assert len(rows) == 32
        t = np.array([float(r[0]) for r in rows])
        m = np.array([float(r[1]) for r in rows])
        np.testing.assert_array_equal(t, sl.density.t)
        np.testing.assert_array_equal(m, sl.density.mass)

    def test_sinogram_csv_round_trip(self, tmp_path):
        dist = sample_gaussian(200, seed=2)
        s = sinogram(dist, 5, resolution=24)
        path = tmp_path / "sino.csv"
        sinogram_to_csv(s, path)
        phis, t, dens = read_sinogram_csv(path)
        np.testing.assert_array_equal(phis, s.phis)
        np.testing.assert_array_equal(t, s.t)
        np.testing.assert_array_equal(dens, s.densities)


class TestDensity1D:
    def test_validation(self):
        t = np.linspace(0, 1, 11)
        with pytest.raises(ValueError):
            Density1D(t, np.full(11, -1.0), 0.1)
        with pytest.raises(ValueError):
            Density1D(t, np.full(11, 123.0), 0.1)

    def test_cdf_monotone_and_complete(self):
        vals = make_rng(9).standard_normal(2000)
        d = estimate_density(vals, resolution=128)
        cdf = d.cdf()
        assert np.all(np.diff(cdf) >= 0)
        assert cdf[-1] == pytest.approx(1.0, abs=1e-6)
