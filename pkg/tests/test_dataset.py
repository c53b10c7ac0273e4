import numpy as np
import pytest

from radon_lens.dataset import (
    CsvParseError,
    EmpiricalDistribution,
    LabeledDataset,
    load_csv,
    sample_gaussian,
    sample_halfmoon,
    save_csv,
)


class TestHalfmoon:
    def test_zero_noise_points_lie_on_arcs(self):
        ds = sample_halfmoon(4, noise=0.0, seed=7)
        assert len(ds) == 4 and ds.d == 2
        outer = ds.points[ds.labels == 0]
        inner = ds.points[ds.labels == 1]
        assert len(outer) == 2 and len(inner) == 2
        # class 0: unit circle about the origin, upper half
        np.testing.assert_allclose(np.linalg.norm(outer, axis=1), 1.0, atol=1e-12)
        assert np.all(outer[:, 1] >= -1e-12)
        # class 1: unit circle about (1, 0.5), lower half
        np.testing.assert_allclose(
            np.linalg.norm(inner - [1.0, 0.5], axis=1), 1.0, atol=1e-12
        )
        assert np.all(inner[:, 1] <= 0.5 + 1e-12)

    def test_determinism(self):
        a = sample_halfmoon(1000, noise=0.1, seed=1)
        b = sample_halfmoon(1000, noise=0.1, seed=1)
        assert np.array_equal(a.points, b.points)
        assert np.array_equal(a.labels, b.labels)
        c = sample_halfmoon(1000, noise=0.1, seed=2)
        assert not np.array_equal(a.points, c.points)

    def test_class_mean_heights(self):
        # frozen from the generator at this seed; the geometric oracle is
        # the mean height of each parametric arc (the jitter has zero mean)
        ds = sample_halfmoon(1000, noise=0.1, seed=1)
        mean0 = ds.points[ds.labels == 0, 1].mean()
        mean1 = ds.points[ds.labels == 1, 1].mean()
        assert mean0 == pytest.approx(0.6374375464769935, abs=1e-12)
        assert mean1 == pytest.approx(-0.13196740431327303, abs=1e-12)
        arc = np.sin(np.linspace(0, np.pi, 500))
        assert mean0 == pytest.approx(arc.mean(), abs=0.02)
        assert mean1 == pytest.approx((1 - arc - 0.5).mean(), abs=0.02)
        assert mean0 > mean1

    def test_split_sizes(self):
        ds = sample_halfmoon(7, noise=0.0, seed=0)
        assert (ds.labels == 0).sum() == 3
        assert (ds.labels == 1).sum() == 4

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            sample_halfmoon(1, noise=0.1, seed=0)
        with pytest.raises(ValueError):
            sample_halfmoon(10, noise=-0.1, seed=0)


class TestGaussian:
    def test_sample_mean_near_center(self):
        # CLT: 3 sigma / sqrt(n) ~ 0.0095, doubled for slack
        dist = sample_gaussian(100000, mean=0, cov_scale=1, seed=3)
        assert np.all(np.abs(dist.points.mean(axis=0)) < 0.02)

    def test_degenerate_scale_pins_the_point(self):
        dist = sample_gaussian(1, mean=(5, 5), cov_scale=1e-9, seed=0)
        np.testing.assert_allclose(dist.points[0], [5.0, 5.0], atol=1e-6)

    def test_weights_sum_to_one(self):
        dist = sample_gaussian(137, seed=5)
        assert dist.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(dist.weights >= 0)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            sample_gaussian(0, seed=1)
        with pytest.raises(ValueError):
            sample_gaussian(10, cov_scale=0.0, seed=1)
        with pytest.raises(ValueError):
            sample_gaussian(10, cov_scale=-1.0, seed=1)

    def test_determinism(self):
        a = sample_gaussian(50, mean=(1, 2), cov_scale=0.5, seed=9)
        b = sample_gaussian(50, mean=(1, 2), cov_scale=0.5, seed=9)
        assert np.array_equal(a.points, b.points)


class TestContainers:
    def test_dataset_validation(self):
        with pytest.raises(ValueError):
            LabeledDataset(np.zeros((3, 2)), np.zeros(2, dtype=int))
        with pytest.raises(ValueError):
            LabeledDataset(np.array([[np.inf, 0.0]]), np.array([0]))

    def test_distribution_normalizes_weights(self):
        dist = EmpiricalDistribution(np.zeros((4, 2)), weights=[1, 1, 1, 1])
        np.testing.assert_allclose(dist.weights, 0.25)
        with pytest.raises(ValueError):
            EmpiricalDistribution(np.zeros((2, 2)), weights=[-1, 2])
        with pytest.raises(ValueError):
            EmpiricalDistribution(np.zeros((2, 2)), weights=[0, 0])


class TestCsv:
    def test_round_trip(self, tmp_path):
        ds = sample_halfmoon(50, noise=0.05, seed=3)
        path = tmp_path / "moons.csv"
        save_csv(ds, path)
        assert load_csv(path) == ds

    def test_round_trip_with_header(self, tmp_path):
        ds = sample_halfmoon(10, noise=0.0, seed=1)
        path = tmp_path / "moons.csv"
        save_csv(ds, path, header=True)
        assert open(path).readline().strip() == "x0,x1,label"
        assert load_csv(path) == ds

    def test_unlabeled_round_trip(self, tmp_path):
        dist = sample_gaussian(20, seed=4)
        path = tmp_path / "points.csv"
        save_csv(dist, path)
        loaded = load_csv(path)
        assert np.array_equal(loaded.points, dist.points)
        assert np.all(loaded.labels == 0)

    def test_malformed_row_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0,0\n1.0,2.0,abc\n")
        with pytest.raises(CsvParseError, match="line 2"):
            load_csv(path)

    def test_mixed_width_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n1.0,2.0,3.0\n")
        with pytest.raises(CsvParseError, match="line 2"):
            load_csv(path)

    def test_empty_file_is_an_error(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(CsvParseError, match="dimension is undefined"):
            load_csv(path)
