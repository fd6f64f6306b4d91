"""Test the ball geometry: regions, windows and seeded samplers."""

import math
import unittest

import numpy as np

import orlicz_lab as mod
from orlicz_lab.ball_geometry import BLOCK, localized_box_mass

from test_helpers import disc_window_mass, within


class PointsAndRegionsTest(unittest.TestCase):
    def test_ball_point(self):
        point = mod.BallPoint((0.6, 0.8j))
        self.assertAlmostEqual(point.norm, 1.0)
        self.assertEqual(point.dimension, 2)
        with self.assertRaises(ValueError):
            mod.BallPoint((0.9, 0.9))
        with self.assertRaises(ValueError):
            mod.BallPoint(())

    def test_n_alpha(self):
        self.assertEqual(mod.n_alpha(1, 0), 2.0)
        self.assertEqual(mod.n_alpha(2, 1.5), 4.5)
        self.assertEqual(mod.n_alpha(3), 3.0)
        with self.assertRaises(ValueError):
            mod.n_alpha(1, -1)
        with self.assertRaises(ValueError):
            mod.n_alpha(0)

    def test_aperture_bound(self):
        self.assertEqual(mod.koranyi_aperture_bound(1), math.inf)
        self.assertAlmostEqual(mod.koranyi_aperture_bound(2), math.sqrt(2))
        self.assertAlmostEqual(mod.koranyi_aperture_bound(3),
                               2 / math.sqrt(3))

    def test_bergman_normalizer(self):
        self.assertAlmostEqual(mod.bergman_normalizer(1, 0), 1.0)
        self.assertAlmostEqual(mod.bergman_normalizer(1, 1), 2.0)
        self.assertAlmostEqual(mod.bergman_normalizer(2, 1), 3.0)

    def test_koranyi_region(self):
        region = mod.KoranyiRegion([1], 2.0)
        self.assertTrue(mod.in_koranyi(0.5, region))
        self.assertFalse(mod.in_koranyi(0.5j, region))
        self.assertEqual(
            region.contains(np.array([0.5, 0.5j, 0.99, -0.5])).tolist(),
            [True, False, True, False]
        )
        whole = mod.KoranyiRegion([1], math.inf)
        self.assertTrue(whole.contains(-0.99))
        with self.assertRaises(ValueError):
            mod.KoranyiRegion([1], 1.0)
        with self.assertRaises(ValueError):
            mod.KoranyiRegion([0.5], 2.0)

    def test_carleson_window(self):
        window = mod.CarlesonWindow([1], 0.5)
        self.assertTrue(mod.in_window(0.7, window))
        self.assertFalse(mod.in_window(0.4, window))
        self.assertFalse(window.contains(1.0))
        closed = mod.CarlesonWindow([1], 0.5, "closed")
        self.assertIs(closed.closure, mod.Closure.CLOSED)
        self.assertTrue(closed.contains(1.0))
        with self.assertRaises(ValueError):
            mod.CarlesonWindow([1], 1.0)
        with self.assertRaises(ValueError):
            window.contains(np.array([[0.5, 0.1]]))

    def test_window_in_two_dimensions(self):
        window = mod.CarlesonWindow([0, 1j], 0.25)
        self.assertTrue(window.contains(mod.BallPoint((0.1, 0.9j))))
        self.assertFalse(window.contains(mod.BallPoint((0.9j, 0.1))))

    def test_corona(self):
        corona = mod.Corona(0.5)
        self.assertTrue(corona.contains(0.7))
        self.assertFalse(corona.contains(0.3))
        with self.assertRaises(ValueError):
            mod.Corona(1.0)

    def test_radius_cdf(self):
        self.assertAlmostEqual(mod.radius_cdf(1, 0, 0.5), 0.25)
        self.assertAlmostEqual(mod.radius_cdf(2, 0, 0.5), 0.0625)
        self.assertEqual(mod.radius_cdf(1, None, 0.99), 0.0)
        self.assertEqual(mod.radius_cdf(1, None, 1.0), 1.0)

    def test_measure_spec(self):
        spec = mod.MeasureSpec("ball_weighted", 2, 1.0)
        self.assertAlmostEqual(spec.normalizer, 3.0)
        self.assertEqual(spec.sample(10, seed=0).shape, (10, 2))
        sphere = mod.MeasureSpec(mod.MeasureKind.SPHERE_SIGMA, 3)
        self.assertEqual(sphere.normalizer, 1.0)
        with self.assertRaises(ValueError):
            mod.MeasureSpec("ball_weighted", 2)


class SamplerTest(unittest.TestCase):
    def test_sphere(self):
        points = mod.sample_sphere(3, 4096, seed=1)
        self.assertEqual(points.shape, (4096, 3))
        np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0,
                                   atol=1e-12)
        for mean in np.mean(points, axis=0):
            self.assertLess(abs(mean), 0.05)

    def test_streams_are_counter_based(self):
        long = mod.sample_sphere(2, 2 * BLOCK + 10, seed=[4, 2])
        short = mod.sample_sphere(2, 100, seed=[4, 2], start=BLOCK - 50)
        np.testing.assert_array_equal(short, long[BLOCK - 50:BLOCK + 50])
        ball = mod.sample_ball_weighted(1, 0.0, 5000, seed=7)
        np.testing.assert_array_equal(
            mod.sample_ball_weighted(1, 0.0, 10, seed=7), ball[:10]
        )
        self.assertFalse(np.array_equal(
            mod.sample_ball_weighted(1, 0.0, 10, seed=8), ball[:10]
        ))

    def test_bad_counts(self):
        with self.assertRaises(ValueError):
            mod.sample_sphere(1, 0, seed=0)
        with self.assertRaises(ValueError):
            mod.sample_sphere(1, 5, seed=0, start=-1)

    def test_radius_distribution(self):
        n = 4096
        for N, alpha in ((1, 0.0), (1, 2.0), (3, 0.5)):
            radii = np.sort(np.linalg.norm(
                mod.sample_ball_weighted(N, alpha, n, seed=2), axis=1
            ))
            self.assertTrue(np.all(radii < 1))
            cdf = mod.radius_cdf(N, alpha, radii)
            upper = np.arange(1, n + 1) / n
            gap = max(np.max(upper - cdf), np.max(cdf - (upper - 1 / n)))
            self.assertLess(gap, 2.2 / math.sqrt(n), (N, alpha))

    def test_weighted_second_moment(self):
        # 1 - |z|² follows Beta(2, 2) for N = 2, α = 1
        points = mod.sample_ball_weighted(2, 1.0, 2 ** 14, seed=9)
        mean = float(np.mean(np.linalg.norm(points, axis=1) ** 2))
        self.assertAlmostEqual(mean, 0.5, delta=0.01)

    def test_localized_box(self):
        t = 0.3
        points, mass = mod.sample_localized_box(0.0, 1.0, t, 4096, seed=1)
        z = points[:, 0]
        self.assertEqual(mass, localized_box_mass(0.0, t))
        self.assertAlmostEqual(mass, t * (2 - t) * math.asin(t) / math.pi)
        self.assertTrue(np.all(np.abs(z) > 1 - t))
        self.assertTrue(np.all(np.abs(z) < 1))
        self.assertTrue(np.all(np.abs(np.angle(z)) <= math.asin(t) + 1e-12))

    def test_localized_box_window_mass(self):
        n = 2 ** 16
        for alpha in (0, 1):
            for t in (0.5, 0.1, 0.01):
                points, mass = mod.sample_localized_box(alpha, 1.0, t, n,
                                                        seed=3)
                p = float(np.mean(np.abs(1 - points[:, 0]) < t))
                se = mass * math.sqrt(p * (1 - p) / n)
                self.assertTrue(
                    within(mass * p, disc_window_mass(alpha, t), se, 4),
                    (alpha, t)
                )

    def test_localized_box_rotation(self):
        points, _ = mod.sample_localized_box(1.0, 1j, 0.2, 1024, seed=0)
        self.assertTrue(np.all(np.abs(1 - points[:, 0] * -1j) < 0.45))
        with self.assertRaises(ValueError):
            mod.sample_localized_box(0.0, 1.0, 1.5, 1024, seed=0)

    def test_localized_arc(self):
        xi, mass = mod.sample_localized_arc(1.0, 0.5, 4096, seed=0)
        self.assertAlmostEqual(mass, 2 * math.asin(0.25) / math.pi)
        np.testing.assert_allclose(np.abs(xi[:, 0]), 1.0, atol=1e-12)
        self.assertTrue(np.all(np.abs(1 - xi[:, 0]) < 0.5 + 1e-12))
        _, whole = mod.sample_localized_arc(1.0, 2.5, 16, seed=0)
        self.assertEqual(whole, 1.0)


if __name__ == "__main__":
    unittest.main()
