"""Test the symbol families and their boundary diagnostics."""

import math
import unittest

import numpy as np

import orlicz_lab as mod


class Doubling(mod.Dilation):
    """Not a self-map; used to trigger the violation check."""

    def _raw(self, points):
        return 2 * points


class FamilyTest(unittest.TestCase):
    def test_constant(self):
        phi = mod.Constant(0.3)
        np.testing.assert_allclose(phi.apply([0.0, 0.5, -0.9]), 0.3)
        self.assertEqual(phi.closed_form_sup_norm(), 0.3)
        with self.assertRaises(ValueError):
            mod.Constant(1.0)

    def test_dilation(self):
        phi = mod.Dilation(0.5)
        self.assertEqual(mod.apply(phi, [0.5]).tolist(), [[0.25]])
        self.assertEqual(mod.Dilation(1.0).apply(0.3j).tolist(), [[0.3j]])
        self.assertEqual(mod.Dilation(0.5, pre_dilation=0.5).factor, 0.25)
        with self.assertRaises(ValueError):
            phi.apply([1.0])
        with self.assertRaises(ValueError):
            mod.Dilation(1.5)

    def test_lens(self):
        phi = mod.Lens1D(0.5)
        self.assertAlmostEqual(phi.apply(0.75)[0, 0], 0.5)
        self.assertAlmostEqual(phi.apply(0.0)[0, 0], 0.0)
        images = phi.apply(np.array([0.5j, -0.9, 0.99]))
        self.assertTrue(np.all(np.abs(images) < 1))
        self.assertAlmostEqual(phi.boundary_values(-1.0)[0, 0],
                               1 - math.sqrt(2))
        with self.assertRaises(ValueError):
            mod.Lens1D(1.0)

    def test_embedded_lens(self):
        phi = mod.EmbeddedLens(0.5, 2)
        images = phi.apply(np.array([[0.75, 0.3]]))
        self.assertAlmostEqual(images[0, 0], 0.5)
        self.assertEqual(images[0, 1], 0)
        self.assertEqual(phi.N, 2)

    def test_lens_family(self):
        for phi in (mod.Lens1D(0.5), mod.EmbeddedLens(1 / 3, 3)):
            self.assertIsInstance(phi, mod.LensFamily)
            self.assertEqual(phi.contact_point[0], 1)
            self.assertTrue(np.all(phi.contact_point[1:] == 0))
        self.assertNotIsInstance(mod.Dilation(0.9), mod.LensFamily)
        self.assertNotIsInstance(mod.Constant(0.3), mod.LensFamily)

    def test_diagonal(self):
        phi = mod.DiagonalLinear((0.6, 0.8j))
        images = phi.apply(np.array([[0.5, 0.5]]))
        np.testing.assert_allclose(images, [[0.3, 0.4j]])
        self.assertAlmostEqual(phi.closed_form_sup_norm(), 0.8)
        with self.assertRaises(ValueError):
            mod.DiagonalLinear((0.9, 0.9))

    def test_self_map_violation(self):
        phi = Doubling(1.0)
        with self.assertRaises(mod.SelfMapViolation) as context:
            phi.apply(np.array([0.1, 0.6]))
        self.assertEqual(context.exception.family, "dilation")
        self.assertEqual(context.exception.point.tolist(), [0.6])
        self.assertIn("self-map violation", str(context.exception))

    def test_from_spec(self):
        phi = mod.symbol_from_spec({"family": "lens",
                                    "params": {"b": math.sqrt(2)}})
        self.assertAlmostEqual(phi.beta, 0.5)
        phi = mod.symbol_from_spec({"family": "constant",
                                    "params": {"w0": ["0.3+0.1j"]}})
        self.assertEqual(phi.w0, (0.3 + 0.1j,))
        phi = mod.symbol_from_spec({"family": "dilation",
                                    "params": {"r": 0.5, "N": 2}})
        self.assertEqual(phi.N, 2)
        for phi in (mod.Constant((0.1, 0.2j)), mod.Dilation(0.9, 3),
                    mod.DiagonalLinear((0.5, -0.5)), mod.Lens1D(1 / 3),
                    mod.EmbeddedLens(0.5, 2, pre_dilation=0.9)):
            self.assertEqual(mod.symbol_from_spec(phi.to_spec()), phi)
        with self.assertRaises(ValueError):
            mod.symbol_from_spec({"family": "mobius", "params": {}})
        with self.assertRaises(ValueError):
            mod.symbol_from_spec({"family": "dilation", "params": {}})


class RestrictionAndLimitsTest(unittest.TestCase):
    def test_radial_restriction(self):
        self.assertEqual(mod.radial_restriction(mod.Dilation(1.0), 0.5),
                         mod.Dilation(0.5))
        lens = mod.radial_restriction(mod.Lens1D(0.5), 0.5)
        self.assertEqual(lens.pre_dilation, 0.5)
        self.assertAlmostEqual(lens.apply(0.5)[0, 0],
                               mod.Lens1D(0.5).apply(0.25)[0, 0])
        constant = mod.Constant(0.3)
        self.assertIs(mod.radial_restriction(constant, 0.5), constant)
        with self.assertRaises(ValueError):
            mod.radial_restriction(lens, 1.0)

    def test_boundary_limit(self):
        limit = mod.boundary_limit(mod.Dilation(1.0), np.array([1.0, 1j]))
        self.assertTrue(np.all(limit.converged))
        np.testing.assert_allclose(limit.points[:, 0], [1.0, 1j], atol=1e-8)

        limit = mod.boundary_limit(mod.Lens1D(0.5), np.array([1.0, -1.0]))
        # the lens approaches its contact point like (1 - r)^β
        self.assertEqual(limit.converged.tolist(), [False, True])
        self.assertAlmostEqual(limit.points[0, 0].real, 1 - 2.0 ** -20)
        self.assertAlmostEqual(limit.points[1, 0].real, 1 - math.sqrt(2),
                               places=8)
        with self.assertRaises(ValueError):
            mod.boundary_limit(mod.Lens1D(0.5), 1.0, r_seq=[0.5, 0.4])

    def test_sup_norm(self):
        estimate = mod.sup_norm_estimate(mod.Dilation(0.9))
        self.assertAlmostEqual(estimate.lower_bound, 0.9, places=9)
        self.assertEqual(estimate.closed_form, 0.9)
        estimate = mod.sup_norm_estimate(mod.Lens1D(0.5))
        self.assertGreater(estimate.lower_bound, 0.999)
        self.assertEqual(estimate.closed_form, 1.0)
        estimate = mod.sup_norm_estimate(mod.Lens1D(0.5, pre_dilation=0.5))
        self.assertIsNone(estimate.closed_form)
        self.assertLess(estimate.lower_bound, 1.0)


class ApertureTest(unittest.TestCase):
    def test_beta_and_aperture(self):
        self.assertAlmostEqual(mod.beta_from_aperture(math.sqrt(2)), 0.5)
        self.assertAlmostEqual(mod.aperture_from_beta(0.5), math.sqrt(2))
        self.assertAlmostEqual(
            mod.aperture_from_beta(mod.beta_from_aperture(3.0)), 3.0
        )
        self.assertAlmostEqual(mod.aperture_from_beta(1 / 3),
                               mod.koranyi_aperture_bound(3))
        with self.assertRaises(ValueError):
            mod.beta_from_aperture(1.0)
        with self.assertRaises(ValueError):
            mod.aperture_from_beta(1.0)

    def test_containing_region(self):
        region, scope = mod.containing_region(mod.Constant(0.3))
        self.assertEqual(scope, "global")
        self.assertAlmostEqual(region.a, 2 / 1.3, places=5)
        self.assertTrue(region.contains(0.3))

        region, scope = mod.containing_region(mod.Dilation(0.5))
        self.assertEqual(scope, "global")
        self.assertAlmostEqual(region.a, 4.0, places=5)
        points = mod.sample_ball_weighted(1, 0.0, 4096, seed=0)
        images = mod.Dilation(0.5).apply(points)
        self.assertTrue(np.all(region.contains(images)))

        self.assertEqual(mod.containing_region(mod.Dilation(1.0)),
                         (None, "none"))

        region, scope = mod.containing_region(mod.Lens1D(0.5))
        self.assertEqual(scope, "contact")
        self.assertAlmostEqual(region.a, math.sqrt(2))

    def test_contact_aperture(self):
        estimate = mod.estimate_contact_aperture(mod.Lens1D(0.5))
        self.assertAlmostEqual(estimate, math.sqrt(2), delta=0.01)
        estimate = mod.estimate_contact_aperture(mod.EmbeddedLens(1 / 3, 2))
        self.assertAlmostEqual(estimate, 2 / math.sqrt(3), delta=0.01)
        self.assertIsNone(mod.estimate_contact_aperture(mod.Dilation(0.5)))

    def test_contact_containment(self):
        self.assertTrue(mod.check_contact_containment(mod.Lens1D(0.5)))
        self.assertTrue(mod.check_contact_containment(mod.Lens1D(2 / 3)))
        self.assertIsNone(mod.check_contact_containment(mod.Dilation(0.5)))


if __name__ == "__main__":
    unittest.main()
