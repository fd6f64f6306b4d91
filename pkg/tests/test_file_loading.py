"""Test the file loading functions in orlicz_lab"""

import orlicz_lab as mod
import os
import unittest

from test_helpers import write


class FileLoadingTest(unittest.TestCase):
    def tearDown(self):
        mod.set_witness_candidates()

    def test_set_witness_candidates(self):
        write("""delta2 2
""", "tmp.txt")
        self.assertEqual(
            mod.certify(mod.Power(2), "Delta2").verdict,
            mod.Verdict.PASS
        )
        mod.set_witness_candidates("tmp.txt")
        self.assertEqual(
            mod.certify(mod.Power(2), "Delta2").verdict,
            mod.Verdict.FAIL
        )
        # keys missing from the file keep their values
        self.assertEqual(
            mod.certify(mod.Power(2), "Nabla2").verdict,
            mod.Verdict.PASS
        )
        mod.set_witness_candidates()
        self.assertEqual(
            mod.certify(mod.Power(2), "Delta2").verdict,
            mod.Verdict.PASS
        )
        os.remove("tmp.txt")

    def test_comments_and_case(self):
        write("""# tighter nabla2 search
NABLA2 1.5

""", "tmp.txt")
        mod.set_witness_candidates("tmp.txt")
        self.assertEqual(
            mod.certify(mod.Power(2), "Nabla2").verdict,
            mod.Verdict.FAIL
        )
        self.assertEqual(
            mod.certify(mod.ExpPower(1, 1), "Nabla2").verdict,
            mod.Verdict.PASS
        )
        os.remove("tmp.txt")

    def test_bad_files(self):
        write("""kappa 2 4
""", "tmp.txt")
        with self.assertRaises(ValueError):
            mod.set_witness_candidates("tmp.txt")
        write("""delta2 2 -4
""", "tmp.txt")
        with self.assertRaises(ValueError):
            mod.set_witness_candidates("tmp.txt")
        write("""nabla0_b
""", "tmp.txt")
        with self.assertRaises(ValueError):
            mod.set_witness_candidates("tmp.txt")
        os.remove("tmp.txt")

    def test_sampled_function_csv(self):
        f = mod.SampledFunction([1.0, 0.0, 2.0], [0.25, 0.25, 0.5],
                                label="f")
        f.to_csv("tmp.txt")
        g = mod.SampledFunction.from_csv("tmp.txt")
        self.assertEqual(g.values.tolist(), [1.0, 0.0, 2.0])
        self.assertEqual(g.weights.tolist(), [0.25, 0.25, 0.5])
        self.assertEqual(
            mod.luxemburg_norm(mod.Power(2), f),
            mod.luxemburg_norm(mod.Power(2), g)
        )
        os.remove("tmp.txt")

    def test_export_samples_csv(self):
        points = mod.sample_sphere(2, 3, seed=5)
        mod.export_samples_csv(points, "tmp.txt")
        with open("tmp.txt") as file:
            lines = file.read().splitlines()
        self.assertEqual(lines[0], "re_1,im_1,re_2,im_2,weight")
        self.assertEqual(len(lines), 4)
        first = [float(word) for word in lines[1].split(",")]
        self.assertEqual(first[0], points[0, 0].real)
        self.assertEqual(first[3], points[0, 1].imag)
        self.assertAlmostEqual(first[4], 1 / 3)
        os.remove("tmp.txt")


if __name__ == "__main__":
    unittest.main()
