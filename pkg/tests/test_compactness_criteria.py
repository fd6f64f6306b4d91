"""Test the compactness criteria, their reports and the battery."""

import math
import os
import unittest

import numpy as np

import orlicz_lab as mod
from orlicz_lab.compactness_criteria import (
    BUILTIN_FUNCTIONS,
    COMPACTNESS_CRITERIA,
    EXIT_INCONCLUSIVE,
    EXIT_INCONSISTENT,
    EXIT_OK,
    OUTSIDE_HYPOTHESES,
    EvidenceRow,
    exit_code,
)

ID = mod.CriterionId
PASS, FAIL, INCONCLUSIVE = (mod.Verdict.PASS, mod.Verdict.FAIL,
                            mod.Verdict.INCONCLUSIVE)
H_GRID = 2.0 ** -np.arange(2, 10)


def fake(criterion, verdict, family="exp_power"):
    return mod.CriterionReport(
        criterion, {"function": {"family": family, "params": {}}}, verdict,
        None, []
    )


class SupNormTest(unittest.TestCase):
    def test_verdicts(self):
        report = mod.h_infty_compact(mod.Constant(0.3))
        self.assertIs(report.verdict, PASS)
        self.assertEqual(report.margin, 0.3)
        self.assertIs(mod.h_infty_compact(mod.Dilation(0.9)).verdict, PASS)
        report = mod.h_infty_compact(mod.Dilation(1.0))
        self.assertIs(report.verdict, FAIL)
        self.assertEqual(report.margin, 1.0)
        self.assertIs(mod.h_infty_compact(mod.Lens1D(0.5)).verdict, FAIL)

    def test_without_closed_form(self):
        report = mod.h_infty_compact(mod.Lens1D(0.5, pre_dilation=0.5))
        self.assertIs(report.verdict, PASS)
        self.assertLess(report.margin, 1.0)


class RatioTest(unittest.TestCase):
    def test_classical(self):
        self.assertIs(mod.classical_angular_ratio(mod.Lens1D(0.5)).verdict,
                      PASS)
        self.assertIs(mod.classical_angular_ratio(mod.Dilation(0.9)).verdict,
                      PASS)
        report = mod.classical_angular_ratio(mod.Dilation(1.0))
        self.assertIs(report.verdict, FAIL)
        self.assertAlmostEqual(report.margin, 1.0, places=6)

    def test_lens_plateau(self):
        # ψ⁻¹ grows like a logarithm, so the ratio settles at β
        for beta in (1 / 3, 1 / 2, 2 / 3):
            for alpha in (0.0, 1.0, 2.0, None):
                report = mod.boundary_ratio_alpha(
                    mod.ExpPower(1, 1), mod.Lens1D(beta), alpha,
                    samples_per_r=64
                )
                self.assertIs(report.verdict, FAIL, (beta, alpha))
                self.assertAlmostEqual(report.margin, beta, delta=0.02)

    def test_power_function(self):
        report = mod.boundary_ratio_alpha(mod.Power(2), mod.Dilation(1.0),
                                          0.0, samples_per_r=64)
        self.assertIs(report.verdict, FAIL)
        self.assertAlmostEqual(report.margin, 1.0, places=6)
        report = mod.boundary_ratio_alpha(mod.Power(2), mod.Lens1D(0.5), 0.0,
                                          samples_per_r=64)
        self.assertIs(report.verdict, PASS)
        self.assertEqual(report.inputs["exponent"], 2.0)

    def test_bad_radii(self):
        with self.assertRaises(ValueError):
            mod.boundary_ratio_alpha(mod.Power(2), mod.Lens1D(0.5), 0.0,
                                     r_grid=[0.5, 1.0])
        with self.assertRaises(ValueError):
            mod.classical_angular_ratio(mod.Lens1D(0.5), r_grid=[0.9, 0.5])

    def test_simplified(self):
        report = mod.boundary_ratio_simplified(mod.ExpPower(1, 1),
                                               mod.Lens1D(0.5),
                                               samples_per_r=64)
        self.assertIs(report.verdict, FAIL)
        self.assertTrue(report.hypotheses_met)
        self.assertEqual(set(report.inputs["alpha_verdicts"].values()),
                         {"Fail"})

    def test_simplified_outside_hypotheses(self):
        with self.assertLogs("orlicz_lab.compactness_criteria", "WARNING"):
            report = mod.boundary_ratio_simplified(mod.Power(2),
                                                   mod.Lens1D(0.5),
                                                   samples_per_r=64)
        self.assertIs(report.hypotheses_met, False)
        self.assertIn(OUTSIDE_HYPOTHESES, report.notes)


class CarlesonFitTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.identity = mod.build_profile(mod.Dilation(1.0), 0.0, H_GRID,
                                         center_strategy="e1")
        cls.constant = mod.build_profile(mod.Constant(0.3), 0.0, H_GRID,
                                         center_strategy="e1",
                                         n_per_cell=2048)

    def test_identity(self):
        report = mod.psi_carleson_fit(self.identity, mod.Power(2),
                                      mode="BigOh")
        self.assertIs(report.criterion_id, ID.PSI_CARLESON_BIG_OH)
        self.assertIs(report.verdict, PASS)
        report = mod.psi_carleson_fit(self.identity, mod.Power(2))
        self.assertIs(report.criterion_id, ID.PSI_CARLESON_LITTLE_OH)
        self.assertIs(report.verdict, FAIL)
        self.assertEqual(report.inputs["exponent"], 2.0)
        self.assertEqual(len(report.evidence), 5 * len(H_GRID))

    def test_vanishing_profile(self):
        for mode in mod.CarlesonMode:
            report = mod.psi_carleson_fit(self.constant, mod.ExpPower(1, 1),
                                          mode=mode)
            self.assertIs(report.verdict, PASS, mode)

    def test_exponent_mismatch(self):
        with self.assertRaises(ValueError):
            mod.psi_carleson_fit(self.identity, mod.Power(2), exponent=3.0)


class LensExponentTest(unittest.TestCase):
    def test_bergman(self):
        for alpha in (0.0, 1.0):
            for beta in (1 / 3, 1 / 2, 2 / 3):
                label = f"alpha={alpha}, beta={beta}"
                report = mod.lens_exponent_check(beta, alpha)
                self.assertIs(report.verdict, PASS, label)
                self.assertEqual(report.rule["target"], (2 + alpha) / beta)
                self.assertLess(abs(report.margin), 0.15, label)

    def test_hardy(self):
        report = mod.lens_exponent_check(0.5, None, n=4096)
        self.assertIs(report.verdict, PASS)
        self.assertEqual(report.rule["target"], 2.0)
        self.assertLessEqual(report.margin, 0.15)
        for beta in (1 / 3, 2 / 3):
            report = mod.lens_exponent_check(beta, None)
            self.assertIs(report.verdict, PASS, beta)
            self.assertEqual(report.rule["target"], 1 / beta)
            self.assertLess(abs(report.margin), 0.15, beta)


class GrowthInequalityTest(unittest.TestCase):
    def test_delta2sharp(self):
        report = mod.delta2sharp_sufficiency(mod.ExpPower(1, 1), 0.5, 1)
        self.assertIs(report.verdict, PASS)
        self.assertEqual(report.margin, 2.0)
        report = mod.delta2sharp_sufficiency(mod.Power(2), 0.5, 1)
        self.assertIs(report.verdict, FAIL)
        self.assertIsNone(report.margin)
        report = mod.delta2sharp_sufficiency(mod.Power(2), 0.9, 2)
        self.assertIs(report.verdict, PASS)
        self.assertEqual(report.margin, 1.0)
        self.assertIn("exponent at most 1", report.notes)
        for beta in (0.0, 1.0):
            with self.assertRaises(ValueError):
                mod.delta2sharp_sufficiency(mod.Power(2), beta, 1)

    def test_bergman_sufficiency(self):
        # A must reach B³ for ψ(x) = x² and 3B − 2 for ψ(x) = eˣ − 1
        report = mod.bergman_sufficiency_check(mod.Power(2), 1, 1.0, 0.0)
        self.assertIs(report.verdict, PASS)
        self.assertEqual(report.margin, 4096.0)
        report = mod.bergman_sufficiency_check(mod.ExpPower(1, 1), 1, 1.0,
                                               0.0)
        self.assertIs(report.verdict, PASS)
        self.assertEqual(report.margin, 64.0)
        report = mod.bergman_sufficiency_check(mod.Power(2), 1, 1.0, 0.0,
                                               A_grid=[1.0, 2.0])
        self.assertIs(report.verdict, FAIL)
        with self.assertRaises(ValueError):
            mod.bergman_sufficiency_check(mod.Power(2), 1, 0.0, 0.0)


class KoranyiTest(unittest.TestCase):
    cases = (
        (mod.Constant(0.3), mod.Power(2), PASS),
        (mod.Lens1D(0.5), mod.Power(2), PASS),
        (mod.Lens1D(0.5), mod.ExpPower(1, 1), FAIL),
        (mod.Dilation(1.0), mod.Power(2), INCONCLUSIVE),
        (mod.EmbeddedLens(0.5, 2), mod.Power(2), INCONCLUSIVE),
        (mod.EmbeddedLens(1 / 3, 2), mod.Power(2), PASS),
    )

    def test_table(self):
        for phi, psi, expected in self.cases:
            report = mod.koranyi_aperture_verdict(phi, psi)
            self.assertIs(report.verdict, expected, (phi.label, psi.label))

    def test_boundary_aperture(self):
        report = mod.koranyi_aperture_verdict(mod.EmbeddedLens(0.5, 2),
                                              mod.Power(2))
        self.assertAlmostEqual(report.margin, 1.0)
        self.assertEqual(report.inputs["scope"], "contact")
        self.assertIn("aperture b_N: bounded", report.notes)


class ReportTest(unittest.TestCase):
    def test_json(self):
        reports = (
            mod.boundary_ratio_alpha(mod.ExpPower(1, 1), mod.Lens1D(0.5),
                                     0.0, samples_per_r=16),
            mod.delta2sharp_sufficiency(mod.ExpPower(1, 1), 0.5, 1),
            mod.koranyi_aperture_verdict(mod.Dilation(1.0), mod.Power(2)),
            mod.h_infty_compact(mod.Constant(0.3)),
        )
        for report in reports:
            restored = mod.CriterionReport.from_json(report.to_json())
            self.assertIs(restored.criterion_id, report.criterion_id)
            self.assertEqual(restored.recompute_verdict(),
                             (report.verdict, report.margin))

    def test_tampered_evidence(self):
        report = mod.h_infty_compact(mod.Dilation(0.9))
        report.evidence[0] = EvidenceRow("closed_form", 1.0, 1 - 1e-6)
        self.assertEqual(report.recompute_verdict(), (FAIL, 1.0))

    def test_csv(self):
        report = mod.delta2sharp_sufficiency(mod.Power(2), 0.5, 1,
                                             C_grid=[1.0], y_grid=[16.0])
        report.to_csv("tmp.txt")
        with open("tmp.txt") as file:
            lines = file.read().splitlines()
        self.assertEqual(lines[0], "parameter,lhs,rhs")
        self.assertTrue(lines[1].startswith("1.0;16.0,"))
        self.assertEqual(len(lines), 2)
        os.remove("tmp.txt")


class ConsistencyTest(unittest.TestCase):
    def test_inconsistent(self):
        reports = [fake(ID.BOUNDARY_RATIO_ALPHA, FAIL),
                   fake(ID.H_INFTY_COMPACT, PASS)]
        with self.assertLogs("orlicz_lab.compactness_criteria", "WARNING"):
            rows = mod.consistency_rows(reports)
        first = rows[0]
        self.assertEqual(first.name, "bounded image => compact")
        self.assertEqual(first.status, "inconsistent")
        self.assertEqual(first.detail, "BoundaryRatioAlpha")
        self.assertEqual(exit_code(reports, rows), EXIT_INCONSISTENT)

    def test_power_reduction(self):
        reports = [fake(ID.BOUNDARY_RATIO_ALPHA, PASS, "power"),
                   fake(ID.CLASSICAL_ANGULAR_RATIO, PASS)]
        rows = {row.name: row for row in mod.consistency_rows(reports)}
        self.assertEqual(rows["power reduction"].status, "consistent")
        self.assertEqual(rows["bounded image => compact"].status, "untested")
        self.assertEqual(exit_code(reports, list(rows.values())), EXIT_OK)

    def test_all_inconclusive(self):
        reports = [fake(ID.KORANYI_APERTURE_VERDICT, INCONCLUSIVE)]
        rows = mod.consistency_rows(reports)
        self.assertEqual(exit_code(reports, rows), EXIT_INCONCLUSIVE)


class BatteryTest(unittest.TestCase):
    options = {"h_grid": 2.0 ** -np.arange(4, 8), "n_per_cell": 1000,
               "samples_per_r": 32}

    def assertCompact(self, battery, label):
        verdicts = {report.criterion_id: report.verdict
                    for report in battery.reports}
        for criterion in COMPACTNESS_CRITERIA:
            if criterion in verdicts:
                self.assertIs(verdicts[criterion], PASS,
                              f"{label}: {criterion.value}")
        self.assertEqual(battery.exit_code, EXIT_OK, label)

    def test_bounded_images(self):
        for phi in (mod.Constant(0.3), mod.Dilation(0.9)):
            for alpha in (0.0, None):
                for psi in BUILTIN_FUNCTIONS:
                    label = f"{phi!r}, alpha={alpha}, {psi.label}"
                    battery = mod.run_battery(phi, psi, alpha, **self.options)
                    self.assertCompact(battery, label)
                    for row in battery.consistency:
                        self.assertNotEqual(row.status, "inconsistent",
                                            f"{label}: {row.name}")
                    if alpha is None:
                        ids = [report.criterion_id
                               for report in battery.reports]
                        self.assertNotIn(ID.BOUNDARY_RATIO_SIMPLIFIED, ids)

    def test_lens_separation(self):
        battery = mod.run_battery(mod.Lens1D(0.5), mod.ExpPower(1, 1), 0.0,
                                  h_grid=2.0 ** -np.arange(2, 8),
                                  n_per_cell=4096, samples_per_r=64)
        found = {report.criterion_id: report for report in battery.reports}
        self.assertIs(found[ID.BOUNDARY_RATIO_ALPHA].verdict, FAIL)
        self.assertAlmostEqual(found[ID.BOUNDARY_RATIO_ALPHA].margin, 0.5,
                               delta=0.02)
        self.assertIs(found[ID.CLASSICAL_ANGULAR_RATIO].verdict, PASS)
        self.assertIs(found[ID.KORANYI_APERTURE_VERDICT].verdict, FAIL)
        self.assertIs(found[ID.DELTA2_SHARP_SUFFICIENCY].verdict, PASS)
        self.assertIn(ID.LENS_LOWER_BOUND_EXPONENT, found)
        self.assertEqual(len(battery.alpha_reports), 2)
        statuses = {row.name: row.status for row in battery.consistency}
        self.assertNotIn("inconsistent", statuses.values())
        self.assertEqual(statuses["lens separation"], "consistent")
        self.assertEqual(battery.exit_code, EXIT_OK)

    def test_identity(self):
        battery = mod.run_battery(mod.Dilation(1.0), mod.Power(2), 0.0,
                                  h_grid=H_GRID, samples_per_r=64)
        found = {report.criterion_id: report.verdict
                 for report in battery.reports}
        self.assertIs(found[ID.PSI_CARLESON_BIG_OH], PASS)
        self.assertIs(found[ID.PSI_CARLESON_LITTLE_OH], FAIL)
        self.assertIs(found[ID.BOUNDARY_RATIO_ALPHA], FAIL)
        self.assertIs(found[ID.CLASSICAL_ANGULAR_RATIO], FAIL)
        summary = battery.summary()
        self.assertEqual(summary["exit_code"], EXIT_OK)
        self.assertEqual(summary["verdicts"]["HInftyCompact"], "Fail")
        order = [report.criterion_id for report in battery.reports]
        self.assertEqual(order, sorted(order, key=list(ID).index))

    def test_threads_do_not_change_results(self):
        args = mod.Lens1D(0.5), mod.Power(2), 0.0
        options = dict(self.options, seed=4)
        serial = mod.run_battery(*args, **options)
        threaded = mod.run_battery(*args, threads=3, **options)
        self.assertEqual([report.to_dict() for report in serial.reports],
                         [report.to_dict() for report in threaded.reports])


if __name__ == "__main__":
    unittest.main()
