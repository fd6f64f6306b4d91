"""Test the orlicz-lab command line."""

import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock

import numpy as np

import orlicz_lab as mod
from orlicz_lab.cli_report import (
    EXIT_CONFIG,
    EXIT_EXHAUSTED,
    EXIT_SELF_MAP,
    AnalysisConfig,
    MajorantConfig,
    main,
)

from test_helpers import remove, write

POWER = {"family": "power", "params": {"p": 2}}
CONSTANT = {"family": "constant", "params": {"w0": 0.3}}
SMALL = {"h_grid": [0.25, 0.125, 0.0625]}
FEW_SAMPLES = {"n_per_cell": 1000, "samples_per_r": 16}


def run(command, config, out, *extra):
    write(json.dumps(config), "tmp.txt")
    try:
        return main([command, "--config", "tmp.txt", "--out", str(out),
                     "-q", *extra])
    finally:
        remove("tmp.txt")


def read_manifest(out):
    with open(Path(out) / "manifest.json") as file:
        return json.load(file)


class ConfigTest(unittest.TestCase):
    def test_analysis_defaults(self):
        config = AnalysisConfig.model_validate({"orlicz": POWER, "seed": 0})
        self.assertEqual(config.space.kind, "hardy")
        self.assertIsNone(config.space.alpha)
        self.assertEqual(config.samples.n_per_cell, 2 ** 14)
        self.assertEqual(config.orlicz.build(), mod.Power(2))

    def test_rejections(self):
        bad = (
            {"orlicz": POWER},
            {"orlicz": POWER, "seed": -1},
            {"orlicz": {"family": "power", "params": {}}, "seed": 0},
            {"orlicz": POWER, "seed": 0, "colour": "red"},
            {"orlicz": POWER, "seed": 0,
             "space": {"kind": "bergman"}},
            {"orlicz": POWER, "seed": 0,
             "space": {"kind": "hardy", "alpha": 1.0}},
            {"orlicz": POWER, "seed": 0, "grids": {"h_grid": [0.5, 1.0]}},
            {"orlicz": POWER, "seed": 0, "grids": {"r_grid": [0.9, 0.5]}},
            {"orlicz": POWER, "seed": 0, "samples": {"n_per_cell": 10}},
            {"orlicz": POWER, "seed": 0,
             "symbol": {"family": "dilation", "params": {"r": 0.5, "N": 2}}},
        )
        for data in bad:
            with self.assertRaises(ValueError, msg=data):
                AnalysisConfig.model_validate(data)

    def test_majorant_config(self):
        config = MajorantConfig.model_validate(
            {"f": {"kind": "power"}, "g": {"kind": "power", "q": 2}}
        )
        self.assertEqual(config.n_max, 40)
        self.assertEqual(config.seed, 0)
        self.assertEqual(config.g.build().evaluate(3.0), 9.0)
        with self.assertRaises(ValueError):
            MajorantConfig.model_validate(
                {"f": {"kind": "power"}, "g": {"kind": "power"}, "n_max": 2}
            )


class CommandTest(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.out = Path(self.directory.name) / "run"

    def tearDown(self):
        self.directory.cleanup()

    def test_certify(self):
        code = run("certify", {"orlicz": POWER, "seed": 0}, self.out)
        self.assertEqual(code, 0)
        with open(self.out / "certificates.json") as file:
            certificates = json.load(file)
        self.assertEqual(len(certificates), 5)
        manifest = read_manifest(self.out)
        self.assertEqual(manifest["command"], "certify")
        self.assertEqual(manifest["exit_code"], 0)
        self.assertEqual(manifest["version"], mod.__version__)
        self.assertEqual([entry["path"] for entry in manifest["files"]],
                         ["certificates.json", "implications.csv",
                          "invariants.csv"])
        for entry in manifest["files"]:
            self.assertEqual(entry["bytes"],
                             os.path.getsize(self.out / entry["path"]))

    def test_invalid_configuration(self):
        config = {"orlicz": {"family": "cubic"}, "seed": 0}
        self.assertEqual(run("certify", config, self.out), EXIT_CONFIG)
        self.assertFalse(self.out.exists())
        config = {"orlicz": POWER, "seed": 0}
        self.assertEqual(run("profile", config, self.out), EXIT_CONFIG)
        self.assertEqual(run("certify", config, self.out, "--threads", "0"),
                         EXIT_CONFIG)

    def test_profile_seed_override(self):
        config = {"orlicz": POWER, "symbol": CONSTANT, "seed": 1,
                  "space": {"kind": "bergman", "alpha": 0.0},
                  "grids": SMALL, "samples": FEW_SAMPLES}
        self.assertEqual(run("profile", config, self.out, "--seed", "7"), 0)
        with open(self.out / "profile.json") as file:
            profile = json.load(file)
        self.assertEqual(profile["seed"], 7)
        self.assertEqual([record["h"] for record in profile["records"]],
                         [0.25, 0.125, 0.0625])
        self.assertEqual(read_manifest(self.out)["config"]["seed"], 7)

    def test_self_map_violation(self):
        violation = mod.SelfMapViolation("lens", np.array([0.5]),
                                         np.array([1.0]))
        config = {"orlicz": POWER, "symbol": CONSTANT, "seed": 0,
                  "space": {"kind": "bergman", "alpha": 0.0}}
        with mock.patch("orlicz_lab.cli_report.build_profile",
                        side_effect=violation):
            code = run("profile", config, self.out)
        self.assertEqual(code, EXIT_SELF_MAP)

    def test_analyze(self):
        config = {"orlicz": POWER, "symbol": CONSTANT, "seed": 3,
                  "space": {"kind": "bergman", "alpha": 0.0},
                  "grids": SMALL, "samples": FEW_SAMPLES}
        self.assertEqual(run("analyze", config, self.out), 0)
        with open(self.out / "summary.json") as file:
            summary = json.load(file)
        self.assertEqual(summary["verdicts"]["HInftyCompact"], "Pass")
        self.assertEqual(summary["exit_code"], 0)
        manifest = read_manifest(self.out)
        listed = {entry["path"] for entry in manifest["files"]}
        self.assertIn("reports/HInftyCompact.csv", listed)
        self.assertIn("reports/BoundaryRatioAlpha.json", listed)
        self.assertIn("consistency.csv", listed)
        for name in listed:
            self.assertTrue((self.out / name).is_file(), name)

        again = Path(self.directory.name) / "again"
        self.assertEqual(run("analyze", config, again, "--threads", "2"), 0)
        for name in ("profile.csv", "consistency.csv", "summary.json",
                     "reports/BoundaryRatioAlpha.csv"):
            self.assertEqual((self.out / name).read_bytes(),
                             (again / name).read_bytes(), name)

    def test_majorant(self):
        config = {"f": {"kind": "power"}, "g": {"kind": "power", "q": 2},
                  "n_max": 5}
        self.assertEqual(run("majorant", config, self.out), 0)
        lines = (self.out / "breakpoints.csv").read_text().splitlines()
        self.assertEqual(lines, ["n,a_n", "0,0.0", "1,1.0", "2,2.0", "3,4.0",
                                 "4,16.0", "5,256.0"])
        with open(self.out / "psi.json") as file:
            psi = mod.orlicz_from_spec(json.load(file))
        self.assertAlmostEqual(psi.evaluate(1.0), 1.0)
        manifest = read_manifest(self.out)
        self.assertFalse(manifest["exhausted"])
        self.assertEqual(manifest["last_n"], 5)

    def test_majorant_exhausted(self):
        config = {"f": {"kind": "power", "x_max": 10},
                  "g": {"kind": "power", "q": 2}, "n_max": 10}
        self.assertEqual(run("majorant", config, self.out), EXIT_EXHAUSTED)
        manifest = read_manifest(self.out)
        self.assertTrue(manifest["exhausted"])
        self.assertEqual(manifest["last_n"], 4)
        self.assertEqual(manifest["exit_code"], EXIT_EXHAUSTED)

        strict = Path(self.directory.name) / "strict"
        config["strict"] = True
        self.assertEqual(run("majorant", config, strict), EXIT_EXHAUSTED)
        self.assertFalse((strict / "manifest.json").exists())

    def test_majorant_too_short(self):
        config = {"f": {"kind": "power"}, "g": {"kind": "power"},
                  "n_max": 2}
        self.assertEqual(run("majorant", config, self.out), EXIT_CONFIG)


if __name__ == "__main__":
    unittest.main()
