#!/usr/bin/env python3
"""
Tests for the perclocal command line
"""

import io
import json
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from rich.console import Console

from percolation_locality.cli import EXIT_CERTIFICATE, EXIT_CONFIG, EXIT_OK, SUBCOMMANDS, LabRunner, buildParser, main

BALL_TOML = """version = 1
kind = "ball"
seed = 4

[graph]
preset = "z2"

[params]
radius = 2
"""


class TestParser(unittest.TestCase):
    def testSubcommands(self):
        """Test every experiment kind has a subcommand"""
        parser = buildParser()
        for name in SUBCOMMANDS:
            with self.subTest(command=name):
                args = parser.parse_args([name, "--config", "x.toml", "--seed", "3"])
                self.assertEqual((args.command, args.seed), (name, 3))

    def testPlotArguments(self):
        """Test the plot subcommand takes a CSV and an output path"""
        args = buildParser().parse_args(["plot", "en-scan.csv", "--out", "p.svg", "--kind", "scatter"])
        self.assertEqual((args.csv, args.out, args.kind), ("en-scan.csv", "p.svg", "scatter"))

    def testConfigRequired(self):
        """Test run subcommands need --config"""
        with patch("sys.stderr", new_callable=io.StringIO):
            with self.assertRaises(SystemExit):
                buildParser().parse_args(["ball"])


class TestLabRunner(unittest.TestCase):
    def setUp(self):
        self.tempdir = tempfile.TemporaryDirectory()
        self.root = Path(self.tempdir.name)
        self.output = io.StringIO()
        self.runner = LabRunner(console=Console(file=self.output, width=120))

    def tearDown(self):
        self.tempdir.cleanup()

    def writeConfig(self, text, name="ball.toml"):
        path = self.root / name
        path.write_text(text)
        return str(path)

    def testSuccessfulRun(self):
        """Test a ball run exits 0 and writes its manifest"""
        out = self.root / "out"
        status = self.runner.run("ball", self.writeConfig(BALL_TOML), out=str(out))
        self.assertEqual(status, EXIT_OK)
        manifest = json.loads((out / "manifest.json").read_text())
        self.assertEqual(manifest["seeds"], {"seed": 4})
        self.assertIn("ball.csv", manifest["artifacts"])
        self.assertIn("certified", self.output.getvalue())

    def testManifestReplay(self):
        """Test a manifest reproduces the same CSV bytes"""
        first, second = self.root / "first", self.root / "second"
        self.runner.run("ball", self.writeConfig(BALL_TOML), out=str(first))
        self.runner.run("ball", str(first / "manifest.json"), out=str(second))
        self.assertEqual((first / "ball.csv").read_bytes(), (second / "ball.csv").read_bytes())

    def testConfigErrorExitsTwo(self):
        """Test config errors exit 2 and name the field"""
        status = self.runner.run("ball", self.writeConfig(BALL_TOML.replace("radius = 2", "")))
        self.assertEqual(status, EXIT_CONFIG)
        self.assertIn("params.radius", self.output.getvalue())

    def testKindMismatchExitsTwo(self):
        """Test running a ball config as locality exits 2"""
        self.assertEqual(self.runner.run("locality", self.writeConfig(BALL_TOML)), EXIT_CONFIG)

    def testFailedCertificateExitsOne(self):
        """Test a failed certificate exits 1"""
        text = """version = 1
kind = "couple"
seed = 1

[graphs.source]
preset = "z1"

[graphs.target]
preset = "z2"

[params]
p = 0.5
max_steps = 10
"""
        out = self.root / "couple"
        status = self.runner.run("couple", self.writeConfig(text, "couple.toml"), out=str(out))
        self.assertEqual(status, EXIT_CERTIFICATE)
        self.assertEqual(json.loads((out / "manifest.json").read_text())["exitStatus"], EXIT_CERTIFICATE)

    def testPlot(self):
        """Test plotting a run's CSV and rejecting a missing file"""
        out = self.root / "out"
        self.runner.run("ball", self.writeConfig(BALL_TOML), out=str(out))
        self.assertEqual(self.runner.plot(str(out / "ball.csv"), "line", str(self.root / "ball.svg")), EXIT_OK)
        self.assertTrue((self.root / "ball.svg").exists())
        self.assertEqual(self.runner.plot(str(self.root / "none.csv"), "line", str(self.root / "x.svg")), EXIT_CONFIG)


class TestMain(unittest.TestCase):
    @patch("percolation_locality.cli.LabRunner")
    def testExitStatus(self, mockRunner):
        """Test main exits with the runner status"""
        mockRunner.return_value.run.return_value = EXIT_CERTIFICATE
        with self.assertRaises(SystemExit) as context:
            main(["net", "--config", "net.toml", "--threads", "2"])
        self.assertEqual(context.exception.code, EXIT_CERTIFICATE)
        mockRunner.return_value.run.assert_called_once_with("net", "net.toml", None, 2, None)

    @patch("percolation_locality.cli.LabRunner")
    def testInterrupt(self, mockRunner):
        """Test Ctrl-C exits 130"""
        mockRunner.return_value.run.side_effect = KeyboardInterrupt
        with patch("sys.stdout", new_callable=io.StringIO):
            with self.assertRaises(SystemExit) as context:
                main(["ball", "--config", "ball.toml"])
        self.assertEqual(context.exception.code, 130)


if __name__ == "__main__":
    unittest.main()
