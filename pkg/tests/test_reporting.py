#!/usr/bin/env python3
"""
Tests for CSV emission, plots and run manifests
"""

import json
import tempfile
import unittest
from fractions import Fraction
from pathlib import Path

import numpy as np

from percolation_locality.errors import SchemaMismatchError
from percolation_locality.reporting import (
    CSV_SCHEMAS,
    configHash,
    emitCsv,
    emitPlot,
    formatValue,
    readCsv,
    schemaOf,
    writeManifest,
)


class TestFormatValue(unittest.TestCase):
    def testScalars(self):
        """Test reals, booleans and missing values"""
        self.assertEqual(formatValue(0.123456789), "0.123457")
        self.assertEqual(formatValue(Fraction(3, 4)), "0.75")
        self.assertEqual(formatValue(True), "true")
        self.assertEqual(formatValue(np.bool_(False)), "false")
        self.assertEqual(formatValue(np.int64(7)), "7")
        self.assertEqual(formatValue(None), "")

    def testVertexTuples(self):
        """Test vertices print as space-separated coordinates"""
        self.assertEqual(formatValue((1, -2, 0)), "1 -2 0")


class TestEmitCsv(unittest.TestCase):
    def setUp(self):
        self.tempdir = tempfile.TemporaryDirectory()
        self.root = Path(self.tempdir.name)

    def tearDown(self):
        self.tempdir.cleanup()

    def testHeaderOnly(self):
        """Test an empty table still writes the exact header"""
        path = emitCsv([], "ball", self.root / "ball.csv")
        self.assertEqual(path.read_text(), "r,vertices,edges\n")

    def testOneRow(self):
        """Test one row gives two lines"""
        path = emitCsv([{"r": 1, "vertices": 5, "edges": 4}], "ball", self.root / "ball.csv")
        self.assertEqual(path.read_text().splitlines(), ["r,vertices,edges", "1,5,4"])
        header, rows = readCsv(path)
        self.assertEqual(schemaOf(header), "ball")
        self.assertEqual(rows[0]["vertices"], "5")

    def testSchemaMismatch(self):
        """Test rows with missing or extra columns are refused"""
        with self.assertRaises(SchemaMismatchError):
            emitCsv([{"r": 1, "vertices": 5}], "ball", self.root / "ball.csv")
        with self.assertRaises(SchemaMismatchError):
            emitCsv([{"r": 1, "vertices": 5, "edges": 4, "extra": 0}], "ball", self.root / "ball.csv")
        with self.assertRaises(SchemaMismatchError):
            emitCsv([], "histogram", self.root / "x.csv")

    def testPipelineSchema(self):
        """Test the pipeline table carries its certificate column"""
        self.assertEqual(CSV_SCHEMAS["pipeline"][-1], "certificates_ok")


class TestEmitPlot(unittest.TestCase):
    def setUp(self):
        self.tempdir = tempfile.TemporaryDirectory()
        self.root = Path(self.tempdir.name)
        rows = [
            {"graph": "z2", "p": p, "n": n, "samples": 10, "p_hat": p * n / 20, "ci_lo": 0.0, "ci_hi": 1.0, "seed": 1}
            for p in (0.6, 0.7)
            for n in (4, 8)
        ]
        self.csvPath = emitCsv(rows, "en-scan", self.root / "en-scan.csv")

    def tearDown(self):
        self.tempdir.cleanup()

    def testDeterministicSvg(self):
        """Test identical CSVs give identical SVG bytes"""
        first = emitPlot(self.csvPath, "line", self.root / "a.svg")
        second = emitPlot(self.csvPath, "line", self.root / "b.svg")
        self.assertEqual(first.read_bytes(), second.read_bytes())
        self.assertIn(b"<svg", first.read_bytes())

    def testScatterWithExplicitAxes(self):
        """Test explicit axes and scatter plots"""
        out = emitPlot(self.csvPath, "scatter", self.root / "s.svg", x="p", y="p_hat", series="n")
        self.assertTrue(out.exists())

    def testUnknownColumn(self):
        """Test plotting a column the CSV lacks"""
        with self.assertRaises(SchemaMismatchError):
            emitPlot(self.csvPath, "line", self.root / "x.svg", y="q")

    def testUnknownKind(self):
        """Test only line and scatter plots exist"""
        with self.assertRaises(ValueError):
            emitPlot(self.csvPath, "bar", self.root / "x.svg")


class TestManifest(unittest.TestCase):
    def testManifestContents(self):
        """Test the manifest records config, hash, seeds, artifacts and status"""
        config = {"version": 1, "kind": "ball", "seed": 3}
        with tempfile.TemporaryDirectory() as tempdir:
            path = writeManifest(tempdir, config, {"seed": 3}, ["ball.svg", "ball.csv"], 0)
            payload = json.loads(path.read_text())
        self.assertEqual(payload["config"], config)
        self.assertEqual(payload["configHash"], configHash(config))
        self.assertEqual(payload["artifacts"], ["ball.csv", "ball.svg"])
        self.assertEqual(payload["exitStatus"], 0)
        self.assertIn("numpy", payload["versions"])

    def testHashIgnoresKeyOrder(self):
        """Test the config hash is canonical"""
        self.assertEqual(configHash({"a": 1, "b": 2}), configHash({"b": 2, "a": 1}))
        self.assertNotEqual(configHash({"a": 1}), configHash({"a": 2}))


if __name__ == "__main__":
    unittest.main()
