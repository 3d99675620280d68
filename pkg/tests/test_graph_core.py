#!/usr/bin/env python3
"""
Tests for finite graphs, balls, distances and clusters
"""

import os
import unittest
from unittest.mock import patch

import numpy as np

from percolation_locality.cayley import CayleyOracle, freeAbelian, heisenberg
from percolation_locality.errors import ResourceLimitError, UnknownVertexError
from percolation_locality.graph_core import (
    BOND,
    FiniteGraph,
    FiniteGraphOracle,
    ball,
    bfsDistances,
    clusters,
    defaultBallCap,
    distance,
    multiSourceDistances,
)


def pathGraph(n):
    adjacency = [[j for j in (i - 1, i + 1) if 0 <= j < n] for i in range(n)]
    return FiniteGraph([(i,) for i in range(n)], adjacency, root=(0,), label=f"path-{n}")


class TestBall(unittest.TestCase):
    def testLineBall(self):
        """Test B_2 of Z has 5 vertices in BFS order"""
        window = CayleyOracle(freeAbelian(1)).getBall(2)
        self.assertEqual(window.numVertices(), 5)
        self.assertEqual(window.vertices[0], (0,))
        self.assertEqual(window.distFromRoot.tolist(), [0, 1, 1, 2, 2])

    def testSquareLatticeBall(self):
        """Test B_2 of Z^2 has 13 vertices and is induced"""
        window = CayleyOracle(freeAbelian(2)).getBall(2)
        self.assertEqual(window.numVertices(), 13)
        self.assertEqual(window.numEdges(), 16)

    def testHeisenbergBall(self):
        """Test B_2 of the Heisenberg group with S = {a, b}^(+-1) has 17 vertices"""
        self.assertEqual(CayleyOracle(heisenberg()).getBall(2).numVertices(), 17)

    def testRadiusZero(self):
        """Test the 0-ball is the centre alone"""
        window = CayleyOracle(freeAbelian(3)).getBall(0)
        self.assertEqual(window.vertices, [(0, 0, 0)])
        self.assertEqual(window.numEdges(), 0)

    def testNegativeRadius(self):
        """Test negative radii are rejected"""
        with self.assertRaises(ValueError):
            ball(CayleyOracle(freeAbelian(1)), (0,), -1)

    def testVertexCap(self):
        """Test the vertex cap raises ResourceLimitError"""
        with self.assertRaises(ResourceLimitError):
            ball(CayleyOracle(freeAbelian(2)), (0, 0), 4, vertexCap=20)

    def testBallCapFromEnvironment(self):
        """Test PERCLOCAL_BALL_CAP overrides the default cap"""
        with patch.dict(os.environ, {"PERCLOCAL_BALL_CAP": "12"}):
            self.assertEqual(defaultBallCap(), 12)
            with self.assertRaises(ResourceLimitError):
                ball(CayleyOracle(freeAbelian(2)), (0, 0), 2)

    def testBoundaryMask(self):
        """Test only the outer shell lost neighbours to truncation"""
        window = CayleyOracle(freeAbelian(2)).getBall(3)
        boundary = window.boundaryMask()
        np.testing.assert_array_equal(boundary, window.distFromRoot == 3)
        self.assertTrue(window.interiorMask(1)[window.rootIndex()])
        self.assertEqual(window.marginDistances()[window.rootIndex()], 3)

    def testBallPrefix(self):
        """Test the sub-ball of a rooted ball matches a direct ball"""
        oracle = CayleyOracle(freeAbelian(2))
        self.assertEqual(oracle.getBall(4).ballPrefix(2).vertices, oracle.getBall(2).vertices)


class TestDistances(unittest.TestCase):
    def testDiagonalDistance(self):
        """Test d((0,0), (1,1)) = 2 with the standard generators"""
        window = CayleyOracle(freeAbelian(2)).getBall(3)
        self.assertEqual(distance(window, (0, 0), (1, 1)), 2)
        self.assertEqual(distance(window, (1, 1), (1, 1)), 0)

    def testDiagonalGenerator(self):
        """Test adding (1,1) shortens d((0,0), (2,2)) to 2"""
        spec = freeAbelian(2, [(1, 0), (0, 1), (1, 1)])
        window = CayleyOracle(spec).getBall(3)
        self.assertEqual(distance(window, (0, 0), (2, 2)), 2)

    def testUnknownVertex(self):
        """Test vertices outside the window raise UnknownVertexError"""
        window = CayleyOracle(freeAbelian(1)).getBall(1)
        with self.assertRaises(UnknownVertexError):
            distance(window, (0,), (5,))

    def testUnreachable(self):
        """Test distance is None across components"""
        graph = FiniteGraph([(0,), (1,)], [[], []])
        self.assertIsNone(distance(graph, (0,), (1,)))

    def testTruncatedBfs(self):
        """Test bfsDistances stops at the limit"""
        self.assertEqual(bfsDistances(pathGraph(6), 0, limit=2), {0: 0, 1: 1, 2: 2})

    def testMultiSource(self):
        """Test multi-source distances take the nearest source"""
        self.assertEqual(multiSourceDistances(pathGraph(5), [0, 4]).tolist(), [0, 1, 2, 1, 0])


class TestClusters(unittest.TestCase):
    def testClosedMiddle(self):
        """Test a closed middle vertex splits a 3-path into two singletons"""
        self.assertEqual(clusters(pathGraph(3), [True, False, True]), [[0], [2]])

    def testAllOpen(self):
        """Test an all-open path is one cluster"""
        self.assertEqual(clusters(pathGraph(4), lambda v: True), [[0, 1, 2, 3]])

    def testAllClosed(self):
        """Test closed vertices belong to no cluster"""
        self.assertEqual(clusters(pathGraph(3), np.zeros(3, dtype=bool)), [])

    def testBondClusters(self):
        """Test bond mode partitions every vertex"""
        self.assertEqual(clusters(pathGraph(3), [True, False], mode=BOND), [[0, 1], [2]])

    def testMaskLength(self):
        """Test a wrong-length mask is rejected"""
        with self.assertRaises(ValueError):
            clusters(pathGraph(3), [True, True])

    def testUnknownMode(self):
        """Test unknown percolation modes are rejected"""
        with self.assertRaises(ValueError):
            clusters(pathGraph(3), [True] * 3, mode="mixed")


class TestFiniteGraph(unittest.TestCase):
    def testDuplicateVertices(self):
        """Test duplicate vertex keys are rejected"""
        with self.assertRaises(ValueError):
            FiniteGraph([(0,), (0,)], [[], []])

    def testEdgeListFixture(self):
        """Test the edge-list fixture restores vertices, edges and root"""
        window = CayleyOracle(freeAbelian(2)).getBall(2)
        restored = FiniteGraph.fromEdgeList(window.toEdgeList())
        self.assertEqual(restored.vertices, window.vertices)
        self.assertEqual(sorted(restored.edges()), sorted(window.edges()))
        self.assertEqual(restored.root, (0, 0))
        self.assertEqual(restored.distFromRoot.tolist(), window.distFromRoot.tolist())

    def testEdgeListHeader(self):
        """Test fixtures without a header are rejected"""
        with self.assertRaises(ValueError):
            FiniteGraph.fromEdgeList("V 0\nV 1\n")

    def testNetworkxConversion(self):
        """Test networkx graphs convert with the first node as root"""
        graph = FiniteGraph.fromNetworkx(pathGraph(4).toNetworkx())
        self.assertEqual(graph.vertices, [(0,), (1,), (2,), (3,)])
        self.assertEqual(graph.root, (0,))
        self.assertEqual(graph.distFromRoot.tolist(), [0, 1, 2, 3])

    def testOracleOverFiniteGraph(self):
        """Test FiniteGraphOracle exposes neighbours by vertex"""
        oracle = FiniteGraphOracle(pathGraph(3))
        self.assertEqual(oracle.getRoot(), (0,))
        self.assertEqual(oracle.getNeighbors((1,)), [(0,), (2,)])
        self.assertEqual(oracle.getDegree(), 2)


if __name__ == "__main__":
    unittest.main()
