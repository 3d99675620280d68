#!/usr/bin/env python3
"""
Tests for exact laws, dependency certificates and stochastic domination
"""

import unittest
from fractions import Fraction

from percolation_locality.catalog import GraphCatalog
from percolation_locality.domination import (
    SiteLaw,
    certifiedRange,
    certifyDependency,
    dominatesExact,
    dominationCoupling,
    estimateQThreshold,
    exactLaw,
    graphPower,
    increasingEventCriterion,
    isIncreasing,
    reductionCheck,
    upSets,
    verifyCoupling,
    worstIncreasingEvent,
)
from percolation_locality.errors import CertificationError, ResourceLimitError, VertexSetMismatchError
from percolation_locality.processes import (
    BlockFactorProcess,
    FullyCorrelatedFamily,
    FullyCorrelatedProcess,
    ProductFamily,
    ProductProcess,
    defaultAdversaries,
)

catalog = GraphCatalog()


def fixture(name):
    return catalog.getSmallGraph(name)


class HalfOpenFamily(ProductFamily):
    name = "half-open"

    def instance(self, level):
        return ProductProcess(Fraction(1, 2))


class TestGraphPower(unittest.TestCase):
    def testPathSquaredIsTriangle(self):
        """Test P_3 squared is K_3"""
        powered = graphPower(fixture("path-3"), 2)
        self.assertEqual(powered.numEdges(), 3)

    def testFirstPower(self):
        """Test H^(1) = H"""
        cycle = fixture("cycle-6")
        self.assertEqual(sorted(graphPower(cycle, 1).edges()), sorted(cycle.edges()))

    def testCycleSquared(self):
        """Test C_6 squared is 4-regular"""
        powered = graphPower(fixture("cycle-6"), 2)
        self.assertEqual({powered.degree(i) for i in range(6)}, {4})

    def testBadPower(self):
        """Test k >= 1"""
        with self.assertRaises(ValueError):
            graphPower(fixture("path-3"), 0)


class TestSiteLaw(unittest.TestCase):
    def testProductHalfIsUniform(self):
        """Test product(1/2) on two vertices is uniform"""
        law = exactLaw(ProductProcess(Fraction(1, 2)), fixture("path-2"))
        self.assertEqual(law.prob, [Fraction(1, 4)] * 4)
        self.assertTrue(law.exact)

    def testFullyCorrelatedPair(self):
        """Test the correlated pair puts 0.9 on both-open and 0.1 on both-closed"""
        law = exactLaw(FullyCorrelatedProcess(0.9), fixture("path-2"))
        self.assertEqual(law.prob, [Fraction(1, 10), 0, 0, Fraction(9, 10)])
        self.assertEqual(law.marginals(), [Fraction(9, 10)] * 2)

    def testValidation(self):
        """Test bad tables are rejected"""
        graph = fixture("path-2")
        with self.assertRaises(ValueError):
            SiteLaw(graph, [Fraction(1, 2)] * 2)
        with self.assertRaises(ValueError):
            SiteLaw(graph, [Fraction(1, 2)] * 4)
        with self.assertRaises(ValueError):
            SiteLaw(graph, [Fraction(-1, 2), Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)])

    def testFloatTolerance(self):
        """Test float laws are accepted within 1e-12 of total mass 1"""
        law = SiteLaw(fixture("path-1"), [0.3, 0.7 + 1e-13])
        self.assertFalse(law.exact)

    def testSizeGuard(self):
        """Test exact laws stop at 20 vertices"""
        with self.assertRaises(ResourceLimitError):
            exactLaw(ProductProcess(0.5), fixture("path-21"))

    def testRecord(self):
        """Test the sparse record keeps exact masses"""
        graph = fixture("path-2")
        law = exactLaw(FullyCorrelatedProcess(Fraction(3, 5)), graph)
        self.assertEqual(law.toRecord(), (2, [(0, 2, 5), (3, 3, 5)]))
        self.assertEqual(SiteLaw.fromRecord(graph, law.toRecord()).prob, law.prob)
        with self.assertRaises(VertexSetMismatchError):
            SiteLaw.fromRecord(fixture("path-3"), law.toRecord())


class TestDependency(unittest.TestCase):
    def testProductIsZeroDependent(self):
        """Test product laws certify at k = 0"""
        law = exactLaw(ProductProcess(0.3), fixture("path-4"))
        self.assertTrue(certifyDependency(law, 0).verified)
        self.assertEqual(certifiedRange(law), 0)

    def testBlockFactorOnPath(self):
        """Test a radius-1 block factor on P_4 is 2-dependent but not 1-dependent"""
        law = exactLaw(BlockFactorProcess(1, bitProbability=Fraction(1, 2)), fixture("path-4"))
        self.assertTrue(certifyDependency(law, 2).verified)
        failed = certifyDependency(law, 1)
        self.assertFalse(failed.verified)
        self.assertIsNotNone(failed.witness)
        self.assertEqual(certifiedRange(law), 2)

    def testGraphPowerReduction(self):
        """Test a 2-dependent law is 1-dependent on the squared graph"""
        law = exactLaw(BlockFactorProcess(1, bitProbability=Fraction(1, 3)), fixture("path-5"))
        self.assertTrue(reductionCheck(law, 2))

    def testCorrelatedOnlyVacuous(self):
        """Test the correlated pair is 1-dependent on an edge but not 0-dependent"""
        law = exactLaw(FullyCorrelatedProcess(0.9), fixture("path-2"))
        self.assertTrue(certifyDependency(law, 1).verified)
        self.assertFalse(certifyDependency(law, 0).verified)


class TestDomination(unittest.TestCase):
    def setUp(self):
        self.edge = fixture("path-2")
        self.reference = exactLaw(ProductProcess(0.75), self.edge)

    def testHigherProductDominates(self):
        """Test product(0.8) dominates product(0.75)"""
        self.assertTrue(dominatesExact(exactLaw(ProductProcess(0.8), self.edge), self.reference))

    def testLowerProductFails(self):
        """Test product(0.7) does not dominate product(0.75)"""
        self.assertFalse(dominatesExact(exactLaw(ProductProcess(0.7), self.edge), self.reference))

    def testCorrelatedPairFails(self):
        """Test the correlated pair fails on the event 'some site open' with gap 3/80"""
        law = exactLaw(FullyCorrelatedProcess(0.9), self.edge)
        self.assertFalse(dominatesExact(law, self.reference))
        witness = worstIncreasingEvent(law, self.reference)
        self.assertEqual(witness.event, frozenset({1, 2, 3}))
        self.assertEqual(witness.gap, Fraction(3, 80))
        self.assertTrue(witness.exhaustive)
        self.assertAlmostEqual(float(witness.gap), 0.0375)

    def testCouplingWitness(self):
        """Test the flow yields a valid monotone coupling"""
        law = exactLaw(ProductProcess(0.8), fixture("path-3"))
        reference = exactLaw(ProductProcess(0.75), fixture("path-3"))
        coupling = dominationCoupling(law, reference)
        self.assertIsNotNone(coupling)
        self.assertTrue(verifyCoupling(coupling, law, reference))
        self.assertIsNone(dominationCoupling(reference, law))

    def testCriterionAgreesWithFlow(self):
        """Test the up-set criterion agrees with the flow on small instances"""
        for p in (0.6, 0.75, 0.9):
            for name in ("path-3", "star-4", "cycle-5"):
                with self.subTest(p=p, graph=name):
                    law = exactLaw(ProductProcess(p), fixture(name))
                    reference = exactLaw(ProductProcess(0.75), fixture(name))
                    self.assertEqual(increasingEventCriterion(law, reference), dominatesExact(law, reference))

    def testMinCutWitness(self):
        """Test above five vertices the witness comes from a minimum cut"""
        graph = fixture("path-6")
        law = exactLaw(FullyCorrelatedProcess(0.9), graph)
        witness = worstIncreasingEvent(law, exactLaw(ProductProcess(0.75), graph))
        self.assertFalse(witness.exhaustive)
        self.assertGreater(witness.gap, 0)
        self.assertTrue(isIncreasing(witness.event, 6))

    def testFloatLaws(self):
        """Test float laws take the float flow path"""
        law = SiteLaw(self.edge, [0.01, 0.09, 0.09, 0.81])
        reference = SiteLaw(self.edge, [0.0625, 0.1875, 0.1875, 0.5625])
        self.assertTrue(dominatesExact(law, reference))

    def testVertexSetMismatch(self):
        """Test laws on different graphs cannot be compared"""
        other = exactLaw(ProductProcess(0.8), fixture("path-3"))
        with self.assertRaises(VertexSetMismatchError):
            dominatesExact(other, self.reference)


class TestUpSets(unittest.TestCase):
    def testDedekindCounts(self):
        """Test the number of up-sets of {0,1}^n"""
        self.assertEqual([len(upSets(n)) for n in range(4)], [2, 3, 6, 20])

    def testIsIncreasing(self):
        """Test closure under opening a site"""
        self.assertTrue(isIncreasing(frozenset({1, 3}), 2))
        self.assertFalse(isIncreasing(frozenset({1}), 2))


class TestQThreshold(unittest.TestCase):
    def setUp(self):
        self.graphs = [fixture("path-2")]

    def testIndependentAdversaries(self):
        """Test q = 3/4 for product adversaries"""
        result = estimateQThreshold(0, 1, [ProductFamily()], self.graphs, resolution=16)
        self.assertEqual(result.q, Fraction(3, 4))
        self.assertEqual(result.failures[0][2], Fraction(11, 16))

    def testCorrelatedEdge(self):
        """Test the correlated pair on one edge needs q = 15/16"""
        result = estimateQThreshold(1, 1, [FullyCorrelatedFamily()], self.graphs, resolution=16)
        self.assertEqual(result.q, Fraction(15, 16))

    def testLargerClassNeedsLargerQ(self):
        """Test q(k=1) >= q(k=0) for the default adversaries"""
        q0 = estimateQThreshold(0, 4, defaultAdversaries(0, self.graphs), self.graphs, resolution=16).q
        q1 = estimateQThreshold(1, 4, defaultAdversaries(1, self.graphs), self.graphs, resolution=16).q
        self.assertEqual(q0, Fraction(3, 4))
        self.assertGreaterEqual(q1, q0)

    def testDegreeBound(self):
        """Test graphs above degree D are rejected"""
        with self.assertRaises(ValueError):
            estimateQThreshold(0, 1, [ProductFamily()], [fixture("star-4")])

    def testLevelOneFailing(self):
        """Test a family that fails even at level 1 has no threshold"""
        with self.assertRaises(CertificationError):
            estimateQThreshold(0, 1, [HalfOpenFamily()], self.graphs, resolution=16)

    def testEmptyFamily(self):
        """Test an empty adversary class is rejected"""
        with self.assertRaises(ValueError):
            estimateQThreshold(0, 1, [], self.graphs)


if __name__ == "__main__":
    unittest.main()
