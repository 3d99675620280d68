#!/usr/bin/env python3
"""
Tests for neighbour-lifting maps and coupled explorations
"""

import unittest
from fractions import Fraction

from percolation_locality.cayley import CayleyOracle, cyclic, freeAbelian, heisenberg, product
from percolation_locality.errors import LiftExtensionError, ResourceLimitError
from percolation_locality.monotonicity import (
    LARGEST,
    checkLiftProperty,
    coordinateLift,
    coupledExploration,
    isConnected,
    marginalLawCheck,
)
from percolation_locality.nets import fiberNet, fiberNetLift, z2LatticeNet


def oracle(rank):
    return CayleyOracle(freeAbelian(rank))


class TestLiftProperty(unittest.TestCase):
    def testPlaneOntoLine(self):
        """Test the first-coordinate projection Z^2 -> Z lifts neighbours"""
        lift = coordinateLift(oracle(2), oracle(1))
        report = checkLiftProperty(lift, oracle(2).getBall(6), oracle(1).getBall(6))
        self.assertTrue(report.liftHolds)
        self.assertTrue(report.surjective)

    def testLineIntoPlaneFails(self):
        """Test Z -> Z^2 cannot lift the vertical neighbours"""
        lift = coordinateLift(oracle(1), oracle(2))
        report = checkLiftProperty(lift, oracle(1).getBall(6), oracle(2).getBall(6))
        self.assertFalse(report.liftHolds)
        self.assertIn(((0,), (0, 1)), report.failures)
        self.assertFalse(report.surjective)

    def testPlaneOntoTorus(self):
        """Test reduction mod 5 lifts neighbours and covers the torus"""
        torus = CayleyOracle(product(cyclic(5), cyclic(5)))
        lift = coordinateLift(oracle(2), torus)
        report = checkLiftProperty(lift, oracle(2).getBall(6), torus.getBall(4))
        self.assertTrue(report.liftHolds)
        self.assertTrue(report.surjective)


class TestCoupledExploration(unittest.TestCase):
    def setUp(self):
        self.lift = coordinateLift(oracle(2), oracle(1))

    def testClosedRoot(self):
        """Test p = 0 closes both roots and stops at the root reveal"""
        result = coupledExploration(self.lift, (0,), (0, 0), 0.0, seed=1, maxSteps=10)
        self.assertTrue(result.terminated)
        self.assertEqual(len(result.trace), 1)
        self.assertEqual(result.trace[0].step, 0)
        self.assertEqual(result.baseState.closedSet, [(0,)])
        self.assertEqual(result.liftedState.closedSet, [(0, 0)])

    def testStepCap(self):
        """Test an infinite open cluster is cut at max_steps reveals"""
        result = coupledExploration(self.lift, (0,), (0, 0), 1.0, seed=1, maxSteps=100)
        self.assertFalse(result.terminated)
        self.assertEqual(len(result.baseState.openSet), 100)
        self.assertEqual(len(set(result.liftedState.openSet)), 100)
        self.assertTrue(isConnected(oracle(2), result.liftedState.openSet))

    def testSizesMatchEveryStep(self):
        """Test base and lifted counts agree at every step of Z^3 -> Z^2"""
        lift = coordinateLift(oracle(3), oracle(2))
        for rule in ("smallest", LARGEST):
            with self.subTest(rule=rule):
                result = coupledExploration(lift, (0, 0), (0, 0, 0), 0.4, seed=5, maxSteps=200, rule=rule)
                self.assertTrue(all(row.sizesEqual for row in result.trace))
                self.assertTrue(isConnected(oracle(3), result.liftedState.openSet))
                projected = sorted(tuple(lift.pi(v)) for v in result.liftedState.openSet)
                self.assertEqual(projected, sorted(result.baseState.openSet))

    def testSizesMatchOverManySeeds(self):
        """Test Z^3 -> Z^2 explorations keep equal sizes and matching projections over 1000 seeds"""
        lift = coordinateLift(oracle(3), oracle(2))
        lifted = oracle(3)
        for seed in range(1000):
            rule = LARGEST if seed % 2 else "smallest"
            result = coupledExploration(lift, (0, 0), (0, 0, 0), 0.4, seed=seed, maxSteps=100, rule=rule)
            self.assertTrue(all(row.sizesEqual for row in result.trace), msg=f"seed {seed}")
            self.assertEqual(len(set(result.liftedState.openSet)), len(result.liftedState.openSet))
            self.assertTrue(isConnected(lifted, result.liftedState.openSet), msg=f"seed {seed}")
            projected = sorted(tuple(lift.pi(v)) for v in result.liftedState.openSet)
            self.assertEqual(projected, sorted(result.baseState.openSet), msg=f"seed {seed}")

    def testFiniteTargetTerminates(self):
        """Test the torus exploration at p = 1 opens all 25 vertices and stops"""
        torus = CayleyOracle(product(cyclic(5), cyclic(5)))
        result = coupledExploration(coordinateLift(oracle(2), torus), (0, 0), (0, 0), 1.0, seed=2, maxSteps=30)
        self.assertTrue(result.terminated)
        self.assertEqual(len(result.baseState.openSet), 25)
        self.assertEqual(len(set(result.liftedState.openSet)), 25)

    def testRootsMustCorrespond(self):
        """Test pi(lifted root) must be the base root"""
        with self.assertRaises(LiftExtensionError):
            coupledExploration(self.lift, (1,), (0, 0), 0.5, seed=0, maxSteps=5)

    def testUnknownRule(self):
        """Test frontier rules are validated"""
        with self.assertRaises(ValueError):
            coupledExploration(self.lift, (0,), (0, 0), 0.5, seed=0, maxSteps=5, rule="random")

    def testSeedReproducible(self):
        """Test the same seed gives the same trace"""
        first = coupledExploration(self.lift, (0,), (0, 0), 0.5, seed=3, maxSteps=40)
        second = coupledExploration(self.lift, (0,), (0, 0), 0.5, seed=3, maxSteps=40)
        self.assertEqual(first.trace, second.trace)


class TestMarginalLaw(unittest.TestCase):
    def testPlaneOverLine(self):
        """Test both explorations reveal Bernoulli(1/2) histories"""
        report = marginalLawCheck(coordinateLift(oracle(2), oracle(1)), Fraction(1, 2), 6)
        self.assertTrue(report.baseLawOk)
        self.assertTrue(report.liftedLawOk)
        self.assertTrue(report.passed())
        self.assertEqual(sum(report.baseSizeLaw.values()), 1)

    def testPlaneOverTorus(self):
        """Test the exact law audit passes for Z^2 over the 5 x 5 torus"""
        torus = CayleyOracle(product(cyclic(5), cyclic(5)))
        report = marginalLawCheck(coordinateLift(oracle(2), torus), Fraction(1, 2), 6)
        self.assertTrue(report.passed())
        self.assertEqual(sum(report.liftedSizeLaw.values()), 1)

    def testClosedLaw(self):
        """Test p = 0 puts all mass on the empty cluster"""
        report = marginalLawCheck(coordinateLift(oracle(2), oracle(1)), 0, 4)
        self.assertEqual(report.baseSizeLaw[0], 1)
        self.assertTrue(all(base == 0 and lifted == 0 for _, base, lifted in report.tails))

    def testHorizonLimit(self):
        """Test horizons outside 1..12 are refused"""
        lift = coordinateLift(oracle(2), oracle(1))
        with self.assertRaises(ResourceLimitError):
            marginalLawCheck(lift, 0.5, 13)
        with self.assertRaises(ResourceLimitError):
            marginalLawCheck(lift, 0.5, 0)


class TestFiberNetLift(unittest.TestCase):
    def testProjectionLandsOnBase(self):
        """Test the fiber projection maps net points to base net points"""
        net = fiberNet(heisenberg(), 1, CayleyOracle(heisenberg()).getBall(6))
        lift = fiberNetLift(net)
        base = set(net.base.pointVertices())
        self.assertTrue(all(tuple(lift.pi(g)) in base for g in net.pointVertices()))

    def testLatticeNetHasNoBase(self):
        """Test nets built without fibers have no projection"""
        with self.assertRaises(ValueError):
            fiberNetLift(z2LatticeNet(None, 2, oracle(2).getBall(8)))


if __name__ == "__main__":
    unittest.main()
