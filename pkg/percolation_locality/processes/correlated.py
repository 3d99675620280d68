#!/usr/bin/env python3
"""
Fully correlated site processes - every site copies one Bernoulli bit
"""

from fractions import Fraction

from ..domination import SiteLaw, toFraction
from ..interfaces import IAdversaryFamily, ISiteProcess


class FullyCorrelatedProcess(ISiteProcess):
    """All sites open with probability p, all closed otherwise"""

    def __init__(self, p):
        self.p = toFraction(p)
        self.name = f"correlated({self.p})"

    def exactLaw(self, graph) -> SiteLaw:
        n = graph.numVertices()
        prob = [Fraction(0)] * (1 << n)
        prob[(1 << n) - 1] += self.p
        prob[0] += 1 - self.p
        return SiteLaw(graph, prob)

    def dependencyRange(self) -> int:
        # Only vacuously dependent, on graphs whose diameter is at most k
        return -1


class FullyCorrelatedFamily(IAdversaryFamily):
    name = "correlated"

    def instance(self, level) -> FullyCorrelatedProcess:
        return FullyCorrelatedProcess(level)
