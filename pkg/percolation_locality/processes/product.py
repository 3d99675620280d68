#!/usr/bin/env python3
"""
Independent (product) site processes
"""

from ..domination import SiteLaw, toFraction
from ..interfaces import IAdversaryFamily, ISiteProcess


def productMasses(p, n: int):
    """p^|open| (1-p)^|closed| for every configuration mask"""
    q = 1 - p
    openPowers = [p**k for k in range(n + 1)]
    closedPowers = [q**k for k in range(n + 1)]
    return [openPowers[bin(mask).count("1")] * closedPowers[n - bin(mask).count("1")]
            for mask in range(1 << n)]


class ProductProcess(ISiteProcess):
    """Each site open independently with probability p"""

    def __init__(self, p):
        self.p = toFraction(p)
        self.name = f"product({self.p})"

    def exactLaw(self, graph) -> SiteLaw:
        return SiteLaw(graph, productMasses(self.p, graph.numVertices()))

    def dependencyRange(self) -> int:
        return 0


class ProductFamily(IAdversaryFamily):
    name = "product"

    def instance(self, level) -> ProductProcess:
        return ProductProcess(level)
