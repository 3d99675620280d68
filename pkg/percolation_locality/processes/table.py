#!/usr/bin/env python3
"""
Explicit law tables and checkerboard-antagonistic mixtures
"""

from fractions import Fraction
from typing import Dict, List

from ..domination import SiteLaw, toFraction
from ..errors import VertexSetMismatchError
from ..interfaces import IAdversaryFamily, ISiteProcess


class TableProcess(ISiteProcess):
    """Law given as {bitmask: probability} on a fixed number of vertices"""

    def __init__(self, numVertices: int, table: Dict[int, object], name: str = "table", dependency: int = -1):
        self.numVertices = numVertices
        self.table = {int(mask): toFraction(p) for mask, p in table.items()}
        self.name = name
        self._dependency = dependency

    def exactLaw(self, graph) -> SiteLaw:
        if graph.numVertices() != self.numVertices:
            raise VertexSetMismatchError(
                f"table has {self.numVertices} vertices, {graph.label} has {graph.numVertices()}"
            )
        prob = [Fraction(0)] * (1 << self.numVertices)
        for mask, p in self.table.items():
            prob[mask] = p
        return SiteLaw(graph, prob)

    def dependencyRange(self) -> int:
        return self._dependency


def parityClasses(graph) -> List[int]:
    """Bitmasks of the two BFS-parity classes (a proper 2-colouring on bipartite graphs)"""
    colour = [-1] * graph.numVertices()
    for start in range(graph.numVertices()):
        if colour[start] >= 0:
            continue
        colour[start] = 0
        queue = [start]
        for i in queue:
            for j in graph.adjacency[i]:
                if colour[j] < 0:
                    colour[j] = 1 - colour[i]
                    queue.append(j)
    even = sum(1 << i for i, c in enumerate(colour) if c == 0)
    odd = sum(1 << i for i, c in enumerate(colour) if c == 1)
    return [even, odd]


class CheckerboardProcess(ISiteProcess):
    """All open with weight w, otherwise exactly one colour class open; marginals (1 + w)/2"""

    def __init__(self, level):
        self.level = toFraction(level)
        self.weight = max(Fraction(0), 2 * self.level - 1)
        self.name = f"checkerboard({self.level})"

    def exactLaw(self, graph) -> SiteLaw:
        n = graph.numVertices()
        prob = [Fraction(0)] * (1 << n)
        prob[(1 << n) - 1] += self.weight
        for mask in parityClasses(graph):
            prob[mask] += (1 - self.weight) / 2
        return SiteLaw(graph, prob)

    def dependencyRange(self) -> int:
        return -1


class CheckerboardFamily(IAdversaryFamily):
    name = "checkerboard"

    def instance(self, level) -> CheckerboardProcess:
        return CheckerboardProcess(level)
