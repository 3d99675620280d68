#!/usr/bin/env python3
"""
Block-factor site processes

Each vertex y carries an independent Bernoulli(s) bit; site x is a fixed rule
of the bits on its radius-r ball. Sites farther than 2r apart read disjoint
bits, so the process is 2r-dependent.
"""

from fractions import Fraction
from math import comb
from typing import List, Optional

from ..domination import SiteLaw, toFraction
from ..graph_core import bfsDistances
from ..interfaces import IAdversaryFamily, ISiteProcess

MINIMUM = "minimum"
MAJORITY = "majority"
RULES = (MINIMUM, MAJORITY)

BIT_GRID = 1 << 16


def ruleThreshold(rule: str, size: int) -> int:
    """Number of open bits needed among size bits"""
    if rule == MINIMUM:
        return size
    if rule == MAJORITY:
        return size // 2 + 1
    raise ValueError(f"unknown block rule {rule!r}")


def tailProbability(s: Fraction, size: int, threshold: int) -> Fraction:
    """P(Binomial(size, s) >= threshold)"""
    return sum(
        (comb(size, c) * s**c * (1 - s) ** (size - c) for c in range(threshold, size + 1)),
        Fraction(0),
    )


def bitProbabilityFor(level: Fraction, rule: str, sizes: List[int]) -> Fraction:
    """Smallest s on the 1/2^16 grid giving every site marginal >= level"""
    def enough(num: int) -> bool:
        s = Fraction(num, BIT_GRID)
        return all(tailProbability(s, m, ruleThreshold(rule, m)) >= level for m in sizes)

    lo, hi = 0, BIT_GRID
    if enough(lo):
        return Fraction(0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if enough(mid):
            hi = mid
        else:
            lo = mid
    return Fraction(hi, BIT_GRID)


class BlockFactorProcess(ISiteProcess):
    """Site x open iff rule(bits on B_r(x)) holds"""

    def __init__(self, radius: int, rule: str = MINIMUM, level=None, bitProbability=None):
        if rule not in RULES:
            raise ValueError(f"unknown block rule {rule!r}")
        if (level is None) == (bitProbability is None):
            raise ValueError("give exactly one of level and bitProbability")
        self.radius = radius
        self.rule = rule
        self.level: Optional[Fraction] = None if level is None else toFraction(level)
        self.bitProbability: Optional[Fraction] = (
            None if bitProbability is None else toFraction(bitProbability)
        )
        target = f"level={self.level}" if self.level is not None else f"s={self.bitProbability}"
        self.name = f"block-{rule}(r={radius}, {target})"

    def neighborhoods(self, graph) -> List[int]:
        masks = []
        for x in range(graph.numVertices()):
            masks.append(sum(1 << y for y in bfsDistances(graph, x, limit=self.radius)))
        return masks

    def exactLaw(self, graph) -> SiteLaw:
        n = graph.numVertices()
        blocks = self.neighborhoods(graph)
        sizes = [bin(block).count("1") for block in blocks]
        thresholds = [ruleThreshold(self.rule, m) for m in sizes]
        s = self.bitProbability
        if s is None:
            s = bitProbabilityFor(self.level, self.rule, sorted(set(sizes)))

        openPowers = [s**k for k in range(n + 1)]
        closedPowers = [(1 - s) ** k for k in range(n + 1)]
        prob = [Fraction(0)] * (1 << n)
        for bits in range(1 << n):
            ones = bin(bits).count("1")
            weight = openPowers[ones] * closedPowers[n - ones]
            if not weight:
                continue
            site = 0
            for x in range(n):
                if bin(bits & blocks[x]).count("1") >= thresholds[x]:
                    site |= 1 << x
            prob[site] += weight
        return SiteLaw(graph, prob)

    def dependencyRange(self) -> int:
        return 2 * self.radius


class BlockFactorFamily(IAdversaryFamily):
    def __init__(self, radius: int, rule: str = MINIMUM):
        self.radius = radius
        self.rule = rule
        self.name = f"block-{rule}(r={radius})"

    def instance(self, level) -> BlockFactorProcess:
        return BlockFactorProcess(self.radius, self.rule, level=level)
