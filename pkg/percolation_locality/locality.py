#!/usr/bin/env python3
"""
Rooted-ball isomorphism, local-convergence radius and polynomial-growth fits
"""

import logging
import math
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional

import numpy as np

from .errors import NonPolynomialGrowthError, ResourceLimitError
from .graph_core import FiniteGraph, ball
from .interfaces import IGraphOracle

logger = logging.getLogger(__name__)

ISOMORPHISM_SIZE_GUARD = 100_000


class LocalityRow(NamedTuple):
    k: int
    ballSizeG: int
    ballSizeH: int
    isomorphic: bool


class LocalityRadius(NamedTuple):
    """R(G, H) capped at rMax; saturated means every tested radius matched"""

    radius: int
    saturated: bool
    rows: List[LocalityRow]

    def display(self) -> str:
        return f">= {self.radius}" if self.saturated else str(self.radius)


class GrowthEstimate(NamedTuple):
    d: int
    c: Fraction
    rMax: int
    sizes: List[int]


# -- rooted isomorphism -------------------------------------------------------


def _rootDistances(graph: FiniteGraph) -> List[int]:
    if graph.root is None or graph.distFromRoot is None:
        raise ValueError(f"{graph.label} is not rooted with distances")
    return graph.distFromRoot.tolist()


def _refineColors(graphs: List[FiniteGraph]) -> List[List[int]]:
    """Joint colour refinement started from (distance to root, degree)"""
    palette: Dict[tuple, int] = {}
    colors = []
    for graph in graphs:
        dist = _rootDistances(graph)
        colors.append(
            [palette.setdefault((dist[i], graph.degree(i)), len(palette)) for i in range(graph.numVertices())]
        )
    classCount = len(palette)
    while True:
        palette = {}
        refined = []
        for graph, current in zip(graphs, colors):
            refined.append(
                [
                    palette.setdefault(
                        (current[i], tuple(sorted(current[j] for j in graph.adjacency[i]))),
                        len(palette),
                    )
                    for i in range(graph.numVertices())
                ]
            )
        colors = refined
        if len(palette) == classCount:
            return colors
        classCount = len(palette)


def findRootedIsomorphism(b1: FiniteGraph, b2: FiniteGraph) -> Optional[Dict[int, int]]:
    """Root-preserving isomorphism as an index map b1 -> b2, or None

    Exact search: colour refinement prunes candidates, then vertices of b1 are
    placed in order of distance to the root, each next to the image of an
    already placed neighbour.
    """
    n = b1.numVertices()
    if max(n, b2.numVertices()) > ISOMORPHISM_SIZE_GUARD:
        raise ResourceLimitError(
            f"isomorphism search on {max(n, b2.numVertices())} vertices exceeds guard"
        )
    if n != b2.numVertices() or b1.numEdges() != b2.numEdges():
        return None

    c1, c2 = _refineColors([b1, b2])
    if sorted(c1) != sorted(c2):
        return None
    root1, root2 = b1.rootIndex(), b2.rootIndex()
    if c1[root1] != c2[root2]:
        return None

    dist1 = _rootDistances(b1)
    order = sorted(range(n), key=lambda i: (dist1[i], i))
    anchor = {}
    position = {v: k for k, v in enumerate(order)}
    for x in order[1:]:
        anchor[x] = min((w for w in b1.adjacency[x] if position[w] < position[x]), key=position.get)

    adjacency2 = [set(nbrs) for nbrs in b2.adjacency]
    mapping: Dict[int, int] = {root1: root2}
    used = {root2}

    def candidates(x: int) -> List[int]:
        placedNbrs = [mapping[w] for w in b1.adjacency[x] if w in mapping]
        result = []
        for y in b2.adjacency[mapping[anchor[x]]]:
            if y in used or c2[y] != c1[x]:
                continue
            if any(z not in adjacency2[y] for z in placedNbrs):
                continue
            if sum(1 for z in b2.adjacency[y] if z in used) != len(placedNbrs):
                continue
            result.append(y)
        return result

    stack = []
    depth = 1
    if n > 1:
        stack.append(iter(candidates(order[1])))
    while stack:
        x = order[depth]
        if x in mapping:
            used.discard(mapping.pop(x))
        choice = next(stack[-1], None)
        if choice is None:
            stack.pop()
            depth -= 1
            continue
        mapping[x] = choice
        used.add(choice)
        if depth + 1 == n:
            return dict(mapping)
        depth += 1
        stack.append(iter(candidates(order[depth])))
    return mapping if n == 1 else None


def rootedBallIsomorphic(b1: FiniteGraph, b2: FiniteGraph) -> bool:
    return findRootedIsomorphism(b1, b2) is not None


def isIsomorphismCertificate(b1: FiniteGraph, b2: FiniteGraph, mapping: Dict[int, int]) -> bool:
    """Audit a certificate: root to root, bijective and edge preserving"""
    if len(mapping) != b1.numVertices() or set(mapping.values()) != set(range(b2.numVertices())):
        return False
    if mapping.get(b1.rootIndex()) != b2.rootIndex():
        return False
    if b1.numEdges() != b2.numEdges():
        return False
    return all(b2.hasEdge(mapping[i], mapping[j]) for i, j in b1.edges())


# -- locality radius ----------------------------------------------------------


def _rootBall(oracle: IGraphOracle, r: int) -> FiniteGraph:
    getBall = getattr(oracle, "getBall", None)
    if getBall is not None:
        return getBall(r)
    return ball(oracle, oracle.getRoot(), r)


def localityRadius(G: IGraphOracle, H: IGraphOracle, rMax: int) -> LocalityRadius:
    """Largest k <= rMax with B_G(k) isomorphic to B_H(k)"""
    if rMax < 0:
        raise ValueError("rMax must be nonnegative")
    ballG = _rootBall(G, rMax)
    ballH = _rootBall(H, rMax)
    rows = []
    for k in range(rMax + 1):
        prefixG, prefixH = ballG.ballPrefix(k), ballH.ballPrefix(k)
        same = rootedBallIsomorphic(prefixG, prefixH)
        rows.append(LocalityRow(k, prefixG.numVertices(), prefixH.numVertices(), same))
        if not same:
            logger.info("R(%s, %s) = %d", G.label, H.label, k - 1)
            return LocalityRadius(k - 1, False, rows)
    logger.info("R(%s, %s) >= %d", G.label, H.label, rMax)
    return LocalityRadius(rMax, True, rows)


# -- growth -------------------------------------------------------------------


def ballSizes(oracle: IGraphOracle, rMax: int) -> List[int]:
    """|B_r| for r = 0..rMax from one ball census"""
    dist = _rootBall(oracle, rMax).distFromRoot
    return np.searchsorted(dist, np.arange(rMax + 1), side="right").tolist()


def _slope(radii: np.ndarray, sizes: np.ndarray) -> float:
    return float(np.polyfit(np.log(radii), np.log(sizes), 1)[0])


def growthFit(G: IGraphOracle, rMax: int) -> GrowthEstimate:
    """Integer exponent from the log-log slope on [rMax/2, rMax], then the least c on a 1/100 grid"""
    if rMax < 4:
        raise ValueError("growth fit needs rMax >= 4")
    sizes = ballSizes(G, rMax)
    lo = max(1, rMax // 2)
    mid = (lo + rMax) // 2
    radii = np.arange(lo, rMax + 1)
    counts = np.asarray(sizes[lo:], dtype=np.float64)

    slope = _slope(radii, counts)
    lowerSlope = _slope(np.arange(lo, mid + 1), np.asarray(sizes[lo : mid + 1], dtype=np.float64))
    upperSlope = _slope(np.arange(mid, rMax + 1), np.asarray(sizes[mid:], dtype=np.float64))
    if abs(upperSlope - lowerSlope) > 0.5:
        raise NonPolynomialGrowthError(
            f"{G.label}: slope drifts from {lowerSlope:.2f} to {upperSlope:.2f}"
        )
    d = max(1, int(round(slope)))

    worst = Fraction(1)
    for r in range(1, rMax + 1):
        ratio = Fraction(sizes[r], r**d)
        worst = max(worst, ratio, 1 / ratio)
    c = Fraction(math.ceil(worst * 100), 100)
    logger.debug("%s: slope %.3f -> d=%d, c=%s", G.label, slope, d, c)
    return GrowthEstimate(d, c, rMax, sizes)


def checkGrowthEstimate(G: IGraphOracle, estimate: GrowthEstimate) -> bool:
    """Re-validate (1/c) r^d <= |B_r| <= c r^d with one fresh ball per radius"""
    c, d = estimate.c, estimate.d
    root = G.getRoot()
    for r in range(1, estimate.rMax + 1):
        size = ball(G, root, r).numVertices()
        volume = r**d
        if volume * c.denominator > c.numerator * size:
            return False
        if size * c.denominator > c.numerator * volume:
            return False
    return True


def degreeBound(c, C: int, d: int) -> int:
    """Net-graph degree bound D = c^2 (12C + 3)^d"""
    return math.ceil(Fraction(c) ** 2 * (12 * C + 3) ** d)
