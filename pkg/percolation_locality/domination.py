#!/usr/bin/env python3
"""
Exact laws of site processes on tiny graphs and stochastic domination

law1 dominates law2 when a coupling puts the law1 configuration above the
law2 configuration coordinatewise. This is decided as a max-flow problem on
the Hasse diagram of {0,1}^V: mass of law2 enters at y, flows upward along
infinite-capacity edges and leaves at x with the mass of law1. The flow
saturates iff the coupling exists, and a minimum cut is an increasing event
witnessing failure.
"""

import logging
from fractions import Fraction
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from networkx.algorithms.flow import edmonds_karp

from .errors import CertificationError, ResourceLimitError, VertexSetMismatchError
from .graph_core import FiniteGraph, bfsDistances

logger = logging.getLogger(__name__)

LAW_SIZE_GUARD = 20
DOMINATION_SIZE_GUARD = 12
EXACT_FLOW_LIMIT = 10
EXHAUSTIVE_EVENT_LIMIT = 5
FLOAT_TOLERANCE = 1e-9
FACTORIZATION_TOLERANCE = 1e-10

Probability = Union[Fraction, float]


def toFraction(value) -> Fraction:
    """Exact value for ints, Fractions and decimal strings; floats go through their repr"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


class SiteLaw:
    """Probability of every configuration of a tiny graph, indexed by bitmask (bit i = vertex i open)"""

    def __init__(self, graph: FiniteGraph, prob: Sequence[Probability]):
        n = graph.numVertices()
        if n > LAW_SIZE_GUARD:
            raise ResourceLimitError(f"site law on {n} vertices exceeds {LAW_SIZE_GUARD}")
        if len(prob) != 1 << n:
            raise ValueError(f"expected {1 << n} probabilities, got {len(prob)}")
        self.graph = graph
        self.prob = list(prob)
        self.exact = all(isinstance(x, (Fraction, int)) for x in self.prob)
        if any(x < 0 for x in self.prob):
            raise ValueError("negative probability")
        total = sum(self.prob)
        if (total != 1) if self.exact else abs(total - 1) > 1e-12:
            raise ValueError(f"probabilities sum to {total}")

    def numVertices(self) -> int:
        return self.graph.numVertices()

    def asFloat(self) -> np.ndarray:
        return np.asarray([float(x) for x in self.prob], dtype=np.float64)

    def marginal(self, vertex: int) -> Probability:
        bit = 1 << vertex
        return sum(x for mask, x in enumerate(self.prob) if mask & bit)

    def marginals(self) -> List[Probability]:
        return [self.marginal(i) for i in range(self.numVertices())]

    def probabilityOf(self, event) -> Probability:
        """Mass of a set of configuration masks"""
        return sum(self.prob[mask] for mask in event)

    def toRecord(self) -> Tuple[int, List[Tuple[int, int, int]]]:
        """(vertex count, [(bitmask, numerator, denominator)]) for nonzero masses"""
        entries = []
        for mask, x in enumerate(self.prob):
            if x:
                f = toFraction(x)
                entries.append((mask, f.numerator, f.denominator))
        return self.numVertices(), entries

    @classmethod
    def fromRecord(cls, graph: FiniteGraph, record) -> "SiteLaw":
        count, entries = record
        if count != graph.numVertices():
            raise VertexSetMismatchError(f"record has {count} vertices, graph has {graph.numVertices()}")
        prob = [Fraction(0)] * (1 << count)
        for mask, num, den in entries:
            prob[mask] = Fraction(num, den)
        return cls(graph, prob)

    def __repr__(self) -> str:
        return f"SiteLaw({self.graph.label!r}, n={self.numVertices()}, exact={self.exact})"


class DependencyCertificate(NamedTuple):
    k: int
    verified: bool
    witness: Optional[Tuple[FrozenSet[int], FrozenSet[int]]] = None


class IncreasingEventWitness(NamedTuple):
    """Up-set maximising law2(A) - law1(A); domination holds iff gap <= 0"""

    event: FrozenSet[int]
    gap: Probability
    exhaustive: bool


class QThreshold(NamedTuple):
    q: Fraction
    k: int
    D: int
    resolution: int
    failures: List[Tuple[str, str, Fraction]]


# -- graph powers ----------------------------------------------------------------


def graphPower(H: FiniteGraph, k: int) -> FiniteGraph:
    """Same vertices, adjacent iff 0 < d_H(x, y) <= k"""
    if k < 1:
        raise ValueError("graph power needs k >= 1")
    adjacency = [
        sorted(j for j in bfsDistances(H, i, limit=k) if j != i) for i in range(H.numVertices())
    ]
    return FiniteGraph(H.vertices, adjacency, root=H.root, label=f"{H.label}^({k})")


def pairDistances(graph: FiniteGraph) -> np.ndarray:
    n = graph.numVertices()
    dist = np.full((n, n), np.inf)
    for i in range(n):
        for j, d in bfsDistances(graph, i).items():
            dist[i, j] = d
    return dist


# -- laws ----------------------------------------------------------------------


def exactLaw(process, graph: FiniteGraph) -> SiteLaw:
    """Exact law of a process (an ISiteProcess) on a graph of at most 20 vertices"""
    if graph.numVertices() > LAW_SIZE_GUARD:
        raise ResourceLimitError(
            f"{graph.label} has {graph.numVertices()} vertices, exact laws stop at {LAW_SIZE_GUARD}"
        )
    return process.exactLaw(graph)


def certifyDependency(law: SiteLaw, k: int, tolerance: float = FACTORIZATION_TOLERANCE) -> DependencyCertificate:
    """k-dependence: X_U independent of X_W whenever every pair across is farther than k

    Checking each U against the set W of all vertices farther than k from U is
    enough, since independence passes to subsets of W.
    """
    n = law.numVertices()
    dist = pairDistances(law.graph)
    prob = law.asFloat()
    masks = np.arange(1 << n)
    for uMask in range(1, 1 << n):
        members = [i for i in range(n) if uMask >> i & 1]
        far = [j for j in range(n) if all(dist[i, j] > k for i in members)]
        if not far:
            continue
        wMask = sum(1 << j for j in far)
        a = masks & uMask
        b = masks & wMask
        _, aIndex = np.unique(a, return_inverse=True)
        _, bIndex = np.unique(b, return_inverse=True)
        joint = np.zeros((aIndex.max() + 1, bIndex.max() + 1))
        np.add.at(joint, (aIndex, bIndex), prob)
        product = np.outer(joint.sum(axis=1), joint.sum(axis=0))
        if np.max(np.abs(joint - product)) > tolerance:
            return DependencyCertificate(k, False, (frozenset(members), frozenset(far)))
    return DependencyCertificate(k, True)


def certifiedRange(law: SiteLaw) -> int:
    """Smallest k with a verified certificate"""
    k = 0
    while not certifyDependency(law, k).verified:
        k += 1
    return k


def reductionCheck(law: SiteLaw, k: int) -> bool:
    """A k-dependent law on H is 1-dependent on H^(k)"""
    powered = SiteLaw(graphPower(law.graph, k), law.prob)
    return certifyDependency(powered, 1).verified


# -- domination ----------------------------------------------------------------


def _checkPair(law1: SiteLaw, law2: SiteLaw) -> int:
    if law1.graph.vertices != law2.graph.vertices:
        raise VertexSetMismatchError("laws live on different vertex sets")
    n = law1.numVertices()
    if n > DOMINATION_SIZE_GUARD:
        raise ResourceLimitError(f"domination check on {n} vertices exceeds {DOMINATION_SIZE_GUARD}")
    return n


def _flowNetwork(law1: SiteLaw, law2: SiteLaw, exact: bool) -> nx.DiGraph:
    n = law1.numVertices()
    convert = toFraction if exact else float
    network = nx.DiGraph()
    network.add_nodes_from(["source", "sink"])
    for mask in range(1 << n):
        if law2.prob[mask]:
            network.add_edge("source", mask, capacity=convert(law2.prob[mask]))
        if law1.prob[mask]:
            network.add_edge(mask, "sink", capacity=convert(law1.prob[mask]))
        for i in range(n):
            if not mask >> i & 1:
                network.add_edge(mask, mask | 1 << i)
    return network


def _useExact(law1: SiteLaw, law2: SiteLaw) -> bool:
    return law1.numVertices() <= EXACT_FLOW_LIMIT and law1.exact and law2.exact


def _maxFlow(law1: SiteLaw, law2: SiteLaw):
    exact = _useExact(law1, law2)
    network = _flowNetwork(law1, law2, exact)
    if exact:
        value, flow = nx.maximum_flow(network, "source", "sink", flow_func=edmonds_karp)
    else:
        value, flow = nx.maximum_flow(network, "source", "sink")
    return exact, network, value, flow


def dominatesExact(law1: SiteLaw, law2: SiteLaw) -> bool:
    """Whether law1 stochastically dominates law2"""
    _checkPair(law1, law2)
    exact, _, value, _ = _maxFlow(law1, law2)
    return value == 1 if exact else value >= 1 - FLOAT_TOLERANCE


def dominationCoupling(law1: SiteLaw, law2: SiteLaw) -> Optional[Dict[Tuple[int, int], Probability]]:
    """Coupling {(x, y): mass} with x above y read off the max flow, None without domination"""
    _checkPair(law1, law2)
    exact, _, value, flow = _maxFlow(law1, law2)
    if (value != 1) if exact else value < 1 - FLOAT_TOLERANCE:
        return None
    residual = {u: {v: f for v, f in targets.items() if f > 0} for u, targets in flow.items()}
    coupling: Dict[Tuple[int, int], Probability] = {}
    threshold = 0 if exact else FLOAT_TOLERANCE * 1e-3
    while True:
        starts = [y for y, f in residual["source"].items() if f > threshold]
        if not starts:
            break
        y = min(starts)
        path = ["source", y]
        node = y
        while residual[node].get("sink", 0) <= threshold:
            onward = [v for v, f in residual[node].items() if f > threshold and v != "sink"]
            if not onward:
                break
            node = min(onward)
            path.append(node)
        if residual[node].get("sink", 0) <= threshold:
            # float residue below tolerance
            residual["source"][y] = 0
            continue
        path.append("sink")
        amount = min(residual[u][v] for u, v in zip(path, path[1:]))
        for u, v in zip(path, path[1:]):
            residual[u][v] -= amount
        key = (node, y)
        coupling[key] = coupling.get(key, 0) + amount
    return coupling


def verifyCoupling(coupling, law1: SiteLaw, law2: SiteLaw, tolerance: float = FLOAT_TOLERANCE) -> bool:
    """Support above the diagonal and marginals law1 (first) and law2 (second)"""
    n = law1.numVertices()
    first = [0] * (1 << n)
    second = [0] * (1 << n)
    for (x, y), mass in coupling.items():
        if x & y != y or mass < 0:
            return False
        first[x] += mass
        second[y] += mass
    exact = law1.exact and law2.exact and all(isinstance(m, Fraction) for m in coupling.values())
    for mask in range(1 << n):
        for observed, expected in ((first[mask], law1.prob[mask]), (second[mask], law2.prob[mask])):
            if exact and observed != expected:
                return False
            if not exact and abs(float(observed) - float(expected)) > tolerance:
                return False
    return True


# -- increasing events -----------------------------------------------------------


def upSets(n: int) -> List[int]:
    """All up-sets of {0,1}^n as bitsets over configuration masks

    An up-set splits by the top coordinate into up-sets A (top bit 0) and
    B (top bit 1) of {0,1}^(n-1) with A inside B.
    """
    if n == 0:
        return [0, 1]
    lower = upSets(n - 1)
    shift = 1 << (n - 1)
    return [a | (b << shift) for b in lower for a in lower if a & b == a]


def _maskMembers(bits: int) -> FrozenSet[int]:
    members = []
    index = 0
    while bits:
        if bits & 1:
            members.append(index)
        bits >>= 1
        index += 1
    return frozenset(members)


def worstIncreasingEvent(law1: SiteLaw, law2: SiteLaw) -> IncreasingEventWitness:
    """Increasing event maximising law2(A) - law1(A)

    Exhaustive over all up-sets up to 5 vertices; above that the source side
    of a minimum cut of the flow network.
    """
    n = _checkPair(law1, law2)
    exact = _useExact(law1, law2)
    diff = [toFraction(b) - toFraction(a) if exact else float(b) - float(a)
            for a, b in zip(law1.prob, law2.prob)]
    if n <= EXHAUSTIVE_EVENT_LIMIT:
        best, bestGap = 0, 0
        for bits in upSets(n):
            gap = sum(diff[mask] for mask in _maskMembers(bits))
            if gap > bestGap:
                best, bestGap = bits, gap
        return IncreasingEventWitness(_maskMembers(best), bestGap, True)

    network = _flowNetwork(law1, law2, exact)
    flowFunc = edmonds_karp if exact else None
    _, (reachable, _) = nx.minimum_cut(network, "source", "sink", flow_func=flowFunc)
    event = frozenset(z for z in reachable if z != "source")
    return IncreasingEventWitness(event, sum(diff[z] for z in event), False)


def increasingEventCriterion(law1: SiteLaw, law2: SiteLaw) -> bool:
    """law1(A) >= law2(A) for every increasing event A (at most 5 vertices)"""
    if law1.numVertices() > EXHAUSTIVE_EVENT_LIMIT:
        raise ResourceLimitError("exhaustive up-set enumeration stops at 5 vertices")
    witness = worstIncreasingEvent(law1, law2)
    return witness.gap <= (0 if _useExact(law1, law2) else FLOAT_TOLERANCE)


def isIncreasing(event: FrozenSet[int], n: int) -> bool:
    return all(mask | 1 << i in event for mask in event for i in range(n))


# -- thresholds -----------------------------------------------------------------


def estimateQThreshold(
    k: int,
    D: int,
    families: Sequence,
    graphs: Sequence[FiniteGraph],
    resolution: int = 128,
    target: Fraction = Fraction(3, 4),
) -> QThreshold:
    """Smallest level j/resolution from which every family instance dominates product(target)

    Levels are scanned downward from 1; the first failing level fixes q as the
    next level up.
    """
    from .processes import ProductProcess

    if not families:
        raise ValueError("adversary family is empty")
    for graph in graphs:
        if graph.maxDegree() > D:
            raise ValueError(f"{graph.label} has degree {graph.maxDegree()} > D = {D}")

    reference = {graph.label: exactLaw(ProductProcess(target), graph) for graph in graphs}
    certified = set()
    failures: List[Tuple[str, str, Fraction]] = []
    q = Fraction(0)
    for j in range(resolution, -1, -1):
        level = Fraction(j, resolution)
        failed = False
        for family in families:
            process = family.instance(level)
            for graph in graphs:
                law = exactLaw(process, graph)
                key = (family.name, graph.label)
                if key not in certified and 0 < level < 1:
                    if not certifyDependency(law, k).verified:
                        raise CertificationError(f"{family.name} is not {k}-dependent on {graph.label}")
                    certified.add(key)
                if not dominatesExact(law, reference[graph.label]):
                    failures.append((family.name, graph.label, level))
                    failed = True
                    break
            if failed:
                break
        if failed:
            if j == resolution:
                name, label, _ = failures[-1]
                raise CertificationError(
                    f"{name} at level 1 does not dominate product({target}) on {label}; no q <= 1 exists"
                )
            q = Fraction(j + 1, resolution)
            break
    logger.info("q(k=%d, D=%d) ~ %s over %d families", k, D, q, len(families))
    return QThreshold(q, k, D, resolution, failures)
