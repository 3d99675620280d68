#!/usr/bin/env python3
"""
Bernoulli percolation sampling, the block event E_n, renormalised processes
on nets, independence-radius certificates and spanning-threshold estimates

Every random configuration is driven by the counter-based streams in rng:
stream = sample (or trial) index, draw i = site or edge i. A site is open iff
its uniform is below p, so configurations at different p are coupled.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.stats import binomtest

from . import rng
from .errors import ConfigError, ConvergenceError, MarginError
from .graph_core import BOND, SITE, FiniteGraph, ball, componentLabels, distanceRows
from .interfaces import IGraphOracle, VertexId
from .nets import Net

logger = logging.getLogger(__name__)

Z_95 = 1.959963984540054
INDEPENDENCE_RANGE = 80


class PercolationConfig(NamedTuple):
    region: FiniteGraph
    mode: str
    p: float
    seed: int
    stream: int
    openMask: np.ndarray


class EventEstimate(NamedTuple):
    pHat: float
    ciLow: float
    ciHigh: float
    samples: int
    successes: int


class RenormalizedProcess(NamedTuple):
    """eta per net point; None marks points too close to the window boundary"""

    net: Net
    n: int
    eta: List[Optional[bool]]

    def determinate(self) -> List[int]:
        return [k for k, value in enumerate(self.eta) if value is not None]

    def openPositions(self) -> List[int]:
        return [k for k, value in enumerate(self.eta) if value]


class EtaCrossing(NamedTuple):
    crosses: bool
    centerPoint: Optional[int]
    path: Optional[List[int]]
    clusterSize: int


class PcEstimate(NamedTuple):
    pcHat: float
    ciLow: float
    ciHigh: float
    curve: List[Tuple[float, float]]


# -- sampling ------------------------------------------------------------------


def _elementCount(region: FiniteGraph, mode: str) -> int:
    if mode == SITE:
        return region.numVertices()
    if mode == BOND:
        return len(region.edgeArrays()[0])
    raise ValueError(f"unknown percolation mode {mode!r}")


def sample(region: FiniteGraph, mode: str, p: float, seed: int, stream: int = 0) -> PercolationConfig:
    """Independent Bernoulli(p) sites or edges, reproducible from (seed, stream)"""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p = {p} outside [0, 1]")
    size = _elementCount(region, mode)
    return PercolationConfig(region, mode, p, seed, stream, rng.bernoulli(seed, stream, size, p))


# -- the block event -------------------------------------------------------------


class _BlockGeometry(NamedTuple):
    indices: np.ndarray
    dist: np.ndarray
    edgeU: np.ndarray
    edgeV: np.ndarray
    edgeIds: np.ndarray
    inner5: np.ndarray
    edgeU5: np.ndarray
    edgeV5: np.ndarray
    edgeIds5: np.ndarray


class EventEvaluator:
    """Evaluates E_n(v) on configurations of one region, caching block geometry per center"""

    def __init__(self, region: FiniteGraph, n: int, mode: str = SITE):
        if n < 1:
            raise ValueError("block scale n must be >= 1")
        self.region = region
        self.n = n
        self.mode = mode
        self._geometry: Dict[int, _BlockGeometry] = {}

    def checkMargin(self, center: int) -> bool:
        return bool(self.region.marginDistances()[center] >= 10 * self.n)

    def prepare(self, centers: Iterable[int]) -> None:
        """Precompute block geometry for many centers with batched distance rows"""
        todo = [c for c in centers if c not in self._geometry]
        for center in todo:
            if not self.checkMargin(center):
                raise MarginError(
                    f"B_{10 * self.n}({self.region.vertices[center]}) leaves the region"
                )
        for center, row in distanceRows(self.region, todo, limit=10 * self.n):
            self._geometry[center] = self._buildGeometry(row)

    def _buildGeometry(self, row: np.ndarray) -> _BlockGeometry:
        n = self.n
        indices = np.flatnonzero(np.isfinite(row))
        dist = row[indices].astype(np.int64)
        local = np.full(self.region.numVertices(), -1, dtype=np.int64)
        local[indices] = np.arange(len(indices))
        eu, ev = self.region.edgeArrays()
        inside = (local[eu] >= 0) & (local[ev] >= 0)
        edgeIds = np.flatnonzero(inside)
        edgeU, edgeV = local[eu[inside]], local[ev[inside]]

        inner5 = np.flatnonzero(dist <= 5 * n)
        local5 = np.full(len(indices), -1, dtype=np.int64)
        local5[inner5] = np.arange(len(inner5))
        keep5 = (local5[edgeU] >= 0) & (local5[edgeV] >= 0)
        return _BlockGeometry(
            indices, dist, edgeU, edgeV, edgeIds,
            inner5, local5[edgeU[keep5]], local5[edgeV[keep5]], edgeIds[keep5],
        )

    def geometry(self, center: int) -> _BlockGeometry:
        if center not in self._geometry:
            self.prepare([center])
        return self._geometry[center]

    def _labels(self, count, edgeU, edgeV, edgeIds, siteOpen, bondOpen):
        if self.mode == SITE:
            keep = siteOpen[edgeU] & siteOpen[edgeV]
        else:
            keep = bondOpen[edgeIds]
        return componentLabels(count, edgeU[keep], edgeV[keep])

    def evaluate(self, openMask: np.ndarray, center: int) -> bool:
        """E_n(center): a crossing cluster from B_n to the 10n-sphere, unique between scales 2n and 5n"""
        geo = self.geometry(center)
        n = self.n
        if self.mode == SITE:
            siteOpen = openMask[geo.indices]
            bondOpen = None
        else:
            siteOpen = np.ones(len(geo.indices), dtype=bool)
            bondOpen = openMask

        labels = self._labels(len(geo.indices), geo.edgeU, geo.edgeV, geo.edgeIds, siteOpen, bondOpen)
        near = labels[siteOpen & (geo.dist <= n)]
        far = labels[siteOpen & (geo.dist == 10 * n)]
        if np.intersect1d(near, far).size == 0:
            return False

        dist5 = geo.dist[geo.inner5]
        open5 = siteOpen[geo.inner5]
        labels5 = self._labels(len(geo.inner5), geo.edgeU5, geo.edgeV5, geo.edgeIds5, open5, bondOpen)
        crossing = np.intersect1d(labels5[open5 & (dist5 <= 2 * n)], labels5[open5 & (dist5 == 5 * n)])
        return crossing.size <= 1

    def crossingClusterNearCenter(self, openMask: np.ndarray, center: int) -> np.ndarray:
        """Region indices in B_n(center) belonging to clusters that reach the 10n-sphere"""
        geo = self.geometry(center)
        if self.mode == SITE:
            siteOpen, bondOpen = openMask[geo.indices], None
        else:
            siteOpen, bondOpen = np.ones(len(geo.indices), dtype=bool), openMask
        labels = self._labels(len(geo.indices), geo.edgeU, geo.edgeV, geo.edgeIds, siteOpen, bondOpen)
        far = labels[siteOpen & (geo.dist == 10 * self.n)]
        hit = siteOpen & (geo.dist <= self.n) & np.isin(labels, far)
        return geo.indices[hit]


def eventEn(config: PercolationConfig, v: VertexId, n: int) -> bool:
    evaluator = EventEvaluator(config.region, n, config.mode)
    return evaluator.evaluate(config.openMask, config.region.index(v))


def wilsonInterval(successes: int, samples: int) -> Tuple[float, float]:
    """95% Wilson score interval, exact at the endpoints 0 and 1"""
    interval = binomtest(successes, samples).proportion_ci(confidence_level=0.95, method="wilson")
    low = 0.0 if successes == 0 else float(interval.low)
    high = 1.0 if successes == samples else float(interval.high)
    return low, high


def _farm(func: Callable, items: Sequence, threads: int) -> List:
    """Order-preserving map, threaded when threads > 1"""
    if threads <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def _rootBall(oracle: IGraphOracle, radius: int) -> FiniteGraph:
    getBall = getattr(oracle, "getBall", None)
    return getBall(radius) if getBall is not None else ball(oracle, oracle.getRoot(), radius)


def estimateEventProb(
    oracle: IGraphOracle,
    p: float,
    n: int,
    samples: int,
    seed: int,
    mode: str = SITE,
    threads: int = 1,
) -> EventEstimate:
    """P(E_n) at the root over independent samples of B_10n, with a Wilson interval"""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    region = _rootBall(oracle, 10 * n)
    evaluator = EventEvaluator(region, n, mode)
    root = region.rootIndex()
    evaluator.prepare([root])

    def trial(index: int) -> bool:
        return evaluator.evaluate(sample(region, mode, p, seed, index).openMask, root)

    successes = sum(_farm(trial, range(samples), threads))
    low, high = wilsonInterval(successes, samples)
    logger.debug("%s p=%.3f n=%d: %d/%d", oracle.label, p, n, successes, samples)
    return EventEstimate(successes / samples, low, high, samples, successes)


# -- renormalisation -------------------------------------------------------------


def blockSeparation(n: int, C: int = 1) -> int:
    """Net separation a = ceil(n / 4C) paired with block scale n"""
    return math.ceil(n / (4 * C))


def renormalize(
    config: PercolationConfig, net: Net, n: int, C: int = 1, threads: int = 1
) -> RenormalizedProcess:
    """eta(v) = E_n(v) for net points with margin >= 10n; None elsewhere"""
    expected = blockSeparation(n, C)
    if net.a != expected:
        raise ConfigError(f"net separation {net.a} does not match ceil(n/4C) = {expected}", field="a")
    region = config.region
    evaluator = EventEvaluator(region, n, config.mode)
    centers = [region.index(v) for v in net.pointVertices()]
    usable = [c for c in centers if evaluator.checkMargin(c)]
    if not usable:
        raise MarginError(f"no net point has margin {10 * n} in the region")
    evaluator.prepare(usable)
    usableSet = set(usable)

    def decide(center: int) -> Optional[bool]:
        if center not in usableSet:
            return None
        return evaluator.evaluate(config.openMask, center)

    eta = _farm(decide, centers, threads)
    logger.info(
        "renormalised %d points (%d determinate, %d open)",
        len(eta), len(usable), sum(1 for value in eta if value),
    )
    return RenormalizedProcess(net, n, eta)


def independenceViolations(net: Net, n: int, k: int = INDEPENDENCE_RANGE) -> List[Tuple[VertexId, VertexId]]:
    """Interior point pairs at net distance > k whose 10n-balls intersect

    Two window balls of radius 10n meet iff the centres are within 20n.
    """
    margin = 10 * n
    interior = [p for p in net.points if net.host.marginDistances()[p] >= margin]
    interiorSet = set(interior)
    graph = net.netGraph()
    positions = [net.positionOf(p) for p in interior]
    netRows = dict(distanceRows(graph, positions, limit=k))
    violations = []
    for source, row in distanceRows(net.host, interior, limit=2 * margin):
        mine = net.positionOf(source)
        netRow = netRows[mine]
        for other in np.flatnonzero(row <= 2 * margin):
            if other <= source or other not in interiorSet:
                continue
            if netRow[net.positionOf(other)] > k:
                violations.append((net.host.vertices[source], net.host.vertices[int(other)]))
    return violations


def independenceRadiusCheck(net: Net, n: int, k: int = INDEPENDENCE_RANGE) -> bool:
    """True iff eta is structurally k-independent on the interior of the net"""
    return not independenceViolations(net, n, k)


def etaCrossing(process: RenormalizedProcess) -> EtaCrossing:
    """Does the eta-open cluster of the most central determinate point reach the outermost determinate layer?

    The outermost layer is the set of determinate points with an
    indeterminate net-graph neighbour.
    """
    net, eta = process.net, process.eta
    graph = net.netGraph()
    determinate = process.determinate()
    if not determinate:
        return EtaCrossing(False, None, None, 0)
    distRoot = net.host.distFromRoot
    center = min(determinate, key=lambda k: (distRoot[net.points[k]], k))
    layer = {k for k in determinate if any(eta[j] is None for j in graph.adjacency[k])}
    if not eta[center]:
        return EtaCrossing(False, center, None, 0)

    parent = {center: None}
    queue = [center]
    found = center if center in layer else None
    cursor = 0
    while cursor < len(queue) and found is None:
        k = queue[cursor]
        cursor += 1
        for j in graph.adjacency[k]:
            if j not in parent and eta[j]:
                parent[j] = k
                queue.append(j)
                if j in layer:
                    found = j
                    break
    if found is None:
        return EtaCrossing(False, center, None, len(queue))
    path = []
    k = found
    while k is not None:
        path.append(net.points[k])
        k = parent[k]
    return EtaCrossing(True, center, path[::-1], len(queue))


def extractHostPath(
    config: PercolationConfig, process: RenormalizedProcess, netPath: Sequence[int]
) -> Optional[List[int]]:
    """Open host path from the crossing cluster of the first net point to that of the last

    netPath lists region indices of eta-open, consecutive net-graph neighbours.
    The search stays inside the union of their 10n-balls.
    """
    region, n = config.region, process.n
    evaluator = EventEvaluator(region, n, config.mode)
    evaluator.prepare(netPath)

    allowed = np.zeros(region.numVertices(), dtype=bool)
    for center in netPath:
        allowed[evaluator.geometry(center).indices] = True
    eu, ev = region.edgeArrays()
    if config.mode == SITE:
        allowed &= config.openMask
        keep = allowed[eu] & allowed[ev]
    else:
        keep = allowed[eu] & allowed[ev] & config.openMask

    sources = evaluator.crossingClusterNearCenter(config.openMask, netPath[0])
    targets = evaluator.crossingClusterNearCenter(config.openMask, netPath[-1])
    if sources.size == 0 or targets.size == 0:
        return None

    size = region.numVertices()
    matrix = csr_matrix(
        (np.ones(int(keep.sum())), (eu[keep], ev[keep])), shape=(size, size)
    )
    dist, predecessors, origins = dijkstra(
        matrix, directed=False, indices=sources, unweighted=True,
        min_only=True, return_predecessors=True,
    )
    reachable = targets[np.isfinite(dist[targets])]
    if reachable.size == 0:
        return None
    end = int(reachable[np.argmin(dist[reachable])])
    path = [end]
    while predecessors[path[-1]] >= 0:
        path.append(int(predecessors[path[-1]]))
    return path[::-1]


def isOpenHostPath(config: PercolationConfig, path: Sequence[int]) -> bool:
    """Consecutive vertices adjacent, and open (site) or joined by open edges (bond)"""
    region = config.region
    if config.mode == SITE and not all(config.openMask[i] for i in path):
        return False
    edgeIndex = None
    if config.mode == BOND:
        eu, ev = region.edgeArrays()
        edgeIndex = {(int(i), int(j)): e for e, (i, j) in enumerate(zip(eu, ev))}
    for i, j in zip(path, path[1:]):
        if not region.hasEdge(i, j):
            return False
        if edgeIndex is not None and not config.openMask[edgeIndex[(min(i, j), max(i, j))]]:
            return False
    return True


# -- spanning threshold ----------------------------------------------------------


class SpanningExperiment:
    """Root r-ball to 2r-sphere spanning on B_2r, one uniform stream per trial"""

    def __init__(self, oracle: IGraphOracle, regionScale: int, seed: int, mode: str = SITE):
        if regionScale < 1:
            raise ValueError("region scale must be >= 1")
        self.region = _rootBall(oracle, 2 * regionScale)
        self.mode = mode
        self.seed = seed
        dist = self.region.distFromRoot
        self.inner = dist <= regionScale
        self.sphere = dist == 2 * regionScale
        self.size = _elementCount(self.region, mode)
        self.edgeU, self.edgeV = self.region.edgeArrays()

    def spans(self, trial: int, p: float) -> bool:
        u = rng.uniforms(self.seed, trial, self.size)
        opened = u < p
        if self.mode == SITE:
            keep = opened[self.edgeU] & opened[self.edgeV]
            sites = opened
        else:
            keep = opened
            sites = np.ones(self.region.numVertices(), dtype=bool)
        labels = componentLabels(self.region.numVertices(), self.edgeU[keep], self.edgeV[keep])
        return np.intersect1d(labels[sites & self.inner], labels[sites & self.sphere]).size > 0

    def indicators(self, p: float, nTrials: int, threads: int = 1) -> np.ndarray:
        return np.asarray(_farm(lambda t: self.spans(t, p), range(nTrials), threads), dtype=bool)


def spanningProbability(
    oracle: IGraphOracle, p: float, nTrials: int, regionScale: int, seed: int,
    mode: str = SITE, threads: int = 1,
) -> EventEstimate:
    experiment = SpanningExperiment(oracle, regionScale, seed, mode)
    successes = int(experiment.indicators(p, nTrials, threads).sum())
    low, high = wilsonInterval(successes, nTrials)
    return EventEstimate(successes / nTrials, low, high, nTrials, successes)


def _halfCrossing(points: Sequence[float], fractions: Sequence[float]) -> float:
    below = [p for p, f in zip(points, fractions) if f < 0.5]
    above = [p for p, f in zip(points, fractions) if f >= 0.5]
    return (max(below) + min(above)) / 2


def estimatePc(
    oracle: IGraphOracle,
    nTrials: int,
    regionScale: int,
    seed: int,
    mode: str = SITE,
    threads: int = 1,
    tolerance: float = 0.01,
    bracket: Tuple[float, float] = (0.0, 1.0),
    bootstrap: int = 1000,
) -> PcEstimate:
    """Bisection for the p where the spanning fraction crosses 1/2, with a bootstrap interval"""
    experiment = SpanningExperiment(oracle, regionScale, seed, mode)
    evaluated: Dict[float, np.ndarray] = {}

    def fraction(p: float) -> float:
        if p not in evaluated:
            evaluated[p] = experiment.indicators(p, nTrials, threads)
        return float(evaluated[p].mean())

    def curve() -> List[Tuple[float, float]]:
        return [(p, float(evaluated[p].mean())) for p in sorted(evaluated)]

    lo, hi = bracket
    if fraction(lo) >= 0.5 or fraction(hi) < 0.5:
        raise ConvergenceError(
            f"spanning fraction does not cross 1/2 on [{lo}, {hi}] for {oracle.label}", curve()
        )
    while hi - lo >= tolerance:
        mid = (lo + hi) / 2
        if fraction(mid) >= 0.5:
            hi = mid
        else:
            lo = mid
    pcHat = (lo + hi) / 2

    points = sorted(evaluated)
    indicators = np.vstack([evaluated[p] for p in points])
    resampler = rng.generator(seed, rng.MASK64)
    estimates = []
    for _ in range(bootstrap):
        chosen = resampler.integers(0, nTrials, nTrials)
        fractions = indicators[:, chosen].mean(axis=1)
        if fractions[0] < 0.5 <= fractions[-1]:
            estimates.append(_halfCrossing(points, fractions))
    if estimates:
        ciLow, ciHigh = np.percentile(estimates, [2.5, 97.5]).tolist()
    else:
        ciLow, ciHigh = lo, hi
    logger.info("%s: p_c ~ %.4f [%.4f, %.4f]", oracle.label, pcHat, ciLow, ciHigh)
    return PcEstimate(pcHat, float(ciLow), float(ciHigh), curve())
