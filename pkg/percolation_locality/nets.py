#!/usr/bin/env python3
"""
(a, b)-nets on finite windows of Cayley graphs

Three constructions are provided: the Z^2 lattice net seeded by the scaled
sublattice m*Z*u + m*Z*v, the fiber net over a Z^2 quotient, and transport of
a net along a quasi-isometry. All distances are measured in the window.
"""

import logging
import math
from typing import Callable, Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix

from .cayley import GroupSpec, QuotientMap, makeOracle, quotientMap, selectUv, z2Spec
from .errors import EmptyFiberError, QuasiIsometryError, ResourceLimitError, SeparationError
from .graph_core import (
    FAR,
    FiniteGraph,
    ball,
    bfsDistances,
    distanceRows,
    matrixDistanceRows,
    multiSourceDistances,
    withinDistance,
)
from .interfaces import VertexId

logger = logging.getLogger(__name__)

NET_ADJACENCY_FACTOR = 4
NET_EDGE_CAP = 10_000_000


class Net:
    """Point subset of a host window with separation a and density b"""

    def __init__(
        self,
        host: FiniteGraph,
        points: Iterable[int],
        a: int,
        b: int,
        latticeEmbedding: Optional[Dict[Tuple[int, int], int]] = None,
        label: str = "net",
    ):
        self.host = host
        self.points: List[int] = sorted(set(int(p) for p in points))
        self.a = int(a)
        self.b = int(b)
        self.latticeEmbedding = latticeEmbedding
        self.label = label
        self.interior = host.interiorMask(self.b)

        # Filled by fiber and transport constructions
        self.base: Optional["Net"] = None
        self.quotient: Optional[QuotientMap] = None
        self.pointMap: Optional[Dict[int, int]] = None
        self.source: Optional["Net"] = None

        self.pointArray = np.asarray(self.points, dtype=np.int64)
        self._position = np.full(host.numVertices(), -1, dtype=np.int64)
        self._position[self.pointArray] = np.arange(len(self.points))
        self._degrees: Optional[np.ndarray] = None
        self._adjacency: Optional[csr_matrix] = None
        self._netGraph: Optional[FiniteGraph] = None

    def numPoints(self) -> int:
        return len(self.points)

    def threshold(self) -> int:
        return NET_ADJACENCY_FACTOR * self.b

    def pointVertices(self) -> List[VertexId]:
        return [self.host.vertices[i] for i in self.points]

    def positionOf(self, hostIndex: int) -> int:
        """Position of a host index in the point list, -1 when it is not a point"""
        return int(self._position[hostIndex])

    def interiorPoints(self, margin: Optional[int] = None) -> List[int]:
        """Points at window distance >= margin (default b) from the boundary"""
        mask = self.interior if margin is None else self.host.interiorMask(margin)
        return [p for p in self.points if mask[p]]

    def degrees(self) -> np.ndarray:
        """Net-graph degree of every point, counted one distance row at a time"""
        if self._degrees is None:
            threshold = self.threshold()
            counts = np.zeros(self.numPoints(), dtype=np.int64)
            for source, row in distanceRows(self.host, self.points, limit=threshold):
                counts[self._position[source]] = np.count_nonzero(row[self.pointArray] <= threshold) - 1
            self._degrees = counts
        return self._degrees

    def maxDegree(self) -> int:
        return int(self.degrees().max()) if self.numPoints() else 0

    def numNetEdges(self) -> int:
        return int(self.degrees().sum()) // 2

    def netAdjacency(self) -> csr_matrix:
        """Net-graph adjacency over point positions as a sparse matrix

        Raises ResourceLimitError when the graph has more than NET_EDGE_CAP
        adjacency entries.
        """
        if self._adjacency is None:
            degrees = self.degrees()
            total = int(degrees.sum())
            if total > NET_EDGE_CAP:
                raise ResourceLimitError(
                    f"{self.label}: net-graph has {total} adjacency entries, above {NET_EDGE_CAP}"
                )
            threshold = self.threshold()
            indptr = np.zeros(self.numPoints() + 1, dtype=np.int64)
            np.cumsum(degrees, out=indptr[1:])
            indices = np.empty(total, dtype=np.int32)
            for source, row in distanceRows(self.host, self.points, limit=threshold):
                mine = self._position[source]
                close = np.flatnonzero(row[self.pointArray] <= threshold)
                indices[indptr[mine] : indptr[mine + 1]] = close[close != mine]
            data = np.ones(total, dtype=np.float64)
            shape = (self.numPoints(), self.numPoints())
            self._adjacency = csr_matrix((data, indices, indptr), shape=shape)
        return self._adjacency

    def netGraph(self) -> FiniteGraph:
        """Points adjacent iff window distance <= 4b, rooted at the point nearest the window root"""
        if self._netGraph is None:
            matrix = self.netAdjacency()
            indptr, indices = matrix.indptr, matrix.indices
            adjacency = [indices[indptr[k] : indptr[k + 1]].tolist() for k in range(self.numPoints())]
            root = None
            if self.points and self.host.distFromRoot is not None:
                nearest = min(self.points, key=lambda p: (self.host.distFromRoot[p], p))
                root = self.host.vertices[nearest]
            graph = FiniteGraph(
                self.pointVertices(), adjacency, root=root, label=f"netgraph({self.label})"
            )
            if root is not None:
                graph.distFromRoot = multiSourceDistances(graph, [graph.index(root)])
            self._netGraph = graph
        return self._netGraph

    def toFixture(self) -> str:
        """Host edge list, then the (a, b) line and one P line per point"""
        lines = [self.host.toEdgeList().rstrip("\n"), f"net a {self.a} b {self.b}"]
        lines.extend(f"P {p}" for p in self.points)
        return "\n".join(lines) + "\n"

    @classmethod
    def fromFixture(cls, text: str, label: str = "net") -> "Net":
        hostLines, netLines = [], []
        target = hostLines
        for line in text.splitlines():
            if line.startswith("net "):
                target = netLines
            target.append(line)
        header = netLines[0].split()
        host = FiniteGraph.fromEdgeList("\n".join(hostLines), label=f"host({label})")
        points = [int(line.split()[1]) for line in netLines[1:] if line.startswith("P ")]
        return cls(host, points, int(header[2]), int(header[4]), label=label)

    def __repr__(self) -> str:
        return f"Net({self.label!r}, points={self.numPoints()}, a={self.a}, b={self.b})"


class NetReport(NamedTuple):
    separated: bool
    denseOnInterior: bool
    maxDegree: int
    distanceBoundViolations: List[Tuple[VertexId, VertexId, int, int]]
    unguardedViolations: List[Tuple[VertexId, VertexId, int, int]]

    def passed(self) -> bool:
        return self.separated and self.denseOnInterior and not self.distanceBoundViolations


# -- maximal separated sets ----------------------------------------------------


def _block(host: FiniteGraph, blocked: np.ndarray, center: int, a: int) -> None:
    for j in bfsDistances(host, center, limit=a - 1):
        blocked[j] = True


def extendMaximalSeparated(host: FiniteGraph, seed: Iterable[int], a: int) -> List[int]:
    """Greedy maximal a-separated superset of seed, scanning host vertices in order"""
    if a < 1:
        raise ValueError("separation parameter must be >= 1")
    seed = sorted(set(int(s) for s in seed))
    seedSet = set(seed)
    blocked = np.zeros(host.numVertices(), dtype=bool)
    for s in seed:
        near = bfsDistances(host, s, limit=a - 1)
        clash = [t for t in near if t in seedSet and t != s]
        if clash:
            raise SeparationError(
                f"seed points {host.vertices[s]} and {host.vertices[clash[0]]} "
                f"are closer than {a}"
            )
        for j in near:
            blocked[j] = True

    points = list(seed)
    for i in range(host.numVertices()):
        if not blocked[i]:
            points.append(i)
            _block(host, blocked, i, a)
    return sorted(points)


# -- Z^2 lattice nets ----------------------------------------------------------


def z2LatticeNet(generators, a: int, window: FiniteGraph) -> Net:
    """Net seeded by m Z u + m Z v with m = 3a, (u, v) from selectUv; b = a"""
    spec = z2Spec(generators)
    u, v = selectUv(spec)
    m = math.ceil(3 * a)
    radius = int(window.distFromRoot.max()) if window.numVertices() else 0
    # ||k m u + l m v||_S >= a (|k| + |l|), so |k| + |l| <= radius / a
    span = radius // a
    embedding: Dict[Tuple[int, int], int] = {}
    for k in range(-span, span + 1):
        for l in range(-span, span + 1):
            if abs(k) + abs(l) > span:
                continue
            point = (k * m * u[0] + l * m * v[0], k * m * u[1] + l * m * v[1])
            index = window.indexOf.get(point)
            if index is not None:
                embedding[(k, l)] = index
    points = extendMaximalSeparated(window, embedding.values(), a)
    logger.debug("lattice net a=%d m=%d: %d seeds, %d points", a, m, len(embedding), len(points))
    return Net(window, points, a, a, latticeEmbedding=embedding, label=f"z2-lattice(a={a})")


def latticeEmbeddingViolations(net: Net) -> List[Tuple[Tuple[int, int], Tuple[int, int]]]:
    """Lattice edges whose images are not net-graph edges (interior seeds only)

    A seed with margin >= m = 3a keeps the geodesic to its lattice neighbour
    inside the window.
    """
    if net.latticeEmbedding is None:
        return []
    embedding = net.latticeEmbedding
    if len(set(embedding.values())) != len(embedding):
        return [(key, key) for key in embedding]
    safe = net.host.interiorMask(3 * net.a)
    seeds = {index: key for key, index in embedding.items() if safe[index]}
    violations = []
    for index, row in distanceRows(net.host, sorted(seeds), limit=net.threshold()):
        k, l = seeds[index]
        for other in ((k + 1, l), (k, l + 1)):
            target = embedding.get(other)
            if target is not None and not row[target] <= net.threshold():
                violations.append(((k, l), other))
    return sorted(violations)


# -- fiber nets ----------------------------------------------------------------


def fiberNet(spec: GroupSpec, a: int, window: FiniteGraph) -> Net:
    """Union of maximal a-separated subsets of the fibers over a Z^2 lattice net; b = 2a"""
    qmap = quotientMap(spec)
    radius = int(window.distFromRoot.max()) if window.numVertices() else 0
    projected = ball(makeOracle(qmap.target), (0, 0), radius)
    base = z2LatticeNet(qmap.target, a, projected)
    baseCoords = set(base.pointVertices())

    fibers: Dict[Tuple[int, int], List[int]] = {x: [] for x in baseCoords}
    candidates = []
    for i, g in enumerate(window.vertices):
        x = qmap.project(g)
        if x in fibers:
            fibers[x].append(i)
            candidates.append(i)
    empty = sorted(x for x, members in fibers.items() if not members)
    if empty:
        raise EmptyFiberError(f"{len(empty)} base points have empty fibers in the window, e.g. {empty[0]}")

    blocked = np.zeros(window.numVertices(), dtype=bool)
    points = []
    for i in candidates:
        if not blocked[i]:
            points.append(i)
            _block(window, blocked, i, a)
    net = Net(window, points, a, 2 * a, label=f"fiber(a={a})")
    net.base = base
    net.quotient = qmap
    logger.debug("fiber net a=%d: %d base points, %d points", a, base.numPoints(), net.numPoints())
    return net


def fiberNetLift(net: Net):
    """Projection between the fiber net-graph and its base net-graph as a LiftMap"""
    from .graph_core import FiniteGraphOracle
    from .monotonicity import LiftMap

    if net.base is None or net.quotient is None:
        raise ValueError("net was not built by fiberNet")
    source = FiniteGraphOracle(net.netGraph())
    target = FiniteGraphOracle(net.base.netGraph())
    return LiftMap(source, target, net.quotient.project)


def fiberLiftReport(net: Net):
    """Neighbour lifting from the fiber net-graph to its base, without building the fiber net-graph

    Points whose 4b-ball stays inside the window are checked: every base
    net-graph neighbour of pi(u) must be the projection of a net-graph
    neighbour of u.
    """
    from .monotonicity import LiftReport

    if net.base is None or net.quotient is None:
        raise ValueError("net was not built by fiberNet")
    base = net.base
    baseGraph = base.netGraph()
    over = np.asarray(
        [base.positionOf(base.host.indexOf[net.quotient.project(g)]) for g in net.pointVertices()],
        dtype=np.int64,
    )
    threshold = net.threshold()
    checked = net.interiorPoints(threshold)
    failures = []
    for source, row in distanceRows(net.host, checked, limit=threshold):
        mine = net.positionOf(source)
        close = np.flatnonzero(row[net.pointArray] <= threshold)
        reached = set(over[close[close != mine]].tolist())
        for y in baseGraph.adjacency[over[mine]]:
            if y not in reached:
                failures.append((net.host.vertices[source], baseGraph.vertices[y]))
    surjective = set(over.tolist()) == set(range(base.numPoints()))
    return LiftReport(not failures, surjective, failures)


# -- transport along quasi-isometries ------------------------------------------


def checkQuasiIsometry(
    hWindow: FiniteGraph,
    gWindow: FiniteGraph,
    phi: Callable[[VertexId], VertexId],
    A: int,
    sampleSources: Optional[Sequence[int]] = None,
) -> List[int]:
    """Image indices of every hWindow vertex; raises QuasiIsometryError on a violated inequality"""
    image = []
    for x in hWindow.vertices:
        target = tuple(phi(x))
        if target not in gWindow.indexOf:
            raise QuasiIsometryError(f"phi{x} = {target} lies outside the target window")
        image.append(gWindow.indexOf[target])
    image = np.asarray(image, dtype=np.int64)

    sources = range(hWindow.numVertices()) if sampleSources is None else sampleSources
    gRows = dict(distanceRows(gWindow, sorted(set(int(image[s]) for s in sources))))
    for source, hRow in distanceRows(hWindow, sources):
        gRow = gRows[int(image[source])][image]
        reach = np.isfinite(hRow)
        low = hRow[reach] / A - A
        high = A * hRow[reach] + A
        observed = gRow[reach]
        bad = np.flatnonzero((observed < low) | (observed > high))
        if bad.size:
            y = np.flatnonzero(reach)[bad[0]]
            raise QuasiIsometryError(
                f"pair {hWindow.vertices[source]}, {hWindow.vertices[y]}: "
                f"d_H = {int(hRow[y])}, d_G = {observed[bad[0]]:g} breaks the {A}-QI inequality"
            )

    cover = multiSourceDistances(gWindow, np.unique(image), limit=A)
    far = np.flatnonzero(cover > A)
    if far.size:
        raise QuasiIsometryError(
            f"{gWindow.vertices[far[0]]} is farther than {A} from the image of phi"
        )
    return image.tolist()


def transportNet(
    net: Net,
    phi: Callable[[VertexId], VertexId],
    A: int,
    gWindow: FiniteGraph,
    sampleSources: Optional[Sequence[int]] = None,
) -> Net:
    """Image of an (a', b')-net under an A-quasi-isometry: an ((a' - A^2)/A, b'A + A)-net"""
    image = checkQuasiIsometry(net.host, gWindow, phi, A, sampleSources)
    pointMap = {p: image[p] for p in net.points}
    if len(set(pointMap.values())) != len(pointMap):
        raise QuasiIsometryError("phi is not injective on the net points")
    aOut = max(1, (net.a - A * A) // A)
    bOut = net.b * A + A
    out = Net(gWindow, pointMap.values(), aOut, bOut, label=f"transport({net.label})")
    out.source = net
    out.pointMap = pointMap
    return out


def homomorphismViolations(net: Net) -> List[Tuple[VertexId, VertexId]]:
    """Net-graph edges of the source whose images are not adjacent in the transported net-graph"""
    if net.source is None or net.pointMap is None:
        return []
    sourceGraph, targetGraph = net.source.netGraph(), net.netGraph()
    violations = []
    for i, j in sourceGraph.edges():
        hi, hj = net.source.points[i], net.source.points[j]
        ti, tj = net.positionOf(net.pointMap[hi]), net.positionOf(net.pointMap[hj])
        if not targetGraph.hasEdge(ti, tj):
            violations.append((sourceGraph.vertices[i], sourceGraph.vertices[j]))
    return violations


# -- verification --------------------------------------------------------------


def netDistanceRows(net: Net, sources: Sequence[int]) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield (source, net-graph distances to every point position) for host-index sources

    The sparse net-graph is searched directly when it fits under NET_EDGE_CAP.
    Larger net-graphs are searched layer by layer in the host: a layer is
    every point within 4b of the previous layer.
    """
    if net.degrees().sum() <= NET_EDGE_CAP:
        matrix = net.netAdjacency()
        for position, row in matrixDistanceRows(matrix, [net.positionOf(s) for s in sources]):
            yield net.points[position], row
        return
    threshold = net.threshold()
    for source, hostRow in distanceRows(net.host, sources, limit=threshold):
        row = np.full(net.numPoints(), np.inf)
        fresh = np.flatnonzero(hostRow[net.pointArray] <= threshold)
        row[fresh] = 1.0
        row[net.positionOf(source)] = 0.0
        level = 1
        while fresh.size:
            level += 1
            close = np.flatnonzero(withinDistance(net.host, net.pointArray[fresh], threshold)[net.pointArray])
            fresh = close[np.isinf(row[close])]
            row[fresh] = level
        yield source, row


def verifyNet(net: Net) -> NetReport:
    """Exhaustive separation, interior density, degree and net-distance checks"""
    host = net.host
    pointSet = set(net.points)

    separated = True
    for p in net.points:
        if any(q in pointSet and q != p for q in bfsDistances(host, p, limit=net.a - 1)):
            separated = False
            break

    coverage = multiSourceDistances(host, net.points, limit=net.b)
    denseOnInterior = bool(np.all(coverage[net.interior] <= net.b))
    maxDegree = net.maxDegree()

    interior = net.interiorPoints()
    interiorPositions = np.asarray([net.positionOf(p) for p in interior], dtype=np.int64)
    guarded, unguarded = [], []
    hostRows = distanceRows(host, interior)
    for (source, hostRow), (_, netRow) in zip(hostRows, netDistanceRows(net, interior)):
        mine = net.positionOf(source)
        dHost = hostRow[interior]
        dNet = netRow[interiorPositions]
        later = interiorPositions > mine
        bound = np.maximum(1.0, dHost / net.b)
        for k in np.flatnonzero(later & (dNet > bound)):
            guarded.append(_violation(net, source, interior[k], dNet[k], dHost[k]))
        for k in np.flatnonzero(later & (dNet > dHost / net.b)):
            unguarded.append(_violation(net, source, interior[k], dNet[k], dHost[k]))

    report = NetReport(separated, denseOnInterior, maxDegree, guarded, unguarded)
    logger.info(
        "%s: separated=%s dense=%s maxDegree=%d violations=%d (unguarded %d)",
        net.label, separated, denseOnInterior, maxDegree, len(guarded), len(unguarded),
    )
    return report


def _violation(net: Net, i: int, j: int, dNet: float, dHost: float):
    toInt = lambda d: int(d) if np.isfinite(d) else int(FAR)  # noqa: E731
    return (net.host.vertices[i], net.host.vertices[j], toInt(dNet), toInt(dHost))
