#!/usr/bin/env python3
"""
Finite graphs, balls, distances and cluster decomposition

Vertices are canonical integer tuples. A FiniteGraph keeps its vertices in a
fixed order (BFS discovery order for balls) and refers to them by index
everywhere else; adjacency lists keep the oracle's neighbour order.
"""

import logging
import os
from collections import deque
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .errors import ResourceLimitError, UnknownVertexError
from .interfaces import IGraphOracle, VertexId

logger = logging.getLogger(__name__)

DEFAULT_BALL_CAP = 5_000_000
FAR = np.iinfo(np.int64).max // 4

SITE = "site"
BOND = "bond"


def defaultBallCap() -> int:
    """Ball vertex cap, overridable through PERCLOCAL_BALL_CAP"""
    return int(os.getenv("PERCLOCAL_BALL_CAP", DEFAULT_BALL_CAP))


class FiniteGraph:
    """Simple undirected finite graph with ordered vertices"""

    def __init__(
        self,
        vertices: Sequence[VertexId],
        adjacency: Sequence[Sequence[int]],
        root: Optional[VertexId] = None,
        distFromRoot: Optional[Sequence[int]] = None,
        fullDegree: Optional[int] = None,
        label: str = "graph",
    ):
        self.vertices: List[VertexId] = [tuple(v) for v in vertices]
        self.adjacency: List[List[int]] = [list(nbrs) for nbrs in adjacency]
        self.indexOf: Dict[VertexId, int] = {v: i for i, v in enumerate(self.vertices)}
        if len(self.indexOf) != len(self.vertices):
            raise ValueError("duplicate vertex keys")
        if len(self.adjacency) != len(self.vertices):
            raise ValueError("adjacency length does not match vertex count")

        self.root = tuple(root) if root is not None else None
        if self.root is not None and self.root not in self.indexOf:
            raise UnknownVertexError(f"root {self.root} not in graph")
        self.distFromRoot = (
            np.asarray(distFromRoot, dtype=np.int64) if distFromRoot is not None else None
        )
        self.fullDegree = (
            fullDegree if fullDegree is not None else self.maxDegree()
        )
        self.label = label

        self._csr = None
        self._edgeArrays = None
        self._marginDistances = None

    # -- basic queries -----------------------------------------------------

    def numVertices(self) -> int:
        return len(self.vertices)

    def numEdges(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    def degree(self, index: int) -> int:
        return len(self.adjacency[index])

    def maxDegree(self) -> int:
        return max((len(nbrs) for nbrs in self.adjacency), default=0)

    def rootIndex(self) -> int:
        if self.root is None:
            raise UnknownVertexError("graph has no root")
        return self.indexOf[self.root]

    def index(self, vertex: VertexId) -> int:
        """Index of a vertex, raising UnknownVertexError when absent"""
        try:
            return self.indexOf[tuple(vertex)]
        except KeyError:
            raise UnknownVertexError(f"vertex {vertex} not in {self.label}") from None

    def hasEdge(self, i: int, j: int) -> bool:
        return j in self.adjacency[i]

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Edges (i, j) with i < j, in vertex order then neighbour order"""
        for i, nbrs in enumerate(self.adjacency):
            for j in nbrs:
                if i < j:
                    yield i, j

    def edgeArrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """Endpoint arrays aligned with edges()"""
        if self._edgeArrays is None:
            pairs = list(self.edges())
            if pairs:
                arr = np.asarray(pairs, dtype=np.int64)
                self._edgeArrays = (arr[:, 0].copy(), arr[:, 1].copy())
            else:
                empty = np.zeros(0, dtype=np.int64)
                self._edgeArrays = (empty, empty.copy())
        return self._edgeArrays

    def csr(self) -> csr_matrix:
        """Symmetric 0/1 adjacency matrix"""
        if self._csr is None:
            n = self.numVertices()
            rows = np.repeat(
                np.arange(n, dtype=np.int64),
                [len(nbrs) for nbrs in self.adjacency],
            )
            cols = np.fromiter(
                (j for nbrs in self.adjacency for j in nbrs),
                dtype=np.int64,
                count=len(rows),
            )
            data = np.ones(len(rows), dtype=np.float64)
            self._csr = csr_matrix((data, (rows, cols)), shape=(n, n))
        return self._csr

    # -- boundary handling -------------------------------------------------

    def boundaryMask(self) -> np.ndarray:
        """Vertices that lost neighbours to truncation (window degree < full degree)"""
        degrees = np.fromiter(
            (len(nbrs) for nbrs in self.adjacency), dtype=np.int64, count=self.numVertices()
        )
        return degrees < self.fullDegree

    def marginDistances(self) -> np.ndarray:
        """Window distance from each vertex to the nearest boundary vertex"""
        if self._marginDistances is None:
            sources = np.flatnonzero(self.boundaryMask())
            self._marginDistances = multiSourceDistances(self, sources)
        return self._marginDistances

    def interiorMask(self, margin: int) -> np.ndarray:
        """Vertices at window distance >= margin from the truncation boundary"""
        return self.marginDistances() >= margin

    # -- derived graphs ----------------------------------------------------

    def inducedSubgraph(self, indices: Iterable[int], label: Optional[str] = None) -> "FiniteGraph":
        """Induced subgraph on the given indices, keeping their order"""
        keep = list(indices)
        position = {old: new for new, old in enumerate(keep)}
        adjacency = [
            [position[j] for j in self.adjacency[old] if j in position] for old in keep
        ]
        vertices = [self.vertices[old] for old in keep]
        root = self.root if self.root is not None and self.indexOf[self.root] in position else None
        dist = None
        if root is not None and self.distFromRoot is not None:
            dist = self.distFromRoot[keep]
        return FiniteGraph(
            vertices,
            adjacency,
            root=root,
            distFromRoot=dist,
            fullDegree=self.fullDegree,
            label=label or self.label,
        )

    def ballPrefix(self, radius: int) -> "FiniteGraph":
        """Sub-ball of a rooted ball; BFS order makes it a vertex prefix"""
        if self.distFromRoot is None:
            raise ValueError("graph is not a rooted ball")
        count = int(np.searchsorted(self.distFromRoot, radius, side="right"))
        return self.inducedSubgraph(range(count), label=f"{self.label}[r={radius}]")

    # -- serialisation -----------------------------------------------------

    def toEdgeList(self) -> str:
        """Text fixture: header, V lines in order, E lines with indices"""
        rootIndex = self.indexOf[self.root] if self.root is not None else -1
        lines = [f"vertices {self.numVertices()} root {rootIndex}"]
        lines.extend("V " + " ".join(str(c) for c in v) for v in self.vertices)
        lines.extend(f"E {i} {j}" for i, j in self.edges())
        return "\n".join(lines) + "\n"

    @classmethod
    def fromEdgeList(cls, text: str, label: str = "fixture") -> "FiniteGraph":
        """Parse the edge-list fixture format"""
        rows = [line.split() for line in text.splitlines() if line.strip()]
        if not rows or rows[0][0] != "vertices" or rows[0][2] != "root":
            raise ValueError("missing 'vertices N root K' header")
        count, rootIndex = int(rows[0][1]), int(rows[0][3])
        vertices = [tuple(int(c) for c in row[1:]) for row in rows[1:] if row[0] == "V"]
        if len(vertices) != count:
            raise ValueError(f"header announces {count} vertices, found {len(vertices)}")
        adjacency: List[List[int]] = [[] for _ in vertices]
        for row in rows[1:]:
            if row[0] == "E":
                i, j = int(row[1]), int(row[2])
                adjacency[i].append(j)
                adjacency[j].append(i)
        root = vertices[rootIndex] if rootIndex >= 0 else None
        graph = cls(vertices, adjacency, root=root, label=label)
        if root is not None:
            graph.distFromRoot = multiSourceDistances(graph, [rootIndex])
        return graph

    def toNetworkx(self):
        """networkx.Graph on vertex indices, with the root flagged"""
        import networkx as nx

        graph = nx.Graph()
        rootIndex = self.indexOf[self.root] if self.root is not None else None
        for i in range(self.numVertices()):
            graph.add_node(i, root=(i == rootIndex))
        graph.add_edges_from(self.edges())
        return graph

    @classmethod
    def fromNetworkx(cls, graph, label: str = "graph") -> "FiniteGraph":
        """Nodes in sorted order become 1-tuples (or stay tuples); the first node is the root"""
        nodes = sorted(graph.nodes())
        vertices = [node if isinstance(node, tuple) else (int(node),) for node in nodes]
        position = {node: i for i, node in enumerate(nodes)}
        adjacency = [sorted(position[w] for w in graph.neighbors(node)) for node in nodes]
        result = cls(vertices, adjacency, root=vertices[0] if vertices else None, label=label)
        if vertices:
            result.distFromRoot = multiSourceDistances(result, [0])
        return result

    def __repr__(self) -> str:
        return f"FiniteGraph({self.label!r}, vertices={self.numVertices()}, edges={self.numEdges()})"


class FiniteGraphOracle(IGraphOracle):
    """Expose a finite graph through the oracle interface"""

    def __init__(self, graph: FiniteGraph, root: Optional[VertexId] = None):
        self.graph = graph
        self._root = tuple(root) if root is not None else (graph.root or graph.vertices[0])
        self.label = graph.label

    def getRoot(self) -> VertexId:
        return self._root

    def getNeighbors(self, vertex: VertexId) -> List[VertexId]:
        index = self.graph.index(vertex)
        return [self.graph.vertices[j] for j in self.graph.adjacency[index]]

    def getDegree(self) -> int:
        return self.graph.maxDegree()


def ball(
    oracle: IGraphOracle,
    center: VertexId,
    r: int,
    vertexCap: Optional[int] = None,
) -> FiniteGraph:
    """Induced r-ball around center in BFS discovery order"""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    cap = vertexCap if vertexCap is not None else defaultBallCap()
    center = tuple(center)

    indexOf = {center: 0}
    vertices = [center]
    dist = [0]
    neighborLists = []
    cursor = 0
    while cursor < len(vertices):
        vertex = vertices[cursor]
        nbrs = oracle.getNeighbors(vertex)
        neighborLists.append(nbrs)
        if dist[cursor] < r:
            nextDist = dist[cursor] + 1
            for w in nbrs:
                if w not in indexOf:
                    indexOf[w] = len(vertices)
                    vertices.append(w)
                    dist.append(nextDist)
                    if len(vertices) > cap:
                        raise ResourceLimitError(
                            f"ball of radius {r} in {oracle.label} exceeds {cap} vertices"
                        )
        cursor += 1

    adjacency = [[indexOf[w] for w in nbrs if w in indexOf] for nbrs in neighborLists]
    logger.debug("ball r=%d in %s: %d vertices", r, oracle.label, len(vertices))
    return FiniteGraph(
        vertices,
        adjacency,
        root=center,
        distFromRoot=dist,
        fullDegree=oracle.getDegree(),
        label=f"B_{r}({oracle.label})",
    )


def bfsDistances(graph: FiniteGraph, source: int, limit: Optional[int] = None) -> Dict[int, int]:
    """Distances from one vertex index, optionally truncated at limit"""
    dist = {source: 0}
    queue = deque([source])
    adjacency = graph.adjacency
    while queue:
        i = queue.popleft()
        d = dist[i]
        if limit is not None and d >= limit:
            continue
        for j in adjacency[i]:
            if j not in dist:
                dist[j] = d + 1
                queue.append(j)
    return dist


def multiSourceDistances(graph: FiniteGraph, sources: Iterable[int], limit: Optional[int] = None) -> np.ndarray:
    """Distance to the nearest source for every vertex (FAR when unreached)"""
    result = np.full(graph.numVertices(), FAR, dtype=np.int64)
    queue = deque()
    for s in sources:
        if result[s] != 0:
            result[s] = 0
            queue.append(int(s))
    adjacency = graph.adjacency
    while queue:
        i = queue.popleft()
        d = result[i]
        if limit is not None and d >= limit:
            continue
        for j in adjacency[i]:
            if result[j] == FAR:
                result[j] = d + 1
                queue.append(j)
    return result


def distanceRows(
    graph: FiniteGraph, sources: Sequence[int], limit: Optional[int] = None, chunk: int = 256
) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield (source, distance row) pairs; unreachable or beyond limit is inf"""
    return matrixDistanceRows(graph.csr(), sources, limit, chunk)


def matrixDistanceRows(
    matrix: csr_matrix, sources: Sequence[int], limit: Optional[int] = None, chunk: int = 256
) -> Iterator[Tuple[int, np.ndarray]]:
    """distanceRows over an explicit symmetric adjacency matrix"""
    sources = list(sources)
    for start in range(0, len(sources), chunk):
        block = sources[start : start + chunk]
        rows = dijkstra(
            matrix,
            directed=False,
            indices=block,
            unweighted=True,
            limit=np.inf if limit is None else float(limit),
        )
        rows = np.atleast_2d(rows)
        for source, row in zip(block, rows):
            yield source, row


def withinDistance(graph: FiniteGraph, sources: Sequence[int], limit: int) -> np.ndarray:
    """Mask of vertices at distance <= limit from some source"""
    sources = np.asarray(sources, dtype=np.int64)
    if not sources.size:
        return np.zeros(graph.numVertices(), dtype=bool)
    reach = dijkstra(
        graph.csr(),
        directed=False,
        indices=sources,
        unweighted=True,
        limit=float(limit),
        min_only=True,
    )
    return reach <= limit


def distance(graph: FiniteGraph, u: VertexId, v: VertexId) -> Optional[int]:
    """Shortest-path distance inside the finite graph, None when unreachable"""
    source = graph.index(u)
    target = graph.index(v)
    if source == target:
        return 0
    return bfsDistances(graph, source).get(target)


def _asVertexMask(graph: FiniteGraph, openSet: Union[np.ndarray, Callable, Sequence[bool]]) -> np.ndarray:
    if callable(openSet):
        return np.fromiter(
            (bool(openSet(v)) for v in graph.vertices), dtype=bool, count=graph.numVertices()
        )
    mask = np.asarray(openSet, dtype=bool)
    if mask.shape != (graph.numVertices(),):
        raise ValueError("site mask length does not match vertex count")
    return mask


def _asEdgeMask(graph: FiniteGraph, openSet: Union[np.ndarray, Callable, Sequence[bool]]) -> np.ndarray:
    edgeU, edgeV = graph.edgeArrays()
    if callable(openSet):
        return np.fromiter(
            (bool(openSet(graph.vertices[i], graph.vertices[j])) for i, j in zip(edgeU, edgeV)),
            dtype=bool,
            count=len(edgeU),
        )
    mask = np.asarray(openSet, dtype=bool)
    if mask.shape != edgeU.shape:
        raise ValueError("bond mask length does not match edge count")
    return mask


def componentLabels(numVertices: int, edgeU: np.ndarray, edgeV: np.ndarray) -> np.ndarray:
    """Connected-component label per vertex for the graph spanned by the given edges"""
    matrix = csr_matrix(
        (np.ones(len(edgeU), dtype=np.int8), (edgeU, edgeV)), shape=(numVertices, numVertices)
    )
    _, labels = connected_components(matrix, directed=False)
    return labels


def clusterLabels(graph: FiniteGraph, openSet, mode: str = SITE) -> np.ndarray:
    """Component label per vertex; closed vertices get -1 in site mode"""
    edgeU, edgeV = graph.edgeArrays()
    if mode == SITE:
        siteMask = _asVertexMask(graph, openSet)
        keep = siteMask[edgeU] & siteMask[edgeV]
        labels = componentLabels(graph.numVertices(), edgeU[keep], edgeV[keep])
        labels[~siteMask] = -1
        return labels
    if mode == BOND:
        bondMask = _asEdgeMask(graph, openSet)
        return componentLabels(graph.numVertices(), edgeU[bondMask], edgeV[bondMask])
    raise ValueError(f"unknown percolation mode {mode!r}")


def clusters(graph: FiniteGraph, openSet, mode: str = SITE) -> List[List[int]]:
    """Partition of open vertices (site) or all vertices (bond) into components"""
    labels = clusterLabels(graph, openSet, mode)
    groups: Dict[int, List[int]] = {}
    for i, label in enumerate(labels.tolist()):
        if label >= 0:
            groups.setdefault(label, []).append(i)
    return sorted(groups.values(), key=lambda members: members[0])
