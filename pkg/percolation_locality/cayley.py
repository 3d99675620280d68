#!/usr/bin/env python3
"""
Cayley graphs of the concrete group families - free abelian groups, the
discrete Heisenberg group, cyclic groups and direct products of these

Group elements are integer coordinate tuples. The Heisenberg element (x, y, z)
is the unipotent matrix with x, z on the first row and y in the middle, so
(x, y, z)(x', y', z') = (x + x', y + y', z + z' + x*y').
"""

import logging
from math import gcd
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .cache_mixin import CacheMixin
from .errors import (
    CapExceededError,
    ConfigError,
    DegenerateSetError,
    GenerationError,
    NoQuotientError,
)
from .graph_core import FiniteGraph, ball
from .interfaces import IGraphOracle, VertexId

logger = logging.getLogger(__name__)

FREE_ABELIAN = "free-abelian"
HEISENBERG = "heisenberg"
CYCLIC = "cyclic"
PRODUCT = "product"
FAMILIES = (FREE_ABELIAN, HEISENBERG, CYCLIC, PRODUCT)

GENERATION_RADIUS = 32


class GroupSpec(NamedTuple):
    """Group family plus a generating list of coordinate tuples"""

    family: str
    generators: Tuple[VertexId, ...] = ()
    dim: int = 0
    modulus: int = 0
    factors: Tuple["GroupSpec", ...] = ()


class SelectedPair(NamedTuple):
    u: Tuple[int, int]
    v: Tuple[int, int]


class UvViolation(NamedTuple):
    m: int
    n: int
    norm: int


class QuotientMap(NamedTuple):
    """Coordinate projection onto Z^2 that is a surjective homomorphism"""

    source: GroupSpec
    target: GroupSpec
    coordinates: Tuple[int, int]

    def project(self, element: VertexId) -> Tuple[int, int]:
        return (element[self.coordinates[0]], element[self.coordinates[1]])


# -- group arithmetic -------------------------------------------------------


def width(spec: GroupSpec) -> int:
    """Number of coordinates of an element"""
    if spec.family == FREE_ABELIAN:
        return spec.dim
    if spec.family == HEISENBERG:
        return 3
    if spec.family == CYCLIC:
        return 1
    return sum(width(f) for f in spec.factors)


def identity(spec: GroupSpec) -> VertexId:
    return (0,) * width(spec)


def reduce(spec: GroupSpec, element: Sequence[int]) -> VertexId:
    """Canonical coordinates (cyclic coordinates reduced mod k)"""
    if spec.family == CYCLIC:
        return (int(element[0]) % spec.modulus,)
    if spec.family == PRODUCT:
        out: List[int] = []
        offset = 0
        for factor in spec.factors:
            w = width(factor)
            out.extend(reduce(factor, element[offset : offset + w]))
            offset += w
        return tuple(out)
    return tuple(int(c) for c in element)


def multiply(spec: GroupSpec, g: VertexId, h: VertexId) -> VertexId:
    """Group law of the family"""
    family = spec.family
    if family == FREE_ABELIAN:
        return tuple(a + b for a, b in zip(g, h))
    if family == HEISENBERG:
        return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])
    if family == CYCLIC:
        return ((g[0] + h[0]) % spec.modulus,)
    out: List[int] = []
    offset = 0
    for factor in spec.factors:
        w = width(factor)
        out.extend(multiply(factor, g[offset : offset + w], h[offset : offset + w]))
        offset += w
    return tuple(out)


def inverse(spec: GroupSpec, g: VertexId) -> VertexId:
    family = spec.family
    if family == FREE_ABELIAN:
        return tuple(-a for a in g)
    if family == HEISENBERG:
        return (-g[0], -g[1], g[0] * g[1] - g[2])
    if family == CYCLIC:
        return ((-g[0]) % spec.modulus,)
    out: List[int] = []
    offset = 0
    for factor in spec.factors:
        w = width(factor)
        out.extend(inverse(factor, g[offset : offset + w]))
        offset += w
    return tuple(out)


def basis(spec: GroupSpec) -> List[VertexId]:
    """Elements whose presence in a ball witnesses generation"""
    if spec.family == FREE_ABELIAN:
        return [tuple(1 if i == j else 0 for j in range(spec.dim)) for i in range(spec.dim)]
    if spec.family == HEISENBERG:
        return [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    if spec.family == CYCLIC:
        return [reduce(spec, (1,))]
    elements = []
    total = width(spec)
    offset = 0
    for factor in spec.factors:
        w = width(factor)
        for element in basis(factor):
            padded = [0] * total
            padded[offset : offset + w] = element
            elements.append(tuple(padded))
        offset += w
    return elements


def standardGenerators(spec: GroupSpec) -> Tuple[VertexId, ...]:
    """Standard generators with their inverses, each followed by its inverse"""
    if spec.family == HEISENBERG:
        plain = [(1, 0, 0), (0, 1, 0)]
    elif spec.family == PRODUCT:
        plain = []
        total = width(spec)
        offset = 0
        for factor in spec.factors:
            w = width(factor)
            for element in standardGenerators(factor):
                padded = [0] * total
                padded[offset : offset + w] = element
                plain.append(tuple(padded))
            offset += w
    else:
        plain = basis(spec)
    return _symmetricClosure(spec, plain)


def _symmetricClosure(spec: GroupSpec, elements: Iterable[Sequence[int]]) -> Tuple[VertexId, ...]:
    ident = identity(spec)
    closed: List[VertexId] = []
    seen = set()
    for element in elements:
        g = reduce(spec, element)
        for candidate in (g, inverse(spec, g)):
            if candidate != ident and candidate not in seen:
                seen.add(candidate)
                closed.append(candidate)
    return tuple(closed)


# -- constructors -----------------------------------------------------------


def freeAbelian(dim: int, generators: Optional[Iterable[Sequence[int]]] = None) -> GroupSpec:
    return normalize(GroupSpec(FREE_ABELIAN, tuple(map(tuple, generators or ())), dim=dim))


def heisenberg(generators: Optional[Iterable[Sequence[int]]] = None) -> GroupSpec:
    return normalize(GroupSpec(HEISENBERG, tuple(map(tuple, generators or ()))))


def cyclic(modulus: int) -> GroupSpec:
    return normalize(GroupSpec(CYCLIC, (), modulus=modulus))


def product(*factors: GroupSpec, generators: Optional[Iterable[Sequence[int]]] = None) -> GroupSpec:
    return normalize(
        GroupSpec(PRODUCT, tuple(map(tuple, generators or ())), factors=tuple(factors))
    )


def normalize(spec: GroupSpec) -> GroupSpec:
    """Validate shape, fill standard generators and close under inversion"""
    if spec.family not in FAMILIES:
        raise ConfigError(f"unknown group family {spec.family!r}", field="family")
    if spec.family == FREE_ABELIAN and spec.dim < 1:
        raise ConfigError("free-abelian group needs dim >= 1", field="dim")
    if spec.family == CYCLIC and spec.modulus < 1:
        raise ConfigError("cyclic group needs modulus >= 1", field="modulus")
    if spec.family == PRODUCT and not spec.factors:
        raise ConfigError("product group needs factors", field="factors")

    if not spec.generators:
        return spec._replace(generators=standardGenerators(spec))
    w = width(spec)
    for element in spec.generators:
        if len(element) != w:
            raise ConfigError(
                f"generator {list(element)} has {len(element)} coordinates, expected {w}",
                field="generators",
            )
    return spec._replace(generators=_symmetricClosure(spec, spec.generators))


def describe(spec: GroupSpec) -> str:
    """Short human-readable group name"""
    if spec.family == FREE_ABELIAN:
        return f"Z^{spec.dim}"
    if spec.family == HEISENBERG:
        return "H3(Z)"
    if spec.family == CYCLIC:
        return f"Z/{spec.modulus}"
    return " x ".join(describe(f) for f in spec.factors)


def checkGeneration(spec: GroupSpec, radius: int = GENERATION_RADIUS) -> int:
    """Radius at which every basis element was reached; GenerationError otherwise"""
    ident = identity(spec)
    missing = set(basis(spec)) - {ident}
    if not missing:
        return 0
    seen = {ident}
    frontier = [ident]
    for depth in range(1, radius + 1):
        nextFrontier = []
        for g in frontier:
            for s in spec.generators:
                h = multiply(spec, g, s)
                if h not in seen:
                    seen.add(h)
                    nextFrontier.append(h)
                    missing.discard(h)
        if not missing:
            return depth
        if not nextFrontier:
            break
        frontier = nextFrontier
    raise GenerationError(
        f"generators of {describe(spec)} do not reach {sorted(missing)} within radius {radius}"
    )


class CayleyOracle(CacheMixin, IGraphOracle):
    """Cay(G, S) rooted at the identity, neighbours g*s in generator order"""

    def __init__(self, spec: GroupSpec, verifyGeneration: bool = True):
        super().__init__()
        self.spec = normalize(spec)
        self.label = describe(self.spec)
        if verifyGeneration:
            depth = checkGeneration(self.spec)
            logger.debug("%s generated by %d elements (basis at radius %d)",
                         self.label, len(self.spec.generators), depth)

    def getRoot(self) -> VertexId:
        return identity(self.spec)

    def getNeighbors(self, vertex: VertexId) -> List[VertexId]:
        spec = self.spec
        return [multiply(spec, vertex, s) for s in spec.generators]

    def getDegree(self) -> int:
        return len(self.spec.generators)

    def getBall(self, r: int, vertexCap: Optional[int] = None) -> FiniteGraph:
        """Memoised ball around the identity"""
        return self._cachedCall("getBall", self._computeBall, r, vertexCap)

    def _computeBall(self, r: int, vertexCap: Optional[int]) -> FiniteGraph:
        return ball(self, self.getRoot(), r, vertexCap)

    def __repr__(self) -> str:
        return f"CayleyOracle({self.label}, |S|={len(self.spec.generators)})"


def makeOracle(spec: GroupSpec) -> CayleyOracle:
    return CayleyOracle(spec)


# -- Z^2 word norms and the (u, v) selection --------------------------------


def z2Spec(generators) -> GroupSpec:
    if isinstance(generators, GroupSpec):
        if generators.family != FREE_ABELIAN or generators.dim != 2:
            raise ValueError("expected a generating set of Z^2")
        return normalize(generators)
    return freeAbelian(2, generators)


def wordNorm(generators, target: Sequence[int], radiusCap: int) -> int:
    """Word length of target in Cay(Z^2, S) by breadth-first search"""
    spec = z2Spec(generators)
    target = tuple(target)
    origin = (0, 0)
    if target == origin:
        return 0
    steps = spec.generators
    seen = {origin}
    frontier = [origin]
    for depth in range(1, radiusCap + 1):
        nextFrontier = []
        for x, y in frontier:
            for sx, sy in steps:
                h = (x + sx, y + sy)
                if h == target:
                    return depth
                if h not in seen:
                    seen.add(h)
                    nextFrontier.append(h)
        frontier = nextFrontier
    raise CapExceededError(f"{target} not reached within radius {radiusCap}")


def selectUv(generators) -> SelectedPair:
    """u of maximal Euclidean norm, v maximising the projection orthogonal to u

    Norms compare as squared integers and projections as |det(u, v)|, since
    |u| is fixed once u is chosen. Ties go to the lexicographically largest tuple.
    """
    spec = z2Spec(generators)
    elements = list(spec.generators)
    if not elements:
        raise DegenerateSetError("empty generating set")
    u = max(elements, key=lambda s: (s[0] * s[0] + s[1] * s[1], s))
    v = max(elements, key=lambda s: (abs(u[0] * s[1] - u[1] * s[0]), s))
    if u[0] * v[1] - u[1] * v[0] == 0:
        raise DegenerateSetError(f"generators {elements} are collinear")
    return SelectedPair(u, v)


def verifyUvBounds(generators, u: Sequence[int], v: Sequence[int], window: int = 25) -> List[UvViolation]:
    """Check (|m|+|n|)/3 <= ||m u + n v||_S <= |m|+|n| for |m|, |n| <= window"""
    spec = z2Spec(generators)
    targets: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
    for m in range(-window, window + 1):
        for n in range(-window, window + 1):
            point = (m * u[0] + n * v[0], m * u[1] + n * v[1])
            targets.setdefault(point, []).append((m, n))

    norms = _bfsUntilFound(spec.generators, set(targets), radiusCap=2 * window + 1)
    violations = []
    for point, pairs in targets.items():
        norm = norms.get(point)
        for m, n in pairs:
            total = abs(m) + abs(n)
            if norm is None or not (total <= 3 * norm and norm <= total):
                violations.append(UvViolation(m, n, -1 if norm is None else norm))
    return violations


def _bfsUntilFound(steps, targets, radiusCap: int) -> Dict[Tuple[int, int], int]:
    origin = (0, 0)
    dist = {origin: 0}
    remaining = set(targets) - {origin}
    frontier = [origin]
    depth = 0
    while remaining and frontier and depth < radiusCap:
        depth += 1
        nextFrontier = []
        for x, y in frontier:
            for sx, sy in steps:
                h = (x + sx, y + sy)
                if h not in dist:
                    dist[h] = depth
                    nextFrontier.append(h)
                    remaining.discard(h)
        frontier = nextFrontier
    return {t: dist[t] for t in targets if t in dist}


def generatesZ2(elements: Iterable[Sequence[int]]) -> bool:
    """A subset of Z^2 generates it iff its 2x2 minors have gcd 1"""
    elements = [tuple(e) for e in elements]
    g = 0
    for i, a in enumerate(elements):
        for b in elements[i + 1 :]:
            g = gcd(g, a[0] * b[1] - a[1] * b[0])
    return g == 1


# -- quotients ---------------------------------------------------------------


def _unboundedCoordinates(spec: GroupSpec, offset: int = 0) -> List[int]:
    """Coordinates whose projection onto Z is a homomorphism"""
    if spec.family == FREE_ABELIAN:
        return list(range(offset, offset + spec.dim))
    if spec.family == HEISENBERG:
        return [offset, offset + 1]
    if spec.family == CYCLIC:
        return []
    coords = []
    for factor in spec.factors:
        coords.extend(_unboundedCoordinates(factor, offset))
        offset += width(factor)
    return coords


def quotientMap(spec: GroupSpec) -> QuotientMap:
    """Surjective homomorphism onto Z^2 by coordinate projection"""
    spec = normalize(spec)
    coords = _unboundedCoordinates(spec)
    if len(coords) < 2:
        raise NoQuotientError(f"{describe(spec)} has no coordinate quotient onto Z^2")
    i, j = coords[0], coords[1]
    images = []
    for s in spec.generators:
        image = (s[i], s[j])
        if image != (0, 0) and image not in images:
            images.append(image)
    target = freeAbelian(2, images)
    return QuotientMap(spec, target, (i, j))


# -- config parsing ----------------------------------------------------------

_SPEC_KEYS = {"family", "generators", "dim", "modulus", "factors"}


def parseGroupSpec(data: Dict[str, Any], fieldPrefix: str = "graph") -> GroupSpec:
    """GroupSpec from a config table; generators are auto-symmetrised"""
    unknown = set(data) - _SPEC_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError("unknown key", field=f"{fieldPrefix}.{key}")
    if "family" not in data:
        raise ConfigError("missing required key", field=f"{fieldPrefix}.family")
    family = data["family"]
    generators = data.get("generators") or ()
    try:
        generators = tuple(tuple(int(c) for c in g) for g in generators)
    except (TypeError, ValueError):
        raise ConfigError("generators must be lists of integers",
                          field=f"{fieldPrefix}.generators") from None

    if family == FREE_ABELIAN:
        dim = int(data.get("dim", len(generators[0]) if generators else 0))
        spec = GroupSpec(FREE_ABELIAN, generators, dim=dim)
    elif family == HEISENBERG:
        spec = GroupSpec(HEISENBERG, generators)
    elif family == CYCLIC:
        if "modulus" not in data:
            raise ConfigError("missing required key", field=f"{fieldPrefix}.modulus")
        spec = GroupSpec(CYCLIC, generators, modulus=int(data["modulus"]))
    elif family == PRODUCT:
        factors = data.get("factors")
        if not factors:
            raise ConfigError("missing required key", field=f"{fieldPrefix}.factors")
        spec = GroupSpec(
            PRODUCT,
            generators,
            factors=tuple(
                parseGroupSpec(f, f"{fieldPrefix}.factors[{i}]") for i, f in enumerate(factors)
            ),
        )
    else:
        raise ConfigError(f"unknown family {family!r}", field=f"{fieldPrefix}.family")

    try:
        return normalize(spec)
    except ConfigError as exc:
        raise ConfigError(exc.message, field=f"{fieldPrefix}.{exc.field}") from None
