#!/usr/bin/env python3
"""
Coupled explorations along neighbour-lifting maps

A LiftMap pi: source -> target lifts neighbours: for every u and every
neighbour y of pi(u) some neighbour v of u has pi(v) = y. The base exploration
runs on the target; the lifted one shadows it on the source with the same
bits, so the lifted open set is at least as large as the base cluster.
"""

import logging
from fractions import Fraction
from itertools import product as cartesian
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

from . import rng
from .cayley import reduce, width
from .domination import toFraction
from .errors import LiftExtensionError, ResourceLimitError
from .graph_core import FiniteGraph
from .interfaces import IGraphOracle, VertexId

logger = logging.getLogger(__name__)

SMALLEST = "smallest"
LARGEST = "largest"
MAX_HORIZON = 12


class LiftMap(NamedTuple):
    source: IGraphOracle
    target: IGraphOracle
    pi: Callable[[VertexId], VertexId]


class LiftReport(NamedTuple):
    liftHolds: bool
    surjective: bool
    failures: List[Tuple[VertexId, VertexId]]


class ExplorationState(NamedTuple):
    openSet: List[VertexId]
    closedSet: List[VertexId]
    step: int


class TraceRow(NamedTuple):
    step: int
    baseOpen: int
    baseClosed: int
    liftedOpen: int
    liftedClosed: int
    sizesEqual: bool


class CoupledExploration(NamedTuple):
    baseState: ExplorationState
    liftedState: ExplorationState
    terminated: bool
    trace: List[TraceRow]
    liftOf: Dict[VertexId, VertexId]


class MarginalLawReport(NamedTuple):
    baseLawOk: bool
    liftedLawOk: bool
    sizesEqual: bool
    liftedConnected: bool
    bijective: bool
    baseSizeLaw: Dict[int, Fraction]
    liftedSizeLaw: Dict[int, Fraction]
    tails: List[Tuple[int, Fraction, Fraction]]

    def passed(self) -> bool:
        return (
            self.baseLawOk
            and self.liftedLawOk
            and self.sizesEqual
            and self.liftedConnected
            and self.bijective
            and all(lifted >= base for _, base, lifted in self.tails)
        )


def checkLiftProperty(lift: LiftMap, sourceWindow: FiniteGraph, targetWindow: FiniteGraph) -> LiftReport:
    """Neighbour lifting on window vertices away from the boundary, plus surjectivity"""
    interior = sourceWindow.interiorMask(1)
    failures = []
    for index, u in enumerate(sourceWindow.vertices):
        if not interior[index]:
            continue
        images = {tuple(lift.pi(v)) for v in lift.source.getNeighbors(u)}
        for y in lift.target.getNeighbors(tuple(lift.pi(u))):
            if y not in images:
                failures.append((u, y))
    covered = {tuple(lift.pi(u)) for u in sourceWindow.vertices}
    surjective = all(y in covered for y in targetWindow.vertices)
    return LiftReport(not failures, surjective, failures)


def coordinateLift(source, target) -> LiftMap:
    """pi keeps the leading coordinates of a source element, zero-padded and reduced in the target group"""
    targetWidth = width(target.spec)

    def pi(vertex: VertexId) -> VertexId:
        head = tuple(vertex[:targetWidth])
        return reduce(target.spec, head + (0,) * (targetWidth - len(head)))

    return LiftMap(source, target, pi)


class _Side:
    """Revealed open and closed vertices of one exploration"""

    def __init__(self):
        self.openSet: List[VertexId] = []
        self.closedSet: List[VertexId] = []
        self.revealed = set()

    def reveal(self, vertex: VertexId, isOpen: bool) -> None:
        self.revealed.add(vertex)
        (self.openSet if isOpen else self.closedSet).append(vertex)

    def state(self, step: int) -> ExplorationState:
        return ExplorationState(list(self.openSet), list(self.closedSet), step)


def _nextEdgeSmallest(target: IGraphOracle, base: _Side, cursor: List[int]) -> Optional[Tuple[VertexId, VertexId]]:
    # cursor = [open index, neighbour index]; revealed sets only grow, so it never moves back
    while cursor[0] < len(base.openSet):
        x = base.openSet[cursor[0]]
        nbrs = target.getNeighbors(x)
        while cursor[1] < len(nbrs):
            y = nbrs[cursor[1]]
            cursor[1] += 1
            if y not in base.revealed:
                return x, y
        cursor[0] += 1
        cursor[1] = 0
    return None


def _nextEdgeLargest(target: IGraphOracle, base: _Side) -> Optional[Tuple[VertexId, VertexId]]:
    for x in reversed(base.openSet):
        for y in reversed(target.getNeighbors(x)):
            if y not in base.revealed:
                return x, y
    return None


def _liftNeighbor(lift: LiftMap, lifted: VertexId, y: VertexId, rule: str) -> VertexId:
    candidates = [v for v in lift.source.getNeighbors(lifted) if tuple(lift.pi(v)) == y]
    if not candidates:
        raise LiftExtensionError(f"no neighbour of {lifted} lifts {y}")
    return candidates[0] if rule == SMALLEST else candidates[-1]


def _explore(
    lift: LiftMap,
    baseRoot: VertexId,
    liftedRoot: VertexId,
    bits: Sequence[bool],
    maxSteps: int,
    rule: str = SMALLEST,
) -> CoupledExploration:
    if rule not in (SMALLEST, LARGEST):
        raise ValueError(f"unknown frontier rule {rule!r}")
    baseRoot, liftedRoot = tuple(baseRoot), tuple(liftedRoot)
    if tuple(lift.pi(liftedRoot)) != baseRoot:
        raise LiftExtensionError(f"pi({liftedRoot}) is not {baseRoot}")
    base, lifted = _Side(), _Side()
    liftOf: Dict[VertexId, VertexId] = {}
    trace: List[TraceRow] = []
    cursor = [0, 0]

    def record(step: int) -> None:
        trace.append(
            TraceRow(
                step,
                len(base.openSet),
                len(base.closedSet),
                len(lifted.openSet),
                len(lifted.closedSet),
                len(base.openSet) == len(lifted.openSet)
                and len(base.closedSet) == len(lifted.closedSet),
            )
        )

    terminated = False
    step = 0
    if maxSteps >= 1:
        bit = bool(bits[0])
        base.reveal(baseRoot, bit)
        lifted.reveal(liftedRoot, bit)
        liftOf[baseRoot] = liftedRoot
        record(0)
        while True:
            edge = (
                _nextEdgeSmallest(lift.target, base, cursor)
                if rule == SMALLEST
                else _nextEdgeLargest(lift.target, base)
            )
            if edge is None:
                terminated = True
                break
            if step + 1 >= maxSteps:
                break
            step += 1
            x, y = edge
            shadow = _liftNeighbor(lift, liftOf[x], y, rule)
            bit = bool(bits[step])
            base.reveal(y, bit)
            lifted.reveal(shadow, bit)
            liftOf[y] = shadow
            record(step)
    return CoupledExploration(base.state(step), lifted.state(step), terminated, trace, liftOf)


def coupledExploration(
    lift: LiftMap,
    baseRoot: VertexId,
    liftedRoot: VertexId,
    p: float,
    seed: int,
    maxSteps: int,
    rule: str = SMALLEST,
) -> CoupledExploration:
    """Both explorations driven by one Bernoulli(p) stream; reveal k reads draw k"""
    bits = rng.bernoulli(seed, 0, max(maxSteps, 1), p)
    result = _explore(lift, baseRoot, liftedRoot, bits, maxSteps, rule)
    logger.debug(
        "coupled exploration: %d reveals, base cluster %d, terminated=%s",
        result.baseState.step + 1, len(result.baseState.openSet), result.terminated,
    )
    return result


def isConnected(oracle: IGraphOracle, vertices: Sequence[VertexId]) -> bool:
    members = set(vertices)
    if not members:
        return True
    start = next(iter(members))
    seen = {start}
    queue = [start]
    for v in queue:
        for w in oracle.getNeighbors(v):
            if w in members and w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(members)


def _lawMatches(histories: Dict[tuple, Fraction], p: Fraction) -> bool:
    """History masses equal p^open (1-p)^closed, and each vertex is open with conditional probability p"""
    revealedMass: Dict[VertexId, Fraction] = {}
    openMass: Dict[VertexId, Fraction] = {}
    for history, mass in histories.items():
        vertices = [v for v, _ in history]
        if len(set(vertices)) != len(vertices):
            return False
        opened = sum(1 for _, state in history if state)
        if mass != p**opened * (1 - p) ** (len(history) - opened):
            return False
        for v, state in history:
            revealedMass[v] = revealedMass.get(v, Fraction(0)) + mass
            if state:
                openMass[v] = openMass.get(v, Fraction(0)) + mass
    return all(openMass.get(v, Fraction(0)) == p * total for v, total in revealedMass.items())


def marginalLawCheck(
    lift: LiftMap,
    p,
    horizon: int,
    baseRoot: Optional[VertexId] = None,
    liftedRoot: Optional[VertexId] = None,
    rules: Sequence[str] = (SMALLEST, LARGEST),
) -> MarginalLawReport:
    """Enumerate all 2^horizon bit streams with exact weights and audit both explorations"""
    if not 1 <= horizon <= MAX_HORIZON:
        raise ResourceLimitError(f"horizon {horizon} outside 1..{MAX_HORIZON}")
    p = toFraction(p)
    baseRoot = tuple(baseRoot) if baseRoot is not None else lift.target.getRoot()
    liftedRoot = tuple(liftedRoot) if liftedRoot is not None else lift.source.getRoot()

    baseOk = liftedOk = sizesEqual = connected = bijective = True
    baseSizes: Dict[int, Fraction] = {}
    liftedSizes: Dict[int, Fraction] = {}
    for rule in rules:
        baseHistories: Dict[tuple, Fraction] = {}
        liftedHistories: Dict[tuple, Fraction] = {}
        for bits in cartesian((False, True), repeat=horizon):
            ones = sum(bits)
            weight = p**ones * (1 - p) ** (horizon - ones)
            run = _explore(lift, baseRoot, liftedRoot, bits, horizon, rule)
            baseHistory = tuple(_history(run.liftOf, bits, lifted=False))
            liftedHistory = tuple(_history(run.liftOf, bits, lifted=True))
            baseHistories[baseHistory] = baseHistories.get(baseHistory, Fraction(0)) + weight
            liftedHistories[liftedHistory] = liftedHistories.get(liftedHistory, Fraction(0)) + weight

            baseOpen, liftedOpen = run.baseState.openSet, run.liftedState.openSet
            sizesEqual &= all(row.sizesEqual for row in run.trace)
            connected &= isConnected(lift.source, liftedOpen)
            bijective &= sorted(tuple(lift.pi(v)) for v in liftedOpen) == sorted(baseOpen) and len(
                set(liftedOpen)
            ) == len(liftedOpen)
            bijective &= sorted(tuple(lift.pi(v)) for v in run.liftedState.closedSet) == sorted(
                run.baseState.closedSet
            )
            if rule == rules[0]:
                baseSizes[len(baseOpen)] = baseSizes.get(len(baseOpen), Fraction(0)) + weight
                liftedSizes[len(liftedOpen)] = liftedSizes.get(len(liftedOpen), Fraction(0)) + weight
        baseOk &= _lawMatches(baseHistories, p)
        liftedOk &= _lawMatches(liftedHistories, p)

    tails = []
    for s in range(1, horizon + 1):
        baseTail = sum((m for size, m in baseSizes.items() if size >= s), Fraction(0))
        liftedTail = sum((m for size, m in liftedSizes.items() if size >= s), Fraction(0))
        tails.append((s, baseTail, liftedTail))
    return MarginalLawReport(
        baseOk, liftedOk, sizesEqual, connected, bijective, baseSizes, liftedSizes, tails
    )


def _history(liftOf: Dict[VertexId, VertexId], bits, lifted: bool):
    """Revealed (vertex, state) pairs; liftOf is filled in reveal order"""
    for k, (vertex, shadow) in enumerate(liftOf.items()):
        yield (shadow if lifted else vertex), bool(bits[k])
