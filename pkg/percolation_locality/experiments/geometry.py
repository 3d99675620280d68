#!/usr/bin/env python3
"""
Geometry experiments - balls, locality radii and nets
"""

import logging
from typing import Dict, List

from ..cayley import FREE_ABELIAN, HEISENBERG
from ..config import choiceParam, intParam
from ..errors import ConfigError, NonPolynomialGrowthError
from ..locality import checkGrowthEstimate, degreeBound, growthFit, localityRadius
from ..nets import (
    fiberLiftReport,
    fiberNet,
    homomorphismViolations,
    latticeEmbeddingViolations,
    transportNet,
    verifyNet,
    z2LatticeNet,
)
from . import ExperimentBase, ExperimentResult

logger = logging.getLogger(__name__)

CONSTRUCTIONS = ("auto", "z2", "fiber", "transport")


def _growthRow(name: str, oracle, rMax: int) -> Dict:
    try:
        estimate = growthFit(oracle, rMax)
    except NonPolynomialGrowthError as e:
        logger.warning("%s", e)
        return {"graph": name, "d": None, "c": None, "r_max": rMax, "verified": False}
    verified = checkGrowthEstimate(oracle, estimate)
    return {"graph": name, "d": estimate.d, "c": estimate.c, "r_max": rMax, "verified": verified}


class BallExperiment(ExperimentBase):
    kind = "ball"
    requiredParams = ("radius",)
    optionalParams = {"fixture": False}

    def run(self, config, context) -> ExperimentResult:
        radius = intParam(config, "radius")
        oracle = self.oracleFor(config.graph(), context)
        window = oracle.getBall(radius)
        rows = []
        for r in range(radius + 1):
            prefix = window.ballPrefix(r)
            rows.append({"r": r, "vertices": prefix.numVertices(), "edges": prefix.numEdges()})
        artifacts = self.emit(config, "ball", rows, "ball", plotKind="line")
        if config.params["fixture"]:
            artifacts.append(self.writeText(config, "ball.edges", window.toEdgeList()))
        summary = {"graph": oracle.label, "radius": radius, "vertices": window.numVertices()}
        return ExperimentResult(self.kind, artifacts, True, summary, {"seed": config.seed})


class LocalityExperiment(ExperimentBase):
    kind = "locality"
    graphRoles = ("G", "H")
    requiredParams = ("r_max",)
    optionalParams = {"growth_r_max": 0}

    def run(self, config, context) -> ExperimentResult:
        rMax = intParam(config, "r_max")
        G = self.oracleFor(config.graph("G"), context)
        H = self.oracleFor(config.graph("H"), context)
        result = localityRadius(G, H, rMax)
        rows = [
            {"k": row.k, "ball_size_G": row.ballSizeG, "ball_size_H": row.ballSizeH, "isomorphic": row.isomorphic}
            for row in result.rows
        ]
        artifacts = self.emit(config, "locality", rows, "locality")
        summary = {"G": G.label, "H": H.label, "R": result.display()}
        for role in ("G", "H"):
            preset = config.graph(role).table.get("preset")
            if preset is not None:
                summary[f"p_c < 1 ({role})"] = context.catalog.hasPcBelowOne(str(preset))

        certificatesOk = True
        growthRMax = intParam(config, "growth_r_max")
        if growthRMax:
            if growthRMax < 4:
                raise ConfigError("growth fits need r_max >= 4", field="params.growth_r_max")
            growthRows = [_growthRow("G", G, growthRMax), _growthRow("H", H, growthRMax)]
            artifacts += self.emit(config, "growth", growthRows, "growth")
            certificatesOk = all(row["verified"] for row in growthRows)
        return ExperimentResult(self.kind, artifacts, certificatesOk, summary, {"seed": config.seed})


class NetExperiment(ExperimentBase):
    kind = "net"
    requiredParams = ("a", "window")
    optionalParams = {"construction": "auto", "target": "", "A": 1, "growth_r_max": 0}

    def _construction(self, config, spec) -> str:
        construction = choiceParam(config, "construction", CONSTRUCTIONS)
        if construction != "auto":
            return construction
        if spec.family == HEISENBERG:
            return "fiber"
        return "z2"

    def run(self, config, context) -> ExperimentResult:
        a = intParam(config, "a", minimum=1)
        radius = intParam(config, "window", minimum=1)
        entry = config.graph()
        oracle = self.oracleFor(entry, context)
        window = oracle.getBall(radius)
        construction = self._construction(config, oracle.spec)
        summary: Dict = {"graph": oracle.label, "construction": construction}
        extraViolations: List = []

        if construction in ("z2", "transport"):
            if oracle.spec.family != FREE_ABELIAN or oracle.spec.dim != 2:
                raise ConfigError(f"{construction} nets need a generating set of Z^2", field="graph")
            net = z2LatticeNet(oracle.spec, a, window)
            extraViolations = latticeEmbeddingViolations(net)
            summary["lattice embedding violations"] = len(extraViolations)
        else:
            net = fiberNet(oracle.spec, a, window)
            liftReport = fiberLiftReport(net)
            summary["fiber projection lifts neighbours"] = liftReport.liftHolds
            extraViolations = liftReport.failures

        if construction == "transport":
            target = str(config.params["target"])
            if not target:
                raise ConfigError("transport needs a target preset", field="params.target")
            A = intParam(config, "A", minimum=1)
            try:
                targetOracle = context.catalog.getOracle(target)
            except ConfigError as e:
                raise ConfigError(e.message, field="params.target") from None
            gWindow = targetOracle.getBall(radius)
            width = len(targetOracle.getRoot())
            net = transportNet(net, lambda x: tuple(x) + (0,) * (width - len(x)), A, gWindow)
            extraViolations = homomorphismViolations(net)
            summary["homomorphism violations"] = len(extraViolations)

        report = verifyNet(net)
        rows = [{
            "a": net.a,
            "b": net.b,
            "n_points": net.numPoints(),
            "max_degree": report.maxDegree,
            "separated": report.separated,
            "dense": report.denseOnInterior,
            "violations": len(report.distanceBoundViolations),
        }]
        artifacts = self.emit(config, "net", rows, "net")
        artifacts.append(self.writeText(config, "net.fixture", net.toFixture()))
        if report.unguardedViolations:
            u, v, dNet, dHost = report.unguardedViolations[0]
            summary["unguarded bound witness"] = f"{u} {v} d_net={dNet} d_host={dHost}"

        certificatesOk = report.passed() and not extraViolations
        growthRMax = intParam(config, "growth_r_max")
        if growthRMax:
            estimate = growthFit(oracle, growthRMax)
            bound = degreeBound(estimate.c, max(1, net.b // net.a), estimate.d)
            summary["degree bound"] = bound
            certificatesOk = certificatesOk and report.maxDegree <= bound
        summary.update({
            "points": net.numPoints(),
            "net-graph edges": net.numNetEdges(),
            "max degree": report.maxDegree,
            "passed": report.passed(),
        })
        return ExperimentResult(self.kind, artifacts, certificatesOk, summary, {"seed": config.seed})
