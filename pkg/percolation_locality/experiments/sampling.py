#!/usr/bin/env python3
"""
Monte-Carlo experiments - E_n scans, renormalisation and spanning thresholds
"""

import logging
from typing import Dict, List, Optional, Tuple

from ..cayley import FREE_ABELIAN, HEISENBERG
from ..config import ANY_GRAPHS, asPositiveInt, asProbability, choiceParam, floatParam, intParam, listParam
from ..errors import ConfigError, ConvergenceError
from ..graph_core import BOND, SITE
from ..nets import Net, fiberNet, z2LatticeNet
from ..percolation import (
    blockSeparation,
    estimateEventProb,
    estimatePc,
    independenceRadiusCheck,
    renormalize,
    sample,
)
from . import ExperimentBase, ExperimentResult

logger = logging.getLogger(__name__)

MODES = (SITE, BOND)


def buildBlockNet(spec, n: int, C: Optional[int], window) -> Tuple[Net, int]:
    """Net at separation ceil(n/4C) matching the renormalisation scale n

    Z^2 generating sets get lattice nets (C = 1), Heisenberg specs fiber nets (C = 2);
    C = None picks that natural value.
    """
    if spec.family == FREE_ABELIAN and spec.dim == 2:
        natural = 1
        build = lambda a: z2LatticeNet(spec, a, window)  # noqa: E731
    elif spec.family == HEISENBERG:
        natural = 2
        build = lambda a: fiberNet(spec, a, window)  # noqa: E731
    else:
        raise ConfigError("block nets are built for Z^2 and Heisenberg graphs", field="graph")
    C = natural if C is None else C
    if C != natural:
        raise ConfigError(f"this graph's nets have C = {natural}", field="params.C")
    return build(blockSeparation(n, C)), C


def blockWindowRadius(n: int, extraMargin: int) -> int:
    """Window large enough that points within 10n * extraMargin of the root are determinate"""
    return 10 * n * (1 + extraMargin)


class EnScanExperiment(ExperimentBase):
    kind = "en-scan"
    graphRoles = (ANY_GRAPHS,)
    requiredParams = ("p", "n", "samples")
    optionalParams = {"mode": SITE}

    def run(self, config, context) -> ExperimentResult:
        ps = listParam(config, "p", asProbability)
        ns = listParam(config, "n", asPositiveInt)
        samples = intParam(config, "samples", minimum=1)
        mode = choiceParam(config, "mode", MODES)
        rows: List[Dict] = []
        for name, entry in config.graphs.items():
            oracle = self.oracleFor(entry, context)
            for p in ps:
                for n in ns:
                    estimate = estimateEventProb(oracle, p, n, samples, config.seed, mode, config.threads)
                    rows.append({
                        "graph": name, "p": p, "n": n, "samples": samples, "p_hat": estimate.pHat,
                        "ci_lo": estimate.ciLow, "ci_hi": estimate.ciHigh, "seed": config.seed,
                    })
        artifacts = self.emit(config, "en-scan", rows, "en-scan", plotKind="line")
        best = max(rows, key=lambda row: row["p_hat"])
        summary = {"rows": len(rows), "max p_hat": f"{best['p_hat']:.4f} (p={best['p']}, n={best['n']})"}
        return ExperimentResult(self.kind, artifacts, True, summary, {"seed": config.seed})


class RenormExperiment(ExperimentBase):
    kind = "renorm"
    requiredParams = ("p", "n")
    optionalParams = {"C": 0, "mode": SITE, "extra_margin": 1, "stream": 0}

    def run(self, config, context) -> ExperimentResult:
        p = floatParam(config, "p")
        n = intParam(config, "n", minimum=1)
        mode = choiceParam(config, "mode", MODES)
        C = intParam(config, "C") or None
        oracle = self.oracleFor(config.graph(), context)
        window = oracle.getBall(blockWindowRadius(n, intParam(config, "extra_margin")))
        net, C = buildBlockNet(oracle.spec, n, C, window)

        stream = intParam(config, "stream")
        omega = sample(window, mode, p, config.seed, stream)
        process = renormalize(omega, net, n, C, config.threads)
        independent = independenceRadiusCheck(net, n)

        rows = [
            {"point": k, "vertex": net.host.vertices[point], "eta": value}
            for k, (point, value) in enumerate(zip(net.points, process.eta))
        ]
        artifacts = self.emit(config, "renorm", rows, "renorm")
        artifacts.append(self.writeText(config, "renorm-net.fixture", net.toFixture()))
        summary = {
            "graph": oracle.label, "n": n, "a": net.a, "points": net.numPoints(),
            "determinate": len(process.determinate()), "eta open": len(process.openPositions()),
            "independence radius": "certified" if independent else "FAILED",
        }
        return ExperimentResult(self.kind, artifacts, independent, summary, {"seed": config.seed, "stream": stream})


class PcEstimateExperiment(ExperimentBase):
    kind = "pc-estimate"
    graphRoles = (ANY_GRAPHS,)
    requiredParams = ("trials", "region_scale")
    optionalParams = {"mode": SITE, "tolerance": 0.01, "bootstrap": 1000}

    def run(self, config, context) -> ExperimentResult:
        trials = intParam(config, "trials", minimum=1)
        scale = intParam(config, "region_scale", minimum=1)
        mode = choiceParam(config, "mode", MODES)
        tolerance = floatParam(config, "tolerance", 1e-6, 1.0)
        bootstrap = intParam(config, "bootstrap")

        rows, curveRows = [], []
        converged = True
        for name, entry in config.graphs.items():
            oracle = self.oracleFor(entry, context)
            row = {"graph": name, "mode": mode, "region_scale": scale, "trials": trials, "seed": config.seed}
            try:
                estimate = estimatePc(
                    oracle, trials, scale, config.seed, mode, config.threads,
                    tolerance=tolerance, bootstrap=bootstrap,
                )
                row.update({"p_c_hat": estimate.pcHat, "ci_lo": estimate.ciLow, "ci_hi": estimate.ciHigh})
                curve = estimate.curve
            except ConvergenceError as e:
                logger.error("%s", e)
                converged = False
                row.update({"p_c_hat": None, "ci_lo": None, "ci_hi": None})
                curve = e.curve
            rows.append(row)
            curveRows.extend({"graph": name, "p": p, "spanning_fraction": f} for p, f in curve)

        artifacts = self.emit(config, "pc-estimate", rows, "pc-estimate")
        artifacts += self.emit(config, "pc-curve", curveRows, "pc-curve", plotKind="line")
        summary = {
            row["graph"]: "no crossing" if row["p_c_hat"] is None else f"{row['p_c_hat']:.4f}"
            for row in rows
        }
        return ExperimentResult(self.kind, artifacts, converged, summary, {"seed": config.seed})
