#!/usr/bin/env python3
"""
Locality pipeline - pick the block scale, build and certify a net, renormalise, look for crossings

Conclusions about eta are only reported when every structural certificate
holds: net verification, independence radius and boundary margins.
"""

import logging
from typing import Dict, List, Optional, Tuple

from .. import rng
from ..config import asPositiveInt, choiceParam, floatParam, intParam, listParam
from ..errors import MarginError
from ..graph_core import SITE
from ..locality import degreeBound, growthFit
from ..nets import verifyNet
from ..percolation import (
    estimateEventProb,
    etaCrossing,
    extractHostPath,
    independenceRadiusCheck,
    isOpenHostPath,
    renormalize,
    sample,
)
from . import ExperimentBase, ExperimentResult
from .sampling import MODES, blockWindowRadius, buildBlockNet

logger = logging.getLogger(__name__)

# Stream of the single window configuration; E_n estimation uses streams 0..samples-1
WINDOW_STREAM = rng.MASK64 - 1


class PipelineExperiment(ExperimentBase):
    kind = "locality-pipeline"
    requiredParams = ("p", "q", "candidates")
    optionalParams = {"C": 0, "samples": 500, "mode": SITE, "extra_margin": 1, "growth_r_max": 0}

    def _chooseScale(self, config, oracle, p: float, q: float, mode: str) -> Tuple[Optional[int], List[Dict]]:
        """First candidate n with estimated P(E_n) >= q"""
        samples = intParam(config, "samples", minimum=1)
        rows = []
        for n in sorted(listParam(config, "candidates", asPositiveInt)):
            estimate = estimateEventProb(oracle, p, n, samples, config.seed, mode, config.threads)
            rows.append({
                "graph": "graph", "p": p, "n": n, "samples": samples, "p_hat": estimate.pHat,
                "ci_lo": estimate.ciLow, "ci_hi": estimate.ciHigh, "seed": config.seed,
            })
            if estimate.pHat >= q:
                logger.info("chose n=%d with P(E_n) ~ %.4f >= q=%.4f", n, estimate.pHat, q)
                return n, rows
        return None, rows

    def run(self, config, context) -> ExperimentResult:
        p = floatParam(config, "p")
        q = floatParam(config, "q")
        mode = choiceParam(config, "mode", MODES)
        oracle = self.oracleFor(config.graph(), context)
        seeds = {"seed": config.seed, "window stream": WINDOW_STREAM}

        n, scanRows = self._chooseScale(config, oracle, p, q, mode)
        artifacts = self.emit(config, "pipeline-en-scan", scanRows, "en-scan")
        summary: Dict = {"graph": oracle.label, "p": p, "q": q}
        if n is None:
            summary["conclusion"] = "no candidate n reaches q"
            return ExperimentResult(self.kind, artifacts, False, summary, seeds)

        window = oracle.getBall(blockWindowRadius(n, intParam(config, "extra_margin")))
        net, C = buildBlockNet(oracle.spec, n, intParam(config, "C") or None, window)
        report = verifyNet(net)
        certificates = {"net": report.passed()}

        bound = None
        growthRMax = intParam(config, "growth_r_max")
        if growthRMax:
            estimate = growthFit(oracle, growthRMax)
            bound = degreeBound(estimate.c, C, estimate.d)
            certificates["degree bound"] = report.maxDegree <= bound

        omega = sample(window, mode, p, config.seed, WINDOW_STREAM)
        process = None
        try:
            process = renormalize(omega, net, n, C, config.threads)
            certificates["margin"] = True
        except MarginError as e:
            logger.error("%s", e)
            certificates["margin"] = False
        certificates["independence"] = independenceRadiusCheck(net, n)

        certified = all(certificates.values())
        summary.update({"n": n, "a": net.a, "certificates": ", ".join(
            f"{name}={'ok' if ok else 'FAILED'}" for name, ok in certificates.items()
        )})
        row = {
            "graph": oracle.label, "p": p, "n": n, "a": net.a, "q": q,
            "p_hat": scanRows[-1]["p_hat"], "net_points": net.numPoints(),
            "max_degree": report.maxDegree, "degree_bound": bound,
            "determinate": None, "eta_open": None, "crosses": None,
            "host_path_length": None, "certificates_ok": certified,
        }
        if certified:
            crossing = etaCrossing(process)
            row.update({
                "determinate": len(process.determinate()),
                "eta_open": len(process.openPositions()),
                "crosses": crossing.crosses,
            })
            summary["eta crosses"] = crossing.crosses
            if crossing.crosses:
                hostPath = extractHostPath(omega, process, crossing.path)
                glued = hostPath is not None and isOpenHostPath(omega, hostPath)
                row["host_path_length"] = len(hostPath) if hostPath else None
                summary["open host path"] = glued
                certified = glued
                row["certificates_ok"] = glued
        else:
            summary["conclusion"] = "withheld: a structural certificate failed"
        artifacts += self.emit(config, "pipeline", [row], "pipeline")
        artifacts.append(self.writeText(config, "pipeline-net.fixture", net.toFixture()))
        return ExperimentResult(self.kind, artifacts, certified, summary, seeds)
