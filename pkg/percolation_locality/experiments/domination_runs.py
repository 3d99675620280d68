#!/usr/bin/env python3
"""
Domination experiment - exact laws on fixture graphs against a product reference
"""

import logging
from typing import Dict, List

from ..config import floatParam, intParam
from ..domination import (
    certifiedRange,
    dominatesExact,
    estimateQThreshold,
    exactLaw,
    reductionCheck,
    worstIncreasingEvent,
)
from ..errors import ConfigError
from ..processes import ProductProcess, defaultAdversaries, parseProcess
from . import ExperimentBase, ExperimentResult

logger = logging.getLogger(__name__)

THRESHOLD_KEYS = {"k", "D", "resolution"}


class DominateExperiment(ExperimentBase):
    kind = "dominate"
    graphRoles = ()
    requiredParams = ("graphs", "processes")
    optionalParams = {"reference": 0.75, "k_max": 2, "threshold": {}}

    def _fixtures(self, config, context) -> List:
        names = config.params["graphs"]
        if not isinstance(names, list) or not names:
            raise ConfigError("expected a non-empty list of fixture names", field="params.graphs")
        return [context.catalog.getSmallGraph(str(name)) for name in names]

    def _processes(self, config) -> List:
        tables = config.params["processes"]
        if not isinstance(tables, list) or not tables:
            raise ConfigError("expected a non-empty list of process tables", field="params.processes")
        return [parseProcess(table, f"params.processes[{i}]") for i, table in enumerate(tables)]

    def run(self, config, context) -> ExperimentResult:
        graphs = self._fixtures(config, context)
        processes = self._processes(config)
        reference = ProductProcess(floatParam(config, "reference"))
        kMax = intParam(config, "k_max")

        rows: List[Dict] = []
        summary: Dict = {"reference": reference.name}
        reductionsOk = True
        for graph in graphs:
            target = exactLaw(reference, graph)
            for process in processes:
                law = exactLaw(process, graph)
                kCert = certifiedRange(law)
                dominates = dominatesExact(law, target)
                rows.append({
                    "graph": graph.label,
                    "spec": process.name,
                    "k_cert": kCert,
                    "marginal": min(law.marginals()),
                    "dominates_3_4": dominates,
                })
                if not dominates:
                    witness = worstIncreasingEvent(law, target)
                    summary[f"{process.name} on {graph.label}"] = (
                        f"fails on up-set of size {len(witness.event)}, gap {float(witness.gap):.6g}"
                    )
                for k in range(max(1, kCert), kMax + 1):
                    if not reductionCheck(law, k):
                        logger.error("%s on %s: graph-power reduction fails at k=%d", process.name, graph.label, k)
                        reductionsOk = False
        artifacts = self.emit(config, "dominate", rows, "dominate")

        threshold = config.params["threshold"]
        if threshold:
            if not isinstance(threshold, dict) or set(threshold) - THRESHOLD_KEYS:
                raise ConfigError("expects keys k, D and resolution", field="params.threshold")
            k = int(threshold.get("k", 1))
            D = int(threshold.get("D", max(g.maxDegree() for g in graphs)))
            resolution = int(threshold.get("resolution", 128))
            families = defaultAdversaries(k, graphs)
            try:
                result = estimateQThreshold(k, D, families, graphs, resolution)
            except ValueError as e:
                raise ConfigError(str(e), field="params.threshold.D") from None
            artifacts += self.emit(config, "q-threshold", [{
                "k": k, "D": D, "resolution": resolution, "q": result.q,
                "families": " ".join(family.name for family in families),
            }], "q-threshold")
            summary[f"q(k={k}, D={D})"] = f"{result.q} ~ {float(result.q):.4f}"

        summary["laws"] = len(rows)
        summary["dominating"] = sum(1 for row in rows if row["dominates_3_4"])
        return ExperimentResult(self.kind, artifacts, reductionsOk, summary, {"seed": config.seed})
