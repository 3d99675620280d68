#!/usr/bin/env python3
"""
Coupling experiment - lifted explorations along coordinate projections
"""

import logging

from .. import rng
from ..config import choiceParam, floatParam, intParam
from ..monotonicity import (
    LARGEST,
    SMALLEST,
    checkLiftProperty,
    coordinateLift,
    coupledExploration,
    marginalLawCheck,
)
from . import ExperimentBase, ExperimentResult

logger = logging.getLogger(__name__)

LIFT_CHECK_RADIUS = 4


class CoupleExperiment(ExperimentBase):
    kind = "couple"
    graphRoles = ("source", "target")
    requiredParams = ("p", "max_steps")
    optionalParams = {"runs": 1, "rule": SMALLEST, "horizon": 0}

    def run(self, config, context) -> ExperimentResult:
        p = floatParam(config, "p")
        maxSteps = intParam(config, "max_steps", minimum=1)
        runs = intParam(config, "runs", minimum=1)
        rule = choiceParam(config, "rule", (SMALLEST, LARGEST))
        horizon = intParam(config, "horizon")
        source = self.oracleFor(config.graph("source"), context)
        target = self.oracleFor(config.graph("target"), context)
        lift = coordinateLift(source, target)

        liftReport = checkLiftProperty(
            lift, source.getBall(LIFT_CHECK_RADIUS + 1), target.getBall(LIFT_CHECK_RADIUS)
        )
        summary = {
            "lift": f"{source.label} -> {target.label}",
            "lifts neighbours": liftReport.liftHolds,
            "surjective": liftReport.surjective,
        }
        if not liftReport.liftHolds:
            u, y = liftReport.failures[0]
            summary["lift failure"] = f"no neighbour of {u} maps to {y}"
            return ExperimentResult(self.kind, [], False, summary, {"seed": config.seed})

        sizesEqual = True
        firstTrace = []
        terminated = 0
        for k in range(runs):
            seed = (config.seed + k) & rng.MASK64
            result = coupledExploration(lift, target.getRoot(), source.getRoot(), p, seed, maxSteps, rule)
            sizesEqual &= all(row.sizesEqual for row in result.trace)
            terminated += result.terminated
            if k == 0:
                firstTrace = result.trace
        rows = [
            {
                "step": row.step, "base_open": row.baseOpen, "base_closed": row.baseClosed,
                "lifted_open": row.liftedOpen, "lifted_closed": row.liftedClosed,
                "sizes_equal": row.sizesEqual,
            }
            for row in firstTrace
        ]
        artifacts = self.emit(config, "couple", rows, "couple", plotKind="line")
        summary.update({"runs": runs, "terminated": terminated, "sizes equal every step": sizesEqual})

        certificatesOk = sizesEqual
        if horizon:
            report = marginalLawCheck(lift, p, horizon)
            lawRows = [{"s": s, "base_tail": base, "lifted_tail": lifted} for s, base, lifted in report.tails]
            artifacts += self.emit(config, "couple-law", lawRows, "couple-law", plotKind="line")
            summary["exact law check"] = "passed" if report.passed() else "FAILED"
            certificatesOk = certificatesOk and report.passed()
        seeds = {"seed": config.seed, "runs": runs}
        return ExperimentResult(self.kind, artifacts, certificatesOk, summary, seeds)
