"""
Experiment runners - one IExperiment per config kind
"""

from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, NamedTuple, Optional

from rich.console import Console

from ..catalog import GraphCatalog
from ..cayley import CayleyOracle
from ..errors import ConfigError
from ..interfaces import IExperiment
from ..reporting import emitCsv, emitPlot


class ExperimentResult(NamedTuple):
    kind: str
    artifacts: List[str]
    certificatesOk: bool
    summary: Dict[str, Any]
    seeds: Dict[str, int]


class RunContext(NamedTuple):
    catalog: GraphCatalog
    console: Console


class ExperimentBase(IExperiment):
    """Shared artifact helpers"""

    def oracleFor(self, entry, context: RunContext) -> CayleyOracle:
        """Catalog oracles are shared per preset, so their ball caches are reused"""
        if "preset" in entry.table:
            return context.catalog.getOracle(str(entry.table["preset"]))
        return CayleyOracle(entry.spec)

    def emit(
        self,
        config,
        stem: str,
        rows: Iterable[Mapping[str, Any]],
        schema: str,
        plotKind: Optional[str] = None,
    ) -> List[str]:
        """CSV under the output dir, plus an SVG of the same stem when plotting is on"""
        rows = list(rows)
        outDir = config.outDir()
        csvPath = emitCsv(rows, schema, outDir / f"{stem}.csv")
        artifacts = [csvPath.name]
        if plotKind and config.output["plot"] and rows:
            artifacts.append(emitPlot(csvPath, plotKind, outDir / f"{stem}.svg").name)
        return artifacts

    def writeText(self, config, name: str, text: str) -> str:
        path = Path(config.outDir()) / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        return path.name


from .coupling_runs import CoupleExperiment  # noqa: E402
from .domination_runs import DominateExperiment  # noqa: E402
from .geometry import BallExperiment, LocalityExperiment, NetExperiment  # noqa: E402
from .pipeline import PipelineExperiment  # noqa: E402
from .sampling import EnScanExperiment, PcEstimateExperiment, RenormExperiment  # noqa: E402

EXPERIMENTS: Dict[str, type] = {
    cls.kind: cls
    for cls in (
        BallExperiment,
        LocalityExperiment,
        NetExperiment,
        EnScanExperiment,
        RenormExperiment,
        DominateExperiment,
        CoupleExperiment,
        PcEstimateExperiment,
        PipelineExperiment,
    )
}

__all__ = [
    "ExperimentResult",
    "RunContext",
    "ExperimentBase",
    "EXPERIMENTS",
    "getExperiment",
    "runExperiment",
]


def getExperiment(kind: str) -> IExperiment:
    if kind not in EXPERIMENTS:
        raise ConfigError(f"unknown kind {kind!r}; known: {', '.join(EXPERIMENTS)}", field="kind")
    return EXPERIMENTS[kind]()


def runExperiment(config, context: Optional[RunContext] = None) -> ExperimentResult:
    context = context or RunContext(GraphCatalog(), Console())
    return getExperiment(config.kind).run(config, context)
