#!/usr/bin/env python3
"""
perclocal - config-driven experiment runner

Exit status: 0 on success, 1 when a certificate or invariant fails,
2 for configuration errors.
"""

import logging
import sys
from typing import List, Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table
from rich.text import Text

from . import __version__
from .catalog import GraphCatalog
from .config import ExperimentConfig, loadConfig
from .errors import ConfigError, LocalityLabError, SchemaMismatchError
from .experiments import ExperimentResult, RunContext, runExperiment
from .reporting import emitPlot, writeManifest

EXIT_OK = 0
EXIT_CERTIFICATE = 1
EXIT_CONFIG = 2

SUBCOMMANDS = {
    "ball": "ball sizes and an optional edge-list fixture",
    "locality": "locality radius R(G, H) with per-radius rows",
    "net": "build and verify a net on a window",
    "en-scan": "estimate P(E_n) over a grid of p and n",
    "renorm": "renormalised process eta on a sampled window",
    "dominate": "exact domination and dependence certificates on fixture graphs",
    "couple": "coupled explorations along a neighbour-lifting projection",
    "pc-estimate": "spanning-threshold estimate of p_c",
    "pipeline": "end-to-end locality pipeline",
}


class LabRunner:
    def __init__(self, verbose: bool = False, console: Optional[Console] = None):
        self.console = console or Console()
        self.catalog = GraphCatalog()
        self.verbose = verbose
        self._setupLogging()

    def _setupLogging(self) -> None:
        packageLogger = logging.getLogger("percolation_locality")
        packageLogger.handlers = [RichHandler(console=Console(stderr=True), show_path=False)]
        packageLogger.setLevel(logging.DEBUG if self.verbose else logging.INFO)
        packageLogger.propagate = False

    def _createSummaryTable(self, config: ExperimentConfig, result: ExperimentResult, status: int) -> Table:
        """Headline numbers, certificate status and artifacts of one run"""
        table = Table(show_header=True, header_style="bold blue", title=f"perclocal {config.kind}")
        table.add_column("Item", style="cyan", width=28)
        table.add_column("Value", overflow="fold")

        for i, (key, value) in enumerate(result.summary.items()):
            rowStyle = "on grey15" if i % 2 == 0 else None
            table.add_row(str(key), str(value), style=rowStyle)

        verdict = Text("certified", style="green") if status == EXIT_OK else Text("FAILED", style="bold red")
        table.add_row("certificates", verdict)
        table.add_row("seed", str(config.seed))
        table.add_row("artifacts", ", ".join(result.artifacts) or "-")
        return table

    def runConfig(self, config: ExperimentConfig) -> int:
        context = RunContext(self.catalog, self.console)
        try:
            result = runExperiment(config, context)
        except ConfigError:
            raise
        except LocalityLabError as e:
            logging.getLogger(__name__).error("%s: %s", type(e).__name__, e)
            writeManifest(config.outDir(), config.toDict(), {"seed": config.seed}, [], EXIT_CERTIFICATE)
            return EXIT_CERTIFICATE

        status = EXIT_OK if result.certificatesOk else EXIT_CERTIFICATE
        manifest = writeManifest(config.outDir(), config.toDict(), result.seeds, result.artifacts, status)
        self.console.print(self._createSummaryTable(config, result, status))
        self.console.print(f"[dim]manifest: {manifest}[/dim]")
        return status

    def run(
        self,
        command: str,
        configPath: str,
        seed: Optional[int] = None,
        threads: Optional[int] = None,
        out: Optional[str] = None,
    ) -> int:
        """Load, validate and run one config; returns the exit status"""
        try:
            config = loadConfig(configPath, kind=command, seed=seed, threads=threads, out=out)
            self.console.print(
                f"[bold green]perclocal {__version__}: {config.kind}[/bold green] "
                f"[dim](seed {config.seed}, {config.threads} thread(s), out {config.outDir()})[/dim]"
            )
            return self.runConfig(config)
        except ConfigError as e:
            self.console.print(f"[bold red]config error[/bold red] {e}")
            return EXIT_CONFIG

    def plot(self, csvPath: str, kind: str, out: str, x=None, y=None, series=None) -> int:
        try:
            path = emitPlot(csvPath, kind, out, x=x, y=y, series=series)
        except (SchemaMismatchError, OSError) as e:
            self.console.print(f"[bold red]plot error[/bold red] {e}")
            return EXIT_CONFIG
        self.console.print(f"[dim]wrote {path}[/dim]")
        return EXIT_OK


def buildParser():
    import argparse

    parser = argparse.ArgumentParser(
        prog="perclocal", description="Locality of percolation laboratory"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", required=True, help="TOML config, or a run manifest.json")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", "-o", help="output directory")
    common.add_argument("--threads", "-t", type=int, help="sampling threads")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")

    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, description in SUBCOMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=description, description=description)

    plotParser = subparsers.add_parser("plot", help="render a CSV as an SVG trend plot")
    plotParser.add_argument("csv", help="CSV written by a run")
    plotParser.add_argument("--kind", choices=("line", "scatter"), default="line")
    plotParser.add_argument("--out", "-o", required=True, help="SVG path")
    plotParser.add_argument("--x", help="x column")
    plotParser.add_argument("--y", help="y column")
    plotParser.add_argument("--series", help="column splitting the series")
    plotParser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    return parser


def main(argv: Optional[List[str]] = None):
    """Entry point"""
    args = buildParser().parse_args(argv)
    try:
        runner = LabRunner(verbose=args.verbose)
        if args.command == "plot":
            status = runner.plot(args.csv, args.kind, args.out, args.x, args.y, args.series)
        else:
            status = runner.run(args.command, args.config, args.seed, args.threads, args.out)
    except KeyboardInterrupt:
        print("\nInterrupted")
        sys.exit(130)
    sys.exit(status)


if __name__ == "__main__":
    main()
