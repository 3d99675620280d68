#!/usr/bin/env python3
"""
Experiment configuration - versioned TOML files with environment and flag overrides

Precedence for seed, threads and output directory: command-line flag, then
PERCLOCAL_* environment variable, then the file.
"""

import copy
import json
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, NamedTuple, Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .catalog import GraphCatalog
from .cayley import GroupSpec, parseGroupSpec
from .errors import ConfigError

CONFIG_VERSION = 1
ENV_PREFIX = "PERCLOCAL_"
MAX_SEED = 2**64 - 1
TOP_LEVEL_KEYS = ("version", "kind", "seed", "threads", "graph", "graphs", "params", "output")
OUTPUT_DEFAULTS: Dict[str, Any] = {"dir": "out", "plot": True}
KIND_ALIASES = {"pipeline": "locality-pipeline"}
ANY_GRAPHS = "*"


class GraphEntry(NamedTuple):
    name: str
    spec: GroupSpec
    table: Dict[str, Any]


class ExperimentConfig(NamedTuple):
    kind: str
    seed: int
    threads: int
    graphs: Dict[str, GraphEntry]
    params: Dict[str, Any]
    output: Dict[str, Any]

    def graph(self, role: str = "graph") -> GraphEntry:
        if role not in self.graphs:
            raise ConfigError("missing graph table", field=f"graphs.{role}")
        return self.graphs[role]

    def outDir(self) -> Path:
        return Path(self.output["dir"])

    def toDict(self) -> Dict[str, Any]:
        """Resolved form; feeding it back to resolveConfig gives the same config"""
        return {
            "version": CONFIG_VERSION,
            "kind": self.kind,
            "seed": self.seed,
            "threads": self.threads,
            "graphs": {name: dict(entry.table) for name, entry in self.graphs.items()},
            "params": copy.deepcopy(self.params),
            "output": dict(self.output),
        }


def canonicalKind(kind: str) -> str:
    return KIND_ALIASES.get(kind, kind)


def _integer(value: Any, field: str, minimum: int, maximum: Optional[int] = None) -> int:
    if isinstance(value, str):
        try:
            value = int(value.strip())
        except ValueError:
            raise ConfigError(f"expected an integer, got {value!r}", field=field) from None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", field=field)
    if value < minimum or (maximum is not None and value > maximum):
        bound = f"[{minimum}, {maximum}]" if maximum is not None else f">= {minimum}"
        raise ConfigError(f"{value} outside {bound}", field=field)
    return value


def _override(name: str, flag: Any, environ: Mapping[str, str], fileValue: Any) -> Any:
    if flag is not None:
        return flag
    envValue = environ.get(ENV_PREFIX + name.upper())
    if envValue not in (None, ""):
        return envValue
    return fileValue


def parseGraphEntry(
    name: str, table: Any, catalog: Optional[GraphCatalog] = None, fieldPrefix: Optional[str] = None
) -> GraphEntry:
    """A [graphs.<name>] table: {preset = "..."} or a group spec"""
    prefix = fieldPrefix or f"graphs.{name}"
    if not isinstance(table, dict):
        raise ConfigError("expected a table", field=prefix)
    if "preset" in table:
        extra = sorted(set(table) - {"preset"})
        if extra:
            raise ConfigError("preset tables take no other keys", field=f"{prefix}.{extra[0]}")
        catalog = catalog or GraphCatalog()
        try:
            spec = catalog.getSpec(str(table["preset"]))
        except ConfigError as e:
            raise ConfigError(e.message, field=f"{prefix}.preset") from None
    else:
        spec = parseGroupSpec(table, fieldPrefix=prefix)
    return GraphEntry(name, spec, dict(table))


def _parseGraphs(data: Dict[str, Any], roles, catalog: GraphCatalog) -> Dict[str, GraphEntry]:
    tables: Dict[str, Any] = {}
    if "graph" in data:
        tables["graph"] = data["graph"]
    graphs = data.get("graphs", {})
    if not isinstance(graphs, dict):
        raise ConfigError("expected a table of graph tables", field="graphs")
    for name, table in graphs.items():
        if name in tables:
            raise ConfigError("graph given twice", field=f"graphs.{name}")
        tables[name] = table

    if list(roles) == [ANY_GRAPHS]:
        if not tables:
            raise ConfigError("at least one graph table is required", field="graphs")
    else:
        for role in roles:
            if role not in tables:
                raise ConfigError("missing graph table", field="graph" if role == "graph" else f"graphs.{role}")
        unexpected = sorted(set(tables) - set(roles))
        if unexpected:
            raise ConfigError("graph not used by this experiment", field=f"graphs.{unexpected[0]}")
    return {
        name: parseGraphEntry(name, table, catalog, "graph" if name == "graph" and "graph" in data else None)
        for name, table in tables.items()
    }


def _parseParams(data: Dict[str, Any], experiment) -> Dict[str, Any]:
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("expected a table", field="params")
    known = set(experiment.requiredParams) | set(experiment.optionalParams)
    unknown = sorted(set(params) - known)
    if unknown:
        raise ConfigError("unknown key", field=f"params.{unknown[0]}")
    for key in experiment.requiredParams:
        if key not in params:
            raise ConfigError("missing required parameter", field=f"params.{key}")
    resolved = copy.deepcopy(dict(experiment.optionalParams))
    resolved.update(copy.deepcopy(params))
    return resolved


def resolveConfig(
    data: Mapping[str, Any],
    kind: Optional[str] = None,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    out: Optional[str] = None,
    environ: Optional[Mapping[str, str]] = None,
    catalog: Optional[GraphCatalog] = None,
) -> ExperimentConfig:
    """Validate a parsed config table and apply overrides"""
    from .experiments import getExperiment

    environ = os.environ if environ is None else environ
    if not isinstance(data, Mapping):
        raise ConfigError("config must be a table")
    unknown = sorted(set(data) - set(TOP_LEVEL_KEYS))
    if unknown:
        raise ConfigError("unknown key", field=unknown[0])
    if "version" not in data:
        raise ConfigError("missing required key", field="version")
    if data["version"] != CONFIG_VERSION:
        raise ConfigError(f"unsupported version {data['version']!r}, expected {CONFIG_VERSION}", field="version")
    if "kind" not in data:
        raise ConfigError("missing required key", field="kind")
    fileKind = canonicalKind(str(data["kind"]))
    if kind is not None and canonicalKind(kind) != fileKind:
        raise ConfigError(f"config is for {fileKind!r}, not {canonicalKind(kind)!r}", field="kind")
    experiment = getExperiment(fileKind)

    rawSeed = _override("seed", seed, environ, data.get("seed"))
    if rawSeed is None:
        raise ConfigError("seeds must be explicit", field="seed")
    resolvedSeed = _integer(rawSeed, "seed", 0, MAX_SEED)
    resolvedThreads = _integer(_override("threads", threads, environ, data.get("threads", 1)), "threads", 1)

    output = data.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("expected a table", field="output")
    extra = sorted(set(output) - set(OUTPUT_DEFAULTS))
    if extra:
        raise ConfigError("unknown key", field=f"output.{extra[0]}")
    resolvedOutput = {**OUTPUT_DEFAULTS, **output}
    resolvedOutput["dir"] = str(_override("out", out, environ, resolvedOutput["dir"]))
    if not isinstance(resolvedOutput["plot"], bool):
        raise ConfigError("expected true or false", field="output.plot")

    return ExperimentConfig(
        kind=fileKind,
        seed=resolvedSeed,
        threads=resolvedThreads,
        graphs=_parseGraphs(dict(data), experiment.graphRoles, catalog or GraphCatalog()),
        params=_parseParams(dict(data), experiment),
        output=resolvedOutput,
    )


def readConfigFile(path: Union[str, Path]) -> Dict[str, Any]:
    """TOML config, or the config recorded in a run manifest (.json)"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}", field="config") from None
    if path.suffix == ".json":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path.name}: {e}", field="config") from None
        return payload.get("config", payload)
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path.name}: {e}", field="config") from None


def loadConfig(path: Union[str, Path], **overrides) -> ExperimentConfig:
    return resolveConfig(readConfigFile(path), **overrides)


# -- typed parameter access ----------------------------------------------------


def intParam(config: ExperimentConfig, key: str, minimum: int = 0) -> int:
    return _integer(config.params[key], f"params.{key}", minimum)


def floatParam(config: ExperimentConfig, key: str, low: float = 0.0, high: float = 1.0) -> float:
    value = config.params[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", field=f"params.{key}")
    if not low <= value <= high:
        raise ConfigError(f"{value} outside [{low}, {high}]", field=f"params.{key}")
    return float(value)


def listParam(config: ExperimentConfig, key: str, convert: Callable[[Any], Any]) -> List[Any]:
    """A scalar or a non-empty list; convert raises ValueError/TypeError on bad entries"""
    value = config.params[key]
    values = value if isinstance(value, list) else [value]
    if not values:
        raise ConfigError("expected a non-empty list", field=f"params.{key}")
    try:
        return [convert(v) for v in values]
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e) or "bad list entry", field=f"params.{key}") from None


def choiceParam(config: ExperimentConfig, key: str, choices) -> str:
    value = config.params[key]
    if value not in choices:
        raise ConfigError(f"expected one of {', '.join(choices)}, got {value!r}", field=f"params.{key}")
    return value


def asProbability(value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not 0 <= value <= 1:
        raise ValueError(f"{value!r} is not a probability")
    return float(value)


def asPositiveInt(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ValueError(f"{value!r} is not a positive integer")
    return value
