#!/usr/bin/env python3
"""
CSV tables, SVG trend plots and run manifests
"""

import csv
import hashlib
import json
import logging
import platform
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")

import numpy as np  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from . import __version__  # noqa: E402
from .errors import SchemaMismatchError  # noqa: E402

logger = logging.getLogger(__name__)

CSV_SCHEMAS: Dict[str, Tuple[str, ...]] = {
    "ball": ("r", "vertices", "edges"),
    "locality": ("k", "ball_size_G", "ball_size_H", "isomorphic"),
    "growth": ("graph", "d", "c", "r_max", "verified"),
    "net": ("a", "b", "n_points", "max_degree", "separated", "dense", "violations"),
    "en-scan": ("graph", "p", "n", "samples", "p_hat", "ci_lo", "ci_hi", "seed"),
    "renorm": ("point", "vertex", "eta"),
    "dominate": ("graph", "spec", "k_cert", "marginal", "dominates_3_4"),
    "q-threshold": ("k", "D", "resolution", "q", "families"),
    "couple": ("step", "base_open", "base_closed", "lifted_open", "lifted_closed", "sizes_equal"),
    "couple-law": ("s", "base_tail", "lifted_tail"),
    "pc-estimate": ("graph", "mode", "region_scale", "trials", "p_c_hat", "ci_lo", "ci_hi", "seed"),
    "pc-curve": ("graph", "p", "spanning_fraction"),
    "pipeline": (
        "graph", "p", "n", "a", "q", "p_hat", "net_points", "max_degree", "degree_bound",
        "determinate", "eta_open", "crosses", "host_path_length", "certificates_ok",
    ),
}

# (x, y, series) per schema
PLOT_DEFAULTS: Dict[str, Tuple[str, str, Optional[str]]] = {
    "ball": ("r", "vertices", None),
    "locality": ("k", "ball_size_G", None),
    "en-scan": ("n", "p_hat", "p"),
    "pc-curve": ("p", "spanning_fraction", "graph"),
    "pc-estimate": ("region_scale", "p_c_hat", "graph"),
    "couple": ("step", "lifted_open", None),
    "couple-law": ("s", "lifted_tail", None),
}

SVG_HASH_SALT = "percolation-locality"

Schema = Union[str, Sequence[str]]


def formatValue(value: Any) -> str:
    """6 significant digits for reals, true/false for booleans, blank for None"""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating, Fraction)):
        return f"{float(value):.6g}"
    if isinstance(value, (tuple, list)):
        return " ".join(formatValue(v) for v in value)
    return str(value)


def resolveSchema(schema: Schema) -> Tuple[str, ...]:
    if isinstance(schema, str):
        if schema not in CSV_SCHEMAS:
            raise SchemaMismatchError(f"unknown CSV schema {schema!r}")
        return CSV_SCHEMAS[schema]
    return tuple(schema)


def emitCsv(rows: Iterable[Mapping[str, Any]], schema: Schema, path: Union[str, Path]) -> Path:
    """Write rows under the exact schema header; every row must carry exactly the schema columns"""
    columns = resolveSchema(schema)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if set(row) != set(columns):
                missing = sorted(set(columns) - set(row))
                extra = sorted(set(row) - set(columns))
                raise SchemaMismatchError(f"{path.name}: missing {missing}, unexpected {extra}")
            writer.writerow([formatValue(row[column]) for column in columns])
    logger.debug("wrote %s", path)
    return path


def readCsv(path: Union[str, Path]) -> Tuple[List[str], List[Dict[str, str]]]:
    with Path(path).open("r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        rows = list(reader)
        return list(reader.fieldnames or []), rows


def schemaOf(header: Sequence[str]) -> Optional[str]:
    for name, columns in CSV_SCHEMAS.items():
        if tuple(header) == columns:
            return name
    return None


def _numeric(text: str) -> float:
    if text in ("true", "false"):
        return 1.0 if text == "true" else 0.0
    return float(text)


def _sortKey(text: str):
    try:
        return (0, float(text), text)
    except ValueError:
        return (1, 0.0, text)


def emitPlot(
    csvPath: Union[str, Path],
    kind: str,
    out: Union[str, Path],
    x: Optional[str] = None,
    y: Optional[str] = None,
    series: Optional[str] = None,
    title: Optional[str] = None,
) -> Path:
    """Static SVG of y against x, one series per distinct value of the series column

    Identical CSV bytes give identical SVG bytes.
    """
    if kind not in ("line", "scatter"):
        raise ValueError(f"unknown plot kind {kind!r}")
    header, rows = readCsv(csvPath)
    defaults = PLOT_DEFAULTS.get(schemaOf(header) or "", (None, None, None))
    x = x or defaults[0]
    y = y or defaults[1]
    series = series if series is not None else defaults[2]
    for column in (x, y, series):
        if column is not None and column not in header:
            raise SchemaMismatchError(f"{Path(csvPath).name} has no column {column!r}")
    if x is None or y is None:
        raise SchemaMismatchError(f"{Path(csvPath).name}: no default axes for header {header}")

    groups: Dict[str, List[Tuple[float, float]]] = {}
    for row in rows:
        if row[x] == "" or row[y] == "":
            continue
        key = row[series] if series else y
        groups.setdefault(key, []).append((_numeric(row[x]), _numeric(row[y])))

    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig = Figure(figsize=(6.0, 4.0))
        ax = fig.add_subplot()
        for key in sorted(groups, key=_sortKey):
            points = sorted(groups[key])
            xs, ys = [p[0] for p in points], [p[1] for p in points]
            label = f"{series} = {key}" if series else key
            if kind == "scatter" or len(points) == 1:
                ax.scatter(xs, ys, label=label)
            else:
                ax.plot(xs, ys, marker="o", label=label)
        ax.set_xlabel(x)
        ax.set_ylabel(y)
        ax.set_title(title or Path(csvPath).stem)
        if groups:
            ax.legend()
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, format="svg", metadata={"Date": None})
    logger.debug("plotted %s -> %s", csvPath, out)
    return out


def configHash(config: Mapping[str, Any]) -> str:
    """SHA-256 of the canonical JSON form of a resolved config"""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def environmentVersions() -> Dict[str, str]:
    import networkx
    import scipy

    return {
        "percolation_locality": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "networkx": networkx.__version__,
        "matplotlib": matplotlib.__version__,
    }


def writeManifest(
    outDir: Union[str, Path],
    config: Mapping[str, Any],
    seeds: Mapping[str, int],
    artifacts: Sequence[str],
    status: int,
) -> Path:
    """manifest.json: versions, resolved config and its hash, seeds and artifact names"""
    path = Path(outDir) / "manifest.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "versions": environmentVersions(),
        "config": dict(config),
        "configHash": configHash(config),
        "seeds": dict(seeds),
        "artifacts": sorted(artifacts),
        "exitStatus": status,
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path
