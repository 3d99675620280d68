"""
Site processes and adversary families for domination checks
"""

from fractions import Fraction
from typing import Any, Dict, List, Sequence

from ..errors import ConfigError
from .block_factor import MAJORITY, MINIMUM, RULES, BlockFactorFamily, BlockFactorProcess
from .correlated import FullyCorrelatedFamily, FullyCorrelatedProcess
from .product import ProductFamily, ProductProcess
from .table import CheckerboardFamily, CheckerboardProcess, TableProcess

__all__ = [
    "ProductProcess",
    "ProductFamily",
    "FullyCorrelatedProcess",
    "FullyCorrelatedFamily",
    "BlockFactorProcess",
    "BlockFactorFamily",
    "CheckerboardProcess",
    "CheckerboardFamily",
    "TableProcess",
    "defaultAdversaries",
    "parseProcess",
]

CERTIFICATION_LEVEL = Fraction(7, 8)


def defaultAdversaries(k: int, graphs: Sequence = ()) -> List:
    """Adversaries certified k-dependent on every listed graph

    Block factors of radius floor(k/2) are k-dependent everywhere; fully
    correlated and checkerboard laws only qualify on graphs of diameter <= k.
    """
    from ..domination import certifyDependency

    families: List = [ProductFamily()]
    radius = k // 2
    if radius >= 1:
        families.append(BlockFactorFamily(radius, MINIMUM))
        families.append(BlockFactorFamily(radius, MAJORITY))
    for candidate in (FullyCorrelatedFamily(), CheckerboardFamily()):
        process = candidate.instance(CERTIFICATION_LEVEL)
        if graphs and all(certifyDependency(process.exactLaw(g), k).verified for g in graphs):
            families.append(candidate)
    return families


_PROCESS_KEYS = {
    "product": {"p"},
    "correlated": {"p"},
    "block-factor": {"radius", "rule", "level", "s"},
    "checkerboard": {"level"},
    "table": {"vertices", "entries"},
}


def parseProcess(data: Dict[str, Any], fieldPrefix: str = "process"):
    """Site process from a config table such as {kind = "product", p = 0.8}"""
    kind = data.get("kind")
    if kind not in _PROCESS_KEYS:
        raise ConfigError(f"unknown process kind {kind!r}", field=f"{fieldPrefix}.kind")
    unknown = set(data) - _PROCESS_KEYS[kind] - {"kind"}
    if unknown:
        raise ConfigError("unknown key", field=f"{fieldPrefix}.{sorted(unknown)[0]}")

    def required(key: str):
        if key not in data:
            raise ConfigError("missing required key", field=f"{fieldPrefix}.{key}")
        return data[key]

    if kind == "product":
        return ProductProcess(required("p"))
    if kind == "correlated":
        return FullyCorrelatedProcess(required("p"))
    if kind == "checkerboard":
        return CheckerboardProcess(required("level"))
    if kind == "block-factor":
        rule = data.get("rule", MINIMUM)
        if rule not in RULES:
            raise ConfigError(f"unknown rule {rule!r}", field=f"{fieldPrefix}.rule")
        if ("level" in data) == ("s" in data):
            raise ConfigError("give exactly one of level and s", field=f"{fieldPrefix}.level")
        return BlockFactorProcess(
            int(required("radius")), rule, level=data.get("level"), bitProbability=data.get("s")
        )
    entries = {int(mask): Fraction(int(num), int(den)) for mask, num, den in required("entries")}
    return TableProcess(int(required("vertices")), entries)
