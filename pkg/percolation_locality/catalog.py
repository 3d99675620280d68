#!/usr/bin/env python3
"""
Graph catalog - named presets for the graph families used in experiments
"""

import re
from typing import Dict, List, Optional

import networkx as nx

from .cayley import CayleyOracle, GroupSpec, cyclic, freeAbelian, heisenberg, product
from .errors import ConfigError
from .graph_core import FiniteGraph


class GraphCatalog:
    """Resolve preset names such as z2, heisenberg, torus-7 or slab-4"""

    def __init__(self):
        self.presetData = {
            "z1": {
                "build": lambda: freeAbelian(1),
                "description": "the line Z",
                "pcBelowOne": False,
            },
            "z2": {
                "build": lambda: freeAbelian(2),
                "description": "square lattice Z^2",
                "pcBelowOne": True,
            },
            "z3": {
                "build": lambda: freeAbelian(3),
                "description": "cubic lattice Z^3",
                "pcBelowOne": True,
            },
            "heisenberg": {
                "build": lambda: heisenberg(),
                "description": "discrete Heisenberg group, S = {a, b}^(+-1)",
                "pcBelowOne": True,
            },
        }
        self.familyData = {
            "torus": {
                "build": lambda k: product(cyclic(k), cyclic(k)),
                "description": "torus (Z/{k})^2, converges to Z^2 but is finite",
                "pcBelowOne": False,
            },
            "slab": {
                "build": lambda k: product(freeAbelian(2), cyclic(k)),
                "description": "slab Z^2 x Z/{k}, converges to Z^3",
                "pcBelowOne": True,
            },
            "cylinder": {
                "build": lambda k: product(freeAbelian(1), cyclic(k)),
                "description": "cylinder Z x Z/{k}, converges to Z^2 with p_c = 1",
                "pcBelowOne": False,
            },
            "cyclic": {
                "build": lambda k: cyclic(k),
                "description": "cycle Z/{k}",
                "pcBelowOne": False,
            },
        }
        # Small fixture graphs for exact laws
        self.smallGraphData = {
            "path": lambda n: nx.path_graph(n),
            "cycle": lambda n: nx.cycle_graph(n),
            "star": lambda n: nx.star_graph(n - 1),
            "complete": lambda n: nx.complete_graph(n),
        }
        self._oracles: Dict[str, CayleyOracle] = {}

    def _parse(self, name: str):
        name = name.strip().lower()
        if name in self.presetData:
            return self.presetData[name], ()
        match = re.fullmatch(r"([a-z]+)-(\d+)", name)
        if match and match.group(1) in self.familyData:
            k = int(match.group(2))
            if k < 1:
                raise ConfigError(f"preset {name!r} needs k >= 1", field="preset")
            return self.familyData[match.group(1)], (k,)
        raise ConfigError(
            f"unknown preset {name!r}; known: {', '.join(self.listPresets())}", field="preset"
        )

    def getSpec(self, name: str) -> GroupSpec:
        """GroupSpec for a preset name"""
        entry, args = self._parse(name)
        return entry["build"](*args)

    def getOracle(self, name: str) -> CayleyOracle:
        """Shared oracle per preset, so ball caches are reused"""
        key = name.strip().lower()
        if key not in self._oracles:
            self._oracles[key] = CayleyOracle(self.getSpec(key))
        return self._oracles[key]

    def getDescription(self, name: str) -> str:
        entry, args = self._parse(name)
        text = entry["description"]
        return text.format(k=args[0]) if args else text

    def hasPcBelowOne(self, name: str) -> Optional[bool]:
        """Whether the preset satisfies p_c < 1 (finite graphs and 1-ended cylinders do not)"""
        entry, _ = self._parse(name)
        return entry["pcBelowOne"]

    def listPresets(self) -> List[str]:
        return list(self.presetData) + [f"{family}-<k>" for family in self.familyData]

    def getSmallGraph(self, name: str) -> FiniteGraph:
        """Fixture graph: path-n, cycle-n, star-n, complete-n (n vertices) or grid-RxC"""
        key = name.strip().lower()
        grid = re.fullmatch(r"grid-(\d+)x(\d+)", key)
        if grid:
            rows, cols = int(grid.group(1)), int(grid.group(2))
            if rows < 1 or cols < 1:
                raise ConfigError(f"grid {name!r} needs positive sides", field="graphs")
            return FiniteGraph.fromNetworkx(nx.grid_2d_graph(rows, cols), label=key)
        match = re.fullmatch(r"([a-z]+)-(\d+)", key)
        if not match or match.group(1) not in self.smallGraphData:
            raise ConfigError(
                f"unknown fixture graph {name!r}; use path-n, cycle-n, star-n, complete-n or grid-RxC",
                field="graphs",
            )
        n = int(match.group(2))
        minimum = 3 if match.group(1) == "cycle" else 1
        if n < minimum:
            raise ConfigError(f"fixture {name!r} needs at least {minimum} vertices", field="graphs")
        return FiniteGraph.fromNetworkx(self.smallGraphData[match.group(1)](n), label=key)
