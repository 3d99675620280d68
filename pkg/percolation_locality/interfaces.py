#!/usr/bin/env python3
"""
Core interfaces - graph oracles, site processes and experiment runners
"""

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Dict, List, Sequence, Tuple

if TYPE_CHECKING:
    from .domination import SiteLaw
    from .graph_core import FiniteGraph

VertexId = Tuple[int, ...]


class IGraphOracle(ABC):
    """Lazily enumerable vertex-transitive graph"""

    label: str = "graph"

    @abstractmethod
    def getRoot(self) -> VertexId:
        """Root vertex (identity element for Cayley graphs)"""
        pass

    @abstractmethod
    def getNeighbors(self, vertex: VertexId) -> List[VertexId]:
        """Neighbours in a fixed, reproducible order"""
        pass

    def getDegree(self) -> int:
        """Degree of the root, which is the degree everywhere"""
        return len(self.getNeighbors(self.getRoot()))


class ISiteProcess(ABC):
    """A {0,1}-valued site process whose exact law can be enumerated"""

    name: str = "process"

    @abstractmethod
    def exactLaw(self, graph: "FiniteGraph") -> "SiteLaw":
        """Exact law on a tiny graph"""
        pass

    @abstractmethod
    def dependencyRange(self) -> int:
        """Range k for which the process is k-dependent by construction (-1 if none)"""
        pass


class IAdversaryFamily(ABC):
    """One-parameter family of site processes indexed by a marginal level"""

    name: str = "family"

    @abstractmethod
    def instance(self, level) -> ISiteProcess:
        """Process whose marginals are all at least level"""
        pass


class IExperiment(ABC):
    """Runner for one experiment kind"""

    kind: str = "experiment"
    graphRoles: Sequence[str] = ("graph",)
    requiredParams: Sequence[str] = ()
    optionalParams: Dict[str, object] = {}

    @abstractmethod
    def run(self, config, context) -> "ExperimentResult":  # noqa: F821
        """Run the experiment and return rows plus certificates"""
        pass
