"""
Percolation Locality - desk-scale laboratory for locality of percolation on transitive graphs
"""

__version__ = "0.1.0"
__author__ = "Percolation Locality Lab Team"

from .catalog import GraphCatalog
from .cayley import CayleyOracle, GroupSpec, makeOracle
from .errors import ConfigError, LocalityLabError, ResourceLimitError
from .graph_core import FiniteGraph, FiniteGraphOracle, ball
from .locality import localityRadius
from .nets import Net, verifyNet

__all__ = [
    "GraphCatalog",
    "CayleyOracle",
    "GroupSpec",
    "makeOracle",
    "FiniteGraph",
    "FiniteGraphOracle",
    "ball",
    "localityRadius",
    "Net",
    "verifyNet",
    "LocalityLabError",
    "ResourceLimitError",
    "ConfigError",
]
