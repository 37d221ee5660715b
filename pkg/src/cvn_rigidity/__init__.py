"""Free-group orbits, train tracks, translation lengths and non-rigidity witnesses."""

from .freegroup import CyclicWord, FreeMap, Word, cyclic_reduce, orbit, reduce
from .graph import Graph
from .outerspace import MarkedMetricGraph, translation_length
from .trainmap import TopRep

__all__ = [
    "CyclicWord",
    "FreeMap",
    "Graph",
    "MarkedMetricGraph",
    "TopRep",
    "Word",
    "cyclic_reduce",
    "orbit",
    "reduce",
    "translation_length",
]
__version__ = "0.1.0"
