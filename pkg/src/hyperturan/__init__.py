"""Desk-scale tools for degenerate hypergraph Turán problems.

Submodules: ``hypergraph`` (k-graphs, homomorphism search, canonical forms),
``tree`` (the rooted hypertree, balance and powers), ``field`` (F_q
polynomials), ``algebraic`` (random algebraic hosts), ``entropy``
(degree-weighted hom distributions and counting bounds), ``lifting``
(lifted families, sunflowers, exact Turán numbers) and ``suites``.
"""

from .hypergraph import Hypergraph, HypergraphError
from .tree import TreeParams, build_tree

__version__ = "0.1.0"

__all__ = ["Hypergraph", "HypergraphError", "TreeParams", "build_tree", "__version__"]
