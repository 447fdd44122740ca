"""Exact computations with finite subgroups of GL_d(Z) and algebraic tori."""

from .matgroup import MatrixGroup
from .conjtest import ConjugacyCertificate, q_conjugacy, z_conjugacy
from .rootsys import RootSystemType, max_order_table, weyl_generators
from .torus import TorusPresentation, make_torus

__version__ = "0.1.0"

__all__ = [
    "ConjugacyCertificate",
    "MatrixGroup",
    "RootSystemType",
    "TorusPresentation",
    "make_torus",
    "max_order_table",
    "q_conjugacy",
    "weyl_generators",
    "z_conjugacy",
]
