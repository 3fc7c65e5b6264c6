"""Quadratic forms and quadratic geometries over GF(2^k)."""

__version__ = "0.1.0"

from .errors import WittforgeError
from .gf2k import GF, FieldElem, FiniteField, in_wp_image, solve_artin_schreier, trace
from .quadspace import QuadraticSpace, Vector, hyperbolic_plane, norm_plane, standard_space
from .wittdecomp import WittDecomposition, arf_defect, defect_oracle, witt_decompose
from .isometry import Isometry, is_isometric, witt_extend
from .quadgeom import QPoint, QuadraticGeometry
from .backforth import PartialIso, Substructure, ef_game, extend_step
from .termlang import Term, equiv_oracle, normalize_term, parse_term

__all__ = [
    "WittforgeError",
    "GF", "FieldElem", "FiniteField", "in_wp_image", "solve_artin_schreier", "trace",
    "QuadraticSpace", "Vector", "hyperbolic_plane", "norm_plane", "standard_space",
    "WittDecomposition", "arf_defect", "defect_oracle", "witt_decompose",
    "Isometry", "is_isometric", "witt_extend",
    "QPoint", "QuadraticGeometry",
    "PartialIso", "Substructure", "ef_game", "extend_step",
    "Term", "equiv_oracle", "normalize_term", "parse_term",
]
