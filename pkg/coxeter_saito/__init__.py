"""
Coxeter-Saito - exact Saito structures on orbit spaces of Coxeter and Shephard groups.
"""

__version__ = "0.1.0"
__author__ = "Coxeter-Saito Team"

from .cli import main
from .catalog import group_from_name, make_group
from .parser import load_group_spec, parse_poly
from .geometry import orbit_geometry
from .saito import verify_axioms, theorem2_compare
from .flat import find_flat_coordinates, frame_matrices, theorem3_classify

__all__ = [
    "main",
    "group_from_name",
    "make_group",
    "load_group_spec",
    "parse_poly",
    "orbit_geometry",
    "verify_axioms",
    "theorem2_compare",
    "find_flat_coordinates",
    "frame_matrices",
    "theorem3_classify",
]
