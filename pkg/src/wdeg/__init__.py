"""Exact squared Wasserstein distance between root measures of rational
polynomials, the conjugation-invariant Birkhoff polytope, and certified
minimal polynomials of the optimal cost."""

from .exactnum import QPoly, rational_reconstruct
from .rootcert import isolate_roots, refine
from .invbirkhoff import IotaAction, Involution, enumerate_vertices, aut_order, dim_formula
from .transport import cost_matrix, minimize_over_vertices, brute_force_assignment, solve_pair
from .galoisdeg import CostForm, min_poly_report, minimal_factor, wdeg_bound
from .realize import realize_vertex

__version__ = "0.1.0"
