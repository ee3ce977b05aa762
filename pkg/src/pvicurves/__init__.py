"""Exact verification and transformation of algebraic Painleve VI solutions on curve towers."""
from .arith import RatFunc, UniPoly, poly_gcd, resultant, squarefree_part
from .field import FieldElement, TowerPresentation, adjoin_root, minimal_polynomial
from .pvi import PviSolution, ResidualReport, ThetaParams, pvi_residual, theta_equivalent_up_to_signs

__version__ = "0.1.0"
