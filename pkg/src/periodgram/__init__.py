"""Exact Mellin integrals over the unit square, their Gram determinants, and
transfinite-diameter bounds for the associated regions."""

from .bases import FAMILIES, ModuleBasis, Monomial, family_basis, phi_rank_identity
from .contiguity import MellinTable, mellin_integral, quad_oracle
from .diameter import (
    BoundValue,
    closed_form_diameter,
    eta_critical,
    intuitive_threshold,
    tau_eps_bounds,
    zeta2_region_bound,
)
from .exactnum import BigFloat, LinearForm, XiPolynomial, eval_xi, zeta2
from .fekete import FeketeMaximizer, FeketeResult, fekete_maximize
from .gram import GramTable, build_gram, det_exact, det_numeric_direct, montecarlo_det_identity, report
from .lattice import extract_small_form, integerize
from .vandermonde import AmalgamPair, amalgam, amalgam_det_formula

__all__ = [
    "FAMILIES", "ModuleBasis", "Monomial", "family_basis", "phi_rank_identity",
    "MellinTable", "mellin_integral", "quad_oracle",
    "BoundValue", "closed_form_diameter", "eta_critical", "intuitive_threshold",
    "tau_eps_bounds", "zeta2_region_bound",
    "BigFloat", "LinearForm", "XiPolynomial", "eval_xi", "zeta2",
    "FeketeMaximizer", "FeketeResult", "fekete_maximize",
    "GramTable", "build_gram", "det_exact", "det_numeric_direct", "montecarlo_det_identity", "report",
    "extract_small_form", "integerize",
    "AmalgamPair", "amalgam", "amalgam_det_formula",
]
