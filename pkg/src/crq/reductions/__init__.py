"""Boolean formulas as CRQs, plus adversarial instance families."""

from .bfep import bfep_to_crq, verify_reduction
from .disjointness import disjointness_family, intersects
from .formula import FormulaSyntaxError, eval_formula, parse_formula, random_formula, to_text
from .mr_family import FamilyMismatch, MrFamily, extract_subset, mr_family, subset_size

__all__ = [
    "bfep_to_crq", "verify_reduction", "disjointness_family", "intersects", "FormulaSyntaxError",
    "eval_formula", "parse_formula", "random_formula", "to_text", "FamilyMismatch", "MrFamily",
    "extract_subset", "mr_family", "subset_size",
]
