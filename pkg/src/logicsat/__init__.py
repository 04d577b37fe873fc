"""Hybrid SAT solving with dynamically extracted XOR and rule structure."""

from .cdcl import CdclResult, cdcl_solve
from .cnf import Assignment, CnfFormula, XorConstraint, evaluate, propagate, residual
from .dimacs import parse_dimacs, write_dimacs
from .hwb import build_circuit, build_miter, hwb_reference
from .rules import Consequence, RuleMatch, consequence_of, encode_cnf, match_rules
from .simplify import simplify
from .splitter import SplitConfig, solve_formula, solve_split
from .xor_extract import extract_xors

__all__ = [
    "Assignment", "CdclResult", "CnfFormula", "Consequence", "RuleMatch", "SplitConfig",
    "XorConstraint", "build_circuit", "build_miter", "cdcl_solve", "consequence_of",
    "encode_cnf", "evaluate", "extract_xors", "hwb_reference", "match_rules",
    "parse_dimacs", "propagate", "residual", "simplify", "solve_formula", "solve_split",
    "write_dimacs",
]
