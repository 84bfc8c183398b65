"""Automatic sequences, Christol's theorem and pseudo-morphism witnesses over F_p((X))."""

from .automata import Dfao, Kernel, automaton_from_kernel, kernel_from_automaton, nth_term
from .christol import AlgebraicSeries, automaton_to_polynomial, polynomial_to_automaton, verify_annihilation
from .field import GF
from .mpoly import MultiPolynomial, parse_mpoly, resultant
from .poly import FpPoly, RationalFunction
from .series import TruncatedLaurentSeries, cartier, norm, reassemble

__version__ = "0.1.0"

__all__ = [
    "AlgebraicSeries",
    "Dfao",
    "FpPoly",
    "GF",
    "Kernel",
    "MultiPolynomial",
    "RationalFunction",
    "TruncatedLaurentSeries",
    "automaton_from_kernel",
    "automaton_to_polynomial",
    "cartier",
    "kernel_from_automaton",
    "norm",
    "nth_term",
    "parse_mpoly",
    "polynomial_to_automaton",
    "reassemble",
    "resultant",
    "verify_annihilation",
]
