"""Exact widths of verbal subgroups of triangular matrix groups.

Subpackages: field (exact GF(p^k) and rational arithmetic), trimat
(triangular and finitary matrices), words (word ASTs and verbal
descriptors), powerwidth and commwidth (constructive witnesses), oracle
(brute-force ground truth), cli (command-line front end).
"""

from .field import FieldSpec, FieldElem, make_field
from .trimat import TriMat, FinitaryMat
from .words import Word, VerbalDescriptor, parse_word

__all__ = [
    "FieldSpec", "FieldElem", "make_field",
    "TriMat", "FinitaryMat",
    "Word", "VerbalDescriptor", "parse_word",
]
