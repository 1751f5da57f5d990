"""Constructive commutator witnesses: every element of the verbal subgroup
of an outer commutator word is a single value of that word.

Two solvers drive the recursion.  Both equate ab = ba c entrywise and read
off row i+r of b from row i, so the returned pair always verifies exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import (
    FieldTooSmallError,
    InvalidWordError,
    NotInVerbalError,
    NotLevelError,
)
from .field import FieldElem, FieldSpec
from .trimat import TriMat, is_level, mat_commutator
from .words import (
    Commutator,
    Variable,
    Word,
    evaluate,
    level_of,
    membership,
    validate_outer,
    verbal_descriptor,
    word_to_text,
)


@dataclass(frozen=True)
class WordWitness:
    """Certificate: evaluating the word on the assignment gives the target."""

    word: Word
    assign: dict[int, TriMat]

    def verify(self, target: TriMat) -> bool:
        return evaluate(self.word, self.assign) == target

    def to_json(self) -> dict:
        return {"word": word_to_text(self.word),
                "assign": {f"x{i}": m.to_json() for i, m in sorted(self.assign.items())}}


def _solve_partner_rows(a: TriMat, c: TriMat, b_rows: list[list[FieldElem]],
                        r: int) -> TriMat:
    """Complete b from its first r rows so that ab = ba c, where a is the
    identity plus offset-r entries.  Row i determines row i+r."""
    spec, n = a.spec, a.n
    zero = spec.zero()
    for i in range(n - r):
        coeff = a.entries[i][i + r]
        inv_coeff = coeff.inv()
        row = b_rows[i]
        new_row = [zero] * n
        for j in range(i + r, n):
            # (ab)_{ij} = b_{ij} + a_{i,i+r} b_{i+r,j}
            # (bac)_{ij} = sum_k b_{ik} ( c_{kj} + a_{k,k+r} c_{k+r,j} )
            acc = -row[j]
            for k in range(i, j + 1):
                if row[k].is_zero():
                    continue
                term = c.entries[k][j]
                if k + r <= j:
                    term = term + a.entries[k][k + r] * c.entries[k + r][j]
                acc = acc + row[k] * term
            new_row[j] = inv_coeff * acc
        b_rows[i + r] = new_row
    return TriMat(spec, b_rows)


def solve_with_full_partner(c: TriMat, r: int) -> tuple[TriMat, TriMat]:
    """(a, b) with [a, b] = c, a in the level-r subgroup, b triangular.

    Needs at least three field elements: each offset-r entry of a must be
    nonzero and distinct from the negated entry of c.
    """
    spec, n = c.spec, c.n
    if spec.is_finite and spec.q == 2:
        raise FieldTooSmallError("needs a field with at least three elements")
    if not is_level(c, r):
        raise NotLevelError(f"target is not level {r}")
    one, zero = spec.one(), spec.zero()
    units = None
    if spec.is_finite:
        units = spec.elements()[1:]
    a_grid = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for i in range(n - r):
        bad = -c.entries[i][i + r]
        if spec.is_finite:
            pick = next(u for u in units if u != bad)
        else:
            pick = spec.elem(1) if bad != spec.elem(1) else spec.elem(2)
        a_grid[i][i + r] = pick
    a = TriMat(spec, a_grid)
    b_rows: list = [None] * n
    for i in range(min(r, n)):
        b_rows[i] = [one if i == j else zero for j in range(n)]
    b = _solve_partner_rows(a, c, b_rows, r) if n > r else TriMat(spec, b_rows)
    if not is_level(a, r) or mat_commutator(a, b) != c:
        raise AssertionError("commutator solve failed verification")
    return a, b


def solve_with_level_partner(c: TriMat, r: int, s: int) -> tuple[TriMat, TriMat]:
    """(a, b) with [a, b] = c, a the fixed identity-plus-offset-r matrix
    with unit entries, and b in the level-s subgroup.  Works over any field.
    """
    spec, n = c.spec, c.n
    if not is_level(c, r + s):
        raise NotLevelError(f"target is not level {r + s}")
    one, zero = spec.one(), spec.zero()
    a_grid = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for i in range(n - r):
        a_grid[i][i + r] = one
    a = TriMat(spec, a_grid)
    b_rows: list = [None] * n
    for i in range(min(r, n)):
        b_rows[i] = [one if i == j else zero for j in range(n)]
    b = _solve_partner_rows(a, c, b_rows, r) if n > r else TriMat(spec, b_rows)
    if not is_level(b, s) or mat_commutator(a, b) != c:
        raise AssertionError("commutator solve failed verification")
    return a, b


def outer_witness(w: Word, c: TriMat) -> WordWitness:
    """Assignment expressing c as a single value of the outer word w."""
    if not validate_outer(w):
        raise InvalidWordError("word has repeated variables")
    spec, n = c.spec, c.n
    if not membership(c, verbal_descriptor(w, spec, n)):
        raise NotInVerbalError("target is not in the verbal subgroup of the word")
    two = spec.is_finite and spec.q == 2
    assign: dict[int, TriMat] = {}

    def solve(u: Word, target: TriMat):
        if isinstance(u, Variable):
            assign[u.index] = target
            return
        lu, lv = level_of(u.left, spec), level_of(u.right, spec)
        if two:
            a, b = solve_with_level_partner(target, lu, lv)
            solve(u.left, a)
            solve(u.right, b)
            return
        if lu >= 1 and lv >= 1:
            a, b = solve_with_level_partner(target, lu, lv)
            solve(u.left, a)
            solve(u.right, b)
        elif lu >= 1:  # right factor is a bare variable
            a, b = solve_with_full_partner(target, lu)
            solve(u.left, a)
            assign[u.right.index] = b
        elif lv >= 1:  # left factor is a bare variable; [b, a] = target
            a, b = solve_with_full_partner(target.inv(), lv)
            solve(u.right, a)
            assign[u.left.index] = b
        else:  # both bare variables
            a, b = solve_with_full_partner(target, 1)
            assign[u.left.index] = a
            assign[u.right.index] = b

    solve(w, c)
    witness = WordWitness(w, assign)
    if not witness.verify(c):
        raise AssertionError("outer witness failed verification")
    return witness
