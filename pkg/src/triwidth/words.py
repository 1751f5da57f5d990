"""Word ASTs, parsing, evaluation, and verbal-subgroup descriptors.

Grammar:  word := var | "[" word "," word "]" ;  var := "x" digits.
A power word is written "x^" digits and may appear only as the root.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .errors import (
    ContextMismatchError,
    InvalidWordError,
    MissingAssignmentError,
    PowerWordInputError,
    WordSyntaxError,
)
from .field import FieldSpec, is_sth_power
from .trimat import TriMat, is_level, mat_commutator


@dataclass(frozen=True)
class Variable:
    index: int  # 1-based


@dataclass(frozen=True)
class Commutator:
    left: "Word"
    right: "Word"


@dataclass(frozen=True)
class PowerWord:
    s: int


Word = Union[Variable, Commutator, PowerWord]


def word_to_text(w: Word) -> str:
    if isinstance(w, Variable):
        return f"x{w.index}"
    if isinstance(w, PowerWord):
        return f"x^{w.s}"
    return f"[{word_to_text(w.left)},{word_to_text(w.right)}]"


def variables_of(w: Word) -> list[int]:
    """Leaf variable indices in left-to-right order."""
    if isinstance(w, Variable):
        return [w.index]
    if isinstance(w, PowerWord):
        return [1]
    return variables_of(w.left) + variables_of(w.right)


class _Parser:
    def __init__(self, text: str):
        self.text = "".join(text.split())
        self.pos = 0

    def error(self, msg: str):
        raise WordSyntaxError(f"{msg} at position {self.pos} in {self.text!r}")

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def digits(self) -> int:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected digits")
        return int(self.text[start:self.pos])

    def word(self) -> Word:
        c = self.peek()
        if c == "[":
            self.pos += 1
            left = self.word()
            self.expect(",")
            right = self.word()
            self.expect("]")
            return Commutator(left, right)
        if c == "x":
            self.pos += 1
            return Variable(self.digits())
        self.error("expected '[' or a variable")

    def parse(self) -> Word:
        if self.text.startswith("x^"):
            self.pos = 2
            s = self.digits()
            if self.pos != len(self.text):
                self.error("trailing input after power word")
            if s < 1:
                self.error("power exponent must be >= 1")
            return PowerWord(s)
        w = self.word()
        if self.pos != len(self.text):
            self.error("trailing input")
        return w


def parse_word(text: str) -> Word:
    return _Parser(text).parse()


def validate_outer(w: Word) -> bool:
    """True iff every leaf variable index occurs exactly once."""
    if isinstance(w, PowerWord):
        raise PowerWordInputError("power words are not outer commutator words")
    seen = variables_of(w)
    return len(seen) == len(set(seen))


def evaluate(w: Word, assign: dict[int, TriMat]) -> TriMat:
    """Evaluate the word on the assignment; a power word takes its base
    matrix from variable 1."""
    if isinstance(w, Variable):
        try:
            return assign[w.index]
        except KeyError:
            raise MissingAssignmentError(f"x{w.index} is unassigned") from None
    if isinstance(w, PowerWord):
        try:
            return assign[1] ** w.s
        except KeyError:
            raise MissingAssignmentError("power word needs a base at x1") from None
    return mat_commutator(evaluate(w.left, assign), evaluate(w.right, assign))


def level_of(w: Word, spec: FieldSpec) -> int:
    """Level tag of the verbal subgroup of an outer word: 0 means the full
    triangular group, r >= 1 the subgroup vanishing below offset r."""
    if isinstance(w, PowerWord):
        raise PowerWordInputError("level is defined for outer words only")
    two = spec.is_finite and spec.q == 2
    if two:
        # the full group is already unitriangular, so leaves start at level 1
        def lvl(u: Word) -> int:
            if isinstance(u, Variable):
                return 1
            return lvl(u.left) + lvl(u.right)
        return lvl(w)

    def lvl(u: Word) -> int:
        if isinstance(u, Variable):
            return 0
        a, b = lvl(u.left), lvl(u.right)
        if a == 0 and b == 0:
            return 1
        if a == 0 or b == 0:
            return max(a, b)
        return a + b
    return lvl(w)


POWER_COPRIME = "coprime"
POWER_BETA = "beta-exists"


@dataclass(frozen=True)
class VerbalDescriptor:
    """Identity of the verbal subgroup of T_n over a given field.

    kind is one of "full", "trivial", "level" (with level r), or "power"
    (membership test: every diagonal entry is an s-th power).
    """

    kind: str
    spec: FieldSpec
    n: int
    level: Optional[int] = None
    s: Optional[int] = None
    case: Optional[str] = None

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.level is not None:
            out["level"] = self.level
        if self.s is not None:
            out["s"] = self.s
        if self.case is not None:
            out["case"] = self.case
        return out


def _level_descriptor(spec: FieldSpec, n: int, r: int) -> VerbalDescriptor:
    if r == 0:
        return VerbalDescriptor("full", spec, n)
    if r >= n:
        return VerbalDescriptor("trivial", spec, n)
    return VerbalDescriptor("level", spec, n, level=r)


def p_adic_valuation(s: int, p: int) -> int:
    t = 0
    while s % p == 0:
        s //= p
        t += 1
    return t


def verbal_descriptor(w: Word, spec: FieldSpec, n: int) -> VerbalDescriptor:
    if isinstance(w, PowerWord):
        s = w.s
        if not spec.is_finite:
            return VerbalDescriptor("power", spec, n, s=s, case=POWER_COPRIME)
        p, q = spec.p, spec.q
        divides_p = s % p == 0
        divides_units = (q == 2) or (s % (q - 1) == 0)
        if not divides_p:
            if divides_units:
                return _level_descriptor(spec, n, 1)
            return VerbalDescriptor("power", spec, n, s=s, case=POWER_COPRIME)
        if not divides_units:
            return VerbalDescriptor("power", spec, n, s=s, case=POWER_BETA)
        return _level_descriptor(spec, n, p ** p_adic_valuation(s, p))
    if not validate_outer(w):
        raise InvalidWordError("outer words must have pairwise-distinct variables")
    return _level_descriptor(spec, n, level_of(w, spec))


def membership(a: TriMat, d: VerbalDescriptor) -> bool:
    if a.spec != d.spec or a.n != d.n:
        raise ContextMismatchError("matrix does not match the descriptor context")
    if d.kind == "full":
        return True
    if d.kind == "trivial":
        return a.is_identity()
    if d.kind == "level":
        return is_level(a, d.level)
    return all(is_sth_power(x, d.s) for x in a.diag())
