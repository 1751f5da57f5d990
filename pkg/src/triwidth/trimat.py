"""Invertible upper-triangular matrices over a FieldSpec, level subgroups,
and finitary (corner) matrices."""

from __future__ import annotations

import itertools
from typing import Iterator, Optional, Sequence

from .errors import (
    BadIndexError,
    BadSizeError,
    FieldMismatchError,
    GuardExceededError,
    NotFiniteError,
    NotTriangularError,
    SingularDiagonalError,
    SizeMismatchError,
)
from .field import FieldElem, FieldSpec

DEFAULT_ENUM_GUARD = 10 ** 6


class TriMat:
    """Immutable invertible upper-triangular n x n matrix."""

    __slots__ = ("spec", "n", "entries", "_key")

    def __init__(self, spec: FieldSpec, entries: Sequence[Sequence]):
        n = len(entries)
        rows = []
        for i, row in enumerate(entries):
            if len(row) != n:
                raise SizeMismatchError("entries must be square")
            coerced = tuple(spec.elem(v) for v in row)
            for j in range(i):
                if not coerced[j].is_zero():
                    raise NotTriangularError(f"nonzero entry below the diagonal at ({i},{j})")
            if coerced[i].is_zero():
                raise SingularDiagonalError(f"zero diagonal entry at {i}")
            rows.append(coerced)
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "entries", tuple(rows))
        object.__setattr__(self, "_key", None)

    def __setattr__(self, *_):
        raise AttributeError("TriMat is immutable")

    @staticmethod
    def identity(spec: FieldSpec, n: int) -> "TriMat":
        one, zero = spec.one(), spec.zero()
        return TriMat(spec, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @staticmethod
    def from_diag_and_upper(spec: FieldSpec, n: int, diag: Sequence,
                            upper: Optional[dict] = None) -> "TriMat":
        """Build from a diagonal plus a {(i, j): value} strictly-upper map."""
        zero = spec.zero()
        grid = [[zero] * n for _ in range(n)]
        for i in range(n):
            grid[i][i] = spec.elem(diag[i])
        for (i, j), v in (upper or {}).items():
            if not 0 <= i < j < n:
                raise BadIndexError(f"({i},{j}) is not strictly upper")
            grid[i][j] = spec.elem(v)
        return TriMat(spec, grid)

    def __getitem__(self, ij) -> FieldElem:
        i, j = ij
        return self.entries[i][j]

    def diag(self) -> tuple[FieldElem, ...]:
        return tuple(self.entries[i][i] for i in range(self.n))

    def key(self) -> tuple:
        """Hashable canonical key (cached)."""
        if self._key is None:
            flat = tuple(e.value for row in self.entries for e in row)
            object.__setattr__(self, "_key", flat)
        return self._key

    def __eq__(self, other):
        if not isinstance(other, TriMat):
            return NotImplemented
        return (self.spec == other.spec and self.n == other.n
                and self.key() == other.key())

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        rows = "; ".join(" ".join(self.spec.format_elem(e) for e in row)
                         for row in self.entries)
        return f"TriMat[{rows}]"

    def _check_compatible(self, other: "TriMat"):
        if self.spec != other.spec:
            raise FieldMismatchError("matrices over different fields")
        if self.n != other.n:
            raise SizeMismatchError(f"sizes {self.n} and {other.n} differ")

    def __mul__(self, other: "TriMat") -> "TriMat":
        self._check_compatible(other)
        n, a, b = self.n, self.entries, other.entries
        zero = self.spec.zero()
        grid = [[zero] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                acc = zero
                for k in range(i, j + 1):
                    acc = acc + a[i][k] * b[k][j]
                grid[i][j] = acc
        return TriMat(self.spec, grid)

    def inv(self) -> "TriMat":
        """Exact inverse by back substitution."""
        n = self.n
        zero = self.spec.zero()
        grid = [[zero] * n for _ in range(n)]
        dinv = [self.entries[i][i].inv() for i in range(n)]
        for i in range(n):
            grid[i][i] = dinv[i]
        for offset in range(1, n):
            for i in range(n - offset):
                j = i + offset
                acc = zero
                for k in range(i + 1, j + 1):
                    acc = acc + self.entries[i][k] * grid[k][j]
                grid[i][j] = -(dinv[i] * acc)
        return TriMat(self.spec, grid)

    def __pow__(self, e: int) -> "TriMat":
        if e < 0:
            return self.inv() ** (-e)
        result = TriMat.identity(self.spec, self.n)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_identity(self) -> bool:
        return self == TriMat.identity(self.spec, self.n)

    def to_json(self) -> dict:
        return {"field": self.spec.to_json(), "n": self.n,
                "entries": [[self.spec.format_elem(e) for e in row]
                            for row in self.entries]}

    @staticmethod
    def from_json(data: dict) -> "TriMat":
        spec = FieldSpec.from_json(data["field"])
        return TriMat(spec, data["entries"])


def mat_make(spec: FieldSpec, n: int, entries: Sequence[Sequence]) -> TriMat:
    if len(entries) != n:
        raise SizeMismatchError(f"expected {n} rows")
    return TriMat(spec, entries)


def mat_mul(a: TriMat, b: TriMat) -> TriMat:
    return a * b


def mat_inv(a: TriMat) -> TriMat:
    return a.inv()


def mat_pow(a: TriMat, e: int) -> TriMat:
    return a ** e


def mat_commutator(a: TriMat, b: TriMat) -> TriMat:
    """[a, b] = a^-1 b^-1 a b, so that ab = ba [a, b]."""
    a._check_compatible(b)
    return a.inv() * b.inv() * a * b


def matrix_unit(spec: FieldSpec, n: int, i: int, j: int) -> list[list[FieldElem]]:
    """Strictly-upper matrix unit e_{i,j} with 1-based indices, as a plain
    grid (not a TriMat: the diagonal is zero)."""
    if not (1 <= i < j <= n):
        raise BadIndexError(f"need 1 <= i < j <= {n}, got ({i},{j})")
    zero, one = spec.zero(), spec.one()
    grid = [[zero] * n for _ in range(n)]
    grid[i - 1][j - 1] = one
    return grid


def add_unit(a: TriMat, i: int, j: int, coeff=1) -> TriMat:
    """a + coeff * e_{i,j} (1-based strictly-upper position)."""
    if not (1 <= i < j <= a.n):
        raise BadIndexError(f"need 1 <= i < j <= {a.n}, got ({i},{j})")
    grid = [list(row) for row in a.entries]
    grid[i - 1][j - 1] = grid[i - 1][j - 1] + a.spec.elem(coeff)
    return TriMat(a.spec, grid)


def is_level(a: TriMat, r: int) -> bool:
    """True iff a is unitriangular and zero on the first r-1 superdiagonals."""
    one = a.spec.one()
    for i in range(a.n):
        if a.entries[i][i] != one:
            return False
    for i in range(a.n):
        for j in range(i + 1, min(i + r, a.n)):
            if not a.entries[i][j].is_zero():
                return False
    return True


def principal_block(a: TriMat, m: int) -> TriMat:
    if not 1 <= m <= a.n:
        raise BadSizeError(f"block size {m} out of range")
    return TriMat(a.spec, [row[:m] for row in a.entries[:m]])


def append_block(a: TriMat, column: Sequence, gamma) -> TriMat:
    """The (n+1) x (n+1) matrix with leading block a, last column extended
    by the given height-n column, and corner gamma."""
    col = [a.spec.elem(v) for v in column]
    if len(col) != a.n:
        raise BadSizeError(f"column height {len(col)} != {a.n}")
    g = a.spec.elem(gamma)
    if g.is_zero():
        raise SingularDiagonalError("corner entry must be nonzero")
    zero = a.spec.zero()
    grid = [list(row) + [col[i]] for i, row in enumerate(a.entries)]
    grid.append([zero] * a.n + [g])
    return TriMat(a.spec, grid)


def last_column(a: TriMat) -> list[FieldElem]:
    """Entries above the corner in the last column."""
    return [a.entries[i][a.n - 1] for i in range(a.n - 1)]


# finitary matrices

class FinitaryMat:
    """Infinite triangular matrix equal to the identity outside a finite
    leading corner; stored with the minimal such corner."""

    __slots__ = ("spec", "corner")

    def __init__(self, corner: TriMat):
        corner = _trim_corner(corner)
        object.__setattr__(self, "spec", corner.spec)
        object.__setattr__(self, "corner", corner)

    def __setattr__(self, *_):
        raise AttributeError("FinitaryMat is immutable")

    @property
    def m(self) -> int:
        return self.corner.n

    def embed(self, size: int) -> TriMat:
        return fin_embed(self, size)

    def __mul__(self, other: "FinitaryMat") -> "FinitaryMat":
        if self.spec != other.spec:
            raise FieldMismatchError("finitary matrices over different fields")
        size = max(self.m, other.m)
        return FinitaryMat(self.embed(size) * other.embed(size))

    def inv(self) -> "FinitaryMat":
        return FinitaryMat(self.corner.inv())

    def __pow__(self, e: int) -> "FinitaryMat":
        return FinitaryMat(self.corner ** e)

    def __eq__(self, other):
        if not isinstance(other, FinitaryMat):
            return NotImplemented
        return self.corner == other.corner

    def __hash__(self):
        return hash(self.corner)

    def __repr__(self):
        return f"FinitaryMat(corner={self.corner!r})"

    def is_identity(self) -> bool:
        return self.m == 1 and self.corner.entries[0][0].is_one()

    def to_json(self) -> dict:
        return {"field": self.spec.to_json(), "corner_n": self.m,
                "entries": [[self.spec.format_elem(e) for e in row]
                            for row in self.corner.entries]}

    @staticmethod
    def from_json(data: dict) -> "FinitaryMat":
        spec = FieldSpec.from_json(data["field"])
        return FinitaryMat(TriMat(spec, data["entries"]))


def _trim_corner(corner: TriMat) -> TriMat:
    one = corner.spec.one()
    m = corner.n
    while m > 1:
        last = m - 1
        row_ok = (corner.entries[last][last] == one)
        col_ok = all(corner.entries[i][last].is_zero() for i in range(last))
        if row_ok and col_ok:
            m -= 1
        else:
            break
    return corner if m == corner.n else principal_block(corner, m)


def fin_make(corner: TriMat) -> FinitaryMat:
    return FinitaryMat(corner)


def fin_embed(f: FinitaryMat, size: int) -> TriMat:
    if size < f.m:
        raise BadSizeError(f"embedding size {size} below minimal corner {f.m}")
    spec = f.spec
    zero, one = spec.zero(), spec.one()
    grid = [[zero] * size for _ in range(size)]
    for i in range(f.m):
        for j in range(i, f.m):
            grid[i][j] = f.corner.entries[i][j]
    for i in range(f.m, size):
        grid[i][i] = one
    return TriMat(spec, grid)


def fin_mul(a: FinitaryMat, b: FinitaryMat) -> FinitaryMat:
    return a * b


def fin_inv(a: FinitaryMat) -> FinitaryMat:
    return a.inv()


def fin_pow(a: FinitaryMat, e: int) -> FinitaryMat:
    return a ** e


# enumeration

def _free_positions(n: int, kind: str, level: int) -> tuple[bool, list[tuple[int, int]]]:
    """(diagonal varies, list of free strictly-upper positions row-major)."""
    if kind == "full":
        return True, [(i, j) for i in range(n) for j in range(i + 1, n)]
    if kind == "unitriangular":
        level = 1
    elif kind != "level":
        raise ValueError(f"unknown kind {kind!r}")
    return False, [(i, j) for i in range(n) for j in range(i + 1, n) if j - i >= level]


def group_order(spec: FieldSpec, n: int, kind: str = "full", level: int = 1) -> int:
    if not spec.is_finite:
        raise NotFiniteError("infinite group")
    diag_varies, free = _free_positions(n, kind, level)
    order = spec.q ** len(free)
    if diag_varies:
        order *= (spec.q - 1) ** n
    return order


def enumerate_group(spec: FieldSpec, n: int, kind: str = "full", *,
                    level: int = 1,
                    guard: int = DEFAULT_ENUM_GUARD) -> Iterator[TriMat]:
    """All elements exactly once: diagonal entries vary first (in field
    order over the nonzero elements), then free upper entries row-major,
    with the last position changing fastest."""
    if not spec.is_finite:
        raise NotFiniteError("cannot enumerate over the rationals")
    order = group_order(spec, n, kind, level)
    if order > guard:
        raise GuardExceededError(f"group order {order} exceeds guard {guard}")
    diag_varies, free = _free_positions(n, kind, level)
    elems = spec.elements()
    units = elems[1:]
    one = spec.one()
    diag_choices = (itertools.product(units, repeat=n) if diag_varies
                    else [(one,) * n])
    for diag in diag_choices:
        for uppers in itertools.product(elems, repeat=len(free)):
            upper = {pos: val for pos, val in zip(free, uppers)}
            yield TriMat.from_diag_and_upper(spec, n, diag, upper)
