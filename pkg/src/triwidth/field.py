"""Exact arithmetic in GF(p), GF(p^k), and the rationals.

Elements are immutable values tied to a FieldSpec.  Finite specs carry a
fixed enumeration order (zero first, then by representation) that the rest
of the package uses for deterministic choices, discrete logarithms, and
canonical s-th roots.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Optional, Sequence, Union

from .errors import (
    FieldMismatchError,
    NonPrimeError,
    NotAnSthPowerError,
    NotFiniteError,
    ReducibleModulusError,
    ZeroElementError,
)

PRIME = "prime"
PRIME_POWER = "prime-power"
RATIONALS = "rationals"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# Polynomials over GF(p) as low-to-high coefficient lists, trimmed.

def _ptrim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmul(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _ptrim(out)


def _pmod(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    """Remainder of f by g; g must be monic."""
    r = list(f)
    dg = len(g) - 1
    while len(r) - 1 >= dg and r:
        c = r[-1] % p
        if c:
            shift = len(r) - 1 - dg
            for i, b in enumerate(g):
                r[shift + i] = (r[shift + i] - c * b) % p
        r.pop()
        _ptrim(r)
    return r


def _irreducible(modulus: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    k = len(modulus) - 1
    for d in range(1, k // 2 + 1):
        for lower in itertools.product(range(p), repeat=d):
            g = list(lower) + [1]
            if not _pmod(modulus, g, p):
                return False
    return True


def _default_modulus(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k over GF(p),
    coefficients compared from the constant term upward."""
    for lower in itertools.product(range(p), repeat=k):
        cand = list(lower) + [1]
        if _irreducible(cand, p):
            return tuple(cand)
    raise ReducibleModulusError(f"no irreducible polynomial of degree {k} over GF({p})")


class FieldSpec:
    """A prime field GF(p), an extension GF(p^k), or the rationals."""

    def __init__(self, kind: str, p: Optional[int] = None, k: int = 1,
                 modulus: Optional[Sequence[int]] = None):
        self.kind = kind
        if kind == RATIONALS:
            self.p = None
            self.k = None
            self.modulus = None
            self.q = None
            return
        if kind not in (PRIME, PRIME_POWER):
            raise ValueError(f"unknown field kind {kind!r}")
        if p is None or not _is_prime(p):
            raise NonPrimeError(f"{p} is not prime")
        if kind == PRIME:
            k = 1
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        if kind == PRIME_POWER and k == 1 and modulus is None:
            kind = self.kind = PRIME
        self.p = p
        self.k = k
        if kind == PRIME:
            self.modulus = None
        else:
            if modulus is None:
                modulus = _default_modulus(p, k)
            modulus = tuple(c % p for c in modulus)
            if len(modulus) != k + 1 or modulus[-1] != 1:
                raise ReducibleModulusError(
                    f"modulus must be monic of degree {k}, got {list(modulus)}")
            if not _irreducible(modulus, p):
                raise ReducibleModulusError(
                    f"{list(modulus)} is reducible over GF({p})")
            self.modulus = modulus
        self.q = p ** k

    # identity

    def __eq__(self, other):
        return (isinstance(other, FieldSpec)
                and self.kind == other.kind and self.p == other.p
                and self.k == other.k and self.modulus == other.modulus)

    def __hash__(self):
        return hash((self.kind, self.p, self.k, self.modulus))

    def __repr__(self):
        if self.kind == RATIONALS:
            return "FieldSpec(Q)"
        if self.kind == PRIME:
            return f"FieldSpec(GF({self.p}))"
        return f"FieldSpec(GF({self.p}^{self.k}), modulus={list(self.modulus)})"

    @property
    def is_finite(self) -> bool:
        return self.kind != RATIONALS

    @property
    def char(self) -> int:
        return 0 if self.kind == RATIONALS else self.p

    # element construction

    def elem(self, value) -> "FieldElem":
        """Coerce an int, coefficient sequence, Fraction, or text form."""
        if isinstance(value, FieldElem):
            if value.spec != self:
                raise FieldMismatchError("element belongs to a different field")
            return value
        if isinstance(value, str):
            return self.parse_elem(value)
        if self.kind == RATIONALS:
            return FieldElem(self, Fraction(value))
        if self.kind == PRIME:
            return FieldElem(self, int(value) % self.p)
        if isinstance(value, int):
            # integers embed via the prime subfield
            coeffs = [value % self.p] + [0] * (self.k - 1)
            return FieldElem(self, tuple(coeffs))
        coeffs = [c % self.p for c in value]
        if len(coeffs) > self.k:
            raise ValueError("coefficient vector longer than extension degree")
        coeffs += [0] * (self.k - len(coeffs))
        return FieldElem(self, tuple(coeffs))

    def zero(self) -> "FieldElem":
        return self.elem(0)

    def one(self) -> "FieldElem":
        return self.elem(1)

    def elements(self) -> list["FieldElem"]:
        """All q elements in the fixed enumeration order (finite only)."""
        if not self.is_finite:
            raise NotFiniteError("cannot enumerate the rationals")
        return [self.elem_at(i) for i in range(self.q)]

    def elem_at(self, index: int) -> "FieldElem":
        """Element at a given position of the enumeration order."""
        if not self.is_finite:
            raise NotFiniteError("no enumeration order on the rationals")
        if not 0 <= index < self.q:
            raise ValueError(f"index {index} out of range for q={self.q}")
        if self.kind == PRIME:
            return FieldElem(self, index)
        digits = []
        for _ in range(self.k):
            index, d = divmod(index, self.p)
            digits.append(d)
        return FieldElem(self, tuple(digits))

    def index_of(self, x: "FieldElem") -> int:
        """Position of x in the enumeration order."""
        if not self.is_finite:
            raise NotFiniteError("no enumeration order on the rationals")
        if self.kind == PRIME:
            return x.value
        idx = 0
        for d in reversed(x.value):
            idx = idx * self.p + d
        return idx

    # multiplicative structure

    @cached_property
    def _power_table(self) -> tuple[list["FieldElem"], dict]:
        """Powers of the primitive element and the exponent lookup."""
        if not self.is_finite:
            raise NotFiniteError("discrete logs need a finite field")
        one = self.one()
        for i in range(1, self.q):
            g = self.elem_at(i)
            powers = [one]
            x = g
            while x != one:
                powers.append(x)
                x = x * g
            if len(powers) == self.q - 1:
                log = {pw.value: e for e, pw in enumerate(powers)}
                return powers, log
        raise NotFiniteError("no primitive element found")  # unreachable

    def primitive_element(self) -> "FieldElem":
        """First element in enumeration order of multiplicative order q-1."""
        return self._power_table[0][1] if self.q > 2 else self.one()

    def discrete_log(self, x: "FieldElem") -> int:
        if x.is_zero():
            raise ZeroElementError("discrete log of zero")
        return self._power_table[1][x.value]

    def power_of_primitive(self, e: int) -> "FieldElem":
        return self._power_table[0][e % (self.q - 1)]

    # text and JSON forms

    def format_elem(self, x: "FieldElem") -> str:
        if self.kind == RATIONALS:
            f = x.value
            return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
        if self.kind == PRIME:
            return str(x.value)
        return ",".join(str(c) for c in x.value)

    def parse_elem(self, text: str) -> "FieldElem":
        text = text.strip()
        if self.kind == RATIONALS:
            return FieldElem(self, Fraction(text))
        if self.kind == PRIME:
            return FieldElem(self, int(text) % self.p)
        coeffs = [int(c) for c in text.split(",")]
        return self.elem(coeffs)

    def to_json(self) -> dict:
        if self.kind == RATIONALS:
            return {"kind": RATIONALS}
        if self.kind == PRIME:
            return {"kind": PRIME, "p": self.p}
        return {"kind": PRIME_POWER, "p": self.p, "k": self.k,
                "modulus": list(self.modulus)}

    @staticmethod
    def from_json(data: dict) -> "FieldSpec":
        kind = data["kind"]
        if kind == RATIONALS:
            return FieldSpec(RATIONALS)
        return FieldSpec(kind, data["p"], data.get("k", 1), data.get("modulus"))

    @staticmethod
    def from_shorthand(name: str) -> "FieldSpec":
        """CLI shorthand: gf<p>, gf<p>_<k>, or q for the rationals."""
        name = name.strip().lower()
        if name in ("q", "qq", "rationals"):
            return FieldSpec(RATIONALS)
        if name.startswith("gf"):
            body = name[2:]
            if "_" in body:
                p_text, k_text = body.split("_", 1)
                return FieldSpec(PRIME_POWER, int(p_text), int(k_text))
            return FieldSpec(PRIME, int(body))
        raise ValueError(f"unrecognized field name {name!r}")


class FieldElem:
    """Immutable field element; value is an int residue, a coefficient
    tuple, or a Fraction depending on the spec kind."""

    __slots__ = ("spec", "value")

    def __init__(self, spec: FieldSpec, value):
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "value", value)

    def __setattr__(self, *_):
        raise AttributeError("FieldElem is immutable")

    def _coerce(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            if other.spec != self.spec:
                raise FieldMismatchError("operands from different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.spec.elem(other)
        return NotImplemented

    def is_zero(self) -> bool:
        if self.spec.kind == PRIME:
            return self.value == 0
        if self.spec.kind == RATIONALS:
            return self.value == 0
        return all(c == 0 for c in self.value)

    def is_one(self) -> bool:
        return self == self.spec.one()

    def __eq__(self, other):
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.spec == other.spec and self.value == other.value

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return self.spec.format_elem(self)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        k = self.spec.kind
        if k == PRIME:
            return FieldElem(self.spec, (self.value + other.value) % self.spec.p)
        if k == RATIONALS:
            return FieldElem(self.spec, self.value + other.value)
        p = self.spec.p
        return FieldElem(self.spec, tuple((a + b) % p for a, b in zip(self.value, other.value)))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        k = self.spec.kind
        if k == PRIME:
            return FieldElem(self.spec, (-self.value) % self.spec.p)
        if k == RATIONALS:
            return FieldElem(self.spec, -self.value)
        p = self.spec.p
        return FieldElem(self.spec, tuple((-c) % p for c in self.value))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        k = self.spec.kind
        if k == PRIME:
            return FieldElem(self.spec, (self.value * other.value) % self.spec.p)
        if k == RATIONALS:
            return FieldElem(self.spec, self.value * other.value)
        p = self.spec.p
        prod = _pmod(_pmul(self.value, other.value, p), self.spec.modulus, p)
        prod = list(prod) + [0] * (self.spec.k - len(prod))
        return FieldElem(self.spec, tuple(prod))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def inv(self) -> "FieldElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        k = self.spec.kind
        if k == PRIME:
            return FieldElem(self.spec, pow(self.value, -1, self.spec.p))
        if k == RATIONALS:
            return FieldElem(self.spec, 1 / self.value)
        return self ** (self.spec.q - 2)

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if self.is_zero():
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return self.spec.one() if e == 0 else self
        if e < 0:
            return self.inv() ** (-e)
        if self.spec.kind == PRIME:
            return FieldElem(self.spec, pow(self.value, e, self.spec.p))
        if self.spec.kind == RATIONALS:
            return FieldElem(self.spec, self.value ** e)
        result = self.spec.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    @property
    def index(self) -> int:
        return self.spec.index_of(self)


# Spec-level operation surface.

def make_field(kind: str, p: Optional[int] = None, k: int = 1,
               modulus: Optional[Sequence[int]] = None) -> FieldSpec:
    return FieldSpec(kind, p, k, modulus)


def enumerate_field(spec: FieldSpec) -> list[FieldElem]:
    return spec.elements()


def primitive_element(spec: FieldSpec) -> FieldElem:
    if not spec.is_finite:
        raise NotFiniteError("primitive element needs a finite field")
    return spec.primitive_element()


def discrete_log(spec: FieldSpec, x: FieldElem) -> int:
    if not spec.is_finite:
        raise NotFiniteError("discrete log needs a finite field")
    return spec.discrete_log(x)


def _int_root(v: int, s: int) -> Optional[int]:
    """Exact nonnegative integer s-th root by binary search, or None."""
    if v < 0:
        return None
    if v in (0, 1):
        return v
    lo, hi = 1, 1 << ((v.bit_length() + s - 1) // s + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** s < v:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** s == v else None


def _rational_roots(x: FieldElem, s: int) -> list[FieldElem]:
    f: Fraction = x.value
    num_root = _int_root(abs(f.numerator), s)
    den_root = _int_root(f.denominator, s)
    if num_root is None or den_root is None:
        return []
    r = Fraction(num_root, den_root)
    if s % 2 == 1:
        return [FieldElem(x.spec, r if f > 0 else -r)]
    if f < 0:
        return []
    return [FieldElem(x.spec, r), FieldElem(x.spec, -r)]


def all_sth_roots(x: FieldElem, s: int) -> list[FieldElem]:
    """All y with y^s = x; empty when x is not an s-th power."""
    if s < 1:
        raise ValueError("s must be positive")
    if x.is_zero():
        raise ZeroElementError("roots of zero are not defined here")
    spec = x.spec
    if spec.kind == RATIONALS:
        return _rational_roots(x, s)
    m = spec.q - 1
    if m == 0:
        return [x]  # GF(2) minus zero is trivial, but q >= 2 so unreachable
    import math
    g = math.gcd(s, m)
    e = spec.discrete_log(x)
    if e % g != 0:
        return []
    step = m // g
    e0 = (e // g) * pow(s // g, -1, step) % step
    return [spec.power_of_primitive(e0 + t * step) for t in range(g)]


def canonical_sth_root(x: FieldElem, s: int) -> FieldElem:
    """Deterministic s-th root: smallest exponent against the primitive
    element for finite fields; the positive (or unique real) root over Q."""
    if x.is_zero():
        raise ZeroElementError("roots of zero are not defined here")
    spec = x.spec
    if spec.kind == RATIONALS:
        roots = _rational_roots(x, s)
        if not roots:
            raise NotAnSthPowerError(f"{x} has no rational {s}-th root")
        if len(roots) == 1:
            return roots[0]
        return roots[0] if roots[0].value > 0 else roots[1]
    import math
    m = spec.q - 1
    if m == 0:
        return x
    g = math.gcd(s, m)
    e = spec.discrete_log(x)
    if e % g != 0:
        raise NotAnSthPowerError(f"{x} is not an {s}-th power")
    step = m // g
    e0 = (e // g) * pow(s // g, -1, step) % step
    return spec.power_of_primitive(e0)


def is_sth_power(x: FieldElem, s: int) -> bool:
    """True iff some y satisfies y^s = x (0 counts as 0^s)."""
    if x.is_zero():
        return True
    if x.spec.kind == RATIONALS:
        return bool(_rational_roots(x, s))
    import math
    m = x.spec.q - 1
    if m == 0:
        return True
    return x.spec.discrete_log(x) % math.gcd(s, m) == 0
