"""Constructive decompositions for power words: s-th root extraction,
two-factor decompositions, p-power roots of unipotent matrices, width
prediction, and the finitary delegation.

Every returned witness re-verifies by exact arithmetic before it leaves
this module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

from .errors import (
    NoRootError,
    NotCoprimeExponentError,
    NotInVerbalError,
    NotLevelError,
    SearchExhaustedError,
)
from .field import (
    FieldElem,
    FieldSpec,
    all_sth_roots,
    canonical_sth_root,
    is_sth_power,
)
from .trimat import (
    FinitaryMat,
    TriMat,
    append_block,
    is_level,
    last_column,
    principal_block,
)
from .words import PowerWord, membership, p_adic_valuation, verbal_descriptor

SEARCH_HARD_CAP = 10 ** 6
FIND_ROOT_NODE_CAP = 50_000


# width prediction

def width_predict(spec: FieldSpec, n: int, s: int, *,
                  finitary: bool = False) -> tuple[int, str]:
    """Predicted width of the verbal subgroup of x^s, with its case label.

    Width 0 means the subgroup is trivial.
    """
    if s < 1:
        raise ValueError("s must be positive")
    if finitary:
        if not spec.is_finite or s % spec.p != 0:
            return 1, "a"
        return 2, "b"
    if not spec.is_finite:
        return 1, "a"
    p, q = spec.p, spec.q
    divides_p = s % p == 0
    divides_units = q == 2 or s % (q - 1) == 0
    case = "a" if not divides_p else ("b" if not divides_units else "c")
    if n == 1:
        return (0 if divides_units else 1), case
    if not divides_p:
        return 1, case
    if not divides_units:
        return 2, case
    pt = p ** p_adic_valuation(s, p)
    if pt >= n:
        return 0, case
    return (1 if n <= pt + 2 else 2), case


# witnesses

@dataclass(frozen=True)
class PowerWitness:
    """Certificate that a target equals a product of s-th powers."""

    s: int
    factors: tuple
    case: str
    strategy: str

    def product(self):
        prod = None
        for f in self.factors:
            p = f ** self.s
            prod = p if prod is None else prod * p
        return prod

    def verify(self, target) -> bool:
        return self.product() == target

    def to_json(self) -> dict:
        return {"s": self.s, "case": self.case, "strategy": self.strategy,
                "factors": [f.to_json() for f in self.factors]}


def _certified(s: int, factors: Sequence, target, case: str,
               strategy: str) -> PowerWitness:
    w = PowerWitness(s, tuple(factors), case, strategy)
    if not w.verify(target):
        raise AssertionError("witness failed exact re-verification")
    return w


# grid helpers (plain upper-triangular arrays of FieldElem, diagonal free)

def _grid_identity(spec: FieldSpec, n: int) -> list[list[FieldElem]]:
    zero, one = spec.zero(), spec.one()
    return [[one if i == j else zero for j in range(n)] for i in range(n)]

def _grid_zero(spec: FieldSpec, n: int) -> list[list[FieldElem]]:
    zero = spec.zero()
    return [[zero] * n for _ in range(n)]


def _grid_mul(a, b, spec: FieldSpec):
    n = len(a)
    zero = spec.zero()
    out = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            acc = zero
            for k in range(i, j + 1):
                if not a[i][k].is_zero():
                    acc = acc + a[i][k] * b[k][j]
            out[i][j] = acc
    return out


def _grid_pow(a, e: int, spec: FieldSpec):
    n = len(a)
    result = _grid_identity(spec, n)
    base = [list(row) for row in a]
    while e:
        if e & 1:
            result = _grid_mul(result, base, spec)
        base = _grid_mul(base, base, spec)
        e >>= 1
    return result


def _geometric_sum(c_grid, delta: FieldElem, s: int, spec: FieldSpec):
    """sum_{k=0}^{s-1} delta^k * C^(s-1-k), computed Horner style."""
    n = len(c_grid)
    f = _grid_identity(spec, n)
    dk = spec.one()
    for _ in range(1, s):
        f = _grid_mul(f, c_grid, spec)
        dk = dk * delta
        for i in range(n):
            f[i][i] = f[i][i] + dk
    return f


def _solve_upper_invertible(f, b: Sequence[FieldElem]) -> list[FieldElem]:
    """Back substitution for f d = b; every f[i][i] must be nonzero."""
    m = len(b)
    d: list[Optional[FieldElem]] = [None] * m
    for i in range(m - 1, -1, -1):
        acc = b[i]
        for j in range(i + 1, m):
            acc = acc - f[i][j] * d[j]
        d[i] = acc / f[i][i]
    return d  # type: ignore[return-value]


def _upper_solutions(f, b: Sequence[FieldElem],
                     free_values: Sequence[FieldElem]) -> Iterator[list[FieldElem]]:
    """All solutions of the upper-triangular system f d = b, branching over
    free unknowns (zero diagonal entries) in the given value order."""
    m = len(b)

    def rec(i: int, d: list):
        if i < 0:
            yield list(d)
            return
        acc = b[i]
        for j in range(i + 1, m):
            acc = acc - f[i][j] * d[j]
        if not f[i][i].is_zero():
            d[i] = acc / f[i][i]
            yield from rec(i - 1, d)
        elif acc.is_zero():
            for v in free_values:
                d[i] = v
                yield from rec(i - 1, d)
        # inconsistent row: no solutions on this branch

    yield from rec(m - 1, [None] * m)


def _matvec(m: TriMat, col: Sequence[FieldElem]) -> list[FieldElem]:
    out = []
    for i in range(m.n):
        acc = m.spec.zero()
        for j in range(i, m.n):
            acc = acc + m.entries[i][j] * col[j]
        out.append(acc)
    return out


def _scale(m: TriMat, c: FieldElem) -> TriMat:
    return TriMat(m.spec, [[c * e for e in row] for row in m.entries])


# case (a): single-root extraction for exponents coprime to the characteristic

def _root_via_blocks(a: TriMat, s: int, diag_roots: Sequence[FieldElem]) -> TriMat:
    """Grow the root block by block; each step solves f d = b where f is the
    geometric sum of the current root block and the new diagonal root.

    Raises NoRootError if some f has a zero diagonal entry (cannot happen in
    the coprime or distinct-diagonal regimes)."""
    spec = a.spec
    c = TriMat(spec, [[diag_roots[0]]])
    for m in range(1, a.n):
        delta = diag_roots[m]
        b_col = [a.entries[i][m] for i in range(m)]
        f = _geometric_sum([list(r) for r in c.entries], delta, s, spec)
        for i in range(m):
            if f[i][i].is_zero():
                raise NoRootError(
                    "geometric sum has a zero diagonal entry; no direct solve")
        d_col = _solve_upper_invertible(f, b_col)
        c = append_block(c, d_col, delta)
    if c ** s != a:
        raise AssertionError("constructed root failed verification")
    return c


def root_extract_coprime(a: TriMat, s: int) -> TriMat:
    """Single s-th root when s is coprime to the characteristic.

    The diagonal of the root is the entrywise canonical s-th root of the
    target's diagonal, so equal diagonal entries receive equal roots and
    every solve stays nonsingular.
    """
    spec = a.spec
    if spec.is_finite and s % spec.p == 0:
        raise NotCoprimeExponentError(f"{s} is divisible by the characteristic {spec.p}")
    if not membership(a, verbal_descriptor(PowerWord(s), spec, a.n)):
        raise NotInVerbalError("target is not in the verbal subgroup of x^s")
    try:
        diag_roots = [canonical_sth_root(x, s) for x in a.diag()]
    except Exception as exc:  # pragma: no cover - membership filters this
        raise NotInVerbalError(str(exc)) from exc
    return _root_via_blocks(a, s, diag_roots)


# general bounded single-root finder (any exponent)

def find_root(a: TriMat, s: int, *, node_cap: int = FIND_ROOT_NODE_CAP) -> Optional[TriMat]:
    """Some c with c^s = a, or None if the bounded search finds none.

    Backtracks over the s-th roots of each diagonal entry (canonical root
    first) and allows singular block solves with free unknowns tried in
    field enumeration order.  Not claimed complete beyond the node cap.
    """
    spec = a.spec
    if not spec.is_finite:
        try:
            return root_extract_coprime(a, s)
        except (NotInVerbalError, NoRootError):
            return None
    per_pos = []
    for x in a.diag():
        roots = all_sth_roots(x, s)
        if not roots:
            return None
        per_pos.append(roots)
    free_values = spec.elements()
    budget = [node_cap]

    def extend(c_grid: list, m: int) -> Optional[TriMat]:
        if m == a.n:
            cand = TriMat(spec, c_grid)
            return cand if cand ** s == a else None
        b_col = [a.entries[i][m] for i in range(m)]
        for delta in per_pos[m]:
            if budget[0] <= 0:
                return None
            budget[0] -= 1
            f = _geometric_sum(c_grid, delta, s, spec) if m else []
            for d_col in _upper_solutions(f, b_col, free_values):
                zero = spec.zero()
                grown = [row + [d_col[i]] for i, row in enumerate(c_grid)]
                grown.append([zero] * m + [delta])
                found = extend(grown, m + 1)
                if found is not None:
                    return found
                if budget[0] <= 0:
                    return None
        return None

    return extend([], 0)


# case (b): two-factor decomposition

def _first_unit_with_sth_power_not_one(spec: FieldSpec, s: int) -> FieldElem:
    if not spec.is_finite:
        return spec.elem(2)
    one = spec.one()
    for x in spec.elements()[1:]:
        if x ** s != one:
            return x
    raise NoRootError(f"every unit is an {s}-th root of unity")


def _pattern_family(spec: FieldSpec, n: int, *, unipotent: bool,
                    max_candidates: int = SEARCH_HARD_CAP) -> Iterator[TriMat]:
    """Deterministic candidate matrices, widening the band one superdiagonal
    offset at a time; capped at min(q^(2n), max_candidates) yields."""
    cap = min(spec.q ** (2 * n), max_candidates)
    count = 0
    elems = spec.elements()
    units = elems[1:]
    one = spec.one()
    diag_choices = [(one,) * n] if unipotent else list(itertools.product(units, repeat=n))
    for width in range(1, n):
        outer = [(i, i + width) for i in range(n - width)]
        inner = [(i, j) for i in range(n) for j in range(i + 1, n) if j - i < width]
        outer_choices = itertools.product(elems, repeat=len(outer))
        for outer_vals in outer_choices:
            if width > 1 and all(v.is_zero() for v in outer_vals):
                continue  # already yielded in a narrower tier
            for inner_vals in itertools.product(elems, repeat=len(inner)):
                for diag in diag_choices:
                    upper = dict(zip(outer, outer_vals))
                    upper.update(zip(inner, inner_vals))
                    yield TriMat.from_diag_and_upper(spec, n, diag, upper)
                    count += 1
                    if count >= cap:
                        return


def two_power_decompose(a: TriMat, s: int) -> PowerWitness:
    """Write a as g^s h^s.  Strategy ladder: the block construction with an
    off-unity scalar, then diagonal separation, then bounded search."""
    spec = a.spec
    n = a.n
    if not membership(a, verbal_descriptor(PowerWord(s), spec, n)):
        raise NotInVerbalError("target is not in the verbal subgroup of x^s")
    _, case = width_predict(spec, n, s)
    ident = TriMat.identity(spec, n)
    if a.is_identity():
        return _certified(s, [ident, ident], a, case, "identity")
    if not spec.is_finite or s % spec.p != 0:
        c = root_extract_coprime(a, s)
        return _certified(s, [c, ident], a, case, "root")
    if spec.q == 2 or s % (spec.q - 1) == 0:
        raise NotInVerbalError(
            "exponent is divisible by q-1; use the unipotent reduction instead")

    # (i) block construction: needs a single root of the leading block
    if n >= 2:
        lead = principal_block(a, n - 1)
        root = find_root(lead, s)
        if root is not None:
            gamma = a.entries[n - 1][n - 1]
            alpha = canonical_sth_root(gamma, s)
            beta = _first_unit_with_sth_power_not_one(spec, s)
            sigma = spec.zero()
            bk = spec.one()
            for _ in range(s):
                sigma = sigma + bk
                bk = bk * beta
            scale = (beta ** s) * sigma.inv()
            c_col = [scale * v for v in _matvec(lead.inv(), last_column(a))]
            g = append_block(_scale(root, beta.inv()), [spec.zero()] * (n - 1), alpha)
            h = append_block(_scale(TriMat.identity(spec, n - 1), beta), c_col, spec.one())
            return _certified(s, [g, h], a, case, "paper")

    # (ii) diagonal separation
    unit_powers = [x for x in spec.elements()[1:] if is_sth_power(x, s)]
    target_diag = a.diag()

    def pick(i: int, chosen: list, used: set) -> Optional[list]:
        if i == n:
            return list(chosen)
        for u in unit_powers:
            quot = target_diag[i] / u
            if quot not in used:
                chosen.append(u)
                used.add(quot)
                got = pick(i + 1, chosen, used)
                if got is not None:
                    return got
                chosen.pop()
                used.discard(quot)
        return None

    d_vals = pick(0, [], set())
    if d_vals is not None:
        g = TriMat.from_diag_and_upper(spec, n, [canonical_sth_root(u, s) for u in d_vals])
        d_mat = TriMat.from_diag_and_upper(spec, n, d_vals)
        z = d_mat.inv() * a
        h = _root_via_blocks(z, s, [canonical_sth_root(x, s) for x in z.diag()])
        return _certified(s, [g, h], a, case, "diag-sep")

    # (iii) bounded search over the pattern family
    tried = 0
    for g in _pattern_family(spec, n, unipotent=False):
        tried += 1
        z = (g.inv() ** s) * a
        h = find_root(z, s, node_cap=2000)
        if h is not None:
            return _certified(s, [g, h], a, case, "search")
    raise SearchExhaustedError(
        f"no two-factor decomposition found after {tried} candidates", tried)


# case (c): p-power roots of unipotent matrices

def _is_p_power(pt: int, p: int) -> bool:
    while pt % p == 0:
        pt //= p
    return pt == 1


def _window_superdiagonals(n: int, pt: int, targets: Sequence[FieldElem],
                           spec: FieldSpec) -> Iterator[list[FieldElem]]:
    """Superdiagonal assignments whose sliding pt-products match the
    offset-pt targets, in field enumeration order."""
    elems = spec.elements()

    def rec(vals: list):
        k = len(vals)  # entries m_1..m_k chosen (0-based list)
        if k == n - 1:
            yield list(vals)
            return
        for v in elems:
            vals.append(v)
            i = len(vals) - pt  # window ending at this entry, 0-based start
            if i >= 0:
                prod = spec.one()
                for l in range(i, i + pt):
                    prod = prod * vals[l]
                if prod != targets[i]:
                    vals.pop()
                    continue
            yield from rec(vals)
            vals.pop()

    yield from rec([])


def _gaussian_solve(rows: list[list[FieldElem]], rhs: list[FieldElem],
                    spec: FieldSpec) -> Optional[list[FieldElem]]:
    """Particular solution of a small dense system, free unknowns zero."""
    m = len(rows)
    k = len(rows[0]) if rows else 0
    aug = [list(rows[i]) + [rhs[i]] for i in range(m)]
    pivots = []
    r = 0
    for col in range(k):
        pivot = next((i for i in range(r, m) if not aug[i][col].is_zero()), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = aug[r][col].inv()
        aug[r] = [v * inv for v in aug[r]]
        for i in range(m):
            if i != r and not aug[i][col].is_zero():
                factor = aug[i][col]
                aug[i] = [a - factor * b for a, b in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if not aug[i][k].is_zero():
            return None
    sol = [spec.zero()] * k
    for row_idx, col in enumerate(pivots):
        sol[col] = aug[row_idx][k]
    return sol


def _nilpotent_root_direct(u: TriMat, pt: int) -> Optional[TriMat]:
    """Constructive M with (e + M)^pt = u: pick the superdiagonal to realize
    the offset-pt entries, then fill longer offsets one band at a time by
    linear solves (free unknowns zero)."""
    spec, n = u.spec, u.n
    max_off = n - pt
    if max_off <= 0:
        return TriMat.identity(spec, n) if u.is_identity() else None
    targets = [u.entries[i][i + pt] for i in range(n - pt)]
    zero = spec.zero()
    for sup in _window_superdiagonals(n, pt, targets, spec):
        grid = _grid_zero(spec, n)
        for k, v in enumerate(sup):
            grid[k][k + 1] = v
        ok = True
        for d in range(pt + 1, n):
            o = d - pt + 1  # offset of the unknowns entering at this band
            unknown_pos = [(k, k + o) for k in range(n - o)]
            base = _grid_pow(grid, pt, spec)
            rhs = [u.entries[i][i + d] - base[i][i + d] for i in range(n - d)]
            # entries at this band are affine in the new unknowns, so one
            # probe power per unknown yields its coefficient column
            cols = []
            for (k, kk) in unknown_pos:
                probe = [list(r) for r in grid]
                probe[k][kk] = spec.one()
                pp = _grid_pow(probe, pt, spec)
                cols.append([pp[i][i + d] - base[i][i + d] for i in range(n - d)])
            rows = [[cols[c][i] for c in range(len(unknown_pos))]
                    for i in range(n - d)]
            sol = _gaussian_solve(rows, rhs, spec) if rows else [zero] * len(unknown_pos)
            if sol is None:
                ok = False
                break
            for (k, kk), v in zip(unknown_pos, sol):
                grid[k][kk] = v
        if not ok:
            continue
        cand = [list(r) for r in grid]
        for i in range(n):
            cand[i][i] = spec.one()
        root = TriMat(spec, cand)
        if root ** pt == u:
            return root
    return None


def unipotent_ppower_root(u: TriMat, pt: int,
                          *, search_cap: int = 2 * 10 ** 6) -> TriMat:
    """A unitriangular root of exponent pt = p^t of a level-pt matrix,
    using (e + M)^(p^t) = e + M^(p^t) in characteristic p.

    Falls back to exhaustive search over strictly-upper supports; raises
    NoRootError only when that search is exhaustive.
    """
    spec, n = u.spec, u.n
    p = spec.char
    if p == 0:
        raise ValueError("defined only in positive characteristic")
    if not _is_p_power(pt, p):
        raise ValueError(f"{pt} is not a power of {p}")
    if not is_level(u, pt):
        raise NotLevelError(f"target is not level {pt}")
    if u.is_identity():
        return TriMat.identity(spec, n)
    direct = _nilpotent_root_direct(u, pt)
    if direct is not None:
        return direct
    positions = [(i, j) for i in range(n) for j in range(i + 1, n)
                 if j - i <= n - pt]
    total = spec.q ** len(positions)
    if total > search_cap:
        raise SearchExhaustedError(
            f"exhaustive root search over {total} candidates exceeds the cap", 0)
    elems = spec.elements()
    one = spec.one()
    for combo in itertools.product(elems, repeat=len(positions)):
        grid = _grid_zero(spec, n)
        for (i, j), v in zip(positions, combo):
            grid[i][j] = v
        for i in range(n):
            grid[i][i] = one
        cand = TriMat(spec, grid)
        if cand ** pt == u:
            return cand
    raise NoRootError(f"no {pt}-th root of the unipotent target exists")


def _ut_exponent(spec: FieldSpec, n: int) -> int:
    p = spec.char
    e = 1
    while e < n:
        e *= p
    return e


def power_decompose(a: TriMat, s: int) -> PowerWitness:
    """Minimal-length witness this engine can certify for a target in the
    verbal subgroup of x^s."""
    spec, n = a.spec, a.n
    desc = verbal_descriptor(PowerWord(s), spec, n)
    if not membership(a, desc):
        raise NotInVerbalError("target is not in the verbal subgroup of x^s")
    _, case = width_predict(spec, n, s)
    if not spec.is_finite or s % spec.p != 0:
        return _certified(s, [root_extract_coprime(a, s)], a, case, "root")
    if spec.q > 2 and s % (spec.q - 1) != 0:
        c = find_root(a, s)
        if c is not None:
            return _certified(s, [c], a, case, "root")
        return two_power_decompose(a, s)
    # exponent divisible by both p and q-1: reduce to a p-power root of a
    # unipotent target, then correct by the coprime cofactor
    if desc.kind == "trivial":
        return _certified(s, [TriMat.identity(spec, n)], a, case, "root")
    pt = spec.p ** p_adic_valuation(s, spec.p)
    cofactor = s // pt
    j = pow(cofactor, -1, _ut_exponent(spec, n))
    try:
        m = unipotent_ppower_root(a, pt)
        return _certified(s, [m ** j], a, case, "unipotent-root")
    except NoRootError:
        pass
    tried = 0
    for g in _pattern_family(spec, n, unipotent=True):
        tried += 1
        z = (g.inv() ** s) * a
        try:
            m = unipotent_ppower_root(z, pt)
        except NoRootError:
            continue
        return _certified(s, [g, m ** j], a, case, "search+root")
    raise SearchExhaustedError(
        f"no decomposition found after {tried} unipotent candidates", tried)


# finitary delegation

def finitary_membership(f: FinitaryMat, s: int) -> bool:
    spec = f.spec
    if not spec.is_finite or s % spec.p != 0 or (spec.q > 2 and s % (spec.q - 1) != 0):
        return all(is_sth_power(x, s) for x in f.corner.diag())
    pt = spec.p ** p_adic_valuation(s, spec.p)
    return is_level(f.corner, pt)


def finitary_power_decompose(f: FinitaryMat, s: int,
                             *, pad: Optional[int] = None) -> PowerWitness:
    """Decompose a finitary target by working at its corner size, retrying
    at enlarged corners; witness factors may have larger corners."""
    spec = f.spec
    if not finitary_membership(f, s):
        raise NotInVerbalError("corner is not in the finitary verbal subgroup")
    if pad is None:
        pad = (spec.p ** p_adic_valuation(s, spec.p)
               if spec.is_finite and s % spec.p == 0 else 0)
    last_exc: Optional[Exception] = None
    for size in range(f.m, f.m + pad + 1):
        try:
            inner = power_decompose(f.embed(size), s)
        except (SearchExhaustedError, NoRootError) as exc:
            last_exc = exc
            continue
        factors = [FinitaryMat(x) for x in inner.factors]
        return _certified(s, factors, f, inner.case, inner.strategy)
    raise SearchExhaustedError(
        f"no witness up to corner {f.m + pad}: {last_exc}", 0)
