"""Vectorized kernel for the brute-force oracle.

Matrices are stacks of integer codes (enumeration indices of field
elements) in int8 arrays of shape (..., n, n).  Prime fields use direct
mod-p arithmetic (codes are residues); extensions go through lookup
tables.  Everything here is exact integer work; no floats.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import GuardExceededError, NotFiniteError
from .field import FieldSpec
from .trimat import TriMat, _free_positions

CHUNK = 1 << 19


class FieldKernel:
    """Index-coded arithmetic tables for one finite field."""

    def __init__(self, spec: FieldSpec):
        if not spec.is_finite:
            raise NotFiniteError("kernel needs a finite field")
        self.spec = spec
        self.q = spec.q
        self.prime = spec.kind == "prime"
        self.p = spec.p
        elems = spec.elements()
        q = self.q
        self.add_table = np.zeros((q, q), dtype=np.int8)
        self.mul_table = np.zeros((q, q), dtype=np.int8)
        self.inv_table = np.zeros(q, dtype=np.int8)
        self.neg_table = np.zeros(q, dtype=np.int8)
        for i, x in enumerate(elems):
            self.neg_table[i] = (-x).index
            if i:
                self.inv_table[i] = x.inv().index
            for j, y in enumerate(elems):
                self.add_table[i, j] = (x + y).index
                self.mul_table[i, j] = (x * y).index

    # elementwise

    def add(self, a, b):
        if self.prime:
            return (a.astype(np.int16) + b) % self.p
        return self.add_table[a, b]

    def mul(self, a, b):
        if self.prime:
            return (a.astype(np.int16) * b) % self.p
        return self.mul_table[a, b]

    def neg(self, a):
        return self.neg_table[a]

    def inv(self, a):
        return self.inv_table[a]

    def unit_power_subset(self, s: int) -> np.ndarray:
        """Codes of the nonzero s-th powers."""
        from .field import is_sth_power
        return np.array(sorted(x.index for x in self.spec.elements()[1:]
                               if is_sth_power(x, s)), dtype=np.int8)

    # batched matrices

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.prime:
            out = np.matmul(a.astype(np.int32), b.astype(np.int32)) % self.p
            return out.astype(np.int8)
        n = a.shape[-1]
        a, b = np.broadcast_arrays(a, b)
        acc = self.mul_table[a[..., :, 0:1], b[..., 0:1, :]]
        for k in range(1, n):
            term = self.mul_table[a[..., :, k:k + 1], b[..., k:k + 1, :]]
            acc = self.add_table[acc, term]
        return acc

    def matmul_chunked(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.ndim == 2 and b.ndim == 2:
            return self.matmul(a, b)
        count = len(b) if a.ndim == 2 else len(a)
        if count <= CHUNK:
            return self.matmul(a, b)
        out = np.empty((count,) + a.shape[-2:], dtype=np.int8)
        for lo in range(0, count, CHUNK):
            hi = lo + CHUNK
            aa = a if a.ndim == 2 else a[lo:hi]
            bb = b if b.ndim == 2 else b[lo:hi]
            out[lo:hi] = self.matmul(aa, bb)
        return out

    def identity_stack(self, count: int, n: int) -> np.ndarray:
        out = np.zeros((count, n, n), dtype=np.int8)
        one = self.spec.one().index
        for i in range(n):
            out[:, i, i] = one
        return out

    def matpow(self, a: np.ndarray, e: int) -> np.ndarray:
        n = a.shape[-1]
        if a.ndim == 2:
            a = a[None]
        result = self.identity_stack(len(a), n)
        base = a.copy()
        while e:
            if e & 1:
                result = self.matmul_chunked(result, base)
            e >>= 1
            if e:
                base = self.matmul_chunked(base, base)
        return result

    def matinv(self, a: np.ndarray) -> np.ndarray:
        """Batched triangular inverse by back substitution."""
        n = a.shape[-1]
        out = np.zeros_like(a)
        for i in range(n):
            out[..., i, i] = self.inv(a[..., i, i])
        for off in range(1, n):
            for i in range(n - off):
                j = i + off
                acc = self.mul(a[..., i, i + 1], out[..., i + 1, j])
                for k in range(i + 2, j + 1):
                    acc = self.add(acc, self.mul(a[..., i, k], out[..., k, j]))
                out[..., i, j] = self.neg_table[self.mul(out[..., i, i], acc)]
        return out

    # keys

    def encode(self, a: np.ndarray) -> np.ndarray:
        n = a.shape[-1]
        flat = a.reshape(a.shape[:-2] + (n * n,)).astype(np.int64)
        weights = self.q ** np.arange(n * n, dtype=np.int64)
        return flat @ weights

    def decode(self, keys: np.ndarray, n: int) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.int64)
        out = np.empty(keys.shape + (n * n,), dtype=np.int8)
        rem = keys.copy()
        for pos in range(n * n):
            out[..., pos] = rem % self.q
            rem //= self.q
        return out.reshape(keys.shape + (n, n))

    def to_trimat(self, mat: np.ndarray) -> TriMat:
        spec = self.spec
        n = mat.shape[-1]
        return TriMat(spec, [[spec.elem_at(int(mat[i, j])) for j in range(n)]
                             for i in range(n)])

    def from_trimat(self, m: TriMat) -> np.ndarray:
        return np.array([[e.index for e in row] for row in m.entries],
                        dtype=np.int8)


def enumerate_group_array(kern: FieldKernel, n: int, kind: str = "full", *,
                          level: int = 1,
                          guard: int = 10 ** 7) -> np.ndarray:
    """The whole group as a code array, in the same deterministic order as
    trimat.enumerate_group."""
    q = kern.q
    diag_varies, free = _free_positions(n, kind, level)
    radices = [q - 1] * n if diag_varies else []
    radices += [q] * len(free)
    total = 1
    for r in radices:
        total *= r
    if total > guard:
        raise GuardExceededError(f"group order {total} exceeds guard {guard}")
    out = np.zeros((total, n, n), dtype=np.int8)
    one = kern.spec.one().index
    for i in range(n):
        out[:, i, i] = one
    idx = np.arange(total, dtype=np.int64)
    digits = []
    for r in reversed(radices):
        digits.append(idx % r)
        idx //= r
    digits.reverse()
    pos = 0
    if diag_varies:
        for i in range(n):
            out[:, i, i] = (digits[pos] + 1).astype(np.int8)  # skip the zero code
            pos += 1
    for (i, j) in free:
        out[:, i, j] = digits[pos].astype(np.int8)
        pos += 1
    return out


def is_level_mask(a: np.ndarray, r: int, one_code: int) -> np.ndarray:
    """Boolean mask of the batch entries lying in the level-r subgroup."""
    n = a.shape[-1]
    mask = np.ones(a.shape[:-2], dtype=bool)
    for i in range(n):
        mask &= a[..., i, i] == one_code
        for j in range(i + 1, min(i + r, n)):
            mask &= a[..., i, j] == 0
    return mask


def diag_in_subset_mask(a: np.ndarray, subset: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    mask = np.ones(a.shape[:-2], dtype=bool)
    for i in range(n):
        mask &= np.isin(a[..., i, i], subset)
    return mask


def member_sorted(keys: np.ndarray, sorted_keys: np.ndarray) -> np.ndarray:
    """Membership of keys in a sorted key array."""
    pos = np.searchsorted(sorted_keys, keys)
    pos = np.minimum(pos, len(sorted_keys) - 1)
    return sorted_keys[pos] == keys
