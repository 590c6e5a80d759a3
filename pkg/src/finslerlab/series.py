"""Truncated multivariate Taylor arithmetic around a state.

A Series represents f(x + xi, y + eta) expanded in the shift variables
xi_1..xi_n (total degree <= cap_x) and eta_1..eta_n (total degree <=
cap_y).  Retained coefficients are exact up to rounding, exactly like
the jet towers; truncation only removes orders nobody asked for.  One
evaluation of a metric through this ring therefore yields every mixed
partial the curvature pipeline needs, where the towers would need one
re-evaluation per seeding.

Each Series carries a budget (bx, by): how many x- and y-derivatives of
it are still trustworthy.  Conservative rule: combining series takes the
slot-wise minimum, taking a derivative decrements.  The invariant backing
it is hard truncation: every coefficient beyond the budget is stored as
exactly zero, so products never leak stale high-order terms back into
trusted slots.

Coefficient layout and multiplication tables live in a SeriesRing,
cached per (dimension, caps); products are a gather-multiply plus a
bincount over a precomputed index table restricted to the output budget.
"""

import itertools
import math
import numbers
from functools import lru_cache

import numpy as np

from .errors import DomainError, TowerBudgetError


class SeriesRing:
    """Shared tables for one (dimension, cap_x, cap_y) truncation."""

    _instances = {}

    @classmethod
    def get(cls, n, cap_x=2, cap_y=8):
        key = (n, cap_x, cap_y)
        ring = cls._instances.get(key)
        if ring is None:
            ring = cls(n, cap_x, cap_y)
            cls._instances[key] = ring
        return ring

    def __init__(self, n, cap_x, cap_y):
        self.n = n
        self.cap_x = cap_x
        self.cap_y = cap_y
        exps = []
        for xe in itertools.product(range(cap_x + 1), repeat=n):
            if sum(xe) > cap_x:
                continue
            for ye in itertools.product(range(cap_y + 1), repeat=n):
                if sum(ye) > cap_y:
                    continue
                exps.append((xe, ye))
        self.exponents = exps
        self.size = len(exps)
        self._index = {e: i for i, e in enumerate(exps)}
        self.xdeg = np.array([sum(xe) for xe, _ in exps], dtype=np.int64)
        self.ydeg = np.array([sum(ye) for _, ye in exps], dtype=np.int64)

        # mixed-radix keys: digit-wise exponent sums never carry, so the
        # key of a product monomial is the sum of the factor keys
        rx, ry = 2 * cap_x + 1, 2 * cap_y + 1
        keys = np.zeros(self.size, dtype=np.int64)
        for i, (xe, ye) in enumerate(exps):
            k = 0
            for d in xe:
                k = k * rx + d
            for d in ye:
                k = k * ry + d
            keys[i] = k
        self._keys = keys
        self._key_order = np.argsort(keys)
        self._sorted_keys = keys[self._key_order]

        self._full_triples = self._build_triples()
        self._mul_cache = {}
        self._mask_cache = {}
        self._dx_tables = [self._derivative_table("x", k) for k in range(n)]
        self._dy_tables = [self._derivative_table("y", k) for k in range(n)]

    def _build_triples(self):
        iout_parts, ia_parts, ib_parts = [], [], []
        chunk = max(1, (1 << 22) // max(self.size, 1))
        for start in range(0, self.size, chunk):
            rows = np.arange(start, min(start + chunk, self.size))
            sums = self._keys[rows, None] + self._keys[None, :]
            pos = np.searchsorted(self._sorted_keys, sums)
            pos[pos == self.size] = 0
            found = self._key_order[pos]
            ok = self._keys[found] == sums
            ra, cb = np.nonzero(ok)
            iout_parts.append(found[ra, cb])
            ia_parts.append(rows[ra])
            ib_parts.append(cb)
        return (
            np.concatenate(iout_parts).astype(np.int64),
            np.concatenate(ia_parts).astype(np.int64),
            np.concatenate(ib_parts).astype(np.int64),
        )

    def _derivative_table(self, kind, k):
        src, dst, fac = [], [], []
        for i, (xe, ye) in enumerate(self.exponents):
            e = xe if kind == "x" else ye
            if e[k] == 0:
                continue
            shrunk = tuple(d - 1 if j == k else d for j, d in enumerate(e))
            tgt = (shrunk, ye) if kind == "x" else (xe, shrunk)
            src.append(i)
            dst.append(self._index[tgt])
            fac.append(float(e[k]))
        return (
            np.array(dst, dtype=np.int64),
            np.array(src, dtype=np.int64),
            np.array(fac, dtype=np.float64),
        )

    def mul_table(self, bx, by):
        key = (bx, by)
        table = self._mul_cache.get(key)
        if table is None:
            iout, ia, ib = self._full_triples
            keep = (self.xdeg[iout] <= bx) & (self.ydeg[iout] <= by)
            table = (iout[keep], ia[keep], ib[keep])
            self._mul_cache[key] = table
        return table

    def mask(self, bx, by):
        key = (bx, by)
        m = self._mask_cache.get(key)
        if m is None:
            m = ((self.xdeg <= bx) & (self.ydeg <= by)).astype(np.float64)
            self._mask_cache[key] = m
        return m

    def index_of(self, xe, ye):
        return self._index[(tuple(xe), tuple(ye))]

    def factor_of(self, xe, ye):
        out = 1.0
        for d in tuple(xe) + tuple(ye):
            out *= math.factorial(d)
        return out

    # -- constructors ---------------------------------------------------

    def constant(self, value):
        c = np.zeros(self.size)
        c[0] = float(value)
        return Series(self, c, self.cap_x, self.cap_y)

    def variable_x(self, slot, value):
        c = np.zeros(self.size)
        c[0] = float(value)
        e = tuple(1 if j == slot else 0 for j in range(self.n))
        c[self._index[(e, (0,) * self.n)]] = 1.0
        return Series(self, c, self.cap_x, self.cap_y)

    def variable_y(self, slot, value):
        c = np.zeros(self.size)
        c[0] = float(value)
        e = tuple(1 if j == slot else 0 for j in range(self.n))
        c[self._index[((0,) * self.n, e)]] = 1.0
        return Series(self, c, self.cap_x, self.cap_y)

    def state(self, x, y):
        """Series vectors for the coordinates of a state."""
        xs = [self.variable_x(i, x[i]) for i in range(self.n)]
        ys = [self.variable_y(i, y[i]) for i in range(self.n)]
        return xs, ys


@lru_cache(maxsize=None)
def _newton_steps(total_order):
    steps = 0
    reach = 0  # correct through this total degree
    while reach < total_order:
        reach = 2 * reach + 1
        steps += 1
    return steps


class Series:
    __slots__ = ("ring", "c", "bx", "by")

    def __init__(self, ring, c, bx, by):
        self.ring = ring
        self.c = c
        self.bx = bx
        self.by = by

    def value(self):
        return float(self.c[0])

    def _masked_to(self, bx, by):
        if bx == self.bx and by == self.by:
            return self.c
        return self.c * self.ring.mask(bx, by)

    # -- ring operations ------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Series):
            bx, by = min(self.bx, other.bx), min(self.by, other.by)
            return Series(
                self.ring, self._masked_to(bx, by) + other._masked_to(bx, by), bx, by
            )
        if isinstance(other, numbers.Real):
            c = self.c.copy()
            c[0] += float(other)
            return Series(self.ring, c, self.bx, self.by)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Series):
            bx, by = min(self.bx, other.bx), min(self.by, other.by)
            return Series(
                self.ring, self._masked_to(bx, by) - other._masked_to(bx, by), bx, by
            )
        if isinstance(other, numbers.Real):
            c = self.c.copy()
            c[0] -= float(other)
            return Series(self.ring, c, self.bx, self.by)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, numbers.Real):
            c = -self.c
            c[0] += float(other)
            return Series(self.ring, c, self.bx, self.by)
        return NotImplemented

    def __neg__(self):
        return Series(self.ring, -self.c, self.bx, self.by)

    def __mul__(self, other):
        if isinstance(other, Series):
            bx, by = min(self.bx, other.bx), min(self.by, other.by)
            iout, ia, ib = self.ring.mul_table(bx, by)
            c = np.bincount(
                iout, weights=self.c[ia] * other.c[ib], minlength=self.ring.size
            )
            return Series(self.ring, c, bx, by)
        if isinstance(other, numbers.Real):
            return Series(self.ring, self.c * float(other), self.bx, self.by)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other.reciprocal(min(self.bx, other.bx), min(self.by, other.by))
        if isinstance(other, numbers.Real):
            d = float(other)
            if d == 0.0:
                raise DomainError("division by zero constant")
            return Series(self.ring, self.c / d, self.bx, self.by)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, numbers.Real):
            return float(other) * self.reciprocal(self.bx, self.by)
        return NotImplemented

    def __pow__(self, q):
        if isinstance(q, numbers.Real):
            return self.powr(float(q))
        return NotImplemented

    def reciprocal(self, bx, by):
        b0 = float(self.c[0])
        if b0 == 0.0:
            raise DomainError("reciprocal of zero value part")
        b = Series(self.ring, self._masked_to(bx, by), bx, by)
        z = self.ring.constant(1.0 / b0)
        z = Series(self.ring, z._masked_to(bx, by), bx, by)
        for _ in range(_newton_steps(bx + by)):
            z = z * (2.0 - b * z)
        return z

    def sqrt(self):
        b0 = float(self.c[0])
        if b0 <= 0.0:
            raise DomainError("sqrt of non-positive value part %r" % b0)
        w = Series(self.ring, self.ring.constant(1.0 / math.sqrt(b0))._masked_to(self.bx, self.by), self.bx, self.by)
        for _ in range(_newton_steps(self.bx + self.by)):
            w = w * (3.0 - self * (w * w)) * 0.5
        return self * w

    def exp(self):
        # exp(a0 + u) = e^a0 * sum u^k/k!; u is nilpotent at the caps
        a0 = float(self.c[0])
        u = Series(self.ring, self.c.copy(), self.bx, self.by)
        u.c[0] = 0.0
        s = self.ring.constant(1.0)
        for k in range(self.bx + self.by, 0, -1):
            s = 1.0 + (u * (1.0 / k)) * s
        out = s * math.exp(a0)
        return Series(self.ring, out._masked_to(self.bx, self.by), self.bx, self.by)

    def ln(self):
        # ln(a0(1 + v)) = ln a0 + v - v^2/2 + v^3/3 - ...
        a0 = float(self.c[0])
        if a0 <= 0.0:
            raise DomainError("ln of non-positive value part %r" % a0)
        v = Series(self.ring, self.c / a0, self.bx, self.by)
        v.c[0] = 0.0
        t = self.ring.constant(0.0)
        for k in range(self.bx + self.by, 0, -1):
            t = ((-1.0) ** (k + 1)) / k + v * t
        out = v * t
        out.c[0] = math.log(a0)
        return out

    def powr(self, q):
        q = float(q)
        if q == int(q):
            k = int(q)
            if k < 0:
                return self.powr(-q).reciprocal(self.bx, self.by)
            out = Series(
                self.ring,
                self.ring.constant(1.0)._masked_to(self.bx, self.by),
                self.bx,
                self.by,
            )
            base = self
            while k:
                if k & 1:
                    out = out * base
                base = base * base
                k >>= 1
            return out
        if float(self.c[0]) <= 0.0:
            raise DomainError(
                "fractional power of non-positive value part %r" % float(self.c[0])
            )
        return (self.ln() * q).exp()

    # -- derivatives and extraction -------------------------------------

    def dx(self, slot):
        if self.bx < 1:
            raise TowerBudgetError(
                "x-derivative budget exhausted (bx=%d)" % self.bx
            )
        dst, src, fac = self.ring._dx_tables[slot]
        c = np.zeros(self.ring.size)
        c[dst] = self.c[src] * fac
        return Series(self.ring, c * self.ring.mask(self.bx - 1, self.by), self.bx - 1, self.by)

    def dy(self, slot):
        if self.by < 1:
            raise TowerBudgetError(
                "y-derivative budget exhausted (by=%d)" % self.by
            )
        dst, src, fac = self.ring._dy_tables[slot]
        c = np.zeros(self.ring.size)
        c[dst] = self.c[src] * fac
        return Series(self.ring, c * self.ring.mask(self.bx, self.by - 1), self.bx, self.by - 1)

    def partial_value(self, xe, ye):
        """Float value of the mixed partial with exponent (xe, ye)."""
        if sum(xe) > self.bx or sum(ye) > self.by:
            raise TowerBudgetError(
                "partial (%s, %s) beyond budget (%d, %d)"
                % (tuple(xe), tuple(ye), self.bx, self.by)
            )
        idx = self.ring.index_of(xe, ye)
        return float(self.c[idx]) * self.ring.factor_of(xe, ye)

    def __repr__(self):
        return "Series(n=%d, value=%r, budget=(%d, %d))" % (
            self.ring.n,
            self.value(),
            self.bx,
            self.by,
        )


def embed_series(src, dst_ring):
    """Re-express a series in a larger ring of the same dimension.

    Every monomial of the source must exist in the destination; the
    result keeps the source x-budget and gains the destination's full
    y-budget when the source carries no y-dependence at all (the
    quadrature-density case), otherwise the source y-budget.
    """
    if src.ring.n != dst_ring.n:
        raise ValueError("ring dimension mismatch")
    if src.ring.cap_x > dst_ring.cap_x or src.ring.cap_y > dst_ring.cap_y:
        raise ValueError("destination ring too small to embed into")
    c = np.zeros(dst_ring.size)
    for k, (xe, ye) in enumerate(src.ring.exponents):
        if src.c[k] != 0.0:
            c[dst_ring.index_of(xe, ye)] = src.c[k]
    by = dst_ring.cap_y if src.ring.cap_y == 0 else src.by
    return Series(dst_ring, c, src.bx, by)
