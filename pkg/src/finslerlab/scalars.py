"""Ring-generic scalar helpers.

Geometry code is written against an abstract scalar ring: plain floats,
jet towers (jets module) or truncated series (series module).  The free
functions here dispatch on the argument type so the same source text
evaluates in every ring with identical control flow.
"""

import math
import numbers

from .errors import DomainError


def value_of(v):
    """Level-0 float value of a ring scalar."""
    if isinstance(v, numbers.Real):
        return float(v)
    return v.value()


def sqrt(v):
    if isinstance(v, numbers.Real):
        v = float(v)
        if v <= 0.0:
            raise DomainError("sqrt of non-positive value %r" % v)
        return math.sqrt(v)
    return v.sqrt()


def exp(v):
    if isinstance(v, numbers.Real):
        return math.exp(float(v))
    return v.exp()


def ln(v):
    if isinstance(v, numbers.Real):
        v = float(v)
        if v <= 0.0:
            raise DomainError("ln of non-positive value %r" % v)
        return math.log(v)
    return v.ln()


def powr(v, q):
    """v**q for literal rational q.

    Integer exponents use binary powering (valid for any sign of v);
    everything else goes through exp(q*ln v) and needs v > 0.  The float
    branch mirrors the jet/series branch operation-for-operation so
    value parts stay bit-identical across rings.
    """
    q = float(q)
    if not isinstance(v, numbers.Real):
        return v.powr(q)
    v = float(v)
    if q == int(q):
        return _ipow(v, int(q))
    if v <= 0.0:
        raise DomainError("fractional power of non-positive value %r" % v)
    return math.exp(q * math.log(v))


def _ipow(v, k):
    if k < 0:
        if v == 0.0:
            raise DomainError("negative power of zero")
        return 1.0 / _ipow(v, -k)
    out = 1.0
    base = v
    while k:
        if k & 1:
            out = out * base
        base = base * base
        k >>= 1
    return out


def ring_det(a):
    """Determinant of a small square matrix of ring scalars (n <= 4).

    Cofactor expansion: branch-free, so it differentiates cleanly in
    any ring.  Matrix is a list of rows.
    """
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if n == 3:
        return (
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        )
    if n == 4:
        total = None
        for j in range(4):
            minor = [[a[r][c] for c in range(4) if c != j] for r in range(1, 4)]
            term = a[0][j] * ring_det(minor)
            if j % 2:
                term = -term
            total = term if total is None else total + term
        return total
    raise ValueError("ring_det supports n <= 4, got %d" % n)


def ring_inv(a):
    """Inverse of a small square matrix of ring scalars via adjugate/det."""
    n = len(a)
    det = ring_det(a)
    if n == 1:
        one = det / det
        return [[one / det]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [a[r][c] for c in range(n) if c != j]
                for r in range(n)
                if r != i
            ]
            cof = ring_det(minor)
            if (i + j) % 2:
                cof = -cof
            out[j][i] = cof / det
    return out
