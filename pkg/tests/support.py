"""Shared numerical oracles for the test suite.

Finite differences are the independent check on the jet tower.  Naive
central differences with a tiny step drown high-order partials in
rounding noise (step 1e-4 at order 4 leaves ~1e-1 absolute noise in
float64), so the oracle uses balanced steps plus Richardson
extrapolation: truncation O(h^6) with two extrapolation levels while the
smallest step stays large enough to keep rounding in check.
"""


def nested_central(f, x, y, wrt, h):
    """Composed central differences, one application per slot in wrt."""
    if not wrt:
        return f(list(x), list(y))
    (kind, idx), rest = wrt[0], wrt[1:]

    def shifted(sign):
        if kind == "x":
            x2 = list(x)
            x2[idx] += sign * h
            return nested_central(f, x2, y, rest, h)
        y2 = list(y)
        y2[idx] += sign * h
        return nested_central(f, x, y2, rest, h)

    return (shifted(+1.0) - shifted(-1.0)) / (2.0 * h)


def fd_partial(f, x, y, wrt, h0=None, levels=2):
    """Richardson-extrapolated mixed partial of f at (x, y).

    h0 defaults increase with the order so the 2^order rounding
    amplification stays below the truncation gain.
    """
    order = len(wrt)
    if h0 is None:
        h0 = {0: 1e-2, 1: 1e-2, 2: 1e-2, 3: 2e-2, 4: 2e-2}.get(order, 4e-2)
    rows = [nested_central(f, x, y, wrt, h0 / 2.0**i) for i in range(levels + 1)]
    for m in range(1, levels + 1):
        fac = 4.0**m
        rows = [
            (fac * rows[i + 1] - rows[i]) / (fac - 1.0)
            for i in range(len(rows) - 1)
        ]
    return rows[0]


def rel_error(got, want, floor=1.0):
    """|got - want| over a denominator that never collapses below floor."""
    return abs(got - want) / max(abs(want), floor)
