"""Finsler metric abstraction, built-in families, pointwise tensors.

A MetricSpec wraps a scalar-ring-generic evaluator for F(x, y) together
with its chart and cone domains.  The pointwise operations here
(fundamental tensor, its inverse, Cartan torsion) differentiate F^2
through jet towers; the deeper curvature pipeline lives in the engine
module and re-derives these quantities independently, which the tests
exploit as a cross-check.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import expr as dsl
from .errors import ConfigError, RegularityError
from .jets import mixed_partial
from .scalars import powr, sqrt, value_of


@dataclass(frozen=True)
class MetricSpec:
    name: str
    dimension: int
    F: Callable  # (x_vec, y_vec) -> scalar, any ring
    chart_domain: Callable  # x_vec -> bool
    cone_domain: Callable  # (x_vec, y_vec) -> bool
    parameters: dict = field(default_factory=dict)
    family: str = "dsl"
    # for (alpha, beta) families: ring-generic coefficient evaluators
    a_fn: Optional[Callable] = None  # x_vec -> n x n nested list
    b_fn: Optional[Callable] = None  # x_vec -> length-n list
    power_m: Optional[float] = None  # alpha_beta_power exponent


@dataclass(frozen=True)
class TensorValue:
    components: np.ndarray
    variance: tuple  # per slot: "upper" | "lower"
    state: tuple  # (x, y) where evaluated

    def __post_init__(self):
        if self.components.ndim != len(self.variance):
            raise ValueError(
                "variance length %d does not match rank %d"
                % (len(self.variance), self.components.ndim)
            )


def _ball_predicate(radius):
    if radius is None:
        return lambda x: True
    r2 = float(radius) ** 2

    def inside(x):
        return sum(float(v) * float(v) for v in x) < r2

    return inside


def _everywhere(x, y):
    return True


def _parse_matrix(a, n, parameter_names):
    if len(a) != n or any(len(row) != n for row in a):
        raise ConfigError("coefficient matrix must be %d x %d" % (n, n))
    trees = [
        [dsl.parse(a[i][j], n, parameter_names) for j in range(n)]
        for i in range(n)
    ]
    for i in range(n):
        for j in range(n):
            for kind, _ in dsl.variables_used(trees[i][j]):
                if kind == "y":
                    raise ConfigError(
                        "coefficient a_%d%d may not depend on y" % (i + 1, j + 1)
                    )
    return trees


def _parse_vector(b, n, parameter_names):
    if len(b) != n:
        raise ConfigError("coefficient vector must have length %d" % n)
    trees = [dsl.parse(b[i], n, parameter_names) for i in range(n)]
    for tree in trees:
        for kind, _ in dsl.variables_used(tree):
            if kind == "y":
                raise ConfigError("coefficient b_i may not depend on y")
    return trees


def _matrix_fn(trees, parameters):
    def a_fn(x):
        zeros = [0.0] * len(x)
        return [
            [dsl.evaluate(t, x, zeros, parameters) for t in row] for row in trees
        ]

    return a_fn


def _vector_fn(trees, parameters):
    def b_fn(x):
        zeros = [0.0] * len(x)
        return [dsl.evaluate(t, x, zeros, parameters) for t in trees]

    return b_fn


def _check_symmetric(a_fn, n, where):
    for x in where:
        a = a_fn(x)
        for i in range(n):
            for j in range(i + 1, n):
                aij, aji = value_of(a[i][j]), value_of(a[j][i])
                if abs(aij - aji) > 1e-12 * max(1.0, abs(aij)):
                    raise ConfigError(
                        "a_ij not symmetric at x=%s: a[%d][%d]=%r vs a[%d][%d]=%r"
                        % (x, i + 1, j + 1, aij, j + 1, i + 1, aji)
                    )


def _alpha_sq(a, y):
    total = None
    n = len(y)
    for i in range(n):
        row = a[i]
        for j in range(n):
            term = row[j] * y[i] * y[j]
            total = term if total is None else total + term
    return total


def _beta(b, y):
    total = None
    for i in range(len(y)):
        term = b[i] * y[i]
        total = term if total is None else total + term
    return total


def alpha_beta_metric(
    name,
    dimension,
    a_fn,
    b_fn,
    power_m=None,
    chart_domain=None,
    cone_domain=None,
    parameters=None,
):
    """MetricSpec from Riemannian-part and one-form evaluators.

    power_m=None gives Randers F = alpha + beta; otherwise the conic
    power metric F = alpha^m beta^(1-m) on the half-cone beta > 0.
    """
    parameters = dict(parameters or {})
    chart = chart_domain or (lambda x: True)

    if power_m is None:

        def F(x, y):
            a = a_fn(x)
            b = b_fn(x)
            return sqrt(_alpha_sq(a, y)) + _beta(b, y)

        cone = cone_domain or _everywhere
        family = "randers"
    else:
        m = float(power_m)
        if m in (0.0, 1.0):
            raise ConfigError("power exponent m must avoid 0 and 1")

        def F(x, y):
            a = a_fn(x)
            b = b_fn(x)
            return powr(_alpha_sq(a, y), m / 2.0) * powr(_beta(b, y), 1.0 - m)

        def beta_positive(x, y):
            return value_of(_beta(b_fn(x), y)) > 0.0

        cone = cone_domain or beta_positive
        family = "alpha_beta_power"

    return MetricSpec(
        name=name,
        dimension=dimension,
        F=F,
        chart_domain=chart,
        cone_domain=cone,
        parameters=parameters,
        family=family,
        a_fn=a_fn,
        b_fn=b_fn,
        power_m=power_m,
    )


def riemannian_metric(name, dimension, a_fn, chart_domain=None, parameters=None):
    parameters = dict(parameters or {})

    def F(x, y):
        return sqrt(_alpha_sq(a_fn(x), y))

    return MetricSpec(
        name=name,
        dimension=dimension,
        F=F,
        chart_domain=chart_domain or (lambda x: True),
        cone_domain=_everywhere,
        parameters=parameters,
        family="riemannian",
        a_fn=a_fn,
    )


def construct_metric(
    family,
    dimension,
    a=None,
    b=None,
    m=None,
    F=None,
    parameters=None,
    chart_radius=None,
    name=None,
):
    """Build a MetricSpec from one of the named families.

    Matrix/vector coefficients and F are DSL source strings; identifiers
    listed in ``parameters`` (a name -> value map) are usable inside
    them.  The Randers regularity condition |b|_alpha < 1 is checked at
    the chart center and again, per state, during sampling.
    """
    parameters = dict(parameters or {})
    names = frozenset(parameters)
    n = int(dimension)
    if n < 2:
        raise ConfigError("dimension must be at least 2")
    chart = _ball_predicate(chart_radius)
    label = name or family

    if family == "euclidean":

        def F_euclid(x, y):
            return sqrt(_alpha_sq([[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)], y))

        return MetricSpec(
            name=label,
            dimension=n,
            F=F_euclid,
            chart_domain=chart,
            cone_domain=_everywhere,
            parameters=parameters,
            family="riemannian",
            a_fn=lambda x: [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)],
        )

    if family == "riemannian":
        if a is None:
            raise ConfigError("riemannian family needs the matrix a")
        trees = _parse_matrix(a, n, names)
        a_fn = _matrix_fn(trees, parameters)
        _check_symmetric(a_fn, n, _symmetry_probes(n, chart_radius))
        return riemannian_metric(label, n, a_fn, chart, parameters)

    if family in ("randers", "alpha_beta_power"):
        if a is None or b is None:
            raise ConfigError("%s family needs both a and b" % family)
        trees_a = _parse_matrix(a, n, names)
        trees_b = _parse_vector(b, n, names)
        a_fn = _matrix_fn(trees_a, parameters)
        b_fn = _vector_fn(trees_b, parameters)
        _check_symmetric(a_fn, n, _symmetry_probes(n, chart_radius))
        power_m = None
        if family == "alpha_beta_power":
            if m is None:
                raise ConfigError("alpha_beta_power needs the exponent m")
            power_m = float(m)
        metric = alpha_beta_metric(
            label, n, a_fn, b_fn, power_m=power_m, chart_domain=chart,
            parameters=parameters,
        )
        if family == "randers":
            _check_randers_regularity(metric, [0.0] * n)
        return metric

    if family == "dsl":
        if F is None:
            raise ConfigError("dsl family needs the expression F")
        tree = dsl.parse(F, n, names)

        def F_fn(x, y):
            return dsl.evaluate(tree, x, y, parameters)

        return MetricSpec(
            name=label,
            dimension=n,
            F=F_fn,
            chart_domain=chart,
            cone_domain=_everywhere,
            parameters=parameters,
            family="dsl",
        )

    raise ConfigError("unknown metric family %r" % (family,))


def _symmetry_probes(n, chart_radius):
    r = 0.1 if chart_radius is None else 0.25 * float(chart_radius)
    probes = [[0.0] * n]
    for i in range(n):
        p = [0.0] * n
        p[i] = r
        probes.append(p)
    return probes


def _check_randers_regularity(metric, x):
    norm = randers_b_norm_sq(metric, x)
    if norm >= 1.0:
        raise RegularityError(
            "Randers one-form has alpha-norm^2 %.6f >= 1" % norm, x=x
        )


def randers_b_norm_sq(metric, x):
    """|b|^2 in the alpha inner product at a point (floats)."""
    if metric.a_fn is None or metric.b_fn is None:
        raise ConfigError("metric %r has no (alpha, beta) data" % metric.name)
    xs = [float(v) for v in x]
    a = np.array(
        [[value_of(v) for v in row] for row in metric.a_fn(xs)], dtype=float
    )
    b = np.array([value_of(v) for v in metric.b_fn(xs)], dtype=float)
    return float(b @ np.linalg.solve(a, b))


def f_squared(metric):
    """Ring-generic F^2 evaluator for differentiation."""

    def f2(x, y):
        F = metric.F(x, y)
        return F * F

    return f2


def is_admissible(metric, x, y):
    """Cheap float-level admissibility: chart, cone, and F > 0."""
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    if not metric.chart_domain(xs):
        return False
    if not metric.cone_domain(xs, ys):
        return False
    try:
        return value_of(metric.F(xs, ys)) > 0.0
    except Exception:
        return False


def fundamental_tensor(metric, state):
    """g_ij = half the y-Hessian of F^2 (lower-lower), checked definite."""
    x, y = state
    n = metric.dimension
    f2 = f_squared(metric)
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = 0.5 * mixed_partial(
                f2, x, y, [("y", i), ("y", j)]
            )
    if np.linalg.eigvalsh(g)[0] <= 0.0:
        raise RegularityError(
            "fundamental tensor is not positive definite", x=x, y=y
        )
    return TensorValue(g, ("lower", "lower"), (tuple(x), tuple(y)))


def inverse_fundamental(metric, state):
    """g^il with g^im g_mj = identity (upper-upper)."""
    g = fundamental_tensor(metric, state)
    inv = np.linalg.inv(g.components)
    return TensorValue(inv, ("upper", "upper"), g.state)


def cartan_torsion(metric, state):
    """C_ijk = quarter of the third y-derivative of F^2 (lower^3)."""
    x, y = state
    n = metric.dimension
    f2 = f_squared(metric)
    C = np.empty((n, n, n))
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                v = 0.25 * mixed_partial(
                    f2, x, y, [("y", i), ("y", j), ("y", k)]
                )
                for p in ((i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)):
                    C[p] = v
    return TensorValue(C, ("lower", "lower", "lower"), (tuple(x), tuple(y)))


def homogeneity_defect(metric, x, y, lambdas=(0.5, 2.0, 3.0)):
    """max over lambda of |F(x, L y) - L F(x, y)| / (L F), floats."""
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    base = value_of(metric.F(xs, ys))
    worst = 0.0
    for lam in lambdas:
        scaled = value_of(metric.F(xs, [lam * v for v in ys]))
        worst = max(worst, abs(scaled - lam * base) / abs(lam * base))
    return worst
