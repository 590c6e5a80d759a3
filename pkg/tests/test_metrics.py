"""Metric families, fundamental tensor, Cartan torsion."""

import numpy as np
import pytest

from finslerlab.errors import ConfigError, RegularityError
from finslerlab.metrics import (
    TensorValue,
    cartan_torsion,
    construct_metric,
    f_squared,
    fundamental_tensor,
    homogeneity_defect,
    inverse_fundamental,
    is_admissible,
    randers_b_norm_sq,
)
from support import fd_partial

IDENTITY2 = [["1", "0"], ["0", "1"]]


def make_randers2():
    # mildly position-dependent Randers metric on a unit-ball chart
    a = [
        ["1 + 0.2*x1^2", "0.1*x1*x2"],
        ["0.1*x1*x2", "1 + 0.1*x2^2"],
    ]
    b = ["0.3*x2", "0.2*x1"]
    return construct_metric("randers", 2, a=a, b=b, chart_radius=1.0)


def test_euclidean_f():
    m = construct_metric("euclidean", 2)
    assert m.F([0.0, 0.0], [3.0, 4.0]) == 5.0


def test_randers_f_at_simple_state():
    m = construct_metric("randers", 2, a=IDENTITY2, b=["0.5", "0"])
    assert m.F([0.0, 0.0], [1.0, 0.0]) == 1.5


def test_power_metric_at_beta_equals_alpha():
    m = construct_metric(
        "alpha_beta_power", 2, a=IDENTITY2, b=["1", "0"], m=0.5
    )
    assert m.F([0.0, 0.0], [1.0, 0.0]) == pytest.approx(1.0, rel=1e-14)


def test_power_metric_cone_is_beta_positive():
    m = construct_metric(
        "alpha_beta_power", 2, a=IDENTITY2, b=["1", "0"], m=0.5
    )
    assert is_admissible(m, [0.0, 0.0], [1.0, 0.5])
    assert not is_admissible(m, [0.0, 0.0], [-1.0, 0.5])


def test_non_symmetric_matrix_rejected():
    with pytest.raises(ConfigError):
        construct_metric("riemannian", 2, a=[["1", "0.2"], ["0.1", "1"]])


def test_large_one_form_rejected_at_center():
    with pytest.raises(RegularityError):
        construct_metric("randers", 2, a=IDENTITY2, b=["1.1", "0"])


def test_power_exponent_must_avoid_degenerate_values():
    with pytest.raises(ConfigError):
        construct_metric("alpha_beta_power", 2, a=IDENTITY2, b=["1", "0"], m=1.0)


def test_unknown_family():
    with pytest.raises(ConfigError):
        construct_metric("kropina_squared", 2)


def test_coefficients_may_not_depend_on_y():
    with pytest.raises(ConfigError):
        construct_metric("riemannian", 2, a=[["1", "y1"], ["y1", "1"]])


def test_fundamental_tensor_euclidean_identity():
    m = construct_metric("euclidean", 2)
    g = fundamental_tensor(m, ([0.0, 0.0], [0.6, 0.8]))
    assert np.allclose(g.components, np.eye(2), atol=1e-12)
    assert g.variance == ("lower", "lower")


def test_fundamental_tensor_riemannian_is_a_of_x():
    m = construct_metric("riemannian", 2, a=[["4", "0"], ["0", "9"]])
    for y in ([1.0, 0.0], [0.3, -0.7]):
        g = fundamental_tensor(m, ([0.1, 0.2], y))
        assert np.allclose(g.components, np.diag([4.0, 9.0]), atol=1e-10)


def test_fundamental_tensor_matches_fd_hessian():
    m = make_randers2()
    x, y = [0.2, -0.1], [0.9, 0.55]
    g = fundamental_tensor(m, (x, y)).components
    f2 = f_squared(m)
    for i in range(2):
        for j in range(2):
            fd = 0.5 * fd_partial(f2, x, y, [("y", i), ("y", j)])
            assert abs(g[i, j] - fd) <= 1e-6 * max(1.0, abs(fd))


def test_degenerate_metric_raises_regularity():
    # quartic norm without the convexifying term: Hessian singular on axes
    m = construct_metric("dsl", 2, F="(y1^4 + y2^4)^(1/4)")
    with pytest.raises(RegularityError):
        fundamental_tensor(m, ([0.0, 0.0], [1.0, 0.0]))


def test_inverse_fundamental_diag():
    m = construct_metric("riemannian", 2, a=[["4", "0"], ["0", "9"]])
    inv = inverse_fundamental(m, ([0.0, 0.0], [1.0, 1.0]))
    assert np.allclose(inv.components, np.diag([0.25, 1.0 / 9.0]), atol=1e-12)
    assert inv.variance == ("upper", "upper")


def test_inverse_times_forward_is_identity():
    m = make_randers2()
    state = ([0.15, 0.3], [0.7, -0.5])
    g = fundamental_tensor(m, state).components
    ginv = inverse_fundamental(m, state).components
    assert np.max(np.abs(ginv @ g - np.eye(2))) <= 1e-12


def test_cartan_torsion_riemannian_vanishes():
    m = construct_metric("riemannian", 2, a=[["4", "0"], ["0", "9"]])
    C = cartan_torsion(m, ([0.2, 0.1], [0.5, 0.6]))
    assert np.max(np.abs(C.components)) <= 1e-12


def test_cartan_torsion_contracts_to_zero_on_y():
    m = make_randers2()
    x, y = [0.2, -0.1], [0.9, 0.55]
    C = cartan_torsion(m, (x, y)).components
    assert np.max(np.abs(C @ np.array(y))) <= 1e-11
    assert np.max(np.abs(C)) > 1e-3  # genuinely non-Riemannian


def test_cartan_torsion_matches_fd():
    m = make_randers2()
    x, y = [0.1, 0.25], [0.8, 0.6]
    C = cartan_torsion(m, (x, y)).components
    f2 = f_squared(m)
    fd = 0.25 * fd_partial(f2, x, y, [("y", 0), ("y", 0), ("y", 1)])
    assert abs(C[0, 0, 1] - fd) <= 1e-5 * max(1.0, abs(fd))


def test_metric_quadratic_form_recovers_f_squared():
    m = make_randers2()
    x, y = [0.3, 0.2], [0.6, -0.9]
    g = fundamental_tensor(m, (x, y)).components
    yv = np.array(y)
    F = m.F(x, y)
    assert float(yv @ g @ yv) == pytest.approx(F * F, rel=1e-10)


def test_homogeneity_defect_small():
    for m in (make_randers2(), construct_metric("dsl", 2, F="(y1^4 + y2^4 + 0.5*(y1^2 + y2^2)^2)^(1/4)")):
        assert homogeneity_defect(m, [0.1, 0.2], [0.7, 0.4]) <= 1e-10


def test_b_norm_uses_alpha_inner_product():
    m = construct_metric("randers", 2, a=[["4", "0"], ["0", "1"]], b=["0.8", "0.3"])
    # |b|^2 = b a^{-1} b = 0.64/4 + 0.09 = 0.25
    assert randers_b_norm_sq(m, [0.0, 0.0]) == pytest.approx(0.25, rel=1e-12)


def test_tensor_value_variance_checked():
    with pytest.raises(ValueError):
        TensorValue(np.zeros((2, 2)), ("lower",), ((0.0,), (1.0,)))


def test_dsl_family_runs_all_rings():
    m = construct_metric("dsl", 2, F="sqrt(y1^2 + y2^2) + b*y1", parameters={"b": 0.25})
    assert m.F([0.0, 0.0], [3.0, 4.0]) == pytest.approx(5.75)
    g = fundamental_tensor(m, ([0.0, 0.0], [3.0, 4.0]))
    assert g.components.shape == (2, 2)
