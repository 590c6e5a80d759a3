"""Series engine: one-state pipeline, curvature identities, sign pins.

The catalog examples double as oracles here: their curvature profiles
are known in closed form (K=0, K=1, B=0, ...), so a machine-precision
residual on each is a strong whole-pipeline check.
"""

import math

import numpy as np
import pytest

from finslerlab.catalog import get_example
from finslerlab.engine import (
    RICCI_LM_SIGN,
    Frame,
    lemma21_residual,
)
from finslerlab.errors import RegularityError
from finslerlab.metrics import (
    alpha_beta_metric,
    cartan_torsion,
    construct_metric,
    fundamental_tensor,
)
from finslerlab.volume import (
    bh_quadrature_volume,
    bh_randers_volume,
    constant_volume,
)

STATE = ((0.11, -0.07, 0.13), (0.6, -0.3, 0.74))


def generic_randers():
    # x-dependent a and b with no special symmetry: nothing cancels
    def a_fn(x):
        base = [[1.0, 0.1, 0.0], [0.1, 1.2, 0.05], [0.0, 0.05, 0.9]]
        return [
            [
                base[i][j]
                + (0.2 * x[0] * x[1] if i == j == 0 else 0.0)
                + (0.1 * x[2] if (i, j) in ((0, 1), (1, 0)) else 0.0)
                for j in range(3)
            ]
            for i in range(3)
        ]

    def b_fn(x):
        return [0.1 + 0.15 * x[1], 0.2 * x[2] - 0.05, 0.1 * x[0]]

    return alpha_beta_metric("generic", 3, a_fn, b_fn)


def frame_of(entry_name, x, y, **overrides):
    entry = get_example(entry_name, **overrides)
    return Frame(entry.metric, entry.volume, x, y)


def test_ricci_identity_orientation_is_pinned():
    # the commutator of horizontal derivatives of B matches exactly one
    # orientation of the curvature's fiber derivative
    f = Frame(generic_randers(), constant_volume(1.0), *STATE)
    good = np.abs(f.ricci_commutator - f.ricci_rhs).max()
    flipped = np.abs(f.ricci_commutator + f.ricci_rhs).max()
    assert good <= 1e-12 * f.scale
    assert flipped > 1e-3
    assert RICCI_LM_SIGN == -1.0


def test_master_identity_generic_randers():
    f = Frame(generic_randers(), constant_volume(1.0), *STATE)
    assert np.abs(f.master_residual).max() <= 1e-12 * f.scale


def test_master_identity_with_quadrature_volume():
    # the identity must survive a volume density known only by quadrature
    m = generic_randers()
    f = Frame(m, bh_quadrature_volume(m), *STATE)
    assert np.abs(f.master_residual).max() <= 1e-9 * f.scale


def test_projective_curvature_commutator_route():
    f = frame_of("randers_baoshen", (0.12, -0.2, 0.08), (0.7, 0.3, -0.5))
    assert np.abs(f.pricci_residual).max() <= 1e-10 * f.scale


def test_sphere_has_constant_flag_curvature_one():
    f = frame_of("riemannian_sphere", (0.1, 0.2, -0.1), (0.5, 0.5, 0.7))
    assert f.constflag_lambda_fit() == pytest.approx(1.0, abs=1e-12)
    assert np.abs(f.constflag_residual(1.0)).max() <= 1e-12
    assert abs(f.S) <= 1e-12


def test_quartic_is_locally_minkowski():
    f = frame_of("minkowski_quartic", (0.2, -0.1, 0.3), (0.6, -0.5, 0.4))
    assert np.abs(f.B).max() <= 1e-15
    assert np.abs(f.R).max() <= 1e-15
    assert abs(f.S) <= 1e-15
    assert np.abs(f.C).max() > 0.1
    assert np.linalg.eigvalsh(f.g)[0] > 0.0


def test_osaka_curvature_profile():
    f = frame_of("randers_osaka", (0.1, 0.2, 0.0), (0.55, -0.4, 0.65))
    assert np.abs(f.R).max() <= 1e-12
    assert abs(f.S) <= 1e-12
    assert np.abs(f.Dbar).max() <= 1e-10
    assert np.abs(f.D).max() > 0.1


def test_humo_curvature_profile():
    f = frame_of("randers_humo", (0.15, -0.1, 0.2), (0.4, 0.8, -0.3))
    assert np.abs(f.R).max() <= 1e-12
    assert np.abs(f.E).max() <= 1e-12
    assert abs(f.S) <= 1e-12
    assert np.abs(f.D_h0).max() <= 1e-10
    assert np.abs(f.B).max() > 0.1


def test_baoshen_flag_factor_is_twice_cartan():
    f = frame_of("randers_baoshen", (0.12, -0.2, 0.08), (0.7, 0.3, -0.5))
    assert abs(f.S) <= 1e-12
    assert np.abs(f.gdw_residual).max() <= 1e-10
    assert np.abs(f.gdw_factor - 2.0 * f.C).max() <= 1e-10
    assert np.abs(f.Dbar).max() > 1e-2
    assert np.abs(f.thm31_residual).max() > 1e-2


def test_mean_berwald_two_routes_agree():
    for f in (
        Frame(generic_randers(), constant_volume(1.0), *STATE),
        frame_of("randers_osaka", (0.1, 0.2, 0.0), (0.55, -0.4, 0.65)),
    ):
        assert np.abs(f.E - f.E_from_trace).max() <= 1e-11 * max(
            1.0, np.abs(f.E).max()
        )


def test_s_curvature_is_distortion_derivative():
    for name, x, y in (
        ("randers_osaka", (0.1, 0.2, 0.0), (0.55, -0.4, 0.65)),
        ("riemannian_conformal", (0.2, -0.15, 0.1), (0.3, 0.9, -0.2)),
    ):
        f = frame_of(name, x, y)
        assert f.tau_hor0 == pytest.approx(f.S, abs=1e-10 * max(1.0, abs(f.S)))


def test_projective_ricci_two_routes_agree():
    f = Frame(generic_randers(), constant_volume(1.0), *STATE)
    direct = f.projective_ricci_direct()
    assembled = f.projective_ricci_assembled()
    assert direct == pytest.approx(assembled, abs=1e-11 * max(1.0, abs(direct)))


def test_euler_contractions():
    f = Frame(generic_randers(), constant_volume(1.0), *STATE)
    y = np.array(f.y)
    assert np.abs(f.N @ y - 2.0 * f.G).max() <= 1e-13
    assert np.abs(np.einsum("ijk,k->ij", f.Gamma, y) - f.N).max() <= 1e-13
    assert np.abs(np.einsum("jikl,l->jik", f.B, y)).max() <= 1e-13
    assert np.abs(np.einsum("jmkm->jk", f.D)).max() <= 1e-13
    assert np.abs(np.einsum("jikl,j->ikl", f.D, y)).max() <= 1e-13


def test_homogeneity_degrees_under_y_scaling():
    m = generic_randers()
    x, y = STATE
    f1 = Frame(m, constant_volume(1.0), x, y)
    f2 = Frame(m, constant_volume(1.0), x, tuple(2.0 * v for v in y))
    assert f2.F2 == pytest.approx(4.0 * f1.F2, rel=1e-13)
    assert np.abs(f2.g - f1.g).max() <= 1e-12
    assert np.abs(f2.G - 4.0 * f1.G).max() <= 1e-12
    assert np.abs(f2.N - 2.0 * f1.N).max() <= 1e-12
    assert np.abs(f2.Gamma - f1.Gamma).max() <= 1e-12
    assert np.abs(f2.R - 4.0 * f1.R).max() <= 1e-12
    assert np.abs(f2.B - 0.5 * f1.B).max() <= 1e-12
    assert f2.S == pytest.approx(2.0 * f1.S, rel=1e-12)


def test_indefinite_hessian_raises_regularity_error():
    m = construct_metric(
        "dsl", 3, F="(y1^2 - 0.5*y2^2 + 2*y3^2)^(1/2)", name="saddle"
    )
    with pytest.raises(RegularityError):
        Frame(m, constant_volume(1.0), (0.0, 0.0, 0.0), (1.0, 0.2, 0.1))


def test_modification_curvature_relation_linear_factor():
    def p_func(xs, ys):
        return (0.1 + 0.3 * xs[1]) * ys[0] + 0.05 * ys[2]

    res = lemma21_residual(generic_randers(), *STATE, p_func=p_func)
    assert np.abs(res).max() <= 1e-12

    res0 = lemma21_residual(
        generic_randers(), *STATE, p_func=lambda xs, ys: 0.0
    )
    assert np.abs(res0).max() == 0.0


def test_engine_matches_jet_oracle():
    for metric, state in (
        (generic_randers(), STATE),
        (get_example("minkowski_quartic").metric,
         ((0.2, -0.1, 0.3), (0.6, -0.5, 0.4))),
    ):
        f = Frame(metric, constant_volume(1.0), *state)
        g_jet = fundamental_tensor(metric, state).components
        c_jet = cartan_torsion(metric, state).components
        assert np.abs(f.g - g_jet).max() <= 1e-12
        assert np.abs(f.C - c_jet).max() <= 1e-12


def test_closed_and_quadrature_volumes_give_same_s():
    entry = get_example("randers_osaka")
    x, y = (0.1, 0.2, 0.0), (0.55, -0.4, 0.65)
    f_closed = Frame(entry.metric, entry.volume, x, y)
    f_quad = Frame(entry.metric, bh_quadrature_volume(entry.metric), x, y)
    assert f_quad.S == pytest.approx(f_closed.S, abs=1e-8)
