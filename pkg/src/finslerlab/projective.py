"""Projective spray, projective curvature, and identity residuals.

Given a spray G and a volume form, the projective spray is
Gt^i = G^i - S y^i / (n + 1).  Its Riemann curvature and Douglas
tensor feed a family of identities (named below) that hold either for
every metric or exactly on a classification boundary; each identity is
exposed as a residual whose two sides come from separate pipelines.
"""

from typing import Callable, NamedTuple, Optional, Union

import numpy as np

from . import engine
from .curvature import GeometryState
from .errors import ConfigError
from .expr import evaluate, parse
from .metrics import TensorValue

IDENTITY_KINDS = ("thm31", "master", "thm33", "constflag", "pricci", "lemma21")

_UP, _LOW = "upper", "lower"


class ProjectiveState(NamedTuple):
    base: GeometryState
    spray_tilde: np.ndarray
    S_value: float


class ProjectiveRicci(NamedTuple):
    direct: float
    assembled: float


def projective_spray(state: GeometryState) -> ProjectiveState:
    """Projective spray of (metric, volume) at the state.

    The returned components come from the truncated-series pipeline;
    they are cross-checked against the direct assembly from the spray
    and the S-curvature before being handed back.
    """
    frame = state.frame
    tilde = np.array(frame.Gt, dtype=float)
    assembled = frame.G - frame.S * np.asarray(state.y, dtype=float) / (
        frame.n + 1
    )
    bound = 1e-12 * max(1.0, float(np.abs(frame.G).max()), abs(frame.S))
    gap = float(np.abs(tilde - assembled).max())
    if gap > bound:
        raise ArithmeticError(
            "projective spray assembly mismatch (%.3e > %.3e)" % (gap, bound)
        )
    return ProjectiveState(state, tilde, float(frame.S))


def projective_ricci(state: GeometryState) -> ProjectiveRicci:
    """Projective Ricci curvature by two routes.

    direct: trace of the Riemann curvature of the projective spray.
    assembled: Ric + (n-1) { S_{|0}/(n+1) + (S/(n+1))^2 } from the base
    metric's tensors.
    """
    frame = state.frame
    return ProjectiveRicci(
        frame.projective_ricci_direct(), frame.projective_ricci_assembled()
    )


def pr_riemann(state: GeometryState):
    """Projective Riemann curvature: PR^i_k and PR_j^i_{kl}."""
    frame = state.frame
    pr_ik = TensorValue(frame.Rt.copy(), (_UP, _LOW), state)
    pr_full = TensorValue(frame.Rt_full.copy(), (_LOW, _UP, _LOW, _LOW), state)
    return pr_ik, pr_full


def pr_quadratic_residual(state: GeometryState) -> TensorValue:
    """y-derivative of PR_j^i_{kl}; zero iff the metric is PR-quadratic."""
    frame = state.frame
    return TensorValue(
        frame.Rt_full_dot.copy(), (_LOW, _UP, _LOW, _LOW, _LOW), state
    )


ProjectiveFactor = Union[str, Callable]


def _projective_factor(
    p: Optional[ProjectiveFactor], state: GeometryState, parameters
):
    if p is None:
        raise ConfigError(
            "lemma21 needs a projective factor "
            "(DSL expression in x1..xn, y1..yn, or a callable)"
        )
    if callable(p):
        func = p
    else:
        tree = parse(
            str(p),
            state.metric.dimension,
            parameter_names=tuple(parameters or ()),
        )

        def func(xs, ys, _tree=tree, _params=dict(parameters or {})):
            return evaluate(_tree, xs, ys, _params)

    x = [float(v) for v in state.x]
    y = [float(v) for v in state.y]
    base = float(np.asarray(func(x, y), dtype=float))
    doubled = float(np.asarray(func(x, [2.0 * v for v in y]), dtype=float))
    if abs(doubled - 2.0 * base) > 1e-8 * max(1.0, abs(base), abs(doubled)):
        raise ConfigError(
            "projective factor is not 1-homogeneous in y: "
            "P(x,2y)=%.6g but 2 P(x,y)=%.6g" % (doubled, 2.0 * base)
        )
    return func


def identity_residual(
    kind: str,
    state: GeometryState,
    lam: Optional[float] = None,
    p: Optional[ProjectiveFactor] = None,
    parameters=None,
) -> TensorValue:
    """Residual LHS - RHS of one of the named curvature identities.

    Kinds:
      thm31    -- D_{kl|0} against its S-curvature source term; zero iff
                  PR-quadratic.
      master   -- fiber derivative of the projective Riemann curvature
                  against the Dbar / S-curvature assembly; an identity
                  for every metric.
      thm33    -- horizontal derivative of S_{.j.k} against S_{.r} D;
                  the R-quadratic reduction.
      constflag-- R^i_k - lam (F^2 delta - y y_flat); lam=None fits the
                  least-squares value at the state.
      pricci   -- Ricci-type commutator of the projective Douglas tensor
                  against the same fiber derivative; every metric.
      lemma21  -- curvature transformation under G -> G + P y for a
                  1-homogeneous factor P (pass p=...).
    """
    kind_key = str(kind).lower()
    frame = state.frame
    if kind_key == "thm31":
        return TensorValue(
            frame.thm31_residual, (_LOW, _UP, _LOW, _LOW), state
        )
    if kind_key == "master":
        return TensorValue(
            frame.master_residual, (_LOW, _UP, _LOW, _LOW, _LOW), state
        )
    if kind_key == "thm33":
        return TensorValue(frame.thm33_residual, (_LOW, _LOW, _LOW), state)
    if kind_key == "pricci":
        return TensorValue(
            frame.pricci_residual, (_LOW, _UP, _LOW, _LOW, _LOW), state
        )
    if kind_key == "constflag":
        value = frame.constflag_lambda_fit() if lam is None else float(lam)
        return TensorValue(frame.constflag_residual(value), (_UP, _LOW), state)
    if kind_key == "lemma21":
        func = _projective_factor(p, state, parameters)
        residual = engine.lemma21_residual(
            state.metric, state.x, state.y, func
        )
        return TensorValue(residual, (_UP, _LOW), state)
    raise ConfigError(
        "unknown identity kind %r; expected one of: %s"
        % (kind, ", ".join(IDENTITY_KINDS))
    )


def douglas_invariance_gap(
    state: GeometryState, p: ProjectiveFactor, parameters=None
) -> float:
    """Max deviation of the Douglas tensor under the change G -> G + P y."""
    func = _projective_factor(p, state, parameters)
    _, _, ys, G, Ghat, _ = engine.modified_spray(
        state.metric, state.x, state.y, func
    )
    base = engine.douglas_values_from_spray(G, ys)
    modified = engine.douglas_values_from_spray(Ghat, ys)
    return float(np.abs(modified - base).max())
