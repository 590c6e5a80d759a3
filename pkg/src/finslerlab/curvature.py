"""Curvature quantities of a Finsler metric at one admissible state.

Everything here is a pure function of (metric, volume form, x, y),
packaged behind a GeometryState that memoizes per-state results.  The
heavy lifting (deep mixed partials of the spray) happens in the series
engine; this module exposes the named tensors with explicit variance
bookkeeping, plus a generic horizontal covariant derivative for
jet-evaluable fields, which serves as the independent route in
cross-checks.
"""

import numpy as np

from .engine import Frame
from .errors import RegularityError
from .jets import JetScalar, seed_direction
from .metrics import TensorValue

_ROUTE_TOL = 1e-6


class GeometryState:
    """A metric, a volume form, and one admissible tangent vector.

    The cache maps quantity names to evaluated results; all of them
    belong to exactly this (x, y) and this volume form.
    """

    def __init__(self, metric, volume, x, y):
        self.metric = metric
        self.volume = volume
        self.x = tuple(float(v) for v in x)
        self.y = tuple(float(v) for v in y)
        self.cache = {}

    @property
    def frame(self):
        if "frame" not in self.cache:
            self.cache["frame"] = Frame(self.metric, self.volume, self.x, self.y)
        return self.cache["frame"]

    def _memo(self, key, build):
        if key not in self.cache:
            self.cache[key] = build()
        return self.cache[key]

    @property
    def state_tuple(self):
        return (self.x, self.y)


def _tensor(state, components, variance):
    return TensorValue(
        components=np.asarray(components, dtype=float),
        variance=variance,
        state=state.state_tuple,
    )


def spray(state):
    """Spray coefficients G^i (degree 2 in y)."""
    return state._memo(
        "spray", lambda: _tensor(state, state.frame.G, ("upper",))
    )


def connections(state):
    """Nonlinear connection N^i_j and Berwald connection Gamma^i_jk."""

    def build():
        f = state.frame
        return (
            _tensor(state, f.N, ("upper", "lower")),
            _tensor(state, f.Gamma, ("upper", "lower", "lower")),
        )

    return state._memo("connections", build)


def riemann(state):
    """Riemann curvature R^i_k built from the spray."""
    return state._memo(
        "riemann", lambda: _tensor(state, state.frame.R, ("upper", "lower"))
    )


def riemann_full(state):
    """(R^i_kl, R_j^i_kl): the antisymmetrized curvature and its fiber
    derivative, with R_j^i_kl y^j = R^i_kl."""

    def build():
        f = state.frame
        return (
            _tensor(state, f.R_kl, ("upper", "lower", "lower")),
            _tensor(state, f.R_full, ("lower", "upper", "lower", "lower")),
        )

    return state._memo("riemann_full", build)


def berwald_curvature(state):
    """Berwald curvature B_j^i_kl (third fiber derivative of the spray)."""
    return state._memo(
        "berwald",
        lambda: _tensor(
            state, state.frame.B, ("lower", "upper", "lower", "lower")
        ),
    )


def mean_berwald(state):
    """Mean Berwald curvature E_jk = half the (i,l) trace of B.

    Computed by the trace route and cross-checked against the
    half-Hessian of the S-curvature; a disagreement means the state is
    numerically unusable, which is reported as a regularity failure.
    """

    def build():
        f = state.frame
        gap = np.abs(f.E - f.E_from_trace).max()
        if gap > _ROUTE_TOL * max(1.0, np.abs(f.E).max()):
            raise RegularityError(
                "mean Berwald routes disagree by %.3e at x=%s y=%s"
                % (gap, state.x, state.y)
            )
        return _tensor(state, f.E_from_trace, ("lower", "lower"))

    return state._memo("mean_berwald", build)


def s_curvature(state):
    """S-curvature: spray divergence minus the logarithmic volume drift."""
    return state._memo("s_curvature", lambda: float(state.frame.S))


def distortion(state):
    """Distortion ln(sqrt(det g)/sigma) at the state."""
    return state._memo("distortion", lambda: float(state.frame.tau))


def distortion_flow_derivative(state):
    """tau_{|m} y^m: the distortion's derivative along the geodesic flow.

    Equals the S-curvature; kept as a separate route for cross-checks.
    """
    return state._memo("distortion_flow", lambda: float(state.frame.tau_hor0))


def douglas_tensor(state):
    """Douglas tensor: Berwald curvature minus its spray-divergence part."""
    return state._memo(
        "douglas",
        lambda: _tensor(
            state, state.frame.D, ("lower", "upper", "lower", "lower")
        ),
    )


def douglas_from_mean_berwald(state):
    """Douglas tensor assembled from E (the expanded route).

    D_j^i_kl = B_j^i_kl - (2/(n+1)) { E_jk d^i_l + E_jl d^i_k
               + E_kl d^i_j + E_jk.l y^i }
    """

    def build():
        f = state.frame
        n = f.n
        eye = np.eye(n)
        y = np.array(f.y)
        corr = (
            np.einsum("jk,il->jikl", f.E_from_trace, eye)
            + np.einsum("jl,ik->jikl", f.E_from_trace, eye)
            + np.einsum("kl,ij->jikl", f.E_from_trace, eye)
            + np.einsum("jkl,i->jikl", f.E_y, y)
        )
        comp = f.B - (2.0 / (n + 1.0)) * corr
        return _tensor(state, comp, ("lower", "upper", "lower", "lower"))

    return state._memo("douglas_expanded", build)


def dbar_tensor(state):
    """Commutator of horizontal Douglas derivatives, D_j^i_{kl|m} -
    D_j^i_{km|l}, antisymmetric in its last two slots."""
    return state._memo(
        "dbar",
        lambda: _tensor(
            state,
            state.frame.Dbar,
            ("lower", "upper", "lower", "lower", "lower"),
        ),
    )


def gdw_vector(state):
    """Flow derivative of the Douglas tensor, P_j^i_kl = D_j^i_{kl|m} y^m."""
    return state._memo(
        "gdw_vector",
        lambda: _tensor(
            state, state.frame.D_h0, ("lower", "upper", "lower", "lower")
        ),
    )


def gdw_residual(state):
    """(component of P orthogonal to y, extracted factor T_jkl).

    The metric is generalized Douglas-Weyl iff the first part vanishes;
    T is the proportionality factor P = T y, meaningful only then.
    """

    def build():
        f = state.frame
        return (
            _tensor(
                state,
                f.gdw_residual,
                ("lower", "upper", "lower", "lower"),
            ),
            np.array(f.gdw_factor),
        )

    return state._memo("gdw_residual", build)


def residual_scale(state):
    """max(1, max|B|, max|D|): the reference magnitude for verdicts."""
    return float(state.frame.scale)


# ---------------------------------------------------------------------------
# generic horizontal covariant derivative (jet route)


def _val(v):
    return v.value() if isinstance(v, JetScalar) else float(v)


def _tan(v):
    if isinstance(v, JetScalar):
        t = v.tangent
        return t.value() if isinstance(t, JetScalar) else float(t)
    return 0.0


def _eval_grid(field, xs, ys, shape):
    out_val = np.empty(shape if shape else (1,))
    out_tan = np.empty_like(out_val)
    res = field(xs, ys)
    if not shape:
        out_val[0] = _val(res)
        out_tan[0] = _tan(res)
        return out_val.reshape(()), out_tan.reshape(())
    arr = np.empty(shape, dtype=object)
    arr[...] = np.asarray(res, dtype=object)
    for idx in np.ndindex(*shape):
        v = arr[idx]
        out_val[idx] = _val(v)
        out_tan[idx] = _tan(v)
    return out_val, out_tan


def horizontal_derivative(field, state, variance=()):
    """Horizontal covariant derivative of a jet-evaluable field.

    field(x, y) must accept coordinates from the jet ring and return
    components shaped like its variance signature (a bare scalar for
    variance=()).  The result appends one lower slot:

        T_{|m} = dT/dx^m - N^r_m dT/dy^r
                 + Gamma^i_rm T(r in upper slot i)
                 - Gamma^r_jm T(r in lower slot j)
    """
    f = state.frame
    n = f.n
    x, y = list(state.x), list(state.y)
    probe = field(x, y)
    shape = np.asarray(probe, dtype=float).shape
    if len(shape) != len(variance):
        raise ValueError(
            "variance %r does not match field rank %d" % (variance, len(shape))
        )
    base = np.asarray(probe, dtype=float)

    dx = []
    dy = []
    for m in range(n):
        xs = seed_direction(x, m, 0)
        ys = seed_direction(y, None, 0)
        dx.append(_eval_grid(field, xs, ys, shape)[1])
        xs2 = seed_direction(x, None, 0)
        ys2 = seed_direction(y, m, 0)
        dy.append(_eval_grid(field, xs2, ys2, shape)[1])

    out = np.empty(shape + (n,))
    for m in range(n):
        term = np.array(dx[m])
        for r in range(n):
            term = term - f.N[r, m] * dy[r]
        for slot, kind in enumerate(variance):
            moved = np.moveaxis(base, slot, 0)
            if kind == "upper":
                corr = np.einsum("ir,r...->i...", f.Gamma[:, :, m], moved)
            else:
                corr = -np.einsum("ri,r...->i...", f.Gamma[:, :, m], moved)
            term = term + np.moveaxis(corr, 0, slot)
        out[..., m] = term
    return TensorValue(
        components=out,
        variance=tuple(variance) + ("lower",),
        state=state.state_tuple,
    )
