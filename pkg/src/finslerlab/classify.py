"""Sampling plans, tolerance policy, and curvature classification.

A metric is classified by evaluating curvature residuals at a seeded
batch of admissible states.  Every "holds" verdict is a statement about
the sample; a single above-tolerance state refutes a predicate, which
matches how the underlying definitions quantify (they are for-all
statements over the slit tangent bundle).
"""

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from . import __version__
from .curvature import GeometryState
from .errors import ConfigError, SamplingError
from .metrics import fundamental_tensor, is_admissible
from .scalars import value_of

PREDICATES = (
    "riemannian",
    "berwald",
    "weakly_berwald",
    "douglas",
    "dbar",
    "gdw",
    "r_quadratic",
    "pr_quadratic",
    "s_flat",
    "constant_flag",
)

Y_MODES = ("unit_sphere", "unit_F")

# spread of the per-state least-squares flag curvature that still counts
# as "constant across the sample"
LAMBDA_CONSTANCY_TOL = 1e-4

_HIERARCHY_EDGES = (
    ("berwald", "douglas"),
    ("douglas", "dbar"),
    ("dbar", "gdw"),
    ("douglas", "pr_quadratic"),
    ("pr_quadratic", "gdw"),
)


@dataclass(frozen=True)
class SamplePlan:
    count: int = 20
    seed: int = 20250405
    x_radius: float = 0.4
    y_mode: str = "unit_F"

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError("sample count must be positive")
        if not (self.x_radius > 0.0):
            raise ConfigError("x_radius must be positive")
        if self.y_mode not in Y_MODES:
            raise ConfigError(
                "y_mode must be one of %s" % (Y_MODES,)
            )


@dataclass(frozen=True)
class Tolerances:
    rel: float = 1e-6
    absolute: float = 1e-9

    def bound(self, scale):
        return self.absolute + self.rel * scale


@dataclass(frozen=True)
class SampleBatch:
    states: Tuple[Tuple[tuple, tuple], ...]
    rejections: int
    rejection_reasons: Dict[str, int]


@dataclass(frozen=True)
class PredicateResult:
    name: str
    verdict: str  # holds | fails | indeterminate
    max_residual: float
    scale: float
    worst_state: Optional[Tuple[tuple, tuple]]
    details: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class ClassificationReport:
    metric_name: str
    volume_label: str
    plan: SamplePlan
    tolerances: Tolerances
    predicates: Dict[str, PredicateResult]
    rejections: int
    errored_states: int
    hierarchy_violations: Tuple[str, ...]
    version: str = __version__

    def verdict(self, name):
        return self.predicates[name].verdict

    def as_dict(self):
        preds = []
        for name in PREDICATES:
            r = self.predicates[name]
            entry = {
                "name": name,
                "verdict": r.verdict,
                "max_residual": r.max_residual,
                "scale": r.scale,
                "worst_state": (
                    None
                    if r.worst_state is None
                    else [list(r.worst_state[0]), list(r.worst_state[1])]
                ),
            }
            entry.update(r.details)
            preds.append(entry)
        return {
            "metric": self.metric_name,
            "volume": self.volume_label,
            "plan": {
                "count": self.plan.count,
                "seed": self.plan.seed,
                "x_radius": self.plan.x_radius,
                "y_mode": self.plan.y_mode,
            },
            "tolerances": {
                "rel": self.tolerances.rel,
                "abs": self.tolerances.absolute,
            },
            "predicates": preds,
            "rejections": self.rejections,
            "errored_states": self.errored_states,
            "hierarchy_violations": list(self.hierarchy_violations),
            "version": self.version,
        }


def sample_states(metric, plan=None):
    """Deterministic batch of admissible (x, y) states for a metric.

    x is drawn uniformly from the ball of radius plan.x_radius, y from
    the unit sphere (rescaled to F(x,y)=1 under y_mode="unit_F").
    Draws failing the chart, the cone, positivity, or strong convexity
    are rejected and redrawn; the rejection tally is part of the batch.
    """
    plan = plan or SamplePlan()
    n = metric.dimension
    rng = np.random.default_rng(plan.seed)
    states = []
    reasons = Counter()
    attempts = 0
    while len(states) < plan.count:
        attempts += 1
        if attempts >= max(30, 10 * plan.count):
            rej = attempts - len(states)
            if rej / attempts > 0.9:
                top = reasons.most_common(1)[0][0] if reasons else "unknown"
                raise SamplingError(
                    "rejected %d of %d draws for %r "
                    "(dominant reason: %s)" % (rej, attempts, metric.name, top)
                )
            if attempts > 1000 * plan.count:
                raise SamplingError(
                    "sampler did not converge for %r after %d draws"
                    % (metric.name, attempts)
                )
        d = rng.normal(size=n)
        x = d / np.linalg.norm(d) * plan.x_radius * rng.uniform() ** (1.0 / n)
        e = rng.normal(size=n)
        y = e / np.linalg.norm(e)
        xs, ys = [float(v) for v in x], [float(v) for v in y]
        if not metric.chart_domain(xs):
            reasons["chart_domain"] += 1
            continue
        if not metric.cone_domain(xs, ys):
            reasons["cone_domain"] += 1
            continue
        if not is_admissible(metric, xs, ys):
            reasons["positivity"] += 1
            continue
        if plan.y_mode == "unit_F":
            scale = value_of(metric.F(xs, ys))
            ys = [v / scale for v in ys]
        try:
            g = fundamental_tensor(metric, (xs, ys))
        except Exception:
            reasons["regularity"] += 1
            continue
        if float(np.linalg.eigvalsh(g.components).min()) <= 0.0:
            reasons["regularity"] += 1
            continue
        states.append((tuple(xs), tuple(ys)))
    return SampleBatch(tuple(states), attempts - len(states), dict(reasons))


def _frame_residuals(frame):
    return {
        "riemannian": float(np.abs(frame.C).max()),
        "berwald": float(np.abs(frame.B).max()),
        "weakly_berwald": float(np.abs(frame.E).max()),
        "douglas": float(np.abs(frame.D).max()),
        "dbar": float(np.abs(frame.Dbar).max()),
        "gdw": float(np.abs(frame.gdw_residual).max()),
        "r_quadratic": float(np.abs(frame.R_full_dot).max()),
        "pr_quadratic": float(np.abs(frame.Rt_full_dot).max()),
        "s_flat": abs(frame.S),
    }


def classify_metric(metric, volume, plan=None, tolerances=None):
    """Evaluate all classification predicates on a sampled batch."""
    plan = plan or SamplePlan()
    tol = tolerances or Tolerances()
    batch = sample_states(metric, plan)

    rows = []  # (state, scale, residual dict, lambda_fit, lambda_residual)
    errored = 0
    for state in batch.states:
        try:
            gs = GeometryState(metric, volume, state[0], state[1])
            frame = gs.frame
            res = _frame_residuals(frame)
            lam = frame.constflag_lambda_fit()
            lam_res = float(np.abs(frame.constflag_residual(lam)).max())
            rows.append((state, frame.scale, res, lam, lam_res))
        except Exception:
            errored += 1

    predicates = {}
    for name in PREDICATES:
        if errored or not rows:
            predicates[name] = PredicateResult(
                name, "indeterminate", math.nan, math.nan, None
            )
            continue
        if name == "constant_flag":
            predicates[name] = _constant_flag_result(rows, tol)
            continue
        worst = max(rows, key=lambda r: r[2][name] / tol.bound(r[1]))
        ok = all(r[2][name] <= tol.bound(r[1]) for r in rows)
        predicates[name] = PredicateResult(
            name,
            "holds" if ok else "fails",
            max(r[2][name] for r in rows),
            worst[1],
            worst[0],
        )

    violations = []
    for weaker, stronger in _HIERARCHY_EDGES:
        if (
            predicates[weaker].verdict == "holds"
            and predicates[stronger].verdict == "fails"
        ):
            violations.append(
                "%s holds but %s fails" % (weaker, stronger)
            )

    return ClassificationReport(
        metric.name,
        volume.label,
        plan,
        tol,
        predicates,
        batch.rejections,
        errored,
        tuple(violations),
    )


def _constant_flag_result(rows, tol):
    lams = [r[3] for r in rows]
    spread = max(lams) - min(lams)
    residual_ok = all(r[4] <= tol.bound(r[1]) for r in rows)
    ok = residual_ok and spread <= LAMBDA_CONSTANCY_TOL
    worst = max(rows, key=lambda r: r[4] / tol.bound(r[1]))
    return PredicateResult(
        "constant_flag",
        "holds" if ok else "fails",
        max(r[4] for r in rows),
        worst[1],
        worst[0],
        details={
            "lambda_hat": float(np.mean(lams)),
            "lambda_spread": float(spread),
        },
    )
