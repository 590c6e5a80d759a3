"""finslerlab: numerical Finsler geometry at desk scale.

Sprays, curvature tensors, projective invariants, and metric
classification for user-defined Finsler metrics, differentiated exactly
by forward-mode jet towers.
"""

__version__ = "0.1.0"

from .catalog import get_example, list_examples
from .classify import (
    SamplePlan,
    Tolerances,
    classify_metric,
    sample_states,
)
from .curvature import (
    GeometryState,
    berwald_curvature,
    connections,
    distortion,
    douglas_tensor,
    mean_berwald,
    riemann,
    s_curvature,
    spray,
)
from .metrics import construct_metric
from .projective import (
    identity_residual,
    pr_quadratic_residual,
    projective_ricci,
    projective_spray,
)
from .volume import (
    bh_quadrature_volume,
    bh_randers_volume,
    constant_volume,
    dsl_volume,
)
