"""Averaging toolkit for the zero-Hopf bifurcation of a cubic jerk system.

The pipeline has three stages: classify the equilibrium of the third-order
system (jerk), rewrite the unfolded system in the periodic standard form
and average it numerically (normal_form, averaging), and confirm each
simple averaged root as a periodic orbit of the full system by shooting on
a Poincare section (closed_form, shooting). The cli module ties the stages
to a JSON config front end.
"""

from .averaging import (
    AveragedRoot,
    DegreeSign,
    QuadratureNotConverged,
    QuadratureRule,
    QuadratureSpec,
    average_first,
    average_second,
    find_roots,
)
from .closed_form import (
    HypothesisViolated,
    OrbitCount,
    OrbitPrediction,
    classify,
    f_closed,
    g_closed,
    predicted_roots,
)
from .config import ConfigError, RunConfig, from_dict, load_config, to_dict
from .jerk import (
    EquilibriumClass,
    EquilibriumKind,
    NotAnEquilibrium,
    SystemParams,
    char_poly,
    classify_equilibrium,
    equilibria,
    jacobian_at,
    vector_field,
)
from .normal_form import (
    StandardFormSystem,
    UnfoldingParams,
    h1,
    h2,
    jerk_standard_form,
    jordan_to_xyz,
    scale_state,
    theta_rhs,
    unfold,
    unscale_state,
    xyz_to_jordan,
)
from .shooting import (
    IntegratorMethod,
    IntegratorSpec,
    NoReturn,
    PeriodicOrbitRecord,
    SeedInvalid,
    ShootingDiverged,
    SweepEntry,
    SweepResult,
    Trajectory,
    integrate,
    monodromy,
    period_trace,
    poincare_return,
    shoot_orbit,
    sweep_epsilon,
)

__version__ = "0.1.0"

__all__ = [
    "AveragedRoot",
    "ConfigError",
    "DegreeSign",
    "EquilibriumClass",
    "EquilibriumKind",
    "HypothesisViolated",
    "IntegratorMethod",
    "IntegratorSpec",
    "NoReturn",
    "NotAnEquilibrium",
    "OrbitCount",
    "OrbitPrediction",
    "PeriodicOrbitRecord",
    "QuadratureNotConverged",
    "QuadratureRule",
    "QuadratureSpec",
    "RunConfig",
    "SeedInvalid",
    "ShootingDiverged",
    "StandardFormSystem",
    "SweepEntry",
    "SweepResult",
    "SystemParams",
    "Trajectory",
    "UnfoldingParams",
    "average_first",
    "average_second",
    "char_poly",
    "classify",
    "classify_equilibrium",
    "equilibria",
    "f_closed",
    "find_roots",
    "from_dict",
    "g_closed",
    "h1",
    "h2",
    "integrate",
    "jacobian_at",
    "jerk_standard_form",
    "jordan_to_xyz",
    "load_config",
    "monodromy",
    "period_trace",
    "poincare_return",
    "predicted_roots",
    "scale_state",
    "shoot_orbit",
    "sweep_epsilon",
    "theta_rhs",
    "to_dict",
    "unfold",
    "unscale_state",
    "vector_field",
    "xyz_to_jordan",
]
