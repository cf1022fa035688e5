"""Self-similar compressible potential flow toolkit.

Local shock-reflection states, transition angles, steady shock polars, a
free-boundary solver for the transonic region, and full-Euler cross-checks.
"""

__version__ = "0.1.0"

from .errors import (
    DetachedError,
    NearSonicError,
    NonConvergenceError,
    RayUpdateError,
    SearchError,
    UnsupportedConfigurationError,
    VacuumError,
)
from .gas import (
    BernoulliData,
    GasModel,
    UniformState,
    density_from_bernoulli,
    ellipticity_ratio,
    eval_pseudo_potential,
)
from .jump import (
    IncidentData,
    StraightShock,
    critical_density,
    entropy_admissible,
    incident_shock,
    rh_residual,
)
from .local import (
    CriticalAngles,
    PMStates,
    PolarCurve,
    ReflectionLocalData,
    WedgeGeometry,
    critical_angles,
    detachment_angle,
    diffraction_critical_angle,
    pm_angles,
    pm_states,
    solve_normal_reflection,
    sonic_angle,
    state2_regular_reflection,
    steady_shock_polar,
)

__all__ = [name for name in dir() if not name.startswith("_")]
