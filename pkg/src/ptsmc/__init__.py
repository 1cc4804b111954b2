"""Power-tower sliding-mode and backstepping control on a double integrator.

The package simulates the perturbed double integrator
``x1' = x2``, ``x2' = u + d`` under four feedback laws built from the
order-2 power-tower function ``|a|**(|a|**alpha) * sgn(a)``, whose
exponent adapts to the distance from the origin: far away it pushes
harder than any fixed power, near the origin it flattens toward a
relay.  See :mod:`ptsmc.power_tower` for the scalar function,
:mod:`ptsmc.controllers` for the laws, :mod:`ptsmc.simulate` for the
fixed-step closed loop, :mod:`ptsmc.analysis` for convergence /
chattering / Lyapunov diagnostics, and :mod:`ptsmc.scenarios` for the
named presets and INI configs.  ``ptsmc.cli`` is the command-line
front end (``ptsmc run fig1``).

Hot loops run in a compiled extension when it is available and fall
back to pure Python otherwise; both produce bit-identical
trajectories (see :mod:`ptsmc._backend`).
"""

from ._backend import active_backend, available_backends
from .analysis import (
    ChatteringReport,
    ConvergenceReport,
    EulerOrderReport,
    Lemma1Report,
    MonotonicityReport,
    SweepCell,
    SweepReport,
    chattering_index,
    convergence_time,
    euler_order_ratio,
    guaranteed_time_sweep,
    lemma1_oracle,
    log_grid,
    lyapunov_monotonicity,
)
from .controllers import (
    LAWS,
    ControllerSpec,
    ControllerState,
    ControlOutput,
    evaluate,
    fictive_control,
    integral_control,
    nominal_control,
    robust_sign_control,
    terminal_sm_control,
)
from .power_tower import (
    DEFAULT_GUARDS,
    SURROGATES,
    EvalGuards,
    PowerTowerParams,
    SingularityError,
    pt_derivative_factor,
    pt_value,
    sign_surrogate,
)
from .scenarios import (
    PRESETS,
    ConfigError,
    ScenarioConfig,
    SweepConfig,
    get_scenario,
    load_config,
    preset_names,
)
from .simulate import (
    COLUMNS,
    DISTURBANCE_KINDS,
    DisturbanceModel,
    PlantState,
    SimConfig,
    SimResult,
    SimulationOverflowError,
    run,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # power tower
    "SURROGATES", "PowerTowerParams", "EvalGuards", "DEFAULT_GUARDS",
    "SingularityError", "sign_surrogate", "pt_value", "pt_derivative_factor",
    # controllers
    "LAWS", "ControllerSpec", "ControllerState", "ControlOutput",
    "nominal_control", "robust_sign_control", "integral_control",
    "terminal_sm_control", "fictive_control", "evaluate",
    # simulation
    "COLUMNS", "DISTURBANCE_KINDS", "DisturbanceModel", "SimConfig",
    "PlantState", "SimResult", "SimulationOverflowError", "run", "step",
    # analysis
    "ConvergenceReport", "ChatteringReport", "MonotonicityReport",
    "SweepCell", "SweepReport", "Lemma1Report", "EulerOrderReport",
    "convergence_time", "guaranteed_time_sweep", "chattering_index",
    "lyapunov_monotonicity", "log_grid", "lemma1_oracle", "euler_order_ratio",
    # scenarios
    "ConfigError", "ScenarioConfig", "SweepConfig", "PRESETS",
    "preset_names", "get_scenario", "load_config",
    # backends
    "active_backend", "available_backends",
]
