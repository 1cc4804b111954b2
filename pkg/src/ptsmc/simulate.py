"""Closed-loop simulation of the perturbed double integrator.

Plant:  ``x1' = x2``, ``x2' = u + d(t)``, integrated by forward Euler
with the control held constant over each step (fixed step ``dt``).
The integral law's memory ``w`` is advanced alongside the plant states.

Each recorded sample carries the state, the law's error variable
``z2``, the control ``u``, the disturbance ``d``, the memory ``w`` and
the energy-like values ``V1 = x1^2/2``, ``V2 = V1 + z2^2/2`` and
``V3 = V2 + (d + w)^2/2``.  ``V3`` extends ``V2`` by the squared
disturbance-estimation error of the integral law (whose memory
converges to ``-d``); it is meaningful for a constant disturbance and
recorded as a diagnostic otherwise.

A state or control that stops being finite aborts the run with
:class:`SimulationOverflowError` carrying the last finite state —
states are never clamped, since clamping would fabricate dynamics.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _backend
from .controllers import ControllerSpec, evaluate

__all__ = [
    "DisturbanceModel",
    "disturbance_value",
    "SimConfig",
    "PlantState",
    "SimResult",
    "SimulationOverflowError",
    "step",
    "run",
]

DISTURBANCE_KINDS = ("zero", "constant", "sinusoid", "tabulated")
_KIND_CODES = {k: i for i, k in enumerate(DISTURBANCE_KINDS)}

#: Column order of one recorded sample.
COLUMNS = ("t", "x1", "x2", "z2", "u", "d", "w", "V1", "V2", "V3")


@dataclass(frozen=True, slots=True)
class DisturbanceModel:
    """Additive matched disturbance ``d(t)``.

    Kinds: ``zero``; ``constant`` (``value``); ``sinusoid``
    (``amplitude * sin(omega*t + phase)``); ``tabulated`` (strictly
    increasing ``times`` with ``values``, linearly interpolated,
    queries outside the table range are errors).
    """

    kind: str = "zero"
    value: float = 0.0
    amplitude: float = 0.0
    omega: float = 0.0
    phase: float = 0.0
    times: tuple[float, ...] | None = None
    values: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in DISTURBANCE_KINDS:
            raise ValueError(f"kind must be one of {DISTURBANCE_KINDS}, got {self.kind!r}")
        for name in ("value", "amplitude", "omega", "phase"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)!r}")
        if self.kind == "sinusoid" and self.amplitude < 0.0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")
        if self.kind == "tabulated":
            if not self.times or self.values is None:
                raise ValueError("tabulated disturbance requires times and values")
            if len(self.times) != len(self.values):
                raise ValueError("times and values must have equal length")
            if len(self.times) < 2:
                raise ValueError("tabulated disturbance requires at least two points")
            if not all(map(math.isfinite, self.times)) or not all(
                map(math.isfinite, self.values)
            ):
                raise ValueError("tabulated times and values must be finite")
            if any(b <= a for a, b in zip(self.times, self.times[1:])):
                raise ValueError("tabulated times must be strictly increasing")
        elif self.times is not None or self.values is not None:
            raise ValueError(f"times/values are only valid for kind='tabulated'")

    @classmethod
    def zero(cls) -> "DisturbanceModel":
        return cls()

    @classmethod
    def constant(cls, value: float) -> "DisturbanceModel":
        return cls(kind="constant", value=value)

    @classmethod
    def sinusoid(
        cls, amplitude: float, omega: float, phase: float = 0.0
    ) -> "DisturbanceModel":
        return cls(kind="sinusoid", amplitude=amplitude, omega=omega, phase=phase)

    @classmethod
    def tabulated(
        cls, times: Sequence[float], values: Sequence[float]
    ) -> "DisturbanceModel":
        return cls(kind="tabulated", times=tuple(times), values=tuple(values))


def disturbance_value(dist: DisturbanceModel, t: float) -> float:
    """Evaluate ``d(t)``; tabulated queries outside the table range raise."""
    if dist.kind == "zero":
        return 0.0
    if dist.kind == "constant":
        return dist.value
    if dist.kind == "sinusoid":
        return dist.amplitude * math.sin(dist.omega * t + dist.phase)
    times, values = dist.times, dist.values
    assert times is not None and values is not None
    if t < times[0] or t > times[-1]:
        raise ValueError(
            f"t={t!r} outside tabulated range [{times[0]!r}, {times[-1]!r}]"
        )
    i = min(bisect_right(times, t) - 1, len(times) - 2)
    t_lo = times[i]
    return values[i] + (values[i + 1] - values[i]) * ((t - t_lo) / (times[i + 1] - t_lo))


@dataclass(frozen=True, slots=True)
class SimConfig:
    """Fixed-step integration setup.

    ``t_end = 0`` is the degenerate single-sample run (no steps).
    ``record_stride`` records every n-th step; 20 at the default
    ``dt = 5e-5`` gives 1 ms sampling.
    """

    dt: float = 5e-5
    t_end: float = 5.0
    x1_0: float = 1.0
    x2_0: float = -1.5
    w_0: float = 0.0
    record_stride: int = 20

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be finite and > 0, got {self.dt!r}")
        if not (math.isfinite(self.t_end) and self.t_end >= 0.0):
            raise ValueError(f"t_end must be finite and >= 0, got {self.t_end!r}")
        for name in ("x1_0", "x2_0", "w_0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)!r}")
        if not (isinstance(self.record_stride, int) and self.record_stride >= 1):
            raise ValueError(f"record_stride must be an integer >= 1, got {self.record_stride!r}")

    @property
    def n_steps(self) -> int:
        """Number of Euler steps, ``ceil(t_end / dt)`` (0 when t_end = 0)."""
        return max(0, math.ceil(self.t_end / self.dt - 1e-9))


@dataclass(frozen=True, slots=True)
class PlantState:
    """Plant states, controller memory and clock at one instant."""

    x1: float
    x2: float
    w: float = 0.0
    t: float = 0.0


class SimulationOverflowError(RuntimeError):
    """A run left the representable range; carries the last finite state.

    Attributes
    ----------
    step:
        Index of the Euler step at which the control or the advanced
        state stopped being finite.
    t:
        Time of the last finite state.
    state:
        ``(x1, x2, w)`` of the last finite state.
    """

    def __init__(self, step: int, t: float, state: tuple[float, float, float]):
        self.step = step
        self.t = t
        self.state = state
        super().__init__(
            f"state or control left the finite range at step {step} "
            f"(t = {t:.6g}); last finite state x1={state[0]:.6g}, "
            f"x2={state[1]:.6g}, w={state[2]:.6g}"
        )


@dataclass(slots=True)
class SimResult:
    """Recorded closed-loop trajectory plus run metadata.

    The per-sample arrays share index: ``t[i]`` is the time of sample
    ``i``; sample times form the arithmetic progression
    ``record_stride * dt``.  ``v1``/``v2``/``v3`` store the values
    named ``V1``/``V2``/``V3`` in the CSV header.
    """

    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    z2: np.ndarray
    u: np.ndarray
    d: np.ndarray
    w: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray
    spec: ControllerSpec
    config: SimConfig
    dist: DisturbanceModel
    saturation_events: int
    step_count: int
    backend: str

    @property
    def n_samples(self) -> int:
        return len(self.t)

    def column(self, name: str) -> np.ndarray:
        """Column by CSV header name (``t``, ``x1``, ..., ``V3``)."""
        if name not in COLUMNS:
            raise KeyError(f"unknown column {name!r}, expected one of {COLUMNS}")
        return getattr(self, name.lower() if name.startswith("V") else name)

    def as_matrix(self) -> np.ndarray:
        """All columns as one ``(n_samples, 10)`` array in header order."""
        return np.column_stack([self.column(c) for c in COLUMNS])


def step(
    state: PlantState,
    spec: ControllerSpec,
    dist: DisturbanceModel,
    dt: float,
) -> PlantState:
    """One forward-Euler step with the control held over the step.

    Evaluates the law and the disturbance at ``state.t`` and advances
    the states by ``dt``.  Raises :class:`SimulationOverflowError` when
    the control or the advanced state is not finite.
    """
    if dt <= 0.0 or not math.isfinite(dt):
        raise ValueError(f"dt must be finite and > 0, got {dt!r}")
    d = disturbance_value(dist, state.t)
    out, w_dot = evaluate(spec, state.x1, state.x2, state.w)
    if not math.isfinite(out.u):
        raise SimulationOverflowError(0, state.t, (state.x1, state.x2, state.w))
    x1 = state.x1 + dt * state.x2
    x2 = state.x2 + dt * (out.u + d)
    w = state.w + dt * w_dot
    if not (math.isfinite(x1) and math.isfinite(x2) and math.isfinite(w)):
        raise SimulationOverflowError(1, state.t, (state.x1, state.x2, state.w))
    return PlantState(x1=x1, x2=x2, w=w, t=state.t + dt)


_EMPTY = np.empty(0, dtype=np.float64)


def run(
    config: SimConfig,
    spec: ControllerSpec,
    dist: DisturbanceModel | None = None,
    *,
    backend: str | None = None,
) -> SimResult:
    """Integrate the closed loop over ``[0, t_end]`` and record samples.

    The law is evaluated at every step time ``k * dt`` and recorded at
    every ``record_stride``-th step (the initial state and, when the
    horizon divides evenly, the final state are always sampled).

    Parameters
    ----------
    backend:
        ``"compiled"``, ``"pure"``, ``"auto"`` or None (defer to the
        ``PTSMC_BACKEND`` environment variable, default auto).  Both
        kernels are bit-identical; this only selects speed.

    Raises
    ------
    SimulationOverflowError
        When the control or a state leaves the finite range; the run
        aborts rather than clamping.
    """
    if dist is None:
        dist = DisturbanceModel.zero()
    kernel = _backend.get_backend(backend)

    n = config.n_steps
    t_end_actual = n * config.dt
    if dist.kind == "tabulated":
        assert dist.times is not None
        if 0.0 < dist.times[0] or t_end_actual > dist.times[-1]:
            raise ValueError(
                f"tabulated disturbance covers [{dist.times[0]!r}, {dist.times[-1]!r}] "
                f"but the run needs [0, {t_end_actual!r}]"
            )
        dtimes = np.asarray(dist.times, dtype=np.float64)
        dvalues = np.asarray(dist.values, dtype=np.float64)
    else:
        dtimes = dvalues = _EMPTY

    stride = config.record_stride
    rec = np.empty((n // stride + 1, len(COLUMNS)), dtype=np.float64)
    g = spec.guards
    nrec, sat_events, fail_step, t_last, x1, x2, w = kernel.run_loop(
        rec,
        spec.law_code,
        spec.K1,
        spec.K2,
        spec.beta,
        spec.gamma,
        spec.k_tsm,
        spec.pt_params(spec.beta).surrogate_code,
        spec.tanh_gain,
        g.zero_band,
        g.exp_cap,
        _KIND_CODES[dist.kind],
        dist.value if dist.kind == "constant" else dist.amplitude,
        dist.omega,
        dist.phase,
        dtimes,
        dvalues,
        config.x1_0,
        config.x2_0,
        config.w_0,
        config.dt,
        n,
        stride,
    )
    if fail_step >= 0:
        raise SimulationOverflowError(fail_step, t_last, (x1, x2, w))
    assert nrec == rec.shape[0]
    cols = {name: rec[:, i].copy() for i, name in enumerate(COLUMNS)}
    return SimResult(
        t=cols["t"],
        x1=cols["x1"],
        x2=cols["x2"],
        z2=cols["z2"],
        u=cols["u"],
        d=cols["d"],
        w=cols["w"],
        v1=cols["V1"],
        v2=cols["V2"],
        v3=cols["V3"],
        spec=spec,
        config=config,
        dist=dist,
        saturation_events=sat_events,
        step_count=n,
        backend=kernel.NAME,
    )
