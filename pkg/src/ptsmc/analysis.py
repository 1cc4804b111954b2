"""Quantitative post-processing of simulation results.

Convergence is operationalized as *entry and stay*: the convergence
time is the earliest recorded time after which every remaining sample
satisfies ``max(|x1|, |x2|) <= epsilon``.  The module also provides
initial-condition sweeps (empirical guaranteed-time check), chattering
metrics on the control signal, monotonicity verdicts for the recorded
energy-like values, the central-difference oracle validating the
power-tower derivative factor, and a step-halving order check for the
Euler integrator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .power_tower import DEFAULT_GUARDS, EvalGuards, PowerTowerParams, pt_derivative_factor, pt_value
from .controllers import ControllerSpec
from .simulate import DisturbanceModel, SimConfig, SimResult, SimulationOverflowError, run

__all__ = [
    "ConvergenceReport",
    "ChatteringReport",
    "MonotonicityReport",
    "SweepCell",
    "SweepReport",
    "Lemma1Report",
    "EulerOrderReport",
    "convergence_time",
    "guaranteed_time_sweep",
    "chattering_index",
    "lyapunov_monotonicity",
    "lemma1_oracle",
    "log_grid",
    "euler_order_ratio",
]


@dataclass(frozen=True, slots=True)
class ConvergenceReport:
    """Entry-and-stay convergence of ``max(|x1|, |x2|)`` into an epsilon ball.

    ``t_conv`` is None when the trajectory never settles inside the
    ball.  ``stayed`` is True when the trajectory never escaped after
    its first entry (i.e. first entry and final entry coincide).
    """

    t_conv: float | None
    band: float
    stayed: bool
    final_state: tuple[float, float, float]


@dataclass(frozen=True, slots=True)
class ChatteringReport:
    """Sign-switching activity of the control over a trailing window."""

    sign_flips_per_second: float
    u_total_variation: float
    window: float


@dataclass(frozen=True, slots=True)
class MonotonicityReport:
    """Nonincrease verdict for a recorded series above a numerical band.

    The check passes iff ``V[k+1] <= V[k]`` whenever ``V[k] > band``;
    samples already below the band are exempt (discretization noise).
    """

    which: str
    band: float
    passed: bool
    first_violation_index: int | None
    first_violation_time: float | None
    max_increase: float


@dataclass(frozen=True, slots=True)
class SweepCell:
    """One initial condition of a sweep; ``error`` marks an aborted run."""

    x1_0: float
    x2_0: float
    report: ConvergenceReport | None
    max_abs_u: float | None
    error: str | None = None

    @property
    def converged(self) -> bool:
        return self.report is not None and self.report.t_conv is not None


@dataclass(frozen=True, slots=True)
class SweepReport:
    """Convergence reports over an initial-condition grid (d = 0)."""

    cells: tuple[SweepCell, ...]
    epsilon: float
    max_t_conv: float | None
    all_converged: bool


@dataclass(frozen=True, slots=True)
class Lemma1Report:
    """Central-difference validation of the derivative factor.

    ``rows`` has columns ``(a, analytic, numeric, rel_err)`` where
    ``rel_err = |numeric - analytic| / max(|analytic|, 1e-12)``.
    """

    alpha: float
    h_rule: float
    rows: np.ndarray
    max_rel_err: float


@dataclass(frozen=True, slots=True)
class EulerOrderReport:
    """Max-deviation ratio between successive step halvings.

    ``deviation_coarse`` compares the base run against the half-step
    run, ``deviation_fine`` the half-step against the quarter-step run,
    at common sample times up to ``t_cut``.  A first-order integrator
    yields a ratio near 2.
    """

    deviation_coarse: float
    deviation_fine: float
    ratio: float
    t_cut: float


def convergence_time(result: SimResult, epsilon: float) -> ConvergenceReport:
    """Entry-and-stay time of ``max(|x1|, |x2|)`` into the epsilon ball."""
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be > 0, got {epsilon!r}")
    if result.n_samples == 0:
        raise ValueError("result has no samples")
    inside = (np.abs(result.x1) <= epsilon) & (np.abs(result.x2) <= epsilon)
    final_state = (float(result.x1[-1]), float(result.x2[-1]), float(result.w[-1]))
    if not inside[-1]:
        return ConvergenceReport(None, epsilon, False, final_state)
    outside = np.flatnonzero(~inside)
    if len(outside) == 0:
        entry = 0
    else:
        entry = int(outside[-1]) + 1
    first_entry = int(np.flatnonzero(inside)[0])
    return ConvergenceReport(
        float(result.t[entry]), epsilon, first_entry == entry, final_state
    )


def guaranteed_time_sweep(
    ic_grid: Sequence[tuple[float, float]],
    config: SimConfig,
    spec: ControllerSpec,
    epsilon: float,
    *,
    backend: str | None = None,
) -> SweepReport:
    """Convergence reports over an initial-condition grid, with d = 0.

    The disturbance is forced to zero (the guaranteed-time claim is for
    the unperturbed loop).  An overflow in one cell is recorded in that
    cell and does not abort the sweep.  Cells are ordered as the input.
    """
    if len(ic_grid) == 0:
        raise ValueError("ic_grid must be nonempty")
    dist = DisturbanceModel.zero()
    cells: list[SweepCell] = []
    for x1_0, x2_0 in ic_grid:
        cfg = replace(config, x1_0=float(x1_0), x2_0=float(x2_0))
        try:
            result = run(cfg, spec, dist, backend=backend)
        except SimulationOverflowError as exc:
            cells.append(
                SweepCell(float(x1_0), float(x2_0), None, None, error=str(exc))
            )
            continue
        report = convergence_time(result, epsilon)
        cells.append(
            SweepCell(
                float(x1_0),
                float(x2_0),
                report,
                float(np.max(np.abs(result.u))),
            )
        )
    times = [c.report.t_conv for c in cells if c.report is not None and c.report.t_conv is not None]
    return SweepReport(
        cells=tuple(cells),
        epsilon=epsilon,
        max_t_conv=max(times) if times else None,
        all_converged=all(c.converged for c in cells),
    )


def chattering_index(result: SimResult, window: float) -> ChatteringReport:
    """Strict sign alternations and total variation of u over a trailing window."""
    if window <= 0.0:
        raise ValueError(f"window must be > 0, got {window!r}")
    span = float(result.t[-1] - result.t[0])
    if window > span and result.n_samples > 1:
        raise ValueError(f"window {window!r} exceeds trajectory span {span!r}")
    mask = result.t >= result.t[-1] - window
    u = result.u[mask]
    if len(u) < 2:
        return ChatteringReport(0.0, 0.0, window)
    flips = int(np.count_nonzero(u[:-1] * u[1:] < 0.0))
    tv = float(np.sum(np.abs(np.diff(u))))
    return ChatteringReport(flips / window, tv, window)


def lyapunov_monotonicity(
    result: SimResult, which: str, band: float
) -> MonotonicityReport:
    """Nonincrease verdict for one of the recorded series V1, V2, V3."""
    if which not in ("V1", "V2", "V3"):
        raise ValueError(f"which must be 'V1', 'V2' or 'V3', got {which!r}")
    if band < 0.0:
        raise ValueError(f"band must be >= 0, got {band!r}")
    v = result.column(which)
    increases = v[1:] - v[:-1]
    violating = (v[:-1] > band) & (increases > 0.0)
    idx = np.flatnonzero(violating)
    if len(idx) == 0:
        return MonotonicityReport(which, band, True, None, None, 0.0)
    first = int(idx[0]) + 1
    return MonotonicityReport(
        which,
        band,
        False,
        first,
        float(result.t[first]),
        float(np.max(increases[violating])),
    )


def log_grid(a_min: float, a_max: float, points: int, *, signed: bool = True) -> np.ndarray:
    """Log-spaced magnitudes in ``[a_min, a_max]``, mirrored to both signs."""
    if not (0.0 < a_min < a_max):
        raise ValueError(f"need 0 < a_min < a_max, got {a_min!r}, {a_max!r}")
    if points < 2:
        raise ValueError(f"points must be >= 2, got {points!r}")
    mags = np.geomspace(a_min, a_max, points)
    if not signed:
        return mags
    return np.concatenate([-mags[::-1], mags])


def lemma1_oracle(
    alpha: float,
    grid: Sequence[float] | np.ndarray | None = None,
    h_rule: float = 1e-6,
    *,
    guards: EvalGuards = DEFAULT_GUARDS,
) -> Lemma1Report:
    """Validate the derivative factor against central finite differences.

    For each grid point ``a`` (default: 200 log-spaced magnitudes in
    [0.05, 2] per sign), compares the analytic factor with
    ``(pt(a+h) - pt(a-h)) / (2h)`` at ``h = h_rule * max(1, |a|)``,
    using the exact-sign power tower.  The grid must stay clear of the
    zero band (the function is not differentiable across 0).
    """
    params = PowerTowerParams(alpha)
    pts = log_grid(0.05, 2.0, 200) if grid is None else np.asarray(grid, dtype=np.float64)
    if np.any(np.abs(pts) <= guards.zero_band):
        raise ValueError("grid overlaps the zero band")
    rows = np.empty((len(pts), 4), dtype=np.float64)
    for i, a in enumerate(pts.tolist()):
        h = h_rule * max(1.0, abs(a))
        analytic = pt_derivative_factor(a, params, guards)
        numeric = (pt_value(a + h, params, guards) - pt_value(a - h, params, guards)) / (
            2.0 * h
        )
        rel_err = abs(numeric - analytic) / max(abs(analytic), 1e-12)
        rows[i] = (a, analytic, numeric, rel_err)
    return Lemma1Report(alpha, h_rule, rows, float(np.max(rows[:, 3])))


def _common_deviation(
    coarse: SimResult, fine: SimResult, t_cut: float
) -> float:
    """Max |x| deviation at the common sample times up to ``t_cut``."""
    n = int(np.count_nonzero(coarse.t <= t_cut))
    if n == 0:
        raise ValueError(f"no samples at or below t_cut={t_cut!r}")
    if fine.n_samples < n or not np.array_equal(coarse.t[:n], fine.t[:n]):
        raise ValueError(
            "runs do not share sample times; scale record_stride with 1/dt"
        )
    dev_x1 = np.max(np.abs(coarse.x1[:n] - fine.x1[:n]))
    dev_x2 = np.max(np.abs(coarse.x2[:n] - fine.x2[:n]))
    return float(max(dev_x1, dev_x2))


def euler_order_ratio(
    base: SimResult, half: SimResult, quarter: SimResult, t_cut: float
) -> EulerOrderReport:
    """Step-halving deviation ratio at common sample times up to ``t_cut``.

    ``base``, ``half`` and ``quarter`` must be the same scenario run at
    ``dt``, ``dt/2`` and ``dt/4`` with ``record_stride`` scaled by 2 and
    4 so that recorded times coincide.  For a first-order integrator
    the deviations shrink linearly with dt, giving a ratio near 2.
    ``t_cut`` bounds the comparison window; choose it below the onset
    of discretization-driven switching, where trajectories decorrelate
    from step-phase effects rather than truncation error.
    """
    d_coarse = _common_deviation(base, half, t_cut)
    d_fine = _common_deviation(half, quarter, t_cut)
    if d_fine == 0.0:
        raise ValueError("zero fine-grid deviation; t_cut too small or runs identical")
    return EulerOrderReport(d_coarse, d_fine, d_coarse / d_fine, t_cut)
