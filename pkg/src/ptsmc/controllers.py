"""Four power-tower control laws for the perturbed double integrator.

All laws stabilize ``x1' = x2``, ``x2' = u + d`` through the fictive
control ``x2* = -K1 * pt(x1, beta)`` and the error ``z2 = x2 - x2*``
(for the terminal law the surface ``s`` plays the role of ``z2``):

* ``nominal``      -- ``u = -K2*pt(z2, gamma) - x1 - K1*ptd(x1, beta)*x2``;
  drives ``V2 = x1^2/2 + z2^2/2`` down at the rate
  ``-K1*|x1|^(1+|x1|^beta) - K2*|z2|^(1+|z2|^gamma)`` exactly.
* ``robust-sign``  -- replaces ``K2*pt(z2, gamma)`` by ``K2*S(z2)``;
  rejects any matched disturbance bounded by ``D_max < K2``.
* ``integral``     -- adds an integral state ``w`` with ``w' = -z2`` to
  the nominal law (``u = w + ...``); ``w`` converges to ``-d`` for a
  constant disturbance, so ``u -> -d`` in steady state.
* ``terminal-sm``  -- sliding surface ``s = x2 + k_tsm*pt(x1, beta)``
  with ``u = -pt(s, gamma) - k_tsm*ptd(x1, beta)*x2``; singularity-free
  at ``x1 = 0`` because the derivative factor is bounded for ``beta > 1``.

Here ``pt`` is the order-2 power tower and ``ptd`` its derivative
factor (see :mod:`ptsmc.power_tower`).  The laws are pure functions of
the plant state plus, for the integral law, the controller memory ``w``
that the integrator advances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .power_tower import (
    DEFAULT_GUARDS,
    SURROGATES,
    EvalGuards,
    PowerTowerParams,
    _pt_core,
    _ptd_core,
    _sign_core,
)

__all__ = [
    "LAWS",
    "ControllerSpec",
    "ControllerState",
    "ControlOutput",
    "fictive_control",
    "nominal_control",
    "robust_sign_control",
    "integral_control",
    "terminal_sm_control",
    "evaluate",
]

LAWS = ("nominal", "robust-sign", "integral", "terminal-sm")

# Integer codes shared with the simulation kernels.
LAW_NOMINAL = 0
LAW_ROBUST = 1
LAW_INTEGRAL = 2
LAW_TERMINAL = 3
_LAW_CODES = {
    "nominal": LAW_NOMINAL,
    "robust-sign": LAW_ROBUST,
    "integral": LAW_INTEGRAL,
    "terminal-sm": LAW_TERMINAL,
}


@dataclass(frozen=True, slots=True)
class ControllerSpec:
    """Law selection plus gains for the four control laws.

    Parameters
    ----------
    law:
        One of ``"nominal"``, ``"robust-sign"``, ``"integral"``,
        ``"terminal-sm"``.
    K1, K2:
        Positive gains of the fictive control and of the ``z2`` term.
    beta:
        Power-tower exponent acting on ``x1``; must exceed 1 so the
        derivative factor stays bounded at ``x1 = 0``.
    gamma:
        Power-tower exponent acting on ``z2`` (or on the surface ``s``).
        Must be positive for the nominal and integral laws; the
        robust-sign law does not use it (it is accepted and ignored).
    k_tsm:
        Surface gain of the terminal sliding-mode law.
    D_max:
        Known disturbance bound for the robust-sign law; rejection is
        guaranteed only while ``K2 > D_max``.
    surrogate, tanh_gain:
        Sign-surrogate selection shared by every sign-like factor in
        the law (both the power-tower signs and the explicit sign of
        the robust law).
    guards:
        Numerical evaluation guards, shared with the core math.
    """

    law: str
    K1: float = 1.0
    K2: float = 20.0
    beta: float = 2.0
    gamma: float = 1.5
    k_tsm: float = 1.0
    D_max: float = 0.0
    surrogate: str = "exact"
    tanh_gain: float = 50.0
    guards: EvalGuards = field(default_factory=EvalGuards)

    def __post_init__(self) -> None:
        if self.law not in LAWS:
            raise ValueError(f"law must be one of {LAWS}, got {self.law!r}")
        for name in ("K1", "K2", "beta", "gamma", "k_tsm", "D_max", "tanh_gain"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)!r}")
        if self.K1 <= 0.0 or self.K2 <= 0.0:
            raise ValueError(f"gains must be positive, got K1={self.K1}, K2={self.K2}")
        if self.beta <= 1.0:
            raise ValueError(f"beta must be > 1, got {self.beta}")
        if self.law in ("nominal", "integral") and self.gamma <= 0.0:
            raise ValueError(f"gamma must be > 0 for the {self.law} law, got {self.gamma}")
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.law == "terminal-sm" and self.k_tsm <= 0.0:
            raise ValueError(f"k_tsm must be > 0, got {self.k_tsm}")
        if self.D_max < 0.0:
            raise ValueError(f"D_max must be >= 0, got {self.D_max}")
        if self.law == "robust-sign" and self.K2 <= self.D_max:
            raise ValueError(
                f"robust-sign law requires K2 > D_max, got K2={self.K2}, D_max={self.D_max}"
            )
        if self.surrogate not in SURROGATES:
            raise ValueError(f"surrogate must be one of {SURROGATES}, got {self.surrogate!r}")
        if self.surrogate == "tanh" and self.tanh_gain <= 0.0:
            raise ValueError(f"tanh_gain must be > 0, got {self.tanh_gain}")

    @property
    def law_code(self) -> int:
        return _LAW_CODES[self.law]

    def pt_params(self, alpha: float) -> PowerTowerParams:
        """Power-tower parameters for one of this spec's exponents."""
        return PowerTowerParams(alpha, self.surrogate, self.tanh_gain)


@dataclass(slots=True)
class ControllerState:
    """Controller memory: the integral/adaptive estimate ``w``."""

    w: float = 0.0


@dataclass(frozen=True, slots=True)
class ControlOutput:
    """One pointwise controller evaluation.

    Attributes
    ----------
    u:
        Control value.
    z2:
        The law's error variable: ``x2 - x2*`` for the backstepping
        laws, the surface value ``s`` for the terminal law.
    x2_star:
        Fictive control ``-K1*pt(x1, beta)`` (``-k_tsm*pt(x1, beta)``
        for the terminal law).
    s:
        Terminal sliding surface; 0.0 for the other laws.
    saturated:
        True when any power-tower evaluation hit the exponent cap.
    """

    u: float
    z2: float
    x2_star: float
    s: float
    saturated: bool


def _eval_core(
    law: int,
    x1: float,
    x2: float,
    w: float,
    K1: float,
    K2: float,
    beta: float,
    gamma: float,
    k_tsm: float,
    sur: int,
    kappa: float,
    zero_band: float,
    exp_cap: float,
) -> tuple[float, float, float, bool]:
    """Scalar control evaluation shared by the pure-Python kernel.

    Returns ``(u, z2, w_dot, saturated)`` where ``z2`` is the law's
    error variable (the surface ``s`` for the terminal law).  The
    compiled kernel mirrors this function operation for operation so
    both backends produce bit-identical trajectories.
    """
    ptx1, sat = _pt_core(x1, beta, sur, kappa, zero_band, exp_cap)
    if law == LAW_TERMINAL:
        s_val = x2 + k_tsm * ptx1
        ptd1, sat2 = _ptd_core(x1, beta, zero_band, exp_cap)
        pts, sat3 = _pt_core(s_val, gamma, sur, kappa, zero_band, exp_cap)
        u = -pts - k_tsm * ptd1 * x2
        return u, s_val, 0.0, sat or sat2 or sat3

    z2 = x2 + K1 * ptx1
    ptd1, sat2 = _ptd_core(x1, beta, zero_band, exp_cap)
    common = -x1 - K1 * ptd1 * (-K1 * ptx1 + z2)
    sat = sat or sat2
    if law == LAW_NOMINAL:
        ptz, sat3 = _pt_core(z2, gamma, sur, kappa, zero_band, exp_cap)
        return -K2 * ptz + common, z2, 0.0, sat or sat3
    if law == LAW_ROBUST:
        return -K2 * _sign_core(z2, sur, kappa) + common, z2, 0.0, sat
    # integral law
    ptz, sat3 = _pt_core(z2, gamma, sur, kappa, zero_band, exp_cap)
    return w - K2 * ptz + common, z2, -z2, sat or sat3


def _core_args(spec: ControllerSpec) -> tuple:
    g = spec.guards
    return (
        spec.K1,
        spec.K2,
        spec.beta,
        spec.gamma,
        spec.k_tsm,
        spec.pt_params(spec.beta).surrogate_code,
        spec.tanh_gain,
        g.zero_band,
        g.exp_cap,
    )


def fictive_control(x1: float, spec: ControllerSpec) -> float:
    """Fictive control ``x2* = -K1 * pt(x1, beta)`` of the backstepping laws."""
    g = spec.guards
    sur = spec.pt_params(spec.beta).surrogate_code
    val, _ = _pt_core(x1, spec.beta, sur, spec.tanh_gain, g.zero_band, g.exp_cap)
    return -spec.K1 * val


def _output(spec: ControllerSpec, x1: float, x2: float, w: float) -> tuple[ControlOutput, float]:
    u, z2, w_dot, sat = _eval_core(spec.law_code, x1, x2, w, *_core_args(spec))
    g = spec.guards
    sur = spec.pt_params(spec.beta).surrogate_code
    ptx1, _ = _pt_core(x1, spec.beta, sur, spec.tanh_gain, g.zero_band, g.exp_cap)
    if spec.law == "terminal-sm":
        x2_star = -spec.k_tsm * ptx1
        out = ControlOutput(u=u, z2=z2, x2_star=x2_star, s=z2, saturated=sat)
    else:
        x2_star = -spec.K1 * ptx1
        out = ControlOutput(u=u, z2=z2, x2_star=x2_star, s=0.0, saturated=sat)
    return out, w_dot


def nominal_control(x1: float, x2: float, spec: ControllerSpec) -> ControlOutput:
    """Backstepping law with power-tower feedback on both ``x1`` and ``z2``."""
    if spec.law != "nominal":
        raise ValueError(f"spec.law is {spec.law!r}, expected 'nominal'")
    return _output(spec, x1, x2, 0.0)[0]


def robust_sign_control(x1: float, x2: float, spec: ControllerSpec) -> ControlOutput:
    """Sign-feedback law rejecting disturbances bounded by ``D_max < K2``."""
    if spec.law != "robust-sign":
        raise ValueError(f"spec.law is {spec.law!r}, expected 'robust-sign'")
    return _output(spec, x1, x2, 0.0)[0]


def integral_control(
    x1: float, x2: float, state: ControllerState, spec: ControllerSpec
) -> tuple[ControlOutput, float]:
    """Nominal law plus integral action; returns ``(output, w_dot)``.

    The controller does not advance ``w`` itself: the integrator owns
    ``w' = w_dot = -z2``.
    """
    if spec.law != "integral":
        raise ValueError(f"spec.law is {spec.law!r}, expected 'integral'")
    return _output(spec, x1, x2, state.w)


def terminal_sm_control(x1: float, x2: float, spec: ControllerSpec) -> ControlOutput:
    """Terminal sliding-mode law on the power-tower surface ``s``."""
    if spec.law != "terminal-sm":
        raise ValueError(f"spec.law is {spec.law!r}, expected 'terminal-sm'")
    return _output(spec, x1, x2, 0.0)[0]


def evaluate(
    spec: ControllerSpec, x1: float, x2: float, w: float = 0.0
) -> tuple[ControlOutput, float]:
    """Dispatch to the configured law; returns ``(output, w_dot)``.

    ``w_dot`` is 0.0 for every law except ``integral``.
    """
    return _output(spec, x1, x2, w)
