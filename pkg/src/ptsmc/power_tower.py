"""Order-2 power-tower function and its derivative factor.

The signed power tower of order 2 is the map

    a  ->  |a|^(|a|^alpha) * S(a),

where ``S`` is either the exact sign function (with ``sgn(0) = 0``) or
the smooth surrogate ``tanh(kappa * a)``.  The magnitude is evaluated
as ``exp(|a|^alpha * ln|a|)``, which is accurate in the near-zero
regime where the function approaches ``+-1`` like a sign function.

Its derivative with respect to ``a`` (for ``a != 0``) is

    |a|^(|a|^alpha + alpha - 1) * (1 + alpha * ln|a|),

called the *derivative factor* here.  For ``alpha > 1`` the factor has
a finite limit of 0 at ``a = 0`` and is therefore patched to exactly
0.0 inside a small ``zero_band``; for ``alpha <= 1`` the limit is
unbounded and evaluation inside the band raises :class:`SingularityError`.

All evaluations clamp the exponent argument at ``exp_cap`` so that the
exponential itself never overflows; a clamp is reported as *saturation*
by the ``*_ex`` variants and is counted per step by the simulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "PowerTowerParams",
    "EvalGuards",
    "DEFAULT_GUARDS",
    "SingularityError",
    "sign_surrogate",
    "pt_value",
    "pt_value_ex",
    "pt_derivative_factor",
    "pt_derivative_factor_ex",
]

SURROGATES = ("exact", "tanh")

# Integer codes shared with the simulation kernels.
SUR_EXACT = 0
SUR_TANH = 1
_SUR_CODES = {"exact": SUR_EXACT, "tanh": SUR_TANH}

_INF = float("inf")


class SingularityError(ValueError):
    """Derivative factor requested where its zero-limit is unbounded."""


@dataclass(frozen=True, slots=True)
class PowerTowerParams:
    """Exponent and sign-surrogate selection for power-tower evaluation.

    Parameters
    ----------
    alpha:
        Positive exponent of the inner power ``|a|^alpha``.  Values
        ``alpha <= 1`` are valid for value evaluation but make the
        derivative factor singular at 0.
    surrogate:
        ``"exact"`` for the true sign function (``sgn(0) = 0``) or
        ``"tanh"`` for the smooth surrogate ``tanh(tanh_gain * a)``.
    tanh_gain:
        Slope ``kappa > 0`` of the tanh surrogate; ignored in exact mode.
    """

    alpha: float
    surrogate: str = "exact"
    tanh_gain: float = 50.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError(f"alpha must be finite and > 0, got {self.alpha!r}")
        if self.surrogate not in SURROGATES:
            raise ValueError(
                f"surrogate must be one of {SURROGATES}, got {self.surrogate!r}"
            )
        if self.surrogate == "tanh" and not (
            math.isfinite(self.tanh_gain) and self.tanh_gain > 0.0
        ):
            raise ValueError(f"tanh_gain must be finite and > 0, got {self.tanh_gain!r}")

    @property
    def surrogate_code(self) -> int:
        return _SUR_CODES[self.surrogate]


@dataclass(frozen=True, slots=True)
class EvalGuards:
    """Numerical guards for evaluation at the singular point and at overflow.

    Parameters
    ----------
    zero_band:
        Threshold below which ``|a|`` is treated as 0: the power-tower
        magnitude takes its limit value 1 and the derivative factor its
        limit value 0 (for ``alpha > 1``).
    exp_cap:
        Cap on the exponent argument before the final ``exp``; 700 keeps
        the result below the IEEE double overflow threshold.
    """

    zero_band: float = 1e-12
    exp_cap: float = 700.0

    def __post_init__(self) -> None:
        if not (0.0 < self.zero_band < 1.0):
            raise ValueError(f"zero_band must be in (0, 1), got {self.zero_band!r}")
        if not (math.isfinite(self.exp_cap) and self.exp_cap > 0.0):
            raise ValueError(f"exp_cap must be finite and > 0, got {self.exp_cap!r}")


DEFAULT_GUARDS = EvalGuards()


def _pow_or_inf(base: float, exponent: float) -> float:
    """``base ** exponent`` with C semantics: overflow yields inf, not an error."""
    try:
        return base ** exponent
    except OverflowError:
        return _INF


def _sign_core(a: float, sur: int, kappa: float) -> float:
    if sur == SUR_TANH:
        return math.tanh(kappa * a)
    if a > 0.0:
        return 1.0
    if a < 0.0:
        return -1.0
    return 0.0


def _pt_core(
    a: float, alpha: float, sur: int, kappa: float, zero_band: float, exp_cap: float
) -> tuple[float, bool]:
    """Power-tower value and saturation flag (scalar core shared with kernels)."""
    s = _sign_core(a, sur, kappa)
    aa = abs(a)
    if aa < zero_band:
        # Magnitude limit is 1: the sign factor carries all the behavior.
        return s, False
    arg = _pow_or_inf(aa, alpha) * math.log(aa)
    if arg > exp_cap:
        return math.exp(exp_cap) * s, True
    return math.exp(arg) * s, False


def _ptd_core(
    a: float, alpha: float, zero_band: float, exp_cap: float
) -> tuple[float, bool]:
    """Derivative factor and saturation flag (scalar core shared with kernels).

    Inside the zero band the factor is 0.0 for ``alpha > 1`` and NaN for
    ``alpha <= 1`` (the public wrapper raises instead); the closed-loop
    laws always use ``alpha > 1`` so the NaN branch is unreachable there.
    """
    aa = abs(a)
    if aa < zero_band:
        if alpha > 1.0:
            return 0.0, False
        return math.nan, False
    la = math.log(aa)
    arg = (_pow_or_inf(aa, alpha) + alpha - 1.0) * la
    sat = False
    if arg > exp_cap:
        arg = exp_cap
        sat = True
    return math.exp(arg) * (1.0 + alpha * la), sat


def sign_surrogate(a: float, p: PowerTowerParams) -> float:
    """Sign factor ``S(a)``: exact sgn (in {-1, 0, 1}) or ``tanh(kappa*a)``."""
    return _sign_core(a, p.surrogate_code, p.tanh_gain)


def pt_value_ex(
    a: float, p: PowerTowerParams, g: EvalGuards = DEFAULT_GUARDS
) -> tuple[float, bool]:
    """Power-tower value together with its exponent-saturation flag."""
    return _pt_core(a, p.alpha, p.surrogate_code, p.tanh_gain, g.zero_band, g.exp_cap)


def pt_value(a: float, p: PowerTowerParams, g: EvalGuards = DEFAULT_GUARDS) -> float:
    """Signed power tower ``|a|^(|a|^alpha) * S(a)``.

    Exactly 0.0 at ``a = 0`` in exact-sign mode; approaches ``+-1`` as
    ``a -> 0^+-`` (sign-function-like limit).  Odd in ``a`` under the
    exact sign.
    """
    return pt_value_ex(a, p, g)[0]


def pt_derivative_factor_ex(
    a: float, p: PowerTowerParams, g: EvalGuards = DEFAULT_GUARDS
) -> tuple[float, bool]:
    """Derivative factor together with its exponent-saturation flag.

    Raises
    ------
    SingularityError
        If ``p.alpha <= 1`` and ``|a|`` lies inside the zero band, where
        the factor has no bounded limit.
    """
    if p.alpha <= 1.0 and abs(a) < g.zero_band:
        raise SingularityError(
            f"derivative factor is unbounded at a={a!r} for alpha={p.alpha!r} <= 1"
        )
    return _ptd_core(a, p.alpha, g.zero_band, g.exp_cap)


def pt_derivative_factor(
    a: float, p: PowerTowerParams, g: EvalGuards = DEFAULT_GUARDS
) -> float:
    """Derivative ``|a|^(|a|^alpha + alpha - 1) * (1 + alpha*ln|a|)`` of the tower.

    Returns exactly 0.0 inside the zero band when ``alpha > 1`` (the
    analytic limit); the factor changes sign at ``a = exp(-1/alpha)``,
    the interior minimum of the magnitude on (0, 1].
    """
    return pt_derivative_factor_ex(a, p, g)[0]
