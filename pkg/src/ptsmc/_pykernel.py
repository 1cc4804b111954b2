"""Pure-Python simulation kernel.

Fallback backend used when the compiled extension is unavailable (or
explicitly requested).  The compiled kernel mirrors this loop operation
for operation — same expressions, same evaluation order, same libm
calls — so the two backends produce bit-identical trajectories.
"""

from __future__ import annotations

import math

from .controllers import _eval_core

NAME = "pure"

# Record layout: t, x1, x2, z2, u, d, w, V1, V2, V3.
N_COLUMNS = 10


def run_loop(
    rec,
    law: int,
    K1: float,
    K2: float,
    beta: float,
    gamma: float,
    k_tsm: float,
    sur: int,
    kappa: float,
    zero_band: float,
    exp_cap: float,
    dist_kind: int,
    d0: float,
    d1: float,
    d2: float,
    dtimes,
    dvalues,
    x1: float,
    x2: float,
    w: float,
    dt: float,
    n_steps: int,
    stride: int,
):
    """Forward-Euler closed loop with the control held over each step.

    Evaluates the law at every step ``k = 0..n_steps`` (time ``k*dt``),
    records every ``stride``-th evaluation into ``rec``, and integrates
    between evaluations.  Returns

        ``(n_recorded, saturation_events, fail_step, t_last, x1, x2, w)``

    where ``fail_step`` is -1 on success; otherwise it is the step at
    which the control or the advanced state stopped being finite, and
    ``(t_last, x1, x2, w)`` describe the last finite state.
    """
    isfinite = math.isfinite
    sin = math.sin
    tab_t = dtimes.tolist()
    tab_v = dvalues.tolist()
    tab_idx = 0
    tab_last = len(tab_t) - 2

    sat_events = 0
    nrec = 0
    k = 0
    while True:
        t = k * dt

        if dist_kind == 0:
            d = 0.0
        elif dist_kind == 1:
            d = d0
        elif dist_kind == 2:
            d = d0 * sin(d1 * t + d2)
        else:
            while tab_idx < tab_last and t >= tab_t[tab_idx + 1]:
                tab_idx += 1
            t_lo = tab_t[tab_idx]
            d = tab_v[tab_idx] + (tab_v[tab_idx + 1] - tab_v[tab_idx]) * (
                (t - t_lo) / (tab_t[tab_idx + 1] - t_lo)
            )

        u, z2, w_dot, sat = _eval_core(
            law, x1, x2, w, K1, K2, beta, gamma, k_tsm, sur, kappa, zero_band, exp_cap
        )
        if sat:
            sat_events += 1
        if not isfinite(u):
            return nrec, sat_events, k, t, x1, x2, w

        if k % stride == 0:
            v1 = 0.5 * x1 * x1
            v2 = v1 + 0.5 * z2 * z2
            dw = d + w
            rec[nrec, 0] = t
            rec[nrec, 1] = x1
            rec[nrec, 2] = x2
            rec[nrec, 3] = z2
            rec[nrec, 4] = u
            rec[nrec, 5] = d
            rec[nrec, 6] = w
            rec[nrec, 7] = v1
            rec[nrec, 8] = v2
            rec[nrec, 9] = v2 + 0.5 * dw * dw
            nrec += 1

        if k == n_steps:
            break

        x1_next = x1 + dt * x2
        x2_next = x2 + dt * (u + d)
        w_next = w + dt * w_dot
        if not (isfinite(x1_next) and isfinite(x2_next) and isfinite(w_next)):
            return nrec, sat_events, k + 1, t, x1, x2, w
        x1 = x1_next
        x2 = x2_next
        w = w_next
        k += 1

    return nrec, sat_events, -1, k * dt, x1, x2, w


def pt_value_raw(
    a: float, alpha: float, sur: int, kappa: float, zero_band: float, exp_cap: float
) -> float:
    """Scalar power-tower value (backend-parity test hook)."""
    from .power_tower import _pt_core

    return _pt_core(a, alpha, sur, kappa, zero_band, exp_cap)[0]


def pt_derivative_factor_raw(
    a: float, alpha: float, zero_band: float, exp_cap: float
) -> float:
    """Scalar derivative factor (backend-parity test hook)."""
    from .power_tower import _ptd_core

    return _ptd_core(a, alpha, zero_band, exp_cap)[0]


def eval_law_raw(
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
):
    """Scalar law evaluation ``(u, z2, w_dot, saturated)`` (parity test hook)."""
    return _eval_core(
        law, x1, x2, w, K1, K2, beta, gamma, k_tsm, sur, kappa, zero_band, exp_cap
    )
