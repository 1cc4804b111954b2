# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernel.

Mirror of the pure-Python kernel (see ``_pykernel``): same expressions,
same evaluation order, same libm calls, so both backends produce
bit-identical trajectories.  Built without -ffast-math on purpose —
strict IEEE semantics are part of the backend-parity contract.
"""

from libc.math cimport exp, fabs, isfinite, log, pow, sin, tanh, NAN

NAME = "compiled"

N_COLUMNS = 10


cdef inline double _sign(double a, int sur, double kappa) nogil:
    if sur == 1:
        return tanh(kappa * a)
    if a > 0.0:
        return 1.0
    if a < 0.0:
        return -1.0
    return 0.0


cdef inline double _pt(double a, double alpha, int sur, double kappa,
                       double zero_band, double exp_cap, bint *sat) nogil:
    cdef double s = _sign(a, sur, kappa)
    cdef double aa = fabs(a)
    cdef double arg
    if aa < zero_band:
        return s
    arg = pow(aa, alpha) * log(aa)
    if arg > exp_cap:
        sat[0] = True
        return exp(exp_cap) * s
    return exp(arg) * s


cdef inline double _ptd(double a, double alpha, double zero_band,
                        double exp_cap, bint *sat) nogil:
    cdef double aa = fabs(a)
    cdef double la, arg
    if aa < zero_band:
        if alpha > 1.0:
            return 0.0
        return NAN
    la = log(aa)
    arg = (pow(aa, alpha) + alpha - 1.0) * la
    if arg > exp_cap:
        arg = exp_cap
        sat[0] = True
    return exp(arg) * (1.0 + alpha * la)


cdef inline double _eval(int law, double x1, double x2, double w,
                         double K1, double K2, double beta, double gamma,
                         double k_tsm, int sur, double kappa,
                         double zero_band, double exp_cap,
                         double *z2_out, double *w_dot_out, bint *sat) nogil:
    cdef double ptx1, ptd1, pts, ptz, s_val, z2, common
    ptx1 = _pt(x1, beta, sur, kappa, zero_band, exp_cap, sat)
    if law == 3:  # terminal sliding mode
        s_val = x2 + k_tsm * ptx1
        ptd1 = _ptd(x1, beta, zero_band, exp_cap, sat)
        pts = _pt(s_val, gamma, sur, kappa, zero_band, exp_cap, sat)
        z2_out[0] = s_val
        w_dot_out[0] = 0.0
        return -pts - k_tsm * ptd1 * x2

    z2 = x2 + K1 * ptx1
    ptd1 = _ptd(x1, beta, zero_band, exp_cap, sat)
    common = -x1 - K1 * ptd1 * (-K1 * ptx1 + z2)
    z2_out[0] = z2
    if law == 0:  # nominal backstepping
        ptz = _pt(z2, gamma, sur, kappa, zero_band, exp_cap, sat)
        w_dot_out[0] = 0.0
        return -K2 * ptz + common
    if law == 1:  # robust sign feedback
        w_dot_out[0] = 0.0
        return -K2 * _sign(z2, sur, kappa) + common
    # integral action
    ptz = _pt(z2, gamma, sur, kappa, zero_band, exp_cap, sat)
    w_dot_out[0] = -z2
    return w - K2 * ptz + common


def run_loop(double[:, ::1] rec,
             int law,
             double K1, double K2, double beta, double gamma, double k_tsm,
             int sur, double kappa, double zero_band, double exp_cap,
             int dist_kind, double d0, double d1, double d2,
             double[::1] dtimes, double[::1] dvalues,
             double x1, double x2, double w,
             double dt, Py_ssize_t n_steps, Py_ssize_t stride):
    """Forward-Euler closed loop; see ``_pykernel.run_loop`` for the contract."""
    cdef Py_ssize_t k = 0, nrec = 0, sat_events = 0
    cdef Py_ssize_t tab_idx = 0, tab_last = dtimes.shape[0] - 2
    cdef double t, d, u, z2, w_dot, v1, v2, dw, t_lo
    cdef double x1_next, x2_next, w_next
    cdef bint sat

    while True:
        t = k * dt

        if dist_kind == 0:
            d = 0.0
        elif dist_kind == 1:
            d = d0
        elif dist_kind == 2:
            d = d0 * sin(d1 * t + d2)
        else:
            while tab_idx < tab_last and t >= dtimes[tab_idx + 1]:
                tab_idx += 1
            t_lo = dtimes[tab_idx]
            d = dvalues[tab_idx] + (dvalues[tab_idx + 1] - dvalues[tab_idx]) * (
                (t - t_lo) / (dtimes[tab_idx + 1] - t_lo)
            )

        sat = False
        u = _eval(law, x1, x2, w, K1, K2, beta, gamma, k_tsm, sur, kappa,
                  zero_band, exp_cap, &z2, &w_dot, &sat)
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


def pt_value_raw(double a, double alpha, int sur, double kappa,
                 double zero_band, double exp_cap):
    """Scalar power-tower value (backend-parity test hook)."""
    cdef bint sat = False
    return _pt(a, alpha, sur, kappa, zero_band, exp_cap, &sat)


def pt_derivative_factor_raw(double a, double alpha, double zero_band,
                             double exp_cap):
    """Scalar derivative factor (backend-parity test hook)."""
    cdef bint sat = False
    return _ptd(a, alpha, zero_band, exp_cap, &sat)


def eval_law_raw(int law, double x1, double x2, double w,
                 double K1, double K2, double beta, double gamma, double k_tsm,
                 int sur, double kappa, double zero_band, double exp_cap):
    """Scalar law evaluation ``(u, z2, w_dot, saturated)`` (parity test hook)."""
    cdef double z2 = 0.0, w_dot = 0.0
    cdef bint sat = False
    cdef double u = _eval(law, x1, x2, w, K1, K2, beta, gamma, k_tsm,
                          sur, kappa, zero_band, exp_cap, &z2, &w_dot, &sat)
    return u, z2, w_dot, bool(sat)
