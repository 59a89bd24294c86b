# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled stepping kernel; the call contract matches _kernel_py."""

from libc.math cimport cos, sin, fabs, M_PI

import numpy as np


cdef inline double _drive(double t, double amp, double omega_d,
                          double t_on, double ramp) noexcept nogil:
    cdef double env
    if amp == 0.0 or t < t_on:
        return 0.0
    env = 1.0
    if ramp > 0.0 and t < t_on + ramp:
        env = 0.5 - 0.5 * cos(M_PI * (t - t_on) / ramp)
    return amp * env * cos(omega_d * t)


cdef inline void _rhs(double t, double* y, double* out,
                      int mode, double omega_mod, double inv_l, double inv_c,
                      double r, double epsilon, double y_scale, double phi_s,
                      double phi_d, int drive_port, double amp, double omega_d,
                      double t_on, double ramp) noexcept nogil:
    cdef double phi_q = y[0]
    cdef double phi_p = y[1]
    cdef double p1 = y[4], p2 = y[5], p3 = y[6], p4 = y[7]
    cdef double cs, sn, yb0, yb1, yb2, yb3, d0, d1, d2, d3, yp, ym
    cdef double d13, d24, ring, mq, mp, x13, x24, m1, m2, m3, m4
    cdef double vin, v1, v2, v3, v4

    cs = cos(omega_mod * t)
    sn = sin(omega_mod * t)
    if mode == 0:
        yb0 = yb1 = yb2 = yb3 = inv_l
        d0 = epsilon * cs * inv_l
        d1 = epsilon * sn * inv_l
        d2 = d1
        d3 = -d0
    else:
        yp = y_scale * fabs(cos(phi_s - phi_d * cs))
        ym = y_scale * fabs(cos(phi_s + phi_d * cs))
        yb0 = 0.5 * (yp + ym)
        d0 = 0.5 * (yp - ym)
        yp = y_scale * fabs(cos(phi_s - phi_d * sn))
        ym = y_scale * fabs(cos(phi_s + phi_d * sn))
        yb1 = 0.5 * (yp + ym)
        d1 = 0.5 * (yp - ym)
        yb2 = yb1
        d2 = d1
        yp = y_scale * fabs(cos(phi_s + phi_d * cs))
        ym = y_scale * fabs(cos(phi_s - phi_d * cs))
        yb3 = 0.5 * (yp + ym)
        d3 = 0.5 * (yp - ym)

    d13 = p1 - p3
    d24 = p2 - p4
    ring = (p1 - p2 + p3 - p4) * inv_l

    mq = (yb0 + yb1) * phi_q + d0 * d13 + d1 * d24
    mp = (yb2 + yb3) * phi_p + d2 * d13 + d3 * d24
    x13 = d0 * phi_q + d2 * phi_p + (yb0 + yb2) * d13
    x24 = d1 * phi_q + d3 * phi_p + (yb1 + yb3) * d24
    m1 = x13 + ring
    m2 = x24 - ring
    m3 = -x13 + ring
    m4 = -x24 - ring

    vin = _drive(t, amp, omega_d, t_on, ramp)
    v1 = (vin if drive_port == 0 else 0.0) - r * m1
    v2 = (vin if drive_port == 1 else 0.0) - r * m2
    v3 = (vin if drive_port == 2 else 0.0) - r * m3
    v4 = (vin if drive_port == 3 else 0.0) - r * m4

    out[0] = y[2]
    out[1] = y[3]
    out[2] = -mq * inv_c
    out[3] = -mp * inv_c
    out[4] = (vin if drive_port == 0 else 0.0) + v1
    out[5] = (vin if drive_port == 1 else 0.0) + v2
    out[6] = (vin if drive_port == 2 else 0.0) + v3
    out[7] = (vin if drive_port == 3 else 0.0) + v4
    out[8] = v1
    out[9] = v2
    out[10] = v3
    out[11] = v4


cdef double _mean_reluctance_floor(double y_scale, double phi_s,
                                   double phi_d) noexcept nogil:
    cdef double floor_val = 1e300
    cdef double u, yb
    cdef int i, n = 2048
    for i in range(n + 1):
        u = -1.0 + 2.0 * i / n
        yb = 0.5 * y_scale * (fabs(cos(phi_s - phi_d * u))
                              + fabs(cos(phi_s + phi_d * u)))
        if yb < floor_val:
            floor_val = yb
    return floor_val


def rk4_run(y0, double t0, double dt, long n_steps, int mode,
            double omega_mod, double inv_l, double inv_c, double r,
            double epsilon, double y_scale, double phi_s, double phi_d,
            int drive_port, double amp, double omega_d, double t_on,
            double ramp, double[:, ::1] record, double[:, ::1] state_out,
            long check_every, double abs_limit):
    """Fixed-step RK4 over n_steps; see the fallback module for the contract."""
    cdef double y[8]
    cdef double y2[8]
    cdef double k1[12]
    cdef double k2[12]
    cdef double k3[12]
    cdef double k4[12]
    cdef double t, half, sixth
    cdef long n
    cdef int i, keep_state, bad
    cdef double[::1] y0_view = np.ascontiguousarray(y0, dtype=np.float64)

    if mode != 0 and _mean_reluctance_floor(y_scale, phi_s, phi_d) <= 1e-12 * y_scale:
        return 2, 0
    if check_every < 1:
        check_every = 1

    for i in range(8):
        y[i] = y0_view[i]
    keep_state = 1 if state_out.shape[0] > 0 else 0
    half = 0.5 * dt
    sixth = dt / 6.0

    with nogil:
        for n in range(n_steps):
            t = t0 + n * dt
            _rhs(t, y, k1, mode, omega_mod, inv_l, inv_c, r, epsilon,
                 y_scale, phi_s, phi_d, drive_port, amp, omega_d, t_on, ramp)
            record[n, 0] = k1[8]
            record[n, 1] = k1[9]
            record[n, 2] = k1[10]
            record[n, 3] = k1[11]
            if keep_state:
                for i in range(8):
                    state_out[n, i] = y[i]
            for i in range(8):
                y2[i] = y[i] + half * k1[i]
            _rhs(t + half, y2, k2, mode, omega_mod, inv_l, inv_c, r, epsilon,
                 y_scale, phi_s, phi_d, drive_port, amp, omega_d, t_on, ramp)
            for i in range(8):
                y2[i] = y[i] + half * k2[i]
            _rhs(t + half, y2, k3, mode, omega_mod, inv_l, inv_c, r, epsilon,
                 y_scale, phi_s, phi_d, drive_port, amp, omega_d, t_on, ramp)
            for i in range(8):
                y2[i] = y[i] + dt * k3[i]
            _rhs(t + dt, y2, k4, mode, omega_mod, inv_l, inv_c, r, epsilon,
                 y_scale, phi_s, phi_d, drive_port, amp, omega_d, t_on, ramp)
            for i in range(8):
                y[i] += sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
            if (n + 1) % check_every == 0:
                bad = 0
                for i in range(8):
                    if not (fabs(y[i]) <= abs_limit):
                        bad = 1
                if bad:
                    with gil:
                        return 1, n + 1

        for i in range(8):
            # final check: short runs may never hit the periodic one
            if not (fabs(y[i]) <= abs_limit):
                with gil:
                    return 1, n_steps

        t = t0 + n_steps * dt
        _rhs(t, y, k1, mode, omega_mod, inv_l, inv_c, r, epsilon,
             y_scale, phi_s, phi_d, drive_port, amp, omega_d, t_on, ramp)
        record[n_steps, 0] = k1[8]
        record[n_steps, 1] = k1[9]
        record[n_steps, 2] = k1[10]
        record[n_steps, 3] = k1[11]
        if keep_state:
            for i in range(8):
                state_out[n_steps, i] = y[i]
    return 0, n_steps
