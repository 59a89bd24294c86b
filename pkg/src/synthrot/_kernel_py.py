"""Pure-Python fallback for the compiled stepping kernel.

Same call contract as the Cython module; scalar math only so the two
implementations can be diffed line by line. The compiled version is
preferred automatically when it imported cleanly.
"""

import math

_RING_SIGN = (1.0, -1.0, 1.0, -1.0)


def _drive(t, amp, omega_d, t_on, ramp):
    if amp == 0.0 or t < t_on:
        return 0.0
    env = 1.0
    if ramp > 0.0 and t < t_on + ramp:
        env = 0.5 - 0.5 * math.cos(math.pi * (t - t_on) / ramp)
    return amp * env * math.cos(omega_d * t)


def _rhs(t, y, mode, omega_mod, inv_l, inv_c, r, epsilon,
         y_scale, phi_s, phi_d, drive_port, amp, omega_d, t_on, ramp):
    """Derivative of the 8-component state plus the four port outputs.

    State order: mode fluxes, mode flux velocities, port line fluxes.
    Returns a 12-tuple: 8 derivatives then 4 output voltages.
    """
    phi_q = y[0]
    phi_p = y[1]
    p1, p2, p3, p4 = y[4], y[5], y[6], y[7]

    cs = math.cos(omega_mod * t)
    sn = math.sin(omega_mod * t)
    # bridge waveforms: (cos, sin, sin, -cos)
    if mode == 0:
        yb0 = yb1 = yb2 = yb3 = inv_l
        d0 = epsilon * cs * inv_l
        d1 = epsilon * sn * inv_l
        d2 = d1
        d3 = -d0
    else:
        # each bridge: arm+ biased at phi_s - phi_d*s, arm- at phi_s + phi_d*s
        yp = y_scale * abs(math.cos(phi_s - phi_d * cs))
        ym = y_scale * abs(math.cos(phi_s + phi_d * cs))
        yb0 = 0.5 * (yp + ym)
        d0 = 0.5 * (yp - ym)
        yp = y_scale * abs(math.cos(phi_s - phi_d * sn))
        ym = y_scale * abs(math.cos(phi_s + phi_d * sn))
        yb1 = 0.5 * (yp + ym)
        d1 = 0.5 * (yp - ym)
        yb2 = yb1
        d2 = d1
        yp = y_scale * abs(math.cos(phi_s + phi_d * cs))
        ym = y_scale * abs(math.cos(phi_s - phi_d * cs))
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

    return (
        y[2],
        y[3],
        -mq * inv_c,
        -mp * inv_c,
        (vin if drive_port == 0 else 0.0) + v1,
        (vin if drive_port == 1 else 0.0) + v2,
        (vin if drive_port == 2 else 0.0) + v3,
        (vin if drive_port == 3 else 0.0) + v4,
        v1,
        v2,
        v3,
        v4,
    )


def _mean_reluctance_floor(y_scale, phi_s, phi_d):
    """Smallest bridge mean reluctance over a full waveform sweep."""
    floor = math.inf
    n = 2048
    for i in range(n + 1):
        u = -1.0 + 2.0 * i / n
        yb = 0.5 * y_scale * (
            abs(math.cos(phi_s - phi_d * u)) + abs(math.cos(phi_s + phi_d * u))
        )
        if yb < floor:
            floor = yb
    return floor


def rk4_run(y0, t0, dt, n_steps, mode, omega_mod, inv_l, inv_c, r, epsilon,
            y_scale, phi_s, phi_d, drive_port, amp, omega_d, t_on, ramp,
            record, state_out, check_every, abs_limit):
    """Fixed-step RK4 over n_steps, recording port outputs at step starts.

    record gets n_steps + 1 rows (one per step start plus the endpoint);
    state_out likewise when it has rows. Returns (status, n_done) with
    status 0 on success, 1 on a blow-up caught by the periodic amplitude
    check, 2 when the mean reluctance is degenerate at entry. Rows
    [0, n_done] are valid on status 0, rows [0, n_done) on status 1.
    """
    if mode != 0 and _mean_reluctance_floor(y_scale, phi_s, phi_d) <= 1e-12 * y_scale:
        return 2, 0
    if check_every < 1:
        check_every = 1

    args = (mode, omega_mod, inv_l, inv_c, r, epsilon,
            y_scale, phi_s, phi_d, drive_port, amp, omega_d, t_on, ramp)
    keep_state = state_out.shape[0] > 0
    y = list(y0)
    half = 0.5 * dt
    sixth = dt / 6.0

    for n in range(n_steps):
        t = t0 + n * dt
        k1 = _rhs(t, y, *args)
        record[n, 0] = k1[8]
        record[n, 1] = k1[9]
        record[n, 2] = k1[10]
        record[n, 3] = k1[11]
        if keep_state:
            for i in range(8):
                state_out[n, i] = y[i]
        y2 = [y[i] + half * k1[i] for i in range(8)]
        k2 = _rhs(t + half, y2, *args)
        y3 = [y[i] + half * k2[i] for i in range(8)]
        k3 = _rhs(t + half, y3, *args)
        y4 = [y[i] + dt * k3[i] for i in range(8)]
        k4 = _rhs(t + dt, y4, *args)
        for i in range(8):
            y[i] += sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
        if (n + 1) % check_every == 0:
            for i in range(8):
                # NaN fails the comparison too, so it lands in the bad branch
                if not (abs(y[i]) <= abs_limit):
                    return 1, n + 1

    for i in range(8):
        # final check: short runs may never hit the periodic one
        if not (abs(y[i]) <= abs_limit):
            return 1, n_steps

    t_end = t0 + n_steps * dt
    k1 = _rhs(t_end, y, *args)
    record[n_steps, 0] = k1[8]
    record[n_steps, 1] = k1[9]
    record[n_steps, 2] = k1[10]
    record[n_steps, 3] = k1[11]
    if keep_state:
        for i in range(8):
            state_out[n_steps, i] = y[i]
    return 0, n_steps
