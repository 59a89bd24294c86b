"""Time-domain integration of the full modulated network.

Two paths produce the same numbers: a schedule-agnostic reference that
reassembles the reluctance matrix at every evaluation, and a stepping
kernel with the matrix action expanded by hand for the two canonical
schedule families. The kernel is compiled when the extension built;
otherwise a line-for-line Python fallback is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateInductanceError,
    IntegrationUnstableError,
    ValidationError,
)
from .network import ArmSchedule, CircuitParams, assemble_reluctance
from .squid import SquidArrayParams, squid_bridge_schedules

try:
    from . import _kernel as _impl_compiled
except ImportError:
    _impl_compiled = None

from . import _kernel_py as _impl_fallback

HAVE_COMPILED = _impl_compiled is not None

# fixed-step RK4 needs this many samples per drive period to hold phase
MIN_STEPS_PER_PERIOD = 40
STATE_SIZE = 8


@dataclass(frozen=True)
class DriveSpec:
    """Single-port cosine drive, optionally ramped on with a raised cosine."""

    port: int
    amplitude: float
    omega_d: float
    t_on: float = 0.0
    ramp: float = 0.0

    def __post_init__(self):
        if self.port not in (1, 2, 3, 4):
            raise ValidationError("drive port must be 1..4")
        if self.amplitude < 0.0:
            raise ValidationError("drive amplitude must be non-negative")
        if self.omega_d <= 0.0:
            raise ValidationError("drive frequency must be positive")
        if self.t_on < 0.0 or self.ramp < 0.0:
            raise ValidationError("t_on and ramp must be non-negative")

    def waveform(self, t: np.ndarray) -> np.ndarray:
        """Incident voltage at the driven port for an array of times."""
        t = np.asarray(t, dtype=float)
        env = np.where(t >= self.t_on, 1.0, 0.0)
        if self.ramp > 0.0:
            x = (t - self.t_on) / self.ramp
            env = np.where(
                (x >= 0.0) & (x < 1.0), 0.5 - 0.5 * np.cos(np.pi * x), env
            )
        return self.amplitude * env * np.cos(self.omega_d * t)

    def waveform_at(self, t: float) -> float:
        """Scalar version of waveform, for integrator inner loops."""
        if self.amplitude == 0.0 or t < self.t_on:
            return 0.0
        env = 1.0
        if self.ramp > 0.0 and t < self.t_on + self.ramp:
            env = 0.5 - 0.5 * math.cos(math.pi * (t - self.t_on) / self.ramp)
        return self.amplitude * env * math.cos(self.omega_d * t)


@dataclass(frozen=True)
class SimSettings:
    duration: float
    steps_per_period: int = 80
    discard: float = 50e-9
    store_state: bool = False
    check_every: int = 512

    def __post_init__(self):
        if self.duration <= 0.0:
            raise ValidationError("duration must be positive")
        if self.steps_per_period < MIN_STEPS_PER_PERIOD:
            raise ValidationError(
                f"steps_per_period must be at least {MIN_STEPS_PER_PERIOD}"
            )
        if self.discard < 0.0:
            raise ValidationError("discard must be non-negative")
        if self.check_every < 1:
            raise ValidationError("check_every must be a positive step count")


@dataclass(frozen=True)
class SimState:
    """Snapshot of the integrator state at one instant.

    Layout: two mode fluxes, their velocities, four port line fluxes.
    """

    t: float
    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.shape != (STATE_SIZE,):
            raise ValidationError(f"state must have {STATE_SIZE} components")
        object.__setattr__(self, "y", y)

    @property
    def mode_fluxes(self) -> np.ndarray:
        return self.y[0:2]

    @property
    def mode_velocities(self) -> np.ndarray:
        return self.y[2:4]

    @property
    def line_fluxes(self) -> np.ndarray:
        return self.y[4:8]


@dataclass(frozen=True)
class TimeSeries:
    """Sampled run output: port voltages on a uniform grid, state optional."""

    t: np.ndarray
    v_out: np.ndarray
    drive: DriveSpec
    state: Optional[np.ndarray] = None

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.v_out, dtype=float)
        if t.ndim != 1 or v.shape != (t.size, 4):
            raise ValidationError("v_out must be (n, 4) matching t")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v_out", v)
        if self.state is not None:
            s = np.asarray(self.state, dtype=float)
            if s.shape != (t.size, STATE_SIZE):
                raise ValidationError("state must be (n, 8) matching t")
            object.__setattr__(self, "state", s)

    @property
    def dt(self) -> float:
        if self.t.size < 2:
            raise ValidationError("need at least two samples for a step size")
        return float(self.t[1] - self.t[0])

    @property
    def n_samples(self) -> int:
        return int(self.t.size)

    def input_waveform(self) -> np.ndarray:
        return self.drive.waveform(self.t)

    def trim(self, discard: float) -> "TimeSeries":
        """Drop the first `discard` seconds (transient removal)."""
        if discard <= 0.0:
            return self
        keep = self.t >= self.t[0] + discard
        if not np.any(keep):
            raise ValidationError("discard removed every sample")
        return TimeSeries(
            t=self.t[keep],
            v_out=self.v_out[keep],
            drive=self.drive,
            state=None if self.state is None else self.state[keep],
        )

    def final_state(self) -> SimState:
        if self.state is None:
            raise ValidationError("run was made without store_state")
        return SimState(t=float(self.t[-1]), y=self.state[-1])


class OdeSystem:
    """State derivative and port outputs for one circuit and drive.

    The reference path: the reluctance matrix is reassembled from the
    arm schedules at every evaluation, so any schedule works here.
    """

    def __init__(self, params: CircuitParams,
                 schedules: Sequence[ArmSchedule], drive: DriveSpec):
        if len(schedules) != 4:
            raise ValidationError("need one arm schedule per bridge")
        self.params = params
        self.schedules = tuple(schedules)
        self.drive = drive

    def _matrix_action(self, t: float, y: np.ndarray) -> np.ndarray:
        m = assemble_reluctance(t, self.schedules, self.params.l).entries
        vec = np.empty(6)
        vec[0:2] = y[0:2]
        vec[2:6] = y[4:8]
        return m @ vec

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        mv = self._matrix_action(t, y)
        dy = np.empty(STATE_SIZE)
        dy[0:2] = y[2:4]
        dy[2:4] = -mv[0:2] / self.params.c
        dy[4:8] = -self.params.r * mv[2:6]
        dy[3 + self.drive.port] += 2.0 * self.drive.waveform_at(t)
        return dy

    def port_outputs(self, t: float, y: np.ndarray) -> np.ndarray:
        mv = self._matrix_action(t, y)
        out = -self.params.r * mv[2:6]
        out[self.drive.port - 1] += self.drive.waveform_at(t)
        return out


def assemble_ode(params: CircuitParams, schedules: Sequence[ArmSchedule],
                 drive: DriveSpec) -> OdeSystem:
    """Bundle circuit, schedules, and drive into an integrable system."""
    return OdeSystem(params, schedules, drive)


def _step_grid(t_span, omega_d: float, steps_per_period: int):
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t1 <= t0:
        raise ValidationError("time span must have positive length")
    dt = (2.0 * math.pi / omega_d) / steps_per_period
    n_steps = max(1, int(math.ceil((t1 - t0) / dt - 1e-9)))
    return t0, dt, n_steps


def _blowup_limit(amplitude: float, y0: np.ndarray) -> float:
    scale = max(abs(amplitude), float(np.max(np.abs(y0))), 1e-12)
    return 1e8 * scale


def integrate(system: OdeSystem, t_span, settings: SimSettings,
              y0: Optional[np.ndarray] = None) -> TimeSeries:
    """Fixed-step RK4 over t_span using the schedule-agnostic reference path.

    Slow but general; simulate() is the fast equivalent for the two
    canonical schedule families. Raises IntegrationUnstableError when
    the state runs away (too few steps per period, or a genuinely
    unstable operating point).
    """
    if settings.steps_per_period < MIN_STEPS_PER_PERIOD:
        raise ValidationError(
            f"steps_per_period must be at least {MIN_STEPS_PER_PERIOD}"
        )
    t0, dt, n_steps = _step_grid(t_span, system.drive.omega_d,
                                 settings.steps_per_period)
    y = np.zeros(STATE_SIZE) if y0 is None else np.array(y0, dtype=float)
    if y.shape != (STATE_SIZE,):
        raise ValidationError(f"initial state must have {STATE_SIZE} components")
    limit = _blowup_limit(system.drive.amplitude, y)

    t_grid = t0 + dt * np.arange(n_steps + 1)
    v_out = np.empty((n_steps + 1, 4))
    state = np.empty((n_steps + 1, STATE_SIZE)) if settings.store_state else None

    for n in range(n_steps):
        t = t0 + n * dt
        v_out[n] = system.port_outputs(t, y)
        if state is not None:
            state[n] = y
        k1 = system.rhs(t, y)
        k2 = system.rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = system.rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = system.rhs(t + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if (n + 1) % settings.check_every == 0:
            if not np.all(np.abs(y) <= limit):
                raise IntegrationUnstableError(
                    f"state blew up near t = {t + dt:.3e} s; "
                    "increase steps_per_period"
                )
    if not np.all(np.abs(y) <= limit):
        # final check: short runs may never hit the periodic one
        raise IntegrationUnstableError(
            "state blew up before the end of the run; increase steps_per_period"
        )
    v_out[n_steps] = system.port_outputs(t0 + n_steps * dt, y)
    if state is not None:
        state[n_steps] = y
    return TimeSeries(t=t_grid, v_out=v_out, drive=system.drive, state=state)


def simulate(params: CircuitParams, drive: DriveSpec, settings: SimSettings,
             squid: Optional[SquidArrayParams] = None,
             y0: Optional[np.ndarray] = None,
             use_compiled: Optional[bool] = None) -> TimeSeries:
    """Run the stepping kernel for an ideal or SQUID-bridge modulation.

    squid=None runs the ideal schedules at the depth in params; passing
    array parameters switches every bridge to flux-biased arm pairs with
    the canonical phase pattern. use_compiled forces a kernel choice
    (None picks the compiled one when available).
    """
    if use_compiled is None:
        impl = _impl_compiled if HAVE_COMPILED else _impl_fallback
    elif use_compiled:
        if not HAVE_COMPILED:
            raise ValidationError("compiled kernel requested but not built")
        impl = _impl_compiled
    else:
        impl = _impl_fallback

    t0, dt, n_steps = _step_grid((0.0, settings.duration), drive.omega_d,
                                 settings.steps_per_period)
    y = np.zeros(STATE_SIZE) if y0 is None else np.array(y0, dtype=float)
    if y.shape != (STATE_SIZE,):
        raise ValidationError(f"initial state must have {STATE_SIZE} components")

    if squid is None:
        mode = 0
        y_scale = phi_s = phi_d = 0.0
    else:
        # fail early with the schedule-level diagnostics before stepping
        squid_bridge_schedules(squid, params.omega_mod)
        mode = 1
        y_scale = 2.0 * squid.i0 / (squid.n * squid.phi0)
        phi_s = squid.phi_sigma / (2.0 * squid.phi0)
        phi_d = squid.phi_delta / (2.0 * squid.phi0)

    record = np.empty((n_steps + 1, 4))
    state_out = (np.empty((n_steps + 1, STATE_SIZE)) if settings.store_state
                 else np.empty((0, STATE_SIZE)))
    limit = _blowup_limit(drive.amplitude, y)

    status, n_done = impl.rk4_run(
        np.ascontiguousarray(y), t0, dt, n_steps, mode, params.omega_mod,
        1.0 / params.l, 1.0 / params.c, params.r, params.epsilon,
        y_scale, phi_s, phi_d, drive.port - 1, drive.amplitude,
        drive.omega_d, drive.t_on, drive.ramp,
        record, state_out, settings.check_every, limit,
    )
    if status == 2:
        raise DegenerateInductanceError(
            "bridge mean reluctance collapses somewhere in the modulation cycle"
        )
    if status == 1:
        raise IntegrationUnstableError(
            f"state blew up near t = {t0 + n_done * dt:.3e} s; "
            "increase steps_per_period"
        )
    return TimeSeries(
        t=t0 + dt * np.arange(n_steps + 1),
        v_out=record,
        drive=drive,
        state=state_out if settings.store_state else None,
    )


def steady_state_demod(series: TimeSeries, omega: Optional[float] = None,
                       min_periods: float = 20.0) -> np.ndarray:
    """Complex port amplitudes at one frequency, referred to the input.

    Least-squares fit of each output onto {cos, sin, const} over the
    whole series; pass an already trimmed series. The returned entries
    are out/in ratios, so the driven port's entry is its reflection.
    Convention: a fit a*cos + b*sin maps to the phasor a - jb, matching
    the frequency-domain solver's sign of j.
    """
    omega_v = series.drive.omega_d if omega is None else float(omega)
    if omega_v <= 0.0:
        raise ValidationError("demodulation frequency must be positive")
    span = float(series.t[-1] - series.t[0])
    periods = span * omega_v / (2.0 * math.pi)
    if periods < min_periods:
        raise ValidationError(
            f"series spans {periods:.1f} periods; need {min_periods:g} "
            "for a stable fit"
        )
    basis = np.column_stack([
        np.cos(omega_v * series.t),
        np.sin(omega_v * series.t),
        np.ones(series.n_samples),
    ])
    coef_out, *_ = np.linalg.lstsq(basis, series.v_out, rcond=None)
    coef_in, *_ = np.linalg.lstsq(basis, series.input_waveform(), rcond=None)
    a_in = coef_in[0] - 1j * coef_in[1]
    if abs(a_in) == 0.0:
        raise ValidationError("drive waveform fit vanished; nothing to refer to")
    return (coef_out[0] - 1j * coef_out[1]) / a_in


def cycle_drive(drive: DriveSpec, shift: int) -> DriveSpec:
    """Same drive moved around the ring by `shift` ports."""
    return replace(drive, port=(drive.port - 1 + shift) % 4 + 1)
