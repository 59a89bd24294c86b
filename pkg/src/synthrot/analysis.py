"""Spectral and response analysis of simulation output.

Periodograms with exact power bookkeeping, sideband extraction around a
carrier, half-maximum widths of swept responses, and a small derivative
free tuner for the modulation working point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize

from .errors import SpectrumError, SynthrotError, ValidationError
from .freqdomain import exact_scattering
from .network import CircuitParams
from .squid import (
    SquidArrayParams,
    average_mean_reluctance,
    effective_modulation_depth,
    squid_bridge_schedules,
)
from .timedomain import DriveSpec, SimSettings, TimeSeries, simulate, steady_state_demod

# sideband peaks are searched within omega_mod / PEAK_SEARCH_DIV of nominal
PEAK_SEARCH_DIV = 10.0
# the grid must put at least this many bins between adjacent sideband orders
RESOLUTION_BINS = 8.0


@dataclass(frozen=True)
class Spectrum:
    """One-sided periodogram; power sums to the windowed sample power."""

    freq_hz: np.ndarray
    power: np.ndarray
    df: float
    window: str

    def __post_init__(self):
        f = np.asarray(self.freq_hz, dtype=float)
        p = np.asarray(self.power, dtype=float)
        if f.ndim != 1 or p.shape != f.shape:
            raise ValidationError("freq_hz and power must be matching 1-d arrays")
        object.__setattr__(self, "freq_hz", f)
        object.__setattr__(self, "power", p)

    def db(self) -> np.ndarray:
        """Power relative to the strongest bin, in dB, floored at -300."""
        peak = float(np.max(self.power))
        if peak <= 0.0:
            raise SpectrumError("spectrum has no power")
        return 10.0 * np.log10(np.maximum(self.power, peak * 1e-30) / peak)


def power_spectrum(t: np.ndarray, x: np.ndarray, window: str = "hann") -> Spectrum:
    """One-sided periodogram of a uniformly sampled record.

    Normalization: sum(power) equals sum of the squared windowed samples
    exactly, so ratios between bins are window-consistent. hann is the
    default for sideband work; rect keeps bin-centered tones leak-free.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    n = t.size
    if n < 16 or x.shape != t.shape:
        raise ValidationError("need matching 1-d arrays with at least 16 samples")
    steps = np.diff(t)
    dt = float(steps[0])
    if dt <= 0.0 or np.max(np.abs(steps - dt)) > 1e-6 * dt:
        raise ValidationError("samples must sit on a uniform time grid")
    if window == "hann":
        w = np.hanning(n)
    elif window == "rect":
        w = np.ones(n)
    else:
        raise ValidationError(f"unknown window {window!r}")
    xf = np.fft.rfft(w * x)
    power = np.abs(xf) ** 2 / n
    power[1:] *= 2.0
    if n % 2 == 0:
        power[-1] /= 2.0  # the fold point appears once in the full spectrum
    freq_hz = np.fft.rfftfreq(n, d=dt)
    return Spectrum(freq_hz=freq_hz, power=power, df=1.0 / (n * dt), window=window)


@dataclass(frozen=True)
class SidebandEntry:
    port: int
    order: int
    freq_hz: float
    power: float
    dbc: float


@dataclass(frozen=True)
class SidebandTable:
    """Measured line powers at carrier +/- integer modulation multiples.

    dbc values are relative to the carrier measured at carrier_port, so
    the (carrier_port, 0) row reads 0 by construction.
    """

    entries: tuple
    carrier_port: int
    carrier_freq_hz: float
    carrier_power: float
    df: float

    def for_port(self, port: int) -> tuple:
        return tuple(e for e in self.entries if e.port == port)

    def dbc_of(self, port: int, order: int) -> float:
        for e in self.entries:
            if e.port == port and e.order == order:
                return e.dbc
        raise ValidationError(f"no entry for port {port}, order {order}")

    def sidebands(self) -> tuple:
        return tuple(e for e in self.entries if e.order != 0)

    def strongest_sideband(self) -> SidebandEntry:
        bands = self.sidebands()
        if not bands:
            raise SpectrumError("table holds no nonzero-order entries")
        return max(bands, key=lambda e: e.power)


def _local_peak(spec: Spectrum, f_target: float, f_halfwidth: float):
    lo = np.searchsorted(spec.freq_hz, f_target - f_halfwidth)
    hi = np.searchsorted(spec.freq_hz, f_target + f_halfwidth, side="right")
    if hi <= lo:
        return None
    i = lo + int(np.argmax(spec.power[lo:hi]))
    return float(spec.freq_hz[i]), float(spec.power[i])


def sideband_table(series: TimeSeries, omega_mod: float, max_order: int = 5,
                   ports: Sequence[int] = (1, 2, 3, 4), carrier_port: int = 2,
                   window: str = "hann") -> SidebandTable:
    """Line powers at drive +/- n*modulation for each port, referred to one carrier.

    Pass an already trimmed series. Each line is taken as the strongest
    bin within a tenth of the modulation spacing around its nominal
    place, which tolerates the sub-bin offsets of finite records.
    """
    if omega_mod <= 0.0:
        raise ValidationError("omega_mod must be positive")
    if max_order < 1:
        raise ValidationError("max_order must be at least 1")
    if carrier_port not in ports:
        raise ValidationError("carrier_port must be among the analyzed ports")
    f_mod = omega_mod / (2.0 * math.pi)
    f_carrier = series.drive.omega_d / (2.0 * math.pi)
    specs = {
        p: power_spectrum(series.t, series.v_out[:, p - 1], window=window)
        for p in ports
    }
    df = specs[carrier_port].df
    if df > f_mod / RESOLUTION_BINS:
        need = RESOLUTION_BINS / f_mod
        raise SpectrumError(
            f"grid spacing {df:.3e} Hz cannot separate sidebands {f_mod:.3e} Hz "
            f"apart; record at least {need:.3e} s after the discard"
        )
    half = f_mod / PEAK_SEARCH_DIV
    carrier = _local_peak(specs[carrier_port], f_carrier, half)
    if carrier is None or carrier[1] <= 0.0:
        raise SpectrumError("no carrier line found at the drive frequency")
    c_freq, c_power = carrier
    nyquist = float(specs[carrier_port].freq_hz[-1])
    entries = []
    for p in ports:
        for order in range(-max_order, max_order + 1):
            f_nom = f_carrier + order * f_mod
            if f_nom - half < 0.0 or f_nom + half > nyquist:
                continue
            found = _local_peak(specs[p], f_nom, half)
            if found is None:
                continue
            freq, power = found
            dbc = 10.0 * math.log10(max(power, c_power * 1e-30) / c_power)
            entries.append(SidebandEntry(p, order, freq, power, dbc))
    return SidebandTable(
        entries=tuple(entries),
        carrier_port=carrier_port,
        carrier_freq_hz=c_freq,
        carrier_power=c_power,
        df=df,
    )


def fwhm(x: np.ndarray, y: np.ndarray) -> float:
    """Full width of a sampled single-peak curve at half its maximum.

    Crossings are linearly interpolated between samples. Raises when the
    peak sits on the boundary or either crossing lies outside the grid.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.shape != x.shape or x.size < 5:
        raise ValidationError("need matching 1-d arrays with at least 5 samples")
    if np.any(np.diff(x) <= 0.0):
        raise ValidationError("x must be strictly increasing")
    i = int(np.argmax(y))
    if i == 0 or i == x.size - 1:
        raise SpectrumError("peak sits on the grid boundary; widen the span")
    half = y[i] / 2.0

    def cross(j0, j1, step):
        j = j0
        while j != j1 and y[j] >= half:
            j += step
        if y[j] >= half:
            raise SpectrumError("no half-maximum crossing inside the grid")
        frac = (half - y[j]) / (y[j - step] - y[j])
        return x[j] + frac * (x[j - step] - x[j])

    left = cross(i - 1, 0, -1)
    right = cross(i + 1, x.size - 1, 1)
    return float(right - left)


def transmission_fwhm(freq_hz: np.ndarray, s: np.ndarray,
                      element: tuple = (2, 1)) -> float:
    """fwhm of |S_element|^2 over a swept scattering stack (n, 4, 4)."""
    i, j = element
    curve = np.abs(s[:, i - 1, j - 1]) ** 2
    return fwhm(freq_hz, curve)


@dataclass(frozen=True)
class TunedModulation:
    """Result of the working-point search; converged=False means the
    evaluation budget ran out and the values are best-so-far."""

    omega_mod: float
    omega_d: float
    phi_delta: Optional[float]
    objective: float
    converged: bool
    n_evals: int


_PENALTY = 1e6


def _carrier_quality(col: np.ndarray, drive_port: int = 1) -> float:
    """Scalar figure of demerit for one response column: reflection plus
    backward leakage plus missing forward power, all in linear power."""
    j = drive_port - 1
    fwd = (j + 1) % 4
    back = (j - 1) % 4
    return float(
        np.abs(col[j]) ** 2 + np.abs(col[back]) ** 2 + (1.0 - np.abs(col[fwd]) ** 2)
    )


def _ideal_objective(params: CircuitParams) -> Callable[[np.ndarray], float]:
    def cost(x: np.ndarray) -> float:
        omega_mod, omega_d = float(x[0]), float(x[1])
        if omega_mod <= 0.0 or omega_d <= 0.0:
            return _PENALTY
        try:
            s = exact_scattering(omega_d, replace(params, omega_mod=omega_mod))
        except SynthrotError:
            return _PENALTY
        return _carrier_quality(s.s[:, 0])

    return cost


def _squid_resonance_estimate(params: CircuitParams,
                              squid: SquidArrayParams) -> float:
    """Drive-frequency start for the flux-tuned search.

    The biased arms present less mean reluctance than the ideal bridges,
    which pulls the resonance below the bare-circuit value; starting a
    local search at the bare value would strand it a few percent off.
    """
    ybar = average_mean_reluctance(squid)
    eps_eff = effective_modulation_depth(squid)
    shifted = (4.0 * params.l * ybar - eps_eff**2) / (2.0 * params.l * params.c)
    if shifted <= 0.0:
        return params.omega0
    return math.sqrt(shifted)


def _squid_objective(params: CircuitParams, squid: SquidArrayParams,
                     amplitude: float) -> Callable[[np.ndarray], float]:
    def cost(x: np.ndarray) -> float:
        phi_delta, omega_mod, omega_d = (float(v) for v in x)
        if phi_delta <= 0.0 or omega_mod <= 0.0 or omega_d <= 0.0:
            return _PENALTY
        sq = replace(squid, phi_delta=phi_delta)
        p = replace(params, omega_mod=omega_mod)
        try:
            squid_bridge_schedules(sq, omega_mod)  # pole check up front
            # near a matched working point kappa is about twice omega_mod,
            # so two modulation periods bury the turn-on transient
            drive = DriveSpec(port=1, amplitude=amplitude, omega_d=omega_d)
            t_drive = 2.0 * math.pi / omega_d
            t_mod = 2.0 * math.pi / omega_mod
            discard = 2.0 * t_mod
            span = max(30.0 * t_drive, 4.0 * t_mod)
            settings = SimSettings(duration=discard + span, discard=discard,
                                   steps_per_period=60)
            series = simulate(p, drive, settings, squid=sq)
            amps = steady_state_demod(series.trim(discard))
        except SynthrotError:
            return _PENALTY
        return _carrier_quality(amps, drive_port=1)

    return cost


def optimize_modulation(params: CircuitParams,
                        squid: Optional[SquidArrayParams] = None,
                        budget: int = 200,
                        amplitude: float = 1e-6) -> TunedModulation:
    """Tune the modulation working point with a Nelder-Mead search.

    Ideal mode (squid=None) tunes (modulation rate, drive frequency)
    against the exact frequency-domain response. SQUID mode adds the
    modulation flux amplitude and scores short time-domain runs, so it
    costs real simulation time per evaluation. Starting values come from
    params (and squid.phi_delta); the search is local by design.
    """
    if budget < 10:
        raise ValidationError("budget must allow at least 10 evaluations")
    omega_mod0 = params.omega_mod if params.omega_mod > 0.0 else params.omega_crit
    omega_d0 = params.omega0
    if squid is None:
        x0 = np.array([omega_mod0, omega_d0])
        cost = _ideal_objective(params)
        spread = np.array([0.10 * omega_mod0, 0.002 * omega_d0])
    else:
        if squid.phi_delta <= 0.0:
            raise ValidationError("squid search needs a positive phi_delta start")
        omega_d0 = _squid_resonance_estimate(params, squid)
        x0 = np.array([squid.phi_delta, omega_mod0, omega_d0])
        cost = _squid_objective(params, squid, amplitude)
        spread = np.array([0.10 * squid.phi_delta, 0.10 * omega_mod0,
                           0.002 * omega_d0])

    simplex = np.vstack([x0] + [x0 + np.eye(x0.size)[i] * spread[i]
                                for i in range(x0.size)])
    result = optimize.minimize(
        cost, x0, method="Nelder-Mead",
        options={
            "maxfev": budget,
            "initial_simplex": simplex,
            "xatol": float(np.min(spread)) * 1e-3,
            "fatol": 1e-8,
        },
    )
    x = result.x
    if squid is None:
        return TunedModulation(
            omega_mod=float(x[0]), omega_d=float(x[1]), phi_delta=None,
            objective=float(result.fun), converged=bool(result.success),
            n_evals=int(result.nfev),
        )
    return TunedModulation(
        omega_mod=float(x[1]), omega_d=float(x[2]), phi_delta=float(x[0]),
        objective=float(result.fun), converged=bool(result.success),
        n_evals=int(result.nfev),
    )
