"""Built-in acceptance suite: nine numbered checks with pinned tolerances.

Each criterion measures through the public API only; run_all returns a
structured result per criterion so the CLI can print one line each and
emit a machine-readable report. kappa_scale is a self-test hook: values
other than 1 deliberately detune the bandwidth model construction so the
suite can demonstrate it catches a 10% rate error.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from . import analysis, freqdomain, iomodel, network, squid, timedomain
from .errors import ValidationError

TWO_PI = 2.0 * math.pi

# circuit with full modulation depth; resolves the matched rotation point
FULL_DEPTH = dict(l=0.5e-9, c=2e-12, r=50.0, epsilon=1.0)
# circuit with depth 1/sqrt(2); same decay rate, taller reflection floor
HALF_POWER = dict(l=1e-9, c=1e-12, r=50.0, epsilon=1.0 / math.sqrt(2.0))


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    measured: Dict[str, float]
    tolerance: str
    runtime_s: float

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"criterion {self.index} [{self.name}]: {verdict} ({self.tolerance})"


def _full_depth_params(omega_mod: Optional[float] = None) -> network.CircuitParams:
    p = network.CircuitParams(omega_mod=0.0, **FULL_DEPTH)
    return network.CircuitParams(
        omega_mod=p.omega_crit if omega_mod is None else omega_mod, **FULL_DEPTH
    )


def _half_power_params(omega_mod: Optional[float] = None) -> network.CircuitParams:
    p = network.CircuitParams(omega_mod=0.0, **HALF_POWER)
    return network.CircuitParams(
        omega_mod=p.omega_crit if omega_mod is None else omega_mod, **HALF_POWER
    )


def criterion_1() -> CriterionResult:
    """Scattering powers at the matched rotation point, all four drives."""
    t0 = time.perf_counter()
    params = _full_depth_params()
    s = freqdomain.exact_scattering(params.omega0, params).s
    power = np.abs(s) ** 2
    fwd, refl, across, iso = [], [], [], []
    for j in range(4):
        fwd.append(power[(j + 1) % 4, j])
        refl.append(power[j, j])
        across.append(power[(j + 2) % 4, j])
        iso.append(power[(j + 3) % 4, j])
    measured = {
        "forward_min": float(min(fwd)),
        "forward_max": float(max(fwd)),
        "reflection_max": float(max(refl)),
        "two_hop_max": float(max(across)),
        "isolation_max": float(max(iso)),
    }
    passed = (
        all(abs(v - 0.995) <= 0.002 for v in fwd)
        and all(abs(v - 0.002) <= 0.001 for v in refl)
        and all(abs(v - 0.002) <= 0.001 for v in across)
        and all(v <= 0.0005 for v in iso)
    )
    return CriterionResult(
        1, "matched rotation scattering powers", passed, measured,
        "forward 0.995+/-0.002, reflection and two-hop 0.002+/-0.001, "
        "isolation <= 0.0005, every drive port",
        time.perf_counter() - t0,
    )


def criterion_2() -> CriterionResult:
    """Peak transmission and reflection of the reduced-depth design."""
    t0 = time.perf_counter()
    params = _half_power_params()
    f0 = params.omega0 / TWO_PI
    table = freqdomain.sweep(f0 - 0.4e9, f0 + 0.4e9, 1601, params)
    s21_sq = np.abs(table.s[:, 1, 0]) ** 2
    i = int(np.argmax(s21_sq))
    peak = float(s21_sq[i])
    refl = float(np.abs(table.s[i, 0, 0]) ** 2)
    measured = {
        "peak_s21_sq": peak,
        "reflection_at_peak": refl,
        "peak_freq_hz": float(table.freq_hz[i]),
    }
    passed = abs(peak - 0.978) <= 0.005 and abs(refl - 0.010) <= 0.003
    return CriterionResult(
        2, "reduced depth peak transmission", passed, measured,
        "peak |S21|^2 = 0.978+/-0.005 with reflection 0.010+/-0.003",
        time.perf_counter() - t0,
    )


def criterion_3(kappa_scale: float = 1.0) -> CriterionResult:
    """Measured IO bandwidth against the closed form and the design value."""
    t0 = time.perf_counter()
    params = _full_depth_params()
    kappa = params.kappa
    measured_w = iomodel.fullport_fwhm_numeric(kappa * kappa_scale)
    formula_w = iomodel.circulator_bandwidths(kappa)[1]
    measured_mhz = measured_w / TWO_PI / 1e6
    measured = {
        "fwhm_mhz": float(measured_mhz),
        "formula_mhz": float(formula_w / TWO_PI / 1e6),
        "relative_error": float(abs(measured_w - formula_w) / formula_w),
    }
    passed = (
        abs(measured_w - formula_w) / formula_w <= 0.01
        and abs(measured_mhz - 241.0) <= 3.0
    )
    return CriterionResult(
        3, "transmission bandwidth", passed, measured,
        "numerical FWHM within 1% of sqrt(2(sqrt(3)-1))*kappa and 241+/-3 MHz",
        time.perf_counter() - t0,
    )


def criterion_4() -> CriterionResult:
    """Steady scattering reduces to the antisymmetric swap at the magic point."""
    t0 = time.perf_counter()
    kappa = _full_depth_params().kappa
    model, _ = iomodel.build_rotating_io(kappa, delta=0.0, omega_mod=kappa / 2.0)
    s = iomodel.io_steady_scattering(model)
    target = np.array([[0.0, -1.0], [1.0, 0.0]], dtype=complex)
    defect = float(np.max(np.abs(s - target)))
    passed = defect <= 1e-9
    return CriterionResult(
        4, "gyrator limit", passed, {"max_abs_defect": defect},
        "odd-sector steady scattering equals [[0,-1],[1,0]] to 1e-9",
        time.perf_counter() - t0,
    )


def criterion_5() -> CriterionResult:
    """Size of the junction nonlinearity and the power ceiling it implies."""
    t0 = time.perf_counter()
    omega0 = TWO_PI * 6.16e9
    k = squid.kerr_constant(omega0, i_s=6.6e-6, l_a=1e-9)
    k_hz = abs(k) / TWO_PI
    bw_hz = iomodel.circulator_bandwidths(_full_depth_params().kappa)[1] / TWO_PI
    photons = squid.saturation_photons(bw_hz, k)
    measured = {"kerr_khz": float(k_hz / 1e3), "saturation_photons": float(photons)}
    passed = 577e3 <= k_hz <= 580e3 and abs(photons - 415.0) <= 5.0
    return CriterionResult(
        5, "nonlinearity scale", passed, measured,
        "|K|/2pi in 577..580 kHz and saturation photons 415+/-5",
        time.perf_counter() - t0,
    )


def criterion_6() -> CriterionResult:
    """Steady-state routing of a long ideal-schedule transient run."""
    t0 = time.perf_counter()
    params = _full_depth_params()
    drive = timedomain.DriveSpec(port=1, amplitude=1e-6, omega_d=params.omega0)
    settings = timedomain.SimSettings(duration=250e-9, discard=50e-9)
    series = timedomain.simulate(params, drive, settings)
    table = analysis.sideband_table(
        series.trim(settings.discard), params.omega_mod, max_order=5, carrier_port=2
    )
    carriers = {p: table.dbc_of(p, 0) for p in (1, 3, 4)}
    worst_carrier = max(carriers.values())
    worst_sideband = max(e.dbc for e in table.sidebands())
    measured = {
        "port1_carrier_dbc": float(carriers[1]),
        "port3_carrier_dbc": float(carriers[3]),
        "port4_carrier_dbc": float(carriers[4]),
        "worst_sideband_dbc": float(worst_sideband),
    }
    passed = worst_carrier <= -20.0 and worst_sideband < -60.0
    return CriterionResult(
        6, "ideal transient routing", passed, measured,
        "unwanted-port carriers >= 20 dB below port 2; all sidebands < -60 dBc",
        time.perf_counter() - t0,
    )


def squid_operating_point():
    """Derive the flux-schedule benchmark circuit from its pinned inputs.

    Pinned: static bias angle pi/3, modulation angle 0.38 rad, rotation
    2pi*90 MHz, drive 2pi*6.63 GHz, and junction scale phi0/(2 i0) = 2 nH.
    The remaining lumped values follow: the arm at rest sets l, the
    capacitance places the average-reluctance resonance on the drive, and
    the line resistance matches the decay rate to twice the rotation.
    """
    phi0 = squid.PHI0_REDUCED
    i0 = phi0 / (2.0 * 2e-9)
    sq = squid.SquidArrayParams(
        i0=i0, n=1,
        phi_sigma=(math.pi / 3.0) * 2.0 * phi0,
        phi_delta=0.38 * 2.0 * phi0,
    )
    omega_d = TWO_PI * 6.63e9
    omega_mod = TWO_PI * 90e6
    l = squid.resting_arm_inductance(sq)
    eps_eff = squid.effective_modulation_depth(sq)
    ybar_avg = squid.average_mean_reluctance(sq)
    c = (4.0 * l * ybar_avg - eps_eff**2) / (2.0 * l * omega_d**2)
    r = eps_eff**2 / (16.0 * c * omega_mod)
    params = network.CircuitParams(l=l, c=c, r=r, epsilon=eps_eff,
                                   omega_mod=omega_mod)
    return params, sq, omega_d


def criterion_7() -> CriterionResult:
    """Sideband pattern of the flux-biased schedules at the pinned bias."""
    t0 = time.perf_counter()
    params, sq, omega_d = squid_operating_point()
    t_mod = TWO_PI / params.omega_mod
    drive = timedomain.DriveSpec(port=1, amplitude=1e-6, omega_d=omega_d)
    settings = timedomain.SimSettings(duration=50e-9 + 15.0 * t_mod, discard=50e-9)
    series = timedomain.simulate(params, drive, settings, squid=sq)
    table = analysis.sideband_table(
        series.trim(settings.discard), params.omega_mod, max_order=5,
        carrier_port=2,
    )
    top = table.strongest_sideband()
    low_orders = [table.dbc_of(2, n) for n in (-2, -1, 1, 2)]
    measured = {
        "strongest_port": float(top.port),
        "strongest_order": float(top.order),
        "strongest_dbc": float(top.dbc),
        "low_order_max_dbc": float(max(low_orders)),
    }
    passed = (
        top.port == 2
        and abs(top.order) == 4
        and -56.0 <= top.dbc <= -44.0
        and all(v < top.dbc for v in low_orders)
    )
    return CriterionResult(
        7, "flux schedule spectral purity", passed, measured,
        "largest sidebands at drive +/- 4*rotation, -50+/-6 dBc, "
        "+/-1 and +/-2 orders strictly below",
        time.perf_counter() - t0,
    )


def _rk4_envelope(a_of_t, u_of_t, n_states: int, t_end: float, n_steps: int):
    """Dense RK4 for the small complex envelope models; returns (ts, xs)."""
    dt = t_end / n_steps
    x = np.zeros(n_states, dtype=complex)
    ts = np.linspace(0.0, t_end, n_steps + 1)
    xs = np.empty((n_steps + 1, n_states), dtype=complex)
    xs[0] = x

    def f(t, y):
        return a_of_t(t) @ y + u_of_t(t)

    for i in range(n_steps):
        t = ts[i]
        k1 = f(t, x)
        k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1)
        k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2)
        k4 = f(t + dt, x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        xs[i + 1] = x
    return ts, xs


def criterion_8() -> CriterionResult:
    """Cross-model agreement: transient vs exact, and the two IO frames."""
    t0 = time.perf_counter()
    params = _full_depth_params()
    kappa = params.kappa

    # transient steady state against the exact solution at five detunings
    worst_rel = 0.0
    for frac in (-0.5, -0.25, 0.0, 0.25, 0.5):
        omega = params.omega0 + frac * kappa
        drive = timedomain.DriveSpec(port=1, amplitude=1e-6, omega_d=omega)
        n_fit = 30.0 * TWO_PI / omega
        settings = timedomain.SimSettings(duration=50e-9 + n_fit, discard=50e-9)
        series = timedomain.simulate(params, drive, settings)
        amps = timedomain.steady_state_demod(series.trim(settings.discard))
        s_exact = freqdomain.exact_scattering(omega, params).s
        rel = abs(amps[1] - s_exact[1, 0]) / abs(s_exact[1, 0])
        worst_rel = max(worst_rel, float(rel))

    # the lab-frame and rotating-frame envelope models under the frame map
    omega_mod = kappa / 2.0
    lab = iomodel.build_lab_io(kappa, omega_mod)
    t_end = 20.0 / kappa
    delta = 0.3 * kappa

    def u_env(t):
        bump = math.sin(math.pi * t / t_end) ** 2 * np.exp(1j * delta * t)
        return np.array([bump, 0.0, 0.0, 0.0], dtype=complex)

    ts, xs_lab = _rk4_envelope(
        lambda t: lab.a, lambda t: lab.b @ u_env(t), 2, t_end, 20000
    )

    def a_rot(t):
        return -0.5 * kappa * np.eye(2, dtype=complex)

    def u_rot(t):
        rot = iomodel.lab_to_rotating_frame(t, omega_mod)
        return (rot @ lab.b) @ u_env(t)

    _, xs_rot = _rk4_envelope(a_rot, u_rot, 2, t_end, 20000)
    mapped = np.array([
        iomodel.lab_to_rotating_frame(t, omega_mod) @ x
        for t, x in zip(ts, xs_lab)
    ])
    scale = float(np.max(np.abs(xs_rot)))
    frame_rel = float(np.max(np.abs(mapped - xs_rot)) / scale)

    measured = {
        "transmission_rel_err_max": worst_rel,
        "frame_map_rel_err": frame_rel,
    }
    passed = worst_rel <= 0.01 and frame_rel <= 1e-8
    return CriterionResult(
        8, "cross model agreement", passed, measured,
        "transient transmission within 1% of exact at 5 in-band points; "
        "frame map residual <= 1e-8",
        time.perf_counter() - t0,
    )


def criterion_9() -> CriterionResult:
    """Structural properties: unitarity, reciprocity limits, block form."""
    t0 = time.perf_counter()
    params = _full_depth_params()
    f0 = params.omega0 / TWO_PI

    table = freqdomain.sweep(f0 - 1e9, f0 + 1e9, 41, params)
    unitarity = float(np.max(table.unitarity_defect))

    frozen = network.CircuitParams(omega_mod=0.0, **FULL_DEPTH)
    sym = 0.0
    for frac in (-0.3, -0.1, 0.0, 0.1, 0.3):
        s = freqdomain.exact_scattering(frozen.omega0 * (1 + frac), frozen).s
        sym = max(sym, float(np.max(np.abs(s - s.T))))

    quiet = dict(FULL_DEPTH)
    quiet["epsilon"] = 0.0
    pa = network.CircuitParams(omega_mod=0.0, **quiet)
    pb = network.CircuitParams(omega_mod=TWO_PI * 150e6, **quiet)
    indep = 0.0
    for frac in (-0.3, 0.0, 0.3):
        omega = pa.omega0 * (1 + frac)
        sa = freqdomain.exact_scattering(omega, pa).s
        sb = freqdomain.exact_scattering(omega, pb).s
        indep = max(indep, float(np.max(np.abs(sa - sb))))

    rng = np.random.default_rng(20240811)
    times = rng.uniform(0.0, 5.0 * TWO_PI / params.omega_mod, size=8)
    transform_defect = float(
        np.max(np.abs(network.EVEN_ODD_MATRIX @ network.EVEN_ODD_MATRIX.T - np.eye(4)))
    )
    for t in times:
        for u in (network.rotating_matrix(t, params.omega_mod),
                  network.full_transform(t, params.omega_mod)):
            d = float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))))
            transform_defect = max(transform_defect, d)

    schedules = squid.ideal_bridge_schedules(params.l, params.epsilon,
                                             params.omega_mod)
    ref = None
    block = 0.0
    for t in times:
        m = network.assemble_reluctance(t, schedules, params.l).entries
        u = network.full_transform(t, params.omega_mod)
        mp = params.l * (u @ m @ u.conj().T)
        if ref is None:
            ref = mp
        block = max(block, float(np.max(np.abs(mp - ref))))
        block = max(block, float(np.max(np.abs(mp[0:2, 2:4]))))
        block = max(block, float(np.max(np.abs(mp[2:4, 0:2]))))

    measured = {
        "unitarity_defect": unitarity,
        "frozen_symmetry_defect": sym,
        "zero_depth_independence": indep,
        "transform_unitarity_defect": transform_defect,
        "rotating_block_defect": block,
    }
    passed = (
        unitarity <= 1e-9 and sym <= 1e-9 and indep <= 1e-12
        and transform_defect <= 1e-12 and block <= 1e-12
    )
    return CriterionResult(
        9, "structural properties", passed, measured,
        "unitarity 1e-9 over 2 GHz; frozen-schedule symmetry 1e-9; "
        "zero-depth rotation independence, transform unitarity, and "
        "rotating-frame block constancy 1e-12",
        time.perf_counter() - t0,
    )


_CRITERIA: Dict[int, Callable] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}


def run_all(kappa_scale: float = 1.0,
            only: Optional[Sequence[int]] = None) -> list:
    """Run the numbered criteria (all by default) in ascending order."""
    indices = sorted(set(only)) if only else sorted(_CRITERIA)
    bad = [i for i in indices if i not in _CRITERIA]
    if bad:
        raise ValidationError(f"unknown criterion indices: {bad}")
    results = []
    for i in indices:
        if i == 3:
            results.append(criterion_3(kappa_scale))
        else:
            results.append(_CRITERIA[i]())
    return results
