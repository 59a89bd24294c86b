"""Flux-tunable inductor physics against closed-form and numerical oracles."""

import math

import numpy as np
import pytest
from scipy import constants, special

from synthrot import (
    BRIDGE_KINDS,
    FluxSchedule,
    PHI0_REDUCED,
    SaturationError,
    SquidArrayParams,
    UnphysicalBiasError,
    ValidationError,
    array_inductance,
    average_mean_reluctance,
    effective_modulation_depth,
    ideal_arm_schedule,
    kerr_constant,
    modulation_waveform,
    nonlinear_inductance,
    resting_arm_inductance,
    saturation_photons,
    squid_arm_schedule,
    squid_critical_current,
    squid_inductance,
    suggested_bias,
    tunability_bound,
)

TWO_PI = 2.0 * math.pi


def test_flux_quantum_value():
    assert PHI0_REDUCED == pytest.approx(
        constants.hbar / (2.0 * constants.e), rel=1e-15)
    assert PHI0_REDUCED == pytest.approx(3.291059785e-16, rel=1e-9)


def test_critical_current_against_two_junction_maximum():
    # a loop is two junctions in parallel with phases split by the flux;
    # its critical current is the maximum supercurrent over the common phase
    i0 = 1.3e-6
    theta = np.linspace(0.0, TWO_PI, 20001)
    for phi_angle in (0.0, 0.4, 1.0, 2.0, 2.8):
        phi = phi_angle * 2.0 * PHI0_REDUCED
        total = i0 * (np.sin(theta + phi_angle) + np.sin(theta - phi_angle))
        expected = float(np.max(total))
        assert squid_critical_current(i0, phi) == pytest.approx(expected, rel=1e-7)


def test_inductance_against_energy_curvature():
    # 1/L is the curvature of the loop junction energy at zero branch flux
    i0 = 2.0e-6
    for phi_angle in (0.0, 0.5, 1.2):
        phi = phi_angle * 2.0 * PHI0_REDUCED
        i_s = squid_critical_current(i0, phi)
        h = 1e-3 * PHI0_REDUCED

        def energy(x):
            return -i_s * PHI0_REDUCED * math.cos(x / PHI0_REDUCED)

        curvature = (energy(h) - 2.0 * energy(0.0) + energy(-h)) / h**2
        assert squid_inductance(i0, phi) == pytest.approx(1.0 / curvature, rel=1e-5)


def test_inductance_pole_guard():
    i0 = 1e-6
    phi_at_pole = math.pi * PHI0_REDUCED  # phi / 2 phi0 = pi / 2
    with pytest.raises(UnphysicalBiasError):
        squid_inductance(i0, phi_at_pole)
    with pytest.raises(UnphysicalBiasError):
        squid_inductance(i0, 0.98 * phi_at_pole)
    assert squid_inductance(i0, 0.0) == pytest.approx(PHI0_REDUCED / (2.0 * i0))


def test_nonlinear_inductance_expansion():
    assert nonlinear_inductance(2e-9, 1e-6, 3e-7) == pytest.approx(
        2e-9 * (1.0 + 0.09 / 6.0), rel=1e-12)
    with pytest.raises(SaturationError):
        nonlinear_inductance(2e-9, 1e-6, 1e-6)


def test_array_inductance_linear_part_and_correction():
    params = SquidArrayParams(i0=1e-6, n=7)
    i_s = squid_critical_current(params.i0, 0.0)
    la = array_inductance(params, 0.0, 0.0)
    assert la == pytest.approx(7.0 * PHI0_REDUCED / i_s, rel=1e-12)
    # relative correction at fixed per-loop current is the per-loop one
    i = 0.2 * i_s
    rel = array_inductance(params, 0.0, i) / la - 1.0
    assert rel == pytest.approx((i / i_s) ** 2 / 6.0, rel=1e-12)


def test_kerr_dilution_with_array_length():
    # same resonator (fixed total inductance), longer array: per-loop
    # critical current grows as n, Kerr shrinks as 1/n^2
    omega0 = TWO_PI * 6e9
    l_total = 1e-9
    k1 = kerr_constant(omega0, PHI0_REDUCED / l_total, l_total)
    k5 = kerr_constant(omega0, 5.0 * PHI0_REDUCED / l_total, l_total)
    assert k5 == pytest.approx(k1 / 25.0, rel=1e-12)
    assert k1 < 0.0


def test_kerr_and_saturation_reference_point():
    k = kerr_constant(TWO_PI * 6.16e9, 6.6e-6, 1e-9)
    assert abs(k) / TWO_PI == pytest.approx(577.2e3, rel=1e-3)
    photons = saturation_photons(240.72e6, k)
    assert photons == pytest.approx(417.0, abs=2.0)


def test_saturation_photons_validation():
    with pytest.raises(ValidationError):
        saturation_photons(1e8, 0.0)


def test_tunability_bound_values():
    assert tunability_bound(1.0) == 0.0
    assert tunability_bound(4.0) == pytest.approx(15.0 / 17.0, rel=1e-15)
    with pytest.raises(ValidationError):
        tunability_bound(0.5)


def test_modulation_waveform_kinds():
    t, om = 0.7e-9, TWO_PI * 9e7
    assert modulation_waveform("cosine", om, t) == pytest.approx(math.cos(om * t))
    assert modulation_waveform("sine", om, t) == pytest.approx(math.sin(om * t))
    assert modulation_waveform("negCosine", om, t) == pytest.approx(-math.cos(om * t))
    with pytest.raises(ValidationError):
        modulation_waveform("square", om, t)
    assert BRIDGE_KINDS == ("cosine", "sine", "sine", "negCosine")


def test_ideal_schedule_constant_mean():
    sched = ideal_arm_schedule(1e-9, 0.8, TWO_PI * 1e8, "sine")
    for t in np.linspace(0.0, 10e-9, 11):
        arms = sched(float(t))
        assert arms.y_mean == pytest.approx(1e9, rel=1e-12)
        assert arms.y_delta == pytest.approx(
            0.8e9 * math.sin(TWO_PI * 1e8 * t), abs=1e-3)


def _pinned_array():
    return SquidArrayParams(
        i0=PHI0_REDUCED / (2.0 * 2e-9),
        n=1,
        phi_sigma=(math.pi / 3.0) * 2.0 * PHI0_REDUCED,
        phi_delta=0.38 * 2.0 * PHI0_REDUCED,
    )


def test_squid_schedule_harmonic_parity():
    # mean arm reluctance carries only even modulation harmonics, the
    # half-difference only odd ones
    params = _pinned_array()
    om = TWO_PI * 9e7
    sched = squid_arm_schedule(params, FluxSchedule("cosine", om, params.phi_sigma,
                                                    params.phi_delta))
    n = 256
    ts = np.arange(n) * (TWO_PI / om) / n
    mean = np.array([sched(float(t)).y_mean for t in ts])
    delta = np.array([sched(float(t)).y_delta for t in ts])
    mean_h = np.abs(np.fft.rfft(mean)) / n
    delta_h = np.abs(np.fft.rfft(delta)) / n
    scale = float(np.max(mean_h))
    odd = np.arange(1, 10, 2)
    even = np.arange(0, 10, 2)
    assert np.max(mean_h[odd]) < 1e-12 * scale
    assert np.max(delta_h[even]) < 1e-12 * scale
    assert delta_h[1] > 1e-3 * scale


def test_effective_depth_closed_form():
    # with the full flux excursion on one cosine branch the half-difference
    # is y_scale sin(bias) sin(depth cos), whose fundamental is a Bessel line
    params = _pinned_array()
    expected = 2.0 * special.j1(0.38) * math.tan(math.pi / 3.0)
    assert effective_modulation_depth(params) == pytest.approx(expected, rel=1e-9)
    assert effective_modulation_depth(params) == pytest.approx(0.64637, abs=1e-5)


def test_average_mean_reluctance_closed_form():
    params = _pinned_array()
    y_scale = 2.0 * params.i0 / PHI0_REDUCED
    expected = y_scale * math.cos(math.pi / 3.0) * special.j0(0.38)
    assert average_mean_reluctance(params) == pytest.approx(expected, rel=1e-9)


def test_resting_arm_inductance_value():
    params = _pinned_array()
    # phi0 / 2 i0 = 2 nH, bias cosine 1/2: arm at rest is 4 nH
    assert resting_arm_inductance(params) == pytest.approx(4e-9, rel=1e-12)


def test_schedule_rejects_pole_crossing():
    params = SquidArrayParams(
        i0=1e-6,
        phi_sigma=1.4 * 2.0 * PHI0_REDUCED,
        phi_delta=0.3 * 2.0 * PHI0_REDUCED,
    )
    with pytest.raises(UnphysicalBiasError):
        squid_arm_schedule(params, FluxSchedule(
            "cosine", TWO_PI * 9e7, params.phi_sigma, params.phi_delta))


def test_schedule_interval_check_is_exact():
    # endpoints safely outside the guard but the excursion sweeps through
    # the pole: must still be rejected
    params = SquidArrayParams(
        i0=1e-6,
        phi_sigma=(math.pi / 2.0) * 2.0 * PHI0_REDUCED,
        phi_delta=1.2 * 2.0 * PHI0_REDUCED,
    )
    assert abs(math.cos(math.pi / 2.0 - 1.2)) > 0.9
    with pytest.raises(UnphysicalBiasError):
        squid_arm_schedule(params, FluxSchedule(
            "cosine", TWO_PI * 9e7, params.phi_sigma, params.phi_delta))


def test_suggested_bias_round_trip():
    i0, phi_sigma = suggested_bias(1e-9)
    params = SquidArrayParams(i0=i0, phi_sigma=phi_sigma)
    assert resting_arm_inductance(params) == pytest.approx(4e-9, rel=1e-12)
    with pytest.raises(ValidationError):
        suggested_bias(0.0)


def test_array_params_validation():
    with pytest.raises(ValidationError):
        SquidArrayParams(i0=0.0)
    with pytest.raises(ValidationError):
        SquidArrayParams(i0=1e-6, n=0)
    with pytest.raises(ValidationError):
        SquidArrayParams(i0=1e-6, phi_delta=-1e-18)
    with pytest.raises(ValidationError):
        SquidArrayParams(i0=1e-6, eta=0.9)
