"""Spectral measurement helpers and the working-point search."""

import math

import numpy as np
import pytest

from synthrot import (
    CircuitParams,
    DriveSpec,
    PHI0_REDUCED,
    SpectrumError,
    SquidArrayParams,
    TimeSeries,
    ValidationError,
    fwhm,
    optimize_modulation,
    power_spectrum,
    sideband_table,
    transmission_fwhm,
    sweep,
)

TWO_PI = 2.0 * math.pi


def test_power_spectrum_parseval():
    rng = np.random.default_rng(5)
    n = 1000
    t = np.arange(n) * 1e-10
    x = rng.normal(size=n)
    for window, w in (("rect", np.ones(n)), ("hann", np.hanning(n))):
        spec = power_spectrum(t, x, window=window)
        assert np.sum(spec.power) == pytest.approx(np.sum((w * x) ** 2), rel=1e-9)
    assert spec.df == pytest.approx(1.0 / (n * 1e-10), rel=1e-12)


def test_power_spectrum_bin_centered_tone():
    n = 512
    t = np.arange(n) * 1e-10
    m = 40
    amp = 0.7
    x = amp * np.cos(TWO_PI * m * t / (n * 1e-10))
    spec = power_spectrum(t, x, window="rect")
    peak = int(np.argmax(spec.power))
    assert peak == m
    assert spec.power[m] == pytest.approx(amp**2 * n / 2.0, rel=1e-9)
    others = np.delete(spec.power, m)
    assert np.max(others) < 1e-20 * spec.power[m]


def test_power_spectrum_scale_quadratic():
    n = 256
    t = np.arange(n) * 1e-10
    x = np.sin(TWO_PI * 12 * t / (n * 1e-10))
    p1 = power_spectrum(t, x).power
    p2 = power_spectrum(t, 2.0 * x).power
    assert np.allclose(p2, 4.0 * p1, rtol=1e-12, atol=0.0)


def test_power_spectrum_validation():
    t = np.arange(8) * 1e-10
    with pytest.raises(ValidationError):
        power_spectrum(t, np.zeros(8))
    t = np.arange(64) * 1e-10
    with pytest.raises(ValidationError):
        power_spectrum(t, np.zeros(64), window="flattop")
    t_bad = t.copy()
    t_bad[10] += 3e-11
    with pytest.raises(ValidationError):
        power_spectrum(t_bad, np.zeros(64))


def _synthetic_series(dbc_target: float):
    """Carrier on port 2 plus one +1-order sideband at a known level."""
    f_c = 5.0e9
    f_m = 1.0e8
    duration = 4.0e-7  # 40 modulation periods: both lines bin-centered
    n = 1 << 15
    t = np.arange(n) * duration / n
    drive = DriveSpec(port=1, amplitude=1e-6, omega_d=TWO_PI * f_c)
    v = np.zeros((n, 4))
    v[:, 1] = np.cos(TWO_PI * f_c * t)
    v[:, 1] += 10.0 ** (dbc_target / 20.0) * np.cos(TWO_PI * (f_c + f_m) * t)
    return TimeSeries(t=t, v_out=v, drive=drive), TWO_PI * f_m


def test_sideband_table_measures_injected_line():
    series, omega_mod = _synthetic_series(-30.0)
    table = sideband_table(series, omega_mod, max_order=3)
    assert table.carrier_port == 2
    assert table.dbc_of(2, 0) == pytest.approx(0.0, abs=1e-12)
    assert table.dbc_of(2, 1) == pytest.approx(-30.0, abs=0.5)
    strongest = table.strongest_sideband()
    assert strongest.port == 2 and strongest.order == 1
    # the mirror line was not injected: far below the real one
    assert table.dbc_of(2, -1) < -80.0


def test_sideband_table_resolution_guard():
    f_c = 5.0e9
    n = 4096
    duration = 2.0e-8  # far too short to resolve 100 MHz spacing
    t = np.arange(n) * duration / n
    drive = DriveSpec(port=1, amplitude=1e-6, omega_d=TWO_PI * f_c)
    v = np.zeros((n, 4))
    v[:, 1] = np.cos(TWO_PI * f_c * t)
    series = TimeSeries(t=t, v_out=v, drive=drive)
    with pytest.raises(SpectrumError):
        sideband_table(series, TWO_PI * 1e8)


def test_sideband_table_validation():
    series, omega_mod = _synthetic_series(-40.0)
    with pytest.raises(ValidationError):
        sideband_table(series, 0.0)
    with pytest.raises(ValidationError):
        sideband_table(series, omega_mod, max_order=0)
    with pytest.raises(ValidationError):
        sideband_table(series, omega_mod, ports=(1, 2), carrier_port=3)


def test_fwhm_lorentzian():
    width = 2.4e8
    f = np.linspace(5.0e9, 7.0e9, 3001)
    y = 1.0 / (1.0 + (2.0 * (f - 6.0e9) / width) ** 2)
    assert fwhm(f, y) == pytest.approx(width, rel=1e-3)


def test_fwhm_error_cases():
    f = np.linspace(0.0, 1.0, 101)
    with pytest.raises(SpectrumError):
        fwhm(f, f)  # peak at the boundary
    y = 1.0 / (1.0 + (2.0 * (f - 0.5) / 10.0) ** 2)
    with pytest.raises(SpectrumError):
        fwhm(f, y)  # never falls to half maximum
    with pytest.raises(ValidationError):
        fwhm(f[:4], f[:4])


def test_transmission_fwhm_against_sweep():
    p = CircuitParams(l=0.5e-9, c=2e-12, r=50.0, epsilon=1.0, omega_mod=6.25e8)
    f0 = p.omega0 / TWO_PI
    table = sweep(f0 - 0.5e9, f0 + 0.5e9, 2001, p)
    width = transmission_fwhm(table.freq_hz, table.s)
    assert width == pytest.approx(240.4e6, abs=1e6)


def test_optimizer_ideal_stays_at_matched_point():
    p = CircuitParams(l=0.5e-9, c=2e-12, r=50.0, epsilon=1.0, omega_mod=5.5e8)
    tuned = optimize_modulation(p, budget=150)
    assert tuned.phi_delta is None
    assert tuned.omega_mod == pytest.approx(p.omega_crit, rel=0.05)
    assert tuned.omega_d == pytest.approx(p.omega0, rel=0.005)
    assert tuned.objective < 0.02
    assert tuned.n_evals <= 150


def test_optimizer_budget_validation():
    p = CircuitParams(l=0.5e-9, c=2e-12, r=50.0, epsilon=1.0, omega_mod=6.25e8)
    with pytest.raises(ValidationError):
        optimize_modulation(p, budget=5)


def test_optimizer_squid_refines_near_start():
    params = CircuitParams(l=4e-9, c=2.477242001140079e-13, r=186.40268825119475,
                           epsilon=0.6463704345638136, omega_mod=TWO_PI * 9e7)
    sq = SquidArrayParams(
        i0=PHI0_REDUCED / (2.0 * 2e-9),
        phi_sigma=(math.pi / 3.0) * 2.0 * PHI0_REDUCED,
        phi_delta=0.38 * 2.0 * PHI0_REDUCED,
    )
    tuned = optimize_modulation(params, squid=sq, budget=20, amplitude=1e-6)
    assert tuned.n_evals <= 20
    assert isinstance(tuned.converged, bool)
    assert tuned.phi_delta == pytest.approx(sq.phi_delta, rel=0.2)
    assert tuned.omega_mod == pytest.approx(TWO_PI * 9e7, rel=0.15)
    assert tuned.omega_d == pytest.approx(TWO_PI * 6.63e9, rel=0.005)
    assert tuned.objective < 0.2
