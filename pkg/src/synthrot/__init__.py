"""Models of a four-port circulator built from modulated inductive bridges.

Three tiers of fidelity share one parameter set:

* exact frequency-domain scattering of the lumped network,
* rotating-frame input-output envelope models,
* full time-domain integration, with either prescribed bridge schedules
  or schedules produced by biased junction arrays.

The time stepper has a compiled core with a pure-Python fallback;
``HAVE_COMPILED`` reports which one is active.
"""

from .errors import (
    SynthrotError,
    ValidationError,
    BasisMismatchError,
    DegenerateInductanceError,
    UnphysicalBiasError,
    SaturationError,
    NearResonanceError,
    SingularModelError,
    IntegrationUnstableError,
    SpectrumError,
)
from .network import (
    Basis,
    CircuitParams,
    BridgeArms,
    PortVector,
    ReluctanceMatrix,
    assemble_reluctance,
    bridge_two_port_reluctance,
    EVEN_ODD_MATRIX,
    even_odd_transform,
    even_odd_inverse,
    rotating_matrix,
    rotating_circular_transform,
    rotating_circular_inverse,
    full_transform,
)
from .squid import (
    PHI0_REDUCED,
    BRIDGE_KINDS,
    SquidArrayParams,
    FluxSchedule,
    modulation_waveform,
    squid_critical_current,
    squid_inductance,
    nonlinear_inductance,
    array_inductance,
    kerr_constant,
    saturation_photons,
    tunability_bound,
    ideal_arm_schedule,
    squid_arm_schedule,
    make_bridge_flux_schedules,
    ideal_bridge_schedules,
    squid_bridge_schedules,
    resting_arm_inductance,
    effective_modulation_depth,
    average_mean_reluctance,
    suggested_bias,
)
from .freqdomain import (
    ScatteringMatrix,
    SweepTable,
    exact_scattering,
    sweep,
    sweep_at,
    odd_sector_matrix,
    even_sector_matrix,
    admittance_to_scattering,
    gyrator_approx,
    three_port_reduction,
    THREE_PORT_PROJECTION,
)
from .iomodel import (
    IOModel,
    EnvelopeScaling,
    design_rates,
    build_rotating_io,
    build_lab_io,
    build_fullport_rotating_io,
    lab_to_rotating_frame,
    io_steady_scattering,
    io_scattering_via_q,
    io_fullport_scattering,
    circulator_bandwidths,
    rotation_angle,
    fullport_fwhm_numeric,
)
from .timedomain import (
    HAVE_COMPILED,
    DriveSpec,
    SimSettings,
    SimState,
    TimeSeries,
    OdeSystem,
    assemble_ode,
    integrate,
    simulate,
    steady_state_demod,
    cycle_drive,
)
from .analysis import (
    Spectrum,
    SidebandEntry,
    SidebandTable,
    TunedModulation,
    power_spectrum,
    sideband_table,
    fwhm,
    transmission_fwhm,
    optimize_modulation,
)
from .verify import CriterionResult, run_all

__version__ = "0.1.0"

__all__ = [
    "SynthrotError", "ValidationError", "BasisMismatchError",
    "DegenerateInductanceError", "UnphysicalBiasError", "SaturationError",
    "NearResonanceError", "SingularModelError", "IntegrationUnstableError",
    "SpectrumError",
    "Basis", "CircuitParams", "BridgeArms", "PortVector", "ReluctanceMatrix",
    "assemble_reluctance", "bridge_two_port_reluctance", "EVEN_ODD_MATRIX",
    "even_odd_transform", "even_odd_inverse", "rotating_matrix",
    "rotating_circular_transform", "rotating_circular_inverse",
    "full_transform",
    "PHI0_REDUCED", "BRIDGE_KINDS", "SquidArrayParams", "FluxSchedule",
    "modulation_waveform", "squid_critical_current", "squid_inductance",
    "nonlinear_inductance", "array_inductance", "kerr_constant",
    "saturation_photons", "tunability_bound", "ideal_arm_schedule",
    "squid_arm_schedule", "make_bridge_flux_schedules",
    "ideal_bridge_schedules", "squid_bridge_schedules",
    "resting_arm_inductance", "effective_modulation_depth",
    "average_mean_reluctance", "suggested_bias",
    "ScatteringMatrix", "SweepTable", "exact_scattering", "sweep", "sweep_at",
    "odd_sector_matrix", "even_sector_matrix", "admittance_to_scattering",
    "gyrator_approx", "three_port_reduction", "THREE_PORT_PROJECTION",
    "IOModel", "EnvelopeScaling", "design_rates", "build_rotating_io",
    "build_lab_io", "build_fullport_rotating_io", "lab_to_rotating_frame",
    "io_steady_scattering", "io_scattering_via_q", "io_fullport_scattering",
    "circulator_bandwidths", "rotation_angle", "fullport_fwhm_numeric",
    "HAVE_COMPILED", "DriveSpec", "SimSettings", "SimState", "TimeSeries",
    "OdeSystem", "assemble_ode", "integrate", "simulate",
    "steady_state_demod", "cycle_drive",
    "Spectrum", "SidebandEntry", "SidebandTable", "TunedModulation",
    "power_spectrum", "sideband_table", "fwhm", "transmission_fwhm",
    "optimize_modulation",
    "CriterionResult", "run_all",
    "__version__",
]
