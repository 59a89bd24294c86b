"""Exception hierarchy shared by every module in the package."""


class SynthrotError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(SynthrotError):
    """A parameter, field, or configuration value violates its contract."""


class BasisMismatchError(SynthrotError):
    """Arithmetic attempted between vectors tagged with different bases."""


class DegenerateInductanceError(SynthrotError):
    """A bridge arm reluctance is non-positive; the network matrix is invalid."""


class UnphysicalBiasError(SynthrotError):
    """A flux bias enters the zone where the tunable inductance diverges."""


class SaturationError(SynthrotError):
    """Branch current at or beyond the junction critical current."""


class NearResonanceError(SynthrotError):
    """A linear solve is too ill-conditioned for the result to be trusted."""


class SingularModelError(SynthrotError):
    """A state-space matrix is singular at the requested operating point."""


class IntegrationUnstableError(SynthrotError):
    """Transient integration diverged (state norm grew beyond the abort bound)."""


class SpectrumError(SynthrotError):
    """A spectral request cannot be satisfied by the available samples."""
