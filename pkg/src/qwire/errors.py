"""Exception hierarchy shared by all qwire modules."""


class WireError(Exception):
    """Base class for all qwire errors."""


class MismatchedWavenumber(WireError):
    """Transfer matrices in a product carry different wavenumbers."""


class NotUnimodular(WireError):
    """Matrix determinant deviates from 1 beyond tolerance."""


class SingularMatrix(WireError):
    """M22 vanishes, transmission amplitude is undefined."""


class ResonancePole(WireError):
    """Composition denominator 1 - rL2*rR1 vanishes."""


class DegenerateSolutions(WireError):
    """Wronskian of the elementary solutions vanishes."""


class ComplexCoefficients(WireError):
    """Canonical coefficients do not reduce to the real form."""


class SingularK(WireError):
    """K coefficient vanishes at this energy; the canonical form breaks down."""


class StepOverflow(WireError):
    """Recursion amplitude exceeded the overflow guard; rescale and retry."""


class InvalidSpec(WireError):
    """Disorder specification fails its normalization or stationarity checks."""


class UnstableProduct(WireError):
    """Matrix product could not be kept finite by rescaling."""


class ZeroTransmission(WireError):
    """Transmission underflowed to zero; use log-T accumulators instead."""


class ZeroState(WireError):
    """All state amplitudes are zero."""


class OutOfBand(WireError):
    """Energy lies outside the allowed band of the reference chain or leads."""


class NotConverged(WireError):
    """Fixed-point solver did not reach the requested tolerance."""


class ConfigError(WireError):
    """CLI configuration is invalid; message aggregates all findings."""
