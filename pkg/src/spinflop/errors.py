"""Exception types shared across the package."""


class SpinflopError(Exception):
    """Base class for all package-specific errors."""


class NonHermitianInput(SpinflopError):
    """A matrix that must be Hermitian is not."""


class ZeroDrive(SpinflopError):
    """Drive amplitude is zero where a finite drive is required."""


class StepTooLarge(SpinflopError):
    """Fixed integrator step too coarse for the fastest frequency present."""


class DenominatorSingular(SpinflopError):
    """Disentangling denominator vanished to working precision."""


class SeriesInvalid(SpinflopError):
    """Series evaluation requested outside its convergence domain."""


class QuadratureFailure(SpinflopError):
    """Quadrature failed to converge within the configured budget."""


class InsufficientDecay(SpinflopError):
    """Trajectory does not decay enough to extract a rate."""


class InvariantBreach(SpinflopError):
    """A conserved quantity drifted past its tolerance mid-run."""


class ConfigError(SpinflopError):
    """Malformed or inconsistent run configuration."""


class NumericalError(SpinflopError):
    """Numerical routine failed; wraps lower-level quadrature/ODE errors."""
