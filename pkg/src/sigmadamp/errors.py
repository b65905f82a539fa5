"""Exception types shared across the package."""


class SigmaDampError(Exception):
    """Base class for all package errors."""


class DomainError(SigmaDampError, ValueError):
    """A formula was evaluated outside the parameter range where it is defined."""


class ScopeError(SigmaDampError, ValueError):
    """The requested statement does not cover the given parameters."""


class MissingRegularity(SigmaDampError, ValueError):
    """A theorem needs the Sobolev indices s1/s2 and they were not supplied."""


class GridMismatch(SigmaDampError, ValueError):
    """Fields living on different grids were combined."""


class NonFiniteState(SigmaDampError, FloatingPointError):
    """A time step produced NaN or Inf coefficients."""


class QuadratureFailure(SigmaDampError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class InsufficientData(SigmaDampError, ValueError):
    """Too few samples inside the fitting window."""


class NonPositiveNorm(SigmaDampError, ValueError):
    """A norm fed to a log-log fit was zero or negative."""


class NoBlowupObserved(SigmaDampError, RuntimeError):
    """A lifespan run reached its horizon without detecting blow-up."""


class ThetaOutOfRange(SigmaDampError, ValueError):
    """The Gagliardo-Nirenberg interpolation exponent left [s/sigma, 1]."""


class ConfigError(SigmaDampError, ValueError):
    """An experiment configuration failed validation."""
