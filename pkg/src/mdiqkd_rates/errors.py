"""Exception types shared across the rate models and the CLI."""


class InfeasibleConfigError(ValueError):
    """A relay placement cannot be realized at the requested total distance."""


class DivergenceError(ValueError):
    """A quantity diverges at the requested operating point (e.g. lossless channel)."""


class UndefinedQberError(ValueError):
    """No successful relay events, so the QBER is undefined."""


class NearSymmetricError(ValueError):
    """The asymmetric closed form is ill-conditioned; use the symmetric form."""


class FormulaDomainError(ValueError):
    """A closed-form expression was evaluated outside its domain."""


class DegenerateMeasurementError(ValueError):
    """The measured relay quadratures have a singular covariance."""


class InfeasibleNoiseError(ValueError):
    """No physical attack reproduces the requested excess noise."""


class UndefinedComparisonError(ValueError):
    """A curve comparison was requested where a rate is missing or zero."""
