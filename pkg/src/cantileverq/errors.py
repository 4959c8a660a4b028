"""Exceptions and warnings raised by :mod:`cantileverq`."""


class ComputationError(ValueError):
    """A model could not be evaluated for the given inputs."""


class ZeroPressureError(ComputationError):
    """An air-damping model that needs gas was called at zero pressure."""


class MissingThermalDataError(ComputationError):
    """A material lacks the thermal properties needed for thermoelastic loss."""


class EmptyChannelListError(ComputationError):
    """A composite quality factor was requested from no channels."""


class NoInteriorNodesError(ComputationError):
    """The fundamental mode was asked for interior node points."""


class NoPeakError(ComputationError):
    """A frequency sweep has no interior maximum."""


class BandwidthUnresolvedError(ComputationError):
    """A half-power point of a peak lies outside the frequency sweep."""


class InfeasibleSpaceError(ComputationError):
    """No grid point of a design space satisfies its constraints."""


class MissingModeConstantError(ComputationError, KeyError):
    """No support-loss constant is configured for a mode."""

    def __str__(self):
        return ComputationError.__str__(self)


class ConfigError(ValueError):
    """A run configuration could not be used."""


class ConfigParseError(ConfigError):
    """A configuration file is not well-formed.

    Parameters
    ----------
    message : str
        Description of the problem.
    line : int
        1-based line of the problem, or ``None`` if unknown.
    column : int
        1-based column of the problem, or ``None`` if unknown.

    """

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class ConfigValidationError(ConfigError):
    """A configuration value violates the schema or a model invariant.

    Parameters
    ----------
    field : str
        Dotted path of the offending field, e.g. ``geometry.thickness``.
    message : str
        Description of the violated rule.

    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ModelValidityWarning(UserWarning):
    """Inputs are outside the range where the closed-form models apply."""


class ModelInconsistencyWarning(UserWarning):
    """Modeled channels already dissipate as much as was measured."""


class NonConvergenceWarning(RuntimeWarning):
    """An iterative fit stopped at its iteration cap."""
