"""Exception types shared across fluxlab.

Argument validation failures raise plain ValueError. The classes below mark
conditions with a dedicated CLI exit code: configuration problems (exit 2),
failed numerical check gates (exit 3), and models that cannot be built at the
requested parameters at all (exit 4).
"""


class FluxlabError(Exception):
    """Base class for fluxlab-specific failures."""


class ConfigError(FluxlabError):
    """Bad run configuration (unknown keys, malformed values, misuse)."""


class NumericalCheckError(FluxlabError):
    """A quantitative check gate failed (distance or defect over tolerance)."""


class InfeasibleModelError(FluxlabError):
    """The requested model cannot be realized (quantization, separation)."""


class DegenerateBandsError(InfeasibleModelError):
    """Band touching detected where a non-degenerate family is required."""

    def __init__(self, message, k_point=None):
        super().__init__(message)
        self.k_point = k_point
