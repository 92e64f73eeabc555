"""Exception types shared across the toolkit."""


class SatsumaError(Exception):
    """Base class for all toolkit errors."""


class AccuracyLossError(SatsumaError):
    """A routine cannot meet its accuracy budget for the given arguments."""


class PoleError(SatsumaError):
    """Evaluation requested at (or too close to) a pole."""


class DecayError(SatsumaError):
    """Sampled initial data does not decay below the required tolerance."""


class SpectralSingularityError(SatsumaError):
    """|s33(k)| fell below the safe threshold on the real axis."""

    def __init__(self, k, s33_abs):
        self.k = k
        self.s33_abs = s33_abs
        super().__init__(
            f"|s33| = {s33_abs:.3e} at k = {k}: reflection coefficients are "
            "unreliable (near spectral singularity / soliton threshold)"
        )


class IntegrationError(SatsumaError):
    """Adaptive ODE integration failed (step underflow or step budget)."""


class QuadratureError(SatsumaError):
    """Quadrature refinement failed to converge to its tolerance."""


class RouteMismatchError(SatsumaError):
    """Two independent evaluation routes of the same quantity disagree."""


class SimulationError(SatsumaError):
    """Time stepping produced non-finite values or tripped a guard."""


class ContaminationError(SimulationError):
    """Boundary-collar amplitude exceeded the configured guard threshold."""


class ConfigError(SatsumaError):
    """Malformed run configuration."""
