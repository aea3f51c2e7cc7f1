"""Exception types shared across the package."""


class RobinstabError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(RobinstabError):
    """Invalid or inconsistent analysis configuration (CLI exit code 2)."""


class AnalysisError(RobinstabError):
    """The requested analysis cannot be performed (CLI exit code 3)."""


class PoleOnAxisError(AnalysisError):
    """Evaluation or classification requested at/with an imaginary-axis pole."""


class InfiniteNormError(AnalysisError):
    """The L-infinity norm is unbounded (pole on the imaginary axis)."""


class InfeasiblePhaseError(AnalysisError):
    """No all-pass function can realize the requested phase at DC."""


class HiddenModeError(AnalysisError):
    """An ORHP pole-zero cancellation would hide an unstable mode."""


class SimulationError(AnalysisError):
    """Time simulation rejected (e.g. step size too large for the dynamics)."""
