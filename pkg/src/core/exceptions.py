"""
Error hierarchy for the simulator.

Every physics-layer failure derives from ``SimulationError`` so the CLI can
map the whole family to one exit code. Errors keep the offending values as
attributes for logging and reporting.
"""

from typing import Any, Dict


class SimulationError(Exception):
    """Base class for all simulator errors."""

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.context: Dict[str, Any] = context

    @property
    def name(self) -> str:
        """Error name as reported in run metadata."""
        return type(self).__name__


class InvalidTruncation(SimulationError):
    """Truncation window violates its invariants."""


class IndexOutOfWindow(SimulationError):
    """A ladder index outside the truncation window was read."""


class TailTooHeavy(SimulationError):
    """A coherent-state tail beyond n_max exceeds the leakage tolerance."""


class NonPositiveEnergy(SimulationError):
    """Electron kinetic energy must be strictly positive."""


class EmptyProfile(SimulationError):
    """Field profile has too few samples."""


class InvalidProfile(SimulationError):
    """Field profile grid or values are malformed."""


class Undersampled(SimulationError):
    """Field profile grid does not resolve the integrand oscillation."""


class GridMismatch(SimulationError):
    """Two field profiles do not share a z grid."""


class SeriesNotConverged(SimulationError):
    """A series hit its index cap before reaching the tolerance."""


class IndexDomain(SimulationError):
    """Requested coefficient index lies outside its domain."""


class WindowTooNarrow(SimulationError):
    """Index window too small for the requested operation."""


class LeakageExceeded(SimulationError):
    """Probability at the truncation boundary exceeds the tolerance."""


class NotNormalized(SimulationError):
    """Input state is not unit norm."""


class WrongModeCount(SimulationError):
    """Operation called with a state of the wrong mode count."""


class NonPhysicalState(SimulationError):
    """Density matrix has significantly negative eigenvalues."""
