"""
Type definitions and data classes for the simulator.

This module provides the immutable domain types shared by every simulation
module: truncation windows, joint electron-photon states, electron
kinematics, field profiles, coupling constants, generators and observable
containers, plus the enums used by the engines and the CLI.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy import sparse

from src.core.exceptions import (
    EmptyProfile,
    IndexOutOfWindow,
    InvalidProfile,
    InvalidTruncation,
)

# Type aliases for better readability
ComplexArray = np.ndarray
RealArray = np.ndarray


class EngineKind(Enum):
    """Evolution path selectable per scenario."""

    ANALYTIC = "analytic"
    ORACLE = "oracle"
    BOTH = "both"


class Subsystem(Enum):
    """Subsystem kept by a partial trace."""

    ELECTRON = "electron"
    PHOTON = "photon"


class RunResult(Enum):
    """Enumeration for scenario run results."""

    SUCCEEDED = "succeeded"
    FAILED = "failed"


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class TruncationConfig:
    """
    Finite index window for the electron ladder and the photon ladder(s).

    The electron index k runs over [k_min, k_max]; every photon mode runs
    over [0, n_max].
    """

    k_min: int
    k_max: int
    n_max: int
    leak_tol: float = 1e-8

    def __post_init__(self) -> None:
        if not (self.k_min <= 0 <= self.k_max):
            raise InvalidTruncation(
                f"k window [{self.k_min}, {self.k_max}] must contain 0",
                k_min=self.k_min,
                k_max=self.k_max,
            )
        if self.n_max < 0:
            raise InvalidTruncation(f"n_max must be >= 0, got {self.n_max}")
        if not (0.0 < self.leak_tol < 1.0):
            raise InvalidTruncation(
                f"leak_tol must lie in (0, 1), got {self.leak_tol}"
            )

    @property
    def k_size(self) -> int:
        return self.k_max - self.k_min + 1

    @property
    def n_size(self) -> int:
        return self.n_max + 1

    @property
    def k_values(self) -> np.ndarray:
        """Electron ladder offsets in storage order."""
        return np.arange(self.k_min, self.k_max + 1)

    def shape(self, mode_count: int = 1) -> Tuple[int, ...]:
        """Amplitude tensor shape for the given number of photon modes."""
        return (self.k_size,) + (self.n_size,) * mode_count

    def dimension(self, mode_count: int = 1) -> int:
        return int(np.prod(self.shape(mode_count)))

    def k_index(self, k: int) -> int:
        """
        Storage index of electron offset k.

        Raises:
            IndexOutOfWindow: If k lies outside the window
        """
        if not (self.k_min <= k <= self.k_max):
            raise IndexOutOfWindow(
                f"k={k} outside window [{self.k_min}, {self.k_max}]", k=k
            )
        return k - self.k_min

    def n_index(self, n: int) -> int:
        """
        Storage index of photon number n.

        Raises:
            IndexOutOfWindow: If n lies outside [0, n_max]
        """
        if not (0 <= n <= self.n_max):
            raise IndexOutOfWindow(f"n={n} outside [0, {self.n_max}]", n=n)
        return n


@dataclass(frozen=True)
class JointState:
    """
    Joint electron-photon state.

    ``amps`` is indexed [k_index, n] for one mode or [k_index, n1, n2] for two
    modes. ``tail_weight`` is the probability dropped when the state was
    built, ``leakage`` the boundary probability measured after evolution.
    """

    trunc: TruncationConfig
    amps: ComplexArray
    mode_count: int = 1
    tail_weight: float = 0.0
    leakage: float = 0.0

    def __post_init__(self) -> None:
        if self.mode_count not in (1, 2):
            raise InvalidTruncation(f"mode_count must be 1 or 2, got {self.mode_count}")
        amps = np.asarray(self.amps, dtype=complex)
        expected = self.trunc.shape(self.mode_count)
        if amps.shape != expected:
            raise InvalidTruncation(
                f"amplitude shape {amps.shape} does not match window {expected}"
            )
        object.__setattr__(self, "amps", _frozen(amps))

    @property
    def norm(self) -> float:
        """Sum of squared amplitude moduli."""
        return float(np.sum(np.abs(self.amps) ** 2))

    @property
    def probabilities(self) -> RealArray:
        return np.abs(self.amps) ** 2

    def amplitude(self, k: int, *n: int) -> complex:
        """
        Amplitude of |k, n...>, refusing indices outside the window.

        Raises:
            IndexOutOfWindow: If any index lies outside the window
        """
        if len(n) != self.mode_count:
            raise IndexOutOfWindow(
                f"expected {self.mode_count} photon indices, got {len(n)}"
            )
        index = (self.trunc.k_index(k),) + tuple(self.trunc.n_index(m) for m in n)
        return complex(self.amps[index])

    def flat(self) -> ComplexArray:
        """Amplitudes flattened in joint-index order."""
        return self.amps.reshape(-1)


@dataclass(frozen=True)
class ElectronParams:
    """Relativistic kinematics of the incident electron."""

    kinetic_energy: float  # eV
    gamma: float
    v_e: float  # m/s


@dataclass(frozen=True)
class FieldProfile:
    """
    Complex vector field of one optical mode sampled along the trajectory.

    ``E`` has shape (len(z), 3) holding (E_x, E_y, E_z) in V/m.
    """

    z: RealArray
    E: ComplexArray
    omega: float

    def __post_init__(self) -> None:
        z = np.asarray(self.z, dtype=float)
        E = np.asarray(self.E, dtype=complex)
        if z.ndim != 1 or len(z) < 3:
            raise EmptyProfile(f"profile needs at least 3 samples, got {z.size}")
        if E.shape != (len(z), 3):
            raise InvalidProfile(f"field shape {E.shape} does not match ({len(z)}, 3)")
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(E))):
            raise InvalidProfile("profile contains NaN or Inf")
        steps = np.diff(z)
        if np.any(steps <= 0):
            raise InvalidProfile("z must be strictly increasing")
        h = (z[-1] - z[0]) / (len(z) - 1)
        if np.max(np.abs(steps - h)) > 1e-9 * h:
            raise InvalidProfile("z spacing is not uniform", spacing=h)
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise InvalidProfile(f"omega must be positive, got {self.omega}")
        object.__setattr__(self, "z", _frozen(z))
        object.__setattr__(self, "E", _frozen(E))

    @property
    def h(self) -> float:
        """Uniform grid spacing."""
        return float((self.z[-1] - self.z[0]) / (len(self.z) - 1))

    def shifted(self, delta: float) -> "FieldProfile":
        """Same samples on a grid whose origin moved by delta."""
        return FieldProfile(z=self.z + delta, E=self.E, omega=self.omega)

    def scaled(self, factor: complex) -> "FieldProfile":
        return FieldProfile(z=self.z, E=self.E * factor, omega=self.omega)


@dataclass(frozen=True)
class CouplingSet:
    """
    Single-mode quantum coupling constants and their phases.

    ``phi_g2`` is the argument of the second-order constant entering the
    split form (the caller's g_qu2 unless a modified one is supplied);
    ``delta_phi`` = 2 phi_g1 + phi_g2 reduced to [0, 2 pi).
    """

    g_qu: complex
    g_qu2: complex
    g_p: complex
    phi_g1: float
    phi_g2: float
    delta_phi: float


@dataclass(frozen=True)
class SplitConstants:
    """
    Constants of the split scattering operator
    D(g_qu') exp(g_qu2' a^2 - g_qu2'^* a^+2) exp(-g_p'(a a^+ + a^+ a)).
    """

    g_qu_prime: complex
    g_qu2_prime: complex
    g_p_prime: complex
    exact: bool = False


@dataclass(frozen=True)
class SeriesControl:
    """Stopping rule for the closed-form series."""

    term_tol: float = 1e-16
    max_index: int = 200

    def __post_init__(self) -> None:
        if self.term_tol <= 0:
            raise ValueError(f"term_tol must be positive, got {self.term_tol}")
        if self.max_index < 10:
            raise ValueError(f"max_index must be >= 10, got {self.max_index}")


@dataclass(frozen=True)
class Generator:
    """
    Truncated generator of the scattering operator.

    ``matrix`` is a sparse complex matrix over the joint index space in
    ``JointState.flat`` order; ``labels`` holds the conserved charges of each
    joint index, which the evolution uses to split the exponential into
    independent blocks.
    """

    trunc: TruncationConfig
    matrix: sparse.csr_matrix
    mode_count: int
    labels: np.ndarray
    couplings: Optional[CouplingSet] = None
    g_p12: complex = 0j

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])


@dataclass(frozen=True)
class CoincidenceTable:
    """Joint probabilities P[n, k_index] with cached marginals."""

    P: RealArray
    k_values: np.ndarray
    P_k: RealArray = field(init=False)
    P_n: RealArray = field(init=False)

    def __post_init__(self) -> None:
        P = _frozen(np.asarray(self.P, dtype=float))
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "k_values", _frozen(self.k_values))
        object.__setattr__(self, "P_k", _frozen(P.sum(axis=0)))
        object.__setattr__(self, "P_n", _frozen(P.sum(axis=1)))

    def probability(self, n: int, k: int) -> float:
        """
        P_nk for photon number n and electron offset k.

        Raises:
            IndexOutOfWindow: If (n, k) lies outside the table
        """
        k_min = int(self.k_values[0])
        if not (0 <= n < self.P.shape[0]) or not (
            k_min <= k <= int(self.k_values[-1])
        ):
            raise IndexOutOfWindow(f"(n={n}, k={k}) outside the table", n=n, k=k)
        return float(self.P[n, k - k_min])


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced density matrix of one subsystem."""

    rho: ComplexArray
    subsystem: Subsystem
    labels: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho", _frozen(np.asarray(self.rho, dtype=complex)))
        object.__setattr__(self, "labels", _frozen(self.labels))

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))


@dataclass(frozen=True)
class StandingWaveParams:
    """Standing light wave seen by the electron in the Kapitza-Dirac setup."""

    E0: float  # V/m per beam
    L: float  # m
    omega0: float  # rad/s
    electron: ElectronParams


@dataclass
class RunContext:
    """
    Execution context of a scenario run.

    Carries the correlation id stamped on every log record and the timing
    and outcome recorded in ``run_meta``.
    """

    run_id: str
    scenario: str
    start_time: Optional[float] = None
    end_time: Optional[float] = None
    result: Optional[RunResult] = None
    error_name: Optional[str] = None

    @property
    def duration(self) -> Optional[float]:
        """Run duration in seconds."""
        if self.start_time and self.end_time:
            return self.end_time - self.start_time
        return None
