"""
Measurable quantities of evolved joint states.

Everything here works on pure joint states: coincidence probabilities,
electron spectra, reduced density matrices by partial trace, purity and
von Neumann entropy in nats.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import NonPhysicalState, NotNormalized, WrongModeCount
from src.core.types import (
    CoincidenceTable,
    DensityMatrix,
    JointState,
    SeriesControl,
    Subsystem,
    TruncationConfig,
)
from src.simulation.analytic import single_mode_scattering
from src.simulation.coupling import coupling_from_polar
from src.simulation.state import auto_truncation, vacuum_joint_state

logger = logging.getLogger(__name__)

# Negative eigenvalues above this are rounding noise
EIGEN_FLOOR = -1e-10


def _check_normalized(state: JointState) -> None:
    tol = max(1e-9, state.leakage)
    if abs(state.norm - 1.0) > tol:
        logger.error(f"State norm {state.norm:.12f} off by more than {tol:.1e}")
        raise NotNormalized(
            f"state norm {state.norm:.12f} differs from 1 by more than {tol:.1e}",
            norm=state.norm,
            tolerance=tol,
        )


def coincidence_table(state: JointState) -> CoincidenceTable:
    """
    Coincidence probabilities P[n, k] of a single-mode state.

    Raises:
        NotNormalized: If the state norm is off by more than max(1e-9, leakage)
        WrongModeCount: For two-mode states
    """
    if state.mode_count != 1:
        raise WrongModeCount("coincidence_table needs a single-mode state")
    _check_normalized(state)
    return CoincidenceTable(P=state.probabilities.T, k_values=state.trunc.k_values)


def electron_spectrum(state: JointState) -> Tuple[np.ndarray, np.ndarray]:
    """Electron offsets and P_k, marginalized over every photon mode."""
    axes = tuple(range(1, state.amps.ndim))
    return state.trunc.k_values, state.probabilities.sum(axis=axes)


def spectrum_moments(k_values: np.ndarray, p_k: np.ndarray) -> Tuple[float, float]:
    """Mean and variance of the electron offset under P_k."""
    p = np.asarray(p_k, dtype=float)
    p = p / p.sum()
    mean = float(np.dot(k_values, p))
    return mean, float(np.dot((k_values - mean) ** 2, p))


def reduced_density(state: JointState, subsystem: Subsystem) -> DensityMatrix:
    """
    Partial trace over the complementary subsystem.

    For two-mode states the photon matrix runs over (n1, n2) pairs in
    row-major order and ``labels`` holds those pairs.

    Raises:
        NotNormalized: If the state norm is off
    """
    _check_normalized(state)
    trunc = state.trunc
    psi = state.amps.reshape(trunc.k_size, -1)

    if subsystem is Subsystem.ELECTRON:
        rho = psi @ psi.conj().T
        labels = trunc.k_values
    else:
        rho = psi.T @ psi.conj()
        if state.mode_count == 1:
            labels = np.arange(trunc.n_size)
        else:
            n1, n2 = np.meshgrid(
                np.arange(trunc.n_size), np.arange(trunc.n_size), indexing="ij"
            )
            labels = np.stack([n1.ravel(), n2.ravel()], axis=1)
    return DensityMatrix(rho=rho, subsystem=subsystem, labels=labels)


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2) / (Tr rho)^2."""
    trace = rho.trace
    return float(np.sum(np.abs(rho.rho) ** 2).real / (trace * trace))


def eigenvalues(rho: DensityMatrix) -> np.ndarray:
    """
    Eigenvalues of the Hermitian part with rounding noise clipped to 0.

    Raises:
        NonPhysicalState: If an eigenvalue is below -1e-10
    """
    hermitian = 0.5 * (rho.rho + rho.rho.conj().T)
    values = np.linalg.eigvalsh(hermitian)
    if values.size and values.min() < EIGEN_FLOOR:
        logger.error(f"Density matrix eigenvalue {values.min():.3e} below {EIGEN_FLOOR}")
        raise NonPhysicalState(
            f"eigenvalue {values.min():.3e} below {EIGEN_FLOOR}",
            eigenvalue=float(values.min()),
        )
    return np.clip(values, 0.0, None)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-sum lambda ln lambda in nats, with 0 ln 0 = 0."""
    values = eigenvalues(rho)
    values = values[values > 0]
    return float(-np.sum(values * np.log(values)))


def photon_joint_distribution(state: JointState) -> np.ndarray:
    """
    P(n1, n2) = sum_k |c_{k n1 n2}|^2.

    Raises:
        WrongModeCount: For single-mode states
    """
    if state.mode_count != 2:
        raise WrongModeCount(
            f"photon_joint_distribution needs two modes, got {state.mode_count}"
        )
    return state.probabilities.sum(axis=0)


def entropy_phase_scan(
    abs_g_qu: float,
    abs_g_qu2: float,
    phases: Optional[Sequence[float]] = None,
    trunc: Optional[TruncationConfig] = None,
    ctl: Optional[SeriesControl] = None,
) -> Tuple[np.ndarray, np.ndarray, float, float]:
    """
    Electron entropy of the vacuum-seeded single-mode scattering over
    interference phases.

    Args:
        abs_g_qu: |g_qu|
        abs_g_qu2: |g_qu2|
        phases: Phase grid (defaults to [0, 2 pi) in steps of 0.01 pi)
        trunc: Window (auto-sized when omitted)
        ctl: Series stopping rule

    Returns:
        Tuple of (phases, entropies, phase of the maximum, maximum entropy)
    """
    if phases is None:
        phases = np.arange(200) * 0.01 * math.pi
    phases = np.asarray(phases, dtype=float)
    trunc = trunc or auto_truncation(abs_g_qu, abs_g_qu2)
    vacuum = vacuum_joint_state(trunc)

    entropies = np.empty(phases.size)
    for i, phase in enumerate(phases):
        coupling = coupling_from_polar(abs_g_qu, abs_g_qu2, float(phase))
        state = single_mode_scattering(coupling, vacuum, ctl)
        entropies[i] = von_neumann_entropy(reduced_density(state, Subsystem.ELECTRON))

    best = int(np.argmax(entropies))
    logger.debug(
        f"Entropy scan |g|={abs_g_qu}, |g2|={abs_g_qu2}: "
        f"max {entropies[best]:.4f} at {phases[best] / math.pi:.2f} pi"
    )
    return phases, entropies, float(phases[best]), float(entropies[best])
