"""
Truncated joint Hilbert space: state constructors, electron kinematics and
window auto-sizing.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.special import gammaln

from src.config.settings import get_settings
from src.core.constants import ELECTRON_REST_ENERGY_EV, SPEED_OF_LIGHT
from src.core.exceptions import NonPositiveEnergy, TailTooHeavy, WrongModeCount
from src.core.types import ElectronParams, JointState, TruncationConfig

logger = logging.getLogger(__name__)


def coherent_amplitudes(alpha: complex, n_max: int) -> Tuple[np.ndarray, float]:
    """
    Fock amplitudes of the coherent state |alpha> up to n_max.

    Args:
        alpha: Coherent amplitude
        n_max: Photon-number cutoff

    Returns:
        Tuple of the renormalized amplitudes and the probability that lay
        beyond n_max before renormalization
    """
    n = np.arange(n_max + 1)
    if alpha == 0:
        amps = np.zeros(n_max + 1, dtype=complex)
        amps[0] = 1.0
        return amps, 0.0

    r = abs(alpha)
    log_mod = -0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1)
    amps = np.exp(log_mod) * np.exp(1j * n * np.angle(alpha))
    kept = float(np.sum(np.abs(amps) ** 2))
    tail = max(0.0, 1.0 - kept)
    return amps / math.sqrt(kept), tail


def _check_tail(alpha: complex, tail: float, trunc: TruncationConfig) -> None:
    if tail > trunc.leak_tol:
        logger.error(
            f"Coherent tail {tail:.3e} beyond n_max={trunc.n_max} exceeds "
            f"leak_tol={trunc.leak_tol:.1e}"
        )
        raise TailTooHeavy(
            f"|alpha|^2={abs(alpha) ** 2:.4g} leaves tail weight {tail:.3e} "
            f"beyond n_max={trunc.n_max}",
            alpha=alpha,
            tail=tail,
            n_max=trunc.n_max,
        )


def vacuum_joint_state(trunc: TruncationConfig, mode_count: int = 1) -> JointState:
    """Electron at k=0 and every photon mode in vacuum."""
    amps = np.zeros(trunc.shape(mode_count), dtype=complex)
    amps[(trunc.k_index(0),) + (0,) * mode_count] = 1.0
    return JointState(trunc=trunc, amps=amps, mode_count=mode_count)


def fock_joint_state(trunc: TruncationConfig, *n: int) -> JointState:
    """
    Electron at k=0 with photon Fock numbers ``n`` (one per mode).

    Raises:
        WrongModeCount: If neither one nor two photon numbers are given
    """
    if len(n) not in (1, 2):
        raise WrongModeCount(f"expected 1 or 2 photon numbers, got {len(n)}")
    amps = np.zeros(trunc.shape(len(n)), dtype=complex)
    index = (trunc.k_index(0),) + tuple(trunc.n_index(m) for m in n)
    amps[index] = 1.0
    return JointState(trunc=trunc, amps=amps, mode_count=len(n))


def coherent_joint_state(trunc: TruncationConfig, alpha: complex) -> JointState:
    """
    Electron at k=0 and a single coherent photon mode |alpha>.

    The truncated state is renormalized; the lost probability is reported in
    ``tail_weight``.

    Raises:
        TailTooHeavy: If the tail beyond n_max exceeds trunc.leak_tol
    """
    amps_n, tail = coherent_amplitudes(alpha, trunc.n_max)
    _check_tail(alpha, tail, trunc)

    amps = np.zeros(trunc.shape(1), dtype=complex)
    amps[trunc.k_index(0), :] = amps_n
    logger.debug(f"Coherent state alpha={alpha} built, tail weight {tail:.3e}")
    return JointState(trunc=trunc, amps=amps, mode_count=1, tail_weight=tail)


def two_mode_coherent_state(
    trunc: TruncationConfig, alpha1: complex, alpha2: complex
) -> JointState:
    """
    Electron at k=0 and two coherent photon modes |alpha1, alpha2>.

    Raises:
        TailTooHeavy: If either tail beyond n_max exceeds trunc.leak_tol
    """
    amps1, tail1 = coherent_amplitudes(alpha1, trunc.n_max)
    _check_tail(alpha1, tail1, trunc)
    amps2, tail2 = coherent_amplitudes(alpha2, trunc.n_max)
    _check_tail(alpha2, tail2, trunc)

    amps = np.zeros(trunc.shape(2), dtype=complex)
    amps[trunc.k_index(0)] = np.outer(amps1, amps2)
    tail = 1.0 - (1.0 - tail1) * (1.0 - tail2)
    return JointState(trunc=trunc, amps=amps, mode_count=2, tail_weight=tail)


def photon_number_moments(state: JointState) -> Tuple[float, float]:
    """
    Mean and variance of the photon number of a single-mode state.

    Raises:
        WrongModeCount: For two-mode states
    """
    if state.mode_count != 1:
        raise WrongModeCount("photon_number_moments needs a single-mode state")
    p_n = state.probabilities.sum(axis=0)
    p_n = p_n / p_n.sum()
    n = np.arange(state.trunc.n_size)
    mean = float(np.dot(n, p_n))
    return mean, float(np.dot((n - mean) ** 2, p_n))


def electron_kinematics(kinetic_energy: float) -> ElectronParams:
    """
    Lorentz factor and speed of an electron with the given kinetic energy.

    Args:
        kinetic_energy: Kinetic energy in eV

    Raises:
        NonPositiveEnergy: If kinetic_energy <= 0
    """
    if not kinetic_energy > 0:
        raise NonPositiveEnergy(
            f"kinetic energy must be positive, got {kinetic_energy} eV",
            kinetic_energy=kinetic_energy,
        )
    gamma = 1.0 + kinetic_energy / ELECTRON_REST_ENERGY_EV
    # 1 - 1/gamma^2 written to stay accurate as gamma -> 1
    beta = math.sqrt((gamma - 1.0) * (gamma + 1.0)) / gamma
    return ElectronParams(
        kinetic_energy=kinetic_energy, gamma=gamma, v_e=SPEED_OF_LIGHT * beta
    )


def auto_truncation(
    g_qu: float = 0.0,
    g_qu2: float = 0.0,
    alpha: complex = 0.0,
    leak_tol: Optional[float] = None,
) -> TruncationConfig:
    """
    Pick a single-mode window from coupling magnitudes and input amplitude.

    The photon cutoff covers the Poisson spread of the displacement and the
    coherent input (|x|^2 + 6|x| + 10) plus the geometric tail of the
    two-photon squeezing, which decays like tanh(2|g_qu2|)^n. The electron
    window is +-(n_max + k_margin).

    Args:
        g_qu: |g_qu|
        g_qu2: |g_qu2|
        alpha: Coherent input amplitude
        leak_tol: Leakage tolerance (defaults to settings)

    Returns:
        TruncationConfig sized for the run
    """
    cfg = get_settings().truncation
    x = abs(g_qu) + abs(alpha)
    n_max = x * x + 6.0 * x + 10.0

    t = math.tanh(2.0 * abs(g_qu2))
    if t > 0:
        # amplification of the input by squeezing
        n_max += abs(alpha) ** 2 * (math.cosh(4.0 * abs(g_qu2)) - 1.0)
        n_max += 2.0 * math.ceil(math.log(cfg.tail_target) / math.log(t * t))

    n = min(int(math.ceil(n_max)), cfg.n_max_cap)
    if n == cfg.n_max_cap:
        logger.warning(f"Auto-sized n_max clipped to cap {cfg.n_max_cap}")
    k = n + cfg.k_margin
    trunc = TruncationConfig(
        k_min=-k, k_max=k, n_max=n, leak_tol=leak_tol or cfg.leak_tol
    )
    logger.debug(f"Auto-sized window: n_max={n}, k in [{-k}, {k}]")
    return trunc
