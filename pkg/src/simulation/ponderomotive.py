"""
Kapitza-Dirac diffraction of an electron plane wave by a standing light wave.

The standing wave imprints a transverse phase whose Fourier orders carry
momentum 2 n k_p with probability J_n(eta)^2.
"""

import logging
import math

import numpy as np
from scipy.special import jv

from src.core.constants import ELECTRON_MASS, ELEMENTARY_CHARGE, HBAR, SPEED_OF_LIGHT
from src.core.exceptions import WindowTooNarrow
from src.core.types import ElectronParams, StandingWaveParams

logger = logging.getLogger(__name__)


def _eta_per_field_squared(L: float, omega0: float, electron: ElectronParams) -> float:
    return (
        ELEMENTARY_CHARGE**2
        * L
        / (2.0 * electron.gamma * ELECTRON_MASS * HBAR * omega0**2 * electron.v_e)
    )


def kd_eta(params: StandingWaveParams) -> float:
    """Phase modulation depth eta = e^2 |E0|^2 L / (2 gamma m_e hbar omega0^2 v_e)."""
    return abs(params.E0) ** 2 * _eta_per_field_squared(
        params.L, params.omega0, params.electron
    )


def kd_field_for_eta(
    eta: float, L: float, omega0: float, electron: ElectronParams
) -> float:
    """Field amplitude per beam that gives modulation depth eta."""
    if eta < 0:
        raise ValueError(f"eta must be >= 0, got {eta}")
    return math.sqrt(eta / _eta_per_field_squared(L, omega0, electron))


def kd_orders(n_half_width: int) -> np.ndarray:
    return np.arange(-n_half_width, n_half_width + 1)


def kd_momenta(n_half_width: int, omega0: float) -> np.ndarray:
    """Transverse momentum transfer 2 n k_p (1/m) of each diffraction order."""
    return 2.0 * kd_orders(n_half_width) * (omega0 / SPEED_OF_LIGHT)


def kd_momentum_distribution(eta: float, n_half_width: int) -> np.ndarray:
    """
    Diffraction probabilities P_n = J_n(eta)^2 for n in [-N, N].

    Raises:
        ValueError: If eta < 0 or N < 0
        WindowTooNarrow: If the orders kept hold less than 1 - 1e-9
    """
    if eta < 0 or n_half_width < 0:
        raise ValueError(f"need eta >= 0 and N >= 0, got eta={eta}, N={n_half_width}")

    n = kd_orders(n_half_width)
    # J_{-n} = (-1)^n J_n, so the square only needs |n|
    P = jv(np.abs(n), eta) ** 2
    total = float(P.sum())
    if total < 1.0 - 1e-9:
        logger.error(f"KD orders |n| <= {n_half_width} hold only {total:.12f} at eta={eta}")
        raise WindowTooNarrow(
            f"orders |n| <= {n_half_width} hold {total:.12f} of the probability; "
            f"use N >= eta + 10",
            eta=eta,
            n_half_width=n_half_width,
        )
    logger.debug(f"KD distribution eta={eta:.4g}, N={n_half_width}, total={total:.15f}")
    return P


def kd_default_half_width(eta: float) -> int:
    """Order cutoff covering the Bessel transition region (tail far below 1e-12)."""
    if eta == 0:
        return 0
    return int(math.ceil(eta + 10.0 * eta ** (1.0 / 3.0) + 10.0))
