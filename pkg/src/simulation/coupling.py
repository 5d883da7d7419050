"""
Quantum coupling constants from sampled near-field profiles.

The first-order constant g_qu projects E_z onto the electron's phase
e^{-i omega z / v_e}; the second-order constants g_qu2 and g_p integrate the
bilinear forms E'_i . E'_j and E'_i . E'_j^* where E' scales E_z by 1/gamma.
Integrals use composite Simpson on the uniform profile grid with a
Richardson error estimate from the coarsened grid.
"""

import cmath
import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import simpson

from src.core.constants import ELECTRON_MASS, ELEMENTARY_CHARGE, HBAR
from src.core.exceptions import GridMismatch, Undersampled
from src.core.types import CouplingSet, ElectronParams, FieldProfile

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


def _simpson(z: np.ndarray, values: np.ndarray) -> complex:
    return complex(
        simpson(values.real, x=z) + 1j * simpson(values.imag, x=z)
    )


def integrate_profile(z: np.ndarray, values: np.ndarray) -> Tuple[complex, float]:
    """
    Integrate complex samples on a uniform grid.

    Args:
        z: Uniform grid
        values: Complex integrand samples

    Returns:
        Tuple of the Simpson integral and its Richardson error estimate
        |I_h - I_2h| / 15 (0 when the grid is too short to coarsen)
    """
    fine = _simpson(z, values)
    if len(z) < 5:
        return fine, 0.0
    # Coarse grid must end on the same point as the fine one
    stop = len(z) if len(z) % 2 == 1 else len(z) - 1
    coarse = _simpson(z[:stop:2], values[:stop:2])
    if stop != len(z):
        coarse += _simpson(z[stop - 1 :], values[stop - 1 :])
    return fine, abs(fine - coarse) / 15.0


def _check_sampling(profile: FieldProfile, omega: float, v_e: float) -> None:
    if omega == 0.0:
        return
    limit = math.pi * v_e / (4.0 * abs(omega))
    if profile.h > limit * (1.0 + 1e-12):
        logger.error(f"Profile spacing {profile.h:.3e} m exceeds {limit:.3e} m")
        raise Undersampled(
            f"grid spacing {profile.h:.3e} m does not give 8 samples per "
            f"cycle at omega={omega:.4e} rad/s (need <= {limit:.3e} m)",
            h=profile.h,
            limit=limit,
        )


def _check_same_grid(profile_i: FieldProfile, profile_j: FieldProfile) -> None:
    if profile_i.z.shape != profile_j.z.shape or not np.allclose(
        profile_i.z, profile_j.z, rtol=1e-12, atol=0.0
    ):
        raise GridMismatch("profiles must share the same z grid")


def _primed(profile: FieldProfile, gamma: float) -> np.ndarray:
    """E' = (E_x, E_y, E_z / gamma)."""
    scale = np.array([1.0, 1.0, 1.0 / gamma])
    return profile.E * scale


def _second_order_prefactor(
    omega_i: float, omega_j: float, electron: ElectronParams
) -> complex:
    return (
        1j
        * ELEMENTARY_CHARGE**2
        / (HBAR * omega_i * omega_j * 2.0 * ELECTRON_MASS * electron.gamma * electron.v_e)
    )


def first_order_coupling(profile: FieldProfile, electron: ElectronParams) -> complex:
    """
    First-order coupling g_qu = (e / hbar omega) int E_z e^{-i omega z / v_e} dz.

    Raises:
        Undersampled: If the grid gives fewer than 8 samples per phase cycle
    """
    _check_sampling(profile, profile.omega, electron.v_e)
    phase = np.exp(-1j * profile.omega * profile.z / electron.v_e)
    integral, error = integrate_profile(profile.z, profile.E[:, 2] * phase)
    g = ELEMENTARY_CHARGE / (HBAR * profile.omega) * integral
    logger.debug(f"g_qu={g:.6e}, quadrature error estimate {error:.2e} V")
    return g


def second_order_coupling(
    profile_i: FieldProfile, profile_j: FieldProfile, electron: ElectronParams
) -> complex:
    """
    Second-order coupling g_qu2,ij (two-photon emission/absorption).

    Raises:
        GridMismatch: If the profiles use different grids
        Undersampled: If the grid does not resolve omega_i + omega_j
    """
    _check_same_grid(profile_i, profile_j)
    omega = profile_i.omega + profile_j.omega
    _check_sampling(profile_i, omega, electron.v_e)

    dot = np.sum(_primed(profile_i, electron.gamma) * _primed(profile_j, electron.gamma), axis=1)
    phase = np.exp(-1j * omega * profile_i.z / electron.v_e)
    integral, error = integrate_profile(profile_i.z, dot * phase)
    g2 = _second_order_prefactor(profile_i.omega, profile_j.omega, electron) * integral
    logger.debug(f"g_qu2={g2:.6e}, quadrature error estimate {error:.2e} V^2/m")
    return g2


def ponderomotive_coupling(
    profile_i: FieldProfile, profile_j: FieldProfile, electron: ElectronParams
) -> complex:
    """
    Ponderomotive coupling g_p,ij (absorb one photon, emit one).

    The degenerate case omega_i == omega_j has no oscillating phase and needs
    no sampling check.

    Raises:
        GridMismatch: If the profiles use different grids
        Undersampled: If the grid does not resolve |omega_i - omega_j|
    """
    _check_same_grid(profile_i, profile_j)
    omega = profile_i.omega - profile_j.omega
    _check_sampling(profile_i, omega, electron.v_e)

    dot = np.sum(
        _primed(profile_i, electron.gamma) * np.conj(_primed(profile_j, electron.gamma)),
        axis=1,
    )
    phase = np.exp(-1j * omega * profile_i.z / electron.v_e)
    integral, error = integrate_profile(profile_i.z, dot * phase)
    gp = _second_order_prefactor(profile_i.omega, profile_j.omega, electron) * integral
    logger.debug(f"g_p={gp:.6e}, quadrature error estimate {error:.2e} V^2/m")
    return gp


def _arg(value: complex) -> float:
    return cmath.phase(value) if value != 0 else 0.0


def assemble_coupling_set(
    g_qu: complex,
    g_qu2: complex,
    phase_matched: bool = True,
    g_p: Optional[complex] = None,
) -> CouplingSet:
    """
    Bundle the single-mode constants and derive their phases.

    Args:
        g_qu: First-order constant
        g_qu2: Second-order constant
        phase_matched: When set, g_p = i |g_qu2|
        g_p: Explicit ponderomotive constant (ignored when phase matched)

    Returns:
        CouplingSet with delta_phi = 2 arg(g_qu) + arg(g_qu2) in [0, 2 pi)
    """
    if phase_matched:
        if g_p is not None and not cmath.isclose(g_p, 1j * abs(g_qu2), rel_tol=1e-9, abs_tol=1e-15):
            logger.warning(f"Ignoring g_p={g_p}: phase matching fixes g_p = i|g_qu2|")
        g_p = 1j * abs(g_qu2)
    elif g_p is None:
        g_p = 0j

    phi_g1 = _arg(g_qu)
    phi_g2 = _arg(g_qu2)
    delta_phi = math.fmod(2.0 * phi_g1 + phi_g2, TWO_PI)
    if delta_phi < 0:
        delta_phi += TWO_PI
    # fmod can land on 2 pi itself after the shift
    if delta_phi >= TWO_PI:
        delta_phi = 0.0

    return CouplingSet(
        g_qu=complex(g_qu),
        g_qu2=complex(g_qu2),
        g_p=complex(g_p),
        phi_g1=phi_g1,
        phi_g2=phi_g2,
        delta_phi=delta_phi,
    )


def coupling_from_polar(
    abs_g_qu: float,
    abs_g_qu2: float,
    delta_phi: float,
    phi_g1: float = 0.0,
    phase_matched: bool = True,
) -> CouplingSet:
    """
    Build a coupling set from magnitudes and the interference phase.

    arg(g_qu2) is chosen so that 2 phi_g1 + phi_g2 equals delta_phi.
    """
    g_qu = abs_g_qu * cmath.exp(1j * phi_g1)
    g_qu2 = abs_g_qu2 * cmath.exp(1j * (delta_phi - 2.0 * phi_g1))
    return assemble_coupling_set(g_qu, g_qu2, phase_matched=phase_matched)
