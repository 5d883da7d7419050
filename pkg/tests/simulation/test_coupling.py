"""
Tests for coupling constants computed from sampled field profiles.

Phase-matched profiles have constant integrands, so their integrals are
known in closed form. Random profiles check translation covariance and
(bi)linearity of the quadrature.
"""

import cmath
import logging
import math

import allure
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.constants import ELECTRON_MASS, ELEMENTARY_CHARGE, HBAR, REFERENCE_COUPLINGS
from src.core.exceptions import EmptyProfile, GridMismatch, InvalidProfile, Undersampled
from src.core.types import FieldProfile
from src.simulation.coupling import (
    assemble_coupling_set,
    coupling_from_polar,
    first_order_coupling,
    integrate_profile,
    ponderomotive_coupling,
    second_order_coupling,
)
from src.simulation.state import electron_kinematics

OMEGA = 2.36e15
LENGTH = 10e-6
SAMPLES = 401

ELECTRON = electron_kinematics(200e3)


def _grid(samples: int = SAMPLES, length: float = LENGTH) -> np.ndarray:
    return np.linspace(0.0, length, samples)


def _profile(Ex=0.0, Ey=0.0, Ez=0.0, omega: float = OMEGA, z=None) -> FieldProfile:
    z = _grid() if z is None else z
    E = np.zeros((len(z), 3), dtype=complex)
    E[:, 0], E[:, 1], E[:, 2] = Ex, Ey, Ez
    return FieldProfile(z=z, E=E, omega=omega)


def _random_profile(seed: int, omega: float = OMEGA) -> FieldProfile:
    rng = np.random.default_rng(seed)
    z = _grid(101, 2e-6)
    E = rng.normal(size=(len(z), 3)) + 1j * rng.normal(size=(len(z), 3))
    return FieldProfile(z=z, E=1e8 * E, omega=omega)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Coupling Constants")
@allure.story("First Order")
@allure.title("Phase-matched E_z gives g_qu = e A L / (hbar omega)")
def test_first_order_phase_matched(assertions) -> None:
    z = _grid()
    A = 3.0e7 * cmath.exp(0.3j)
    profile = _profile(Ex=1.0e9, Ez=A * np.exp(1j * OMEGA * z / ELECTRON.v_e))

    g = first_order_coupling(profile, ELECTRON)
    expected = ELEMENTARY_CHARGE * A * LENGTH / (HBAR * OMEGA)
    assertions.assert_close(g, expected, 1e-8, relative=True)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Coupling Constants")
@allure.story("First Order")
@allure.title("Zero and purely transverse fields give zero first-order coupling")
def test_first_order_trivial_cases(assertions) -> None:
    assertions.assert_equals(first_order_coupling(_profile(), ELECTRON), 0j)
    assertions.assert_equals(first_order_coupling(_profile(Ex=1e9, Ey=2e9), ELECTRON), 0j)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Coupling Constants")
@allure.story("Second Order")
@allure.title("Phase-matched E'.E' gives the closed-form two-photon coupling")
def test_second_order_phase_matched(assertions) -> None:
    z = _grid()
    A = 2.0e7
    profile = _profile(Ey=A * np.exp(1j * OMEGA * z / ELECTRON.v_e))

    g2 = second_order_coupling(profile, profile, ELECTRON)
    expected = (
        1j
        * ELEMENTARY_CHARGE**2
        * A**2
        * LENGTH
        / (2.0 * ELECTRON_MASS * ELECTRON.gamma * ELECTRON.v_e * HBAR * OMEGA**2)
    )
    assertions.assert_close(g2, expected, 1e-8, relative=True)

    with allure.step("Zero field gives zero"):
        assertions.assert_equals(second_order_coupling(_profile(), profile, ELECTRON), 0j)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Coupling Constants")
@allure.story("Ponderomotive")
@allure.title("Uniform real field gives a purely imaginary ponderomotive coupling")
def test_ponderomotive_uniform_field(assertions) -> None:
    A = 5.0e7
    profile = _profile(Ex=A)

    gp = ponderomotive_coupling(profile, profile, ELECTRON)
    expected = (
        1j
        * ELEMENTARY_CHARGE**2
        * A**2
        * LENGTH
        / (2.0 * ELECTRON_MASS * ELECTRON.gamma * ELECTRON.v_e * HBAR * OMEGA**2)
    )
    assertions.assert_close(gp, expected, 1e-8, relative=True)
    assertions.assert_less_than(abs(gp.real), 1e-12 * abs(gp))


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Coupling Constants")
@allure.story("Ponderomotive")
@allure.title("Longitudinal fields enter the second-order couplings divided by gamma")
def test_longitudinal_field_scaled_by_gamma(assertions) -> None:
    transverse = ponderomotive_coupling(_profile(Ex=1e7), _profile(Ex=1e7), ELECTRON)
    longitudinal = ponderomotive_coupling(_profile(Ez=1e7), _profile(Ez=1e7), ELECTRON)
    assertions.assert_close(longitudinal, transverse / ELECTRON.gamma**2, 1e-12, relative=True)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Coupling Constants")
@allure.story("Ponderomotive")
@allure.title("Ring-cavity-like profile lands near the tabulated |g_p|")
def test_ponderomotive_order_of_magnitude(assertions) -> None:
    omega = 1.215e15
    length = 20e-6
    z = _grid(801, length)
    g_ref, _, gp_ref = REFERENCE_COUPLINGS["ring_cavity"]
    # amplitude chosen so that |g_qu| matches the tabulated value
    A = g_ref * HBAR * omega / (ELEMENTARY_CHARGE * length)
    profile = _profile(Ez=A * np.exp(1j * omega * z / ELECTRON.v_e), omega=omega, z=z)

    assertions.assert_close(abs(first_order_coupling(profile, ELECTRON)), g_ref, 1e-8, relative=True)
    gp = abs(ponderomotive_coupling(profile, profile, ELECTRON))
    assertions.assert_greater_than(gp, 0.1 * gp_ref)
    assertions.assert_less_than(gp, 10.0 * gp_ref)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Coupling Constants")
@allure.story("Validation")
@allure.title("Undersampled, mismatched and degenerate grids are rejected")
def test_profile_validation() -> None:
    with allure.step("Spacing above pi v / (4 omega) is undersampled"):
        coarse = _profile(Ez=1e7, z=_grid(11))
        with pytest.raises(Undersampled):
            first_order_coupling(coarse, ELECTRON)

    with allure.step("Second-order couplings need a shared grid"):
        with pytest.raises(GridMismatch):
            second_order_coupling(_profile(Ex=1e7), _profile(Ex=1e7, z=_grid(SAMPLES, 2 * LENGTH)), ELECTRON)

    with allure.step("Too few or malformed samples"):
        with pytest.raises(EmptyProfile):
            FieldProfile(z=np.array([0.0, 1e-9]), E=np.zeros((2, 3)), omega=OMEGA)
        with pytest.raises(InvalidProfile):
            FieldProfile(z=np.array([0.0, 1e-9, 3e-9]), E=np.zeros((3, 3)), omega=OMEGA)
        with pytest.raises(InvalidProfile):
            FieldProfile(z=np.array([0.0, 2e-9, 1e-9]), E=np.zeros((3, 3)), omega=OMEGA)
        with pytest.raises(InvalidProfile):
            FieldProfile(z=_grid(5), E=np.full((5, 3), np.nan), omega=OMEGA)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Coupling Constants")
@allure.story("Quadrature")
@allure.title("Simpson quadrature meets its Richardson error estimate")
def test_quadrature_error_estimate(assertions) -> None:
    z = np.linspace(0.0, 1.0, 201)
    integral, error = integrate_profile(z, np.exp(5j * z))
    exact = (cmath.exp(5j) - 1.0) / 5j
    assertions.assert_close(integral, exact, 1e-8)
    assertions.assert_greater_than(error, 0.0)
    assertions.assert_less_than(error, 1e-7)

    with allure.step("Even point count keeps the same accuracy"):
        z_even = np.linspace(0.0, 1.0, 200)
        integral_even, _ = integrate_profile(z_even, np.exp(5j * z_even))
        assertions.assert_close(integral_even, exact, 1e-7)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Coupling Constants")
@allure.story("Quadrature")
@allure.title("Every coupling logs its quadrature error estimate")
def test_coupling_error_estimates_logged(assertions, caplog) -> None:
    profile = _profile(Ex=1e8, Ez=1e8)
    coupling_logger = logging.getLogger("src.simulation.coupling")
    coupling_logger.addHandler(caplog.handler)
    try:
        with caplog.at_level(logging.DEBUG, logger="src.simulation.coupling"):
            first_order_coupling(profile, ELECTRON)
            second_order_coupling(profile, profile, ELECTRON)
            ponderomotive_coupling(profile, profile, ELECTRON)
    finally:
        coupling_logger.removeHandler(caplog.handler)

    messages = [r.getMessage() for r in caplog.records]
    estimates = [m for m in messages if "error estimate" in m]
    assertions.assert_equals(len(estimates), 3)
    for prefix, message in zip(("g_qu=", "g_qu2=", "g_p="), estimates):
        assertions.assert_equals(message.startswith(prefix), True)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Coupling Constants")
@allure.story("Assembly")
@allure.title("Coupling set phases and the phase-matched ponderomotive constant")
def test_assemble_coupling_set(assertions) -> None:
    with allure.step("Quasi-BIC magnitudes"):
        cs = assemble_coupling_set(0.041, 0.099j, phase_matched=True)
        assertions.assert_close(cs.g_p, 0.099j, 1e-15)
        assertions.assert_close(cs.delta_phi, math.pi / 2, 1e-15)

    with allure.step("All-zero couplings"):
        zero = assemble_coupling_set(0, 0)
        assertions.assert_equals(zero.g_p, 0j)
        assertions.assert_equals(zero.delta_phi, 0.0)

    with allure.step("Real g_qu2 gives delta_phi = 2 phi_g1"):
        cs = assemble_coupling_set(0.5 * cmath.exp(0.4j), 0.2)
        assertions.assert_close(cs.delta_phi, 0.8, 1e-14)

    with allure.step("Without phase matching the explicit g_p is kept"):
        cs = assemble_coupling_set(0.5, 0.2, phase_matched=False, g_p=0.05j)
        assertions.assert_equals(cs.g_p, 0.05j)


@pytest.mark.property
@allure.epic("Simulation")
@allure.feature("Coupling Constants")
@allure.story("Assembly")
@allure.title("Polar construction reproduces the requested interference phase")
@given(
    abs_g=st.floats(0.01, 3.0),
    abs_g2=st.floats(0.01, 1.0),
    delta_phi=st.floats(0.0, 2 * math.pi, exclude_max=True),
    phi_g1=st.floats(-math.pi, math.pi),
)
def test_coupling_from_polar(abs_g, abs_g2, delta_phi, phi_g1) -> None:
    cs = coupling_from_polar(abs_g, abs_g2, delta_phi, phi_g1=phi_g1)
    assert abs(abs(cs.g_qu) - abs_g) < 1e-12
    assert abs(abs(cs.g_qu2) - abs_g2) < 1e-12
    # compare on the circle so 0 and 2 pi agree
    assert abs(cmath.exp(1j * cs.delta_phi) - cmath.exp(1j * delta_phi)) < 1e-9
    assert 0.0 <= cs.delta_phi < 2 * math.pi


@pytest.mark.property
@allure.epic("Simulation")
@allure.feature("Coupling Constants")
@allure.story("Symmetries")
@allure.title("Shifting the grid origin multiplies the couplings by a phase")
@settings(max_examples=100)
@given(seed=st.integers(0, 2**32 - 1), shift=st.floats(-5e-6, 5e-6))
def test_translation_covariance(seed: int, shift: float) -> None:
    profile = _random_profile(seed)
    moved = profile.shifted(shift)

    g = first_order_coupling(profile, ELECTRON)
    g_moved = first_order_coupling(moved, ELECTRON)
    phase1 = cmath.exp(-1j * OMEGA * shift / ELECTRON.v_e)
    assert abs(g_moved - g * phase1) <= 1e-10 * abs(g)

    g2 = second_order_coupling(profile, profile, ELECTRON)
    g2_moved = second_order_coupling(moved, moved, ELECTRON)
    phase2 = cmath.exp(-2j * OMEGA * shift / ELECTRON.v_e)
    assert abs(g2_moved - g2 * phase2) <= 1e-10 * abs(g2)


@pytest.mark.property
@allure.epic("Simulation")
@allure.feature("Coupling Constants")
@allure.story("Symmetries")
@allure.title("g_qu is linear and the second-order couplings are bilinear in the field")
@settings(max_examples=100)
@given(
    seed=st.integers(0, 2**32 - 1),
    re=st.floats(-3.0, 3.0),
    im=st.floats(-3.0, 3.0),
)
def test_linearity(seed: int, re: float, im: float) -> None:
    s = complex(re, im)
    profile = _random_profile(seed)
    scaled = profile.scaled(s)

    g = first_order_coupling(profile, ELECTRON)
    assert abs(first_order_coupling(scaled, ELECTRON) - s * g) <= 1e-10 * abs(s * g) + 1e-300

    g2 = second_order_coupling(profile, profile, ELECTRON)
    assert abs(second_order_coupling(scaled, scaled, ELECTRON) - s * s * g2) <= 1e-10 * abs(s * s * g2) + 1e-300

    gp = ponderomotive_coupling(profile, profile, ELECTRON)
    assert abs(ponderomotive_coupling(scaled, scaled, ELECTRON) - abs(s) ** 2 * gp) <= 1e-10 * abs(s) ** 2 * abs(gp) + 1e-300


@pytest.mark.property
@allure.epic("Simulation")
@allure.feature("Coupling Constants")
@allure.story("Symmetries")
@allure.title("Swapping the modes conjugates and negates the ponderomotive coupling")
@given(seed=st.integers(0, 2**32 - 1))
def test_ponderomotive_swap_symmetry(seed: int) -> None:
    first = _random_profile(seed, omega=OMEGA)
    second = _random_profile(seed + 1, omega=0.8 * OMEGA)

    forward = ponderomotive_coupling(first, second, ELECTRON)
    backward = ponderomotive_coupling(second, first, ELECTRON)
    assert abs(backward + np.conj(forward)) <= 1e-12 * abs(forward)
