"""
Tests for the truncated joint Hilbert space.

Covers truncation window invariants, joint-state constructors, coherent
tails, electron kinematics and window auto-sizing.
"""

import math

import allure
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.config.settings import get_settings
from src.core.exceptions import (
    IndexOutOfWindow,
    InvalidTruncation,
    NonPositiveEnergy,
    TailTooHeavy,
    WrongModeCount,
)
from src.core.types import JointState, TruncationConfig
from src.simulation.state import (
    auto_truncation,
    coherent_amplitudes,
    coherent_joint_state,
    electron_kinematics,
    fock_joint_state,
    photon_number_moments,
    two_mode_coherent_state,
    vacuum_joint_state,
)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Joint State")
@allure.story("Truncation Window")
@allure.title("Windows that exclude k = 0 or have bad bounds are rejected")
@pytest.mark.parametrize(
    "k_min, k_max, n_max, leak_tol",
    [
        (1, 5, 4, 1e-8),
        (-5, -1, 4, 1e-8),
        (-5, 5, -1, 1e-8),
        (-5, 5, 4, 0.0),
        (-5, 5, 4, 1.0),
    ],
)
def test_truncation_rejects_invalid_windows(k_min, k_max, n_max, leak_tol) -> None:
    with pytest.raises(InvalidTruncation):
        TruncationConfig(k_min=k_min, k_max=k_max, n_max=n_max, leak_tol=leak_tol)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Joint State")
@allure.story("Truncation Window")
@allure.title("Window shape, storage indices and out-of-window reads")
def test_truncation_indexing(assertions) -> None:
    trunc = TruncationConfig(k_min=-3, k_max=2, n_max=4)

    with allure.step("Check sizes and shapes"):
        assertions.assert_equals(trunc.k_size, 6)
        assertions.assert_equals(trunc.n_size, 5)
        assertions.assert_equals(trunc.shape(1), (6, 5))
        assertions.assert_equals(trunc.shape(2), (6, 5, 5))
        assertions.assert_equals(trunc.dimension(2), 150)

    with allure.step("Check index mapping"):
        assertions.assert_equals(trunc.k_index(-3), 0)
        assertions.assert_equals(trunc.k_index(0), 3)
        assertions.assert_equals(trunc.n_index(4), 4)

    with allure.step("Reading outside the window raises"):
        with pytest.raises(IndexOutOfWindow):
            trunc.k_index(3)
        with pytest.raises(IndexOutOfWindow):
            trunc.n_index(5)
        state = vacuum_joint_state(trunc)
        with pytest.raises(IndexOutOfWindow):
            state.amplitude(0, 7)
        with pytest.raises(IndexOutOfWindow):
            state.amplitude(0, 0, 0)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Joint State")
@allure.story("Constructors")
@allure.title("Vacuum and Fock states sit at k = 0 with unit norm")
def test_vacuum_and_fock_states(assertions, two_mode_window) -> None:
    trunc = TruncationConfig(k_min=-4, k_max=4, n_max=6)

    vacuum = vacuum_joint_state(trunc)
    assertions.assert_close(vacuum.norm, 1.0, 1e-15)
    assertions.assert_equals(vacuum.amplitude(0, 0), 1.0 + 0j)

    fock = fock_joint_state(trunc, 3)
    assertions.assert_equals(fock.amplitude(0, 3), 1.0 + 0j)
    assertions.assert_close(fock.norm, 1.0, 1e-15)

    pair = fock_joint_state(two_mode_window, 2, 5)
    assertions.assert_equals(pair.mode_count, 2)
    assertions.assert_equals(pair.amplitude(0, 2, 5), 1.0 + 0j)

    with pytest.raises(WrongModeCount):
        fock_joint_state(trunc)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Joint State")
@allure.story("Constructors")
@allure.title("Joint state amplitudes are immutable and shape-checked")
def test_joint_state_is_frozen() -> None:
    trunc = TruncationConfig(k_min=-2, k_max=2, n_max=3)
    state = vacuum_joint_state(trunc)
    with pytest.raises(ValueError):
        state.amps[0, 0] = 1.0
    with pytest.raises(InvalidTruncation):
        JointState(trunc=trunc, amps=np.zeros((4, 4)))


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Joint State")
@allure.story("Coherent States")
@allure.title("Coherent state |2> has Poisson(4) photon statistics")
def test_coherent_state_is_poissonian(assertions, small_window) -> None:
    state = coherent_joint_state(small_window, 2.0)

    with allure.step("Tail beyond n_max is negligible"):
        assertions.assert_less_than(state.tail_weight, 1e-12)

    with allure.step("Mean and variance equal |alpha|^2"):
        mean, var = photon_number_moments(state)
        assertions.assert_close(mean, 4.0, 1e-9)
        assertions.assert_close(var, 4.0, 1e-9)

    with allure.step("Amplitudes carry the phase of alpha"):
        amps, _ = coherent_amplitudes(2.0j, 10)
        expected = math.exp(-2.0) * 2.0**3 / math.sqrt(6.0)
        assertions.assert_close(amps[3], expected * (1j) ** 3, 1e-14)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Joint State")
@allure.story("Coherent States")
@allure.title("A coherent tail above leak_tol is refused")
def test_heavy_tail_is_refused() -> None:
    trunc = TruncationConfig(k_min=-10, k_max=10, n_max=5)
    with pytest.raises(TailTooHeavy):
        coherent_joint_state(trunc, 3.0)
    with pytest.raises(TailTooHeavy):
        two_mode_coherent_state(trunc, 0.5, 3.0)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Joint State")
@allure.story("Coherent States")
@allure.title("Two-mode coherent state is a product of the single-mode ones")
def test_two_mode_coherent_product(assertions, two_mode_window) -> None:
    state = two_mode_coherent_state(two_mode_window, 1.5, 0.5j)
    a1, _ = coherent_amplitudes(1.5, two_mode_window.n_max)
    a2, _ = coherent_amplitudes(0.5j, two_mode_window.n_max)
    assertions.assert_allclose(state.amps[two_mode_window.k_index(0)], np.outer(a1, a2), 1e-15)
    assertions.assert_close(state.norm, 1.0, 1e-12)
    with pytest.raises(WrongModeCount):
        photon_number_moments(state)


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Kinematics")
@allure.story("Electron Kinematics")
@allure.title("200 keV electron has gamma 1.3914 and v = 0.6953 c")
def test_electron_kinematics(assertions, electron_200kev) -> None:
    assertions.assert_close(electron_200kev.gamma, 1.391390236712, 1e-11)
    assertions.assert_close(electron_200kev.v_e / 299792458.0, 0.695314471263, 1e-11)

    with pytest.raises(NonPositiveEnergy):
        electron_kinematics(0.0)
    with pytest.raises(NonPositiveEnergy):
        electron_kinematics(-5.0)


@pytest.mark.property
@allure.epic("Simulation")
@allure.feature("Kinematics")
@allure.story("Electron Kinematics")
@allure.title("Electron speed stays below c and grows with energy")
@given(energy=st.floats(min_value=1.0, max_value=1e9))
def test_kinematics_subluminal(energy: float) -> None:
    slow = electron_kinematics(energy)
    fast = electron_kinematics(energy * 2.0)
    assert 1.0 <= slow.gamma < fast.gamma
    assert 0.0 < slow.v_e < fast.v_e < 299792458.0


@pytest.mark.unit
@allure.epic("Simulation")
@allure.feature("Joint State")
@allure.story("Auto-sizing")
@allure.title("Auto-sized window covers the displaced Poisson spread")
def test_auto_truncation(assertions) -> None:
    settings = get_settings()
    trunc = auto_truncation(g_qu=2.0)
    assertions.assert_equals(trunc.n_max, 26)
    assertions.assert_equals(trunc.k_max, 26 + settings.truncation.k_margin)
    assertions.assert_equals(trunc.k_min, -trunc.k_max)

    squeezed = auto_truncation(g_qu=0.8, g_qu2=0.8)
    assertions.assert_greater_than(squeezed.n_max, trunc.n_max)

    capped = auto_truncation(g_qu=50.0)
    assertions.assert_equals(capped.n_max, settings.truncation.n_max_cap)
