"""
Base engine providing common functionality for every evolution path.

This module implements the foundation shared by the analytic and oracle
engines: settings access, a run-scoped logger, timed steps with
log-then-raise error handling, and the leakage policy applied to every
evolved state.
"""

from __future__ import annotations

import logging
import time
from abc import ABC, abstractmethod
from typing import Any, Callable, Optional, TypeVar, Union

import allure

from src.config.settings import get_settings
from src.core.exceptions import LeakageExceeded, SimulationError
from src.core.types import (
    CouplingSet,
    EngineKind,
    JointState,
    RunContext,
    SeriesControl,
    TruncationConfig,
)
from src.simulation.state import (
    coherent_joint_state,
    fock_joint_state,
    vacuum_joint_state,
)

T = TypeVar("T")


class BaseEngine(ABC):
    """
    Abstract base class for all evolution engines.

    Subclasses implement single-mode scattering of an arbitrary input with
    the electron at k = 0 and two-mode scattering of coherent inputs. The
    input constructors and the leakage check live here so both engines
    behave the same way around the physics.

    Attributes:
        context: Run context with correlation id
        settings: Application settings
        ctl: Series stopping rule from settings
        logger: Logger adapter stamping every record with ``run_id``
    """

    kind: EngineKind

    def __init__(self, context: Optional[RunContext] = None) -> None:
        """
        Initialize the engine.

        Args:
            context: Run context carrying the correlation id
        """
        self.context = context
        self.settings = get_settings()
        self.ctl = SeriesControl(
            term_tol=self.settings.series.term_tol,
            max_index=self.settings.series.max_index,
        )
        base_logger = logging.getLogger(
            f"{self.__class__.__module__}.{self.__class__.__name__}"
        )
        run_id = context.run_id if context else "-"
        self.logger: Union[
            logging.Logger, logging.LoggerAdapter[logging.Logger]
        ] = logging.LoggerAdapter(base_logger, {"run_id": run_id})

    def _run_step(self, name: str, func: Callable[..., T], *args: Any, **kwargs: Any) -> T:
        """
        Run one engine step with timing and error logging.

        Args:
            name: Step name for the log
            func: Callable doing the work

        Returns:
            Whatever ``func`` returns

        Raises:
            SimulationError: Re-raised after logging
        """
        self.logger.info(f"{self.kind.value}: {name} started")
        start = time.time()
        try:
            result = func(*args, **kwargs)
        except SimulationError as e:
            self.logger.error(
                f"{self.kind.value}: {name} failed with {e.name}: {e}",
                extra={"error_type": e.name, "duration_ms": (time.time() - start) * 1000},
            )
            raise
        duration_ms = (time.time() - start) * 1000
        self.logger.info(
            f"{self.kind.value}: {name} finished in {duration_ms:.1f} ms",
            extra={"duration_ms": duration_ms},
        )
        return result

    def _check_leakage(self, state: JointState) -> JointState:
        """
        Apply the leakage policy to an evolved state.

        Raises:
            LeakageExceeded: If the leakage exceeds trunc.leak_tol
        """
        tol = state.trunc.leak_tol
        if state.leakage > tol:
            self.logger.error(f"Leakage {state.leakage:.3e} exceeds leak_tol {tol:.1e}")
            raise LeakageExceeded(
                f"leakage {state.leakage:.3e} exceeds {tol:.1e}; widen the window",
                leakage=state.leakage,
                leak_tol=tol,
            )
        if state.leakage > 0.1 * tol:
            self.logger.warning(f"Leakage {state.leakage:.3e} near tolerance {tol:.1e}")
        else:
            self.logger.debug(f"Leakage {state.leakage:.3e}")
        return state

    @abstractmethod
    def scatter(self, coupling: CouplingSet, state: JointState) -> JointState:
        """Single-mode scattering of ``state``."""

    @abstractmethod
    def compton(
        self,
        alpha1: complex,
        alpha2: complex,
        g_p12: complex,
        trunc: TruncationConfig,
    ) -> JointState:
        """Two-mode ponderomotive scattering of |alpha1, alpha2>."""

    @allure.step("Evolve vacuum input")
    def evolve_vacuum(self, coupling: CouplingSet, trunc: TruncationConfig) -> JointState:
        state = vacuum_joint_state(trunc)
        return self._check_leakage(
            self._run_step("vacuum scattering", self.scatter, coupling, state)
        )

    @allure.step("Evolve Fock input n={n}")
    def evolve_fock(
        self, coupling: CouplingSet, trunc: TruncationConfig, n: int
    ) -> JointState:
        state = fock_joint_state(trunc, n)
        return self._check_leakage(
            self._run_step(f"Fock n={n} scattering", self.scatter, coupling, state)
        )

    @allure.step("Evolve coherent input alpha={alpha}")
    def evolve_coherent(
        self, coupling: CouplingSet, alpha: complex, trunc: TruncationConfig
    ) -> JointState:
        """
        Scatter a coherent photon state.

        Raises:
            TailTooHeavy: If the coherent tail does not fit the window
            LeakageExceeded: If the evolved state leaks past leak_tol
        """
        state = coherent_joint_state(trunc, alpha)
        return self._check_leakage(
            self._run_step("coherent scattering", self.scatter, coupling, state)
        )

    @allure.step("Evolve two-mode coherent input")
    def evolve_compton(
        self,
        alpha1: complex,
        alpha2: complex,
        g_p12: complex,
        trunc: TruncationConfig,
    ) -> JointState:
        return self._check_leakage(
            self._run_step(
                "two-mode scattering", self.compton, alpha1, alpha2, g_p12, trunc
            )
        )
