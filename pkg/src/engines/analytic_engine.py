"""Closed-form evolution engine."""

from typing import Optional

from src.core.base_engine import BaseEngine
from src.core.types import CouplingSet, EngineKind, JointState, TruncationConfig
from src.simulation.analytic import (
    compton_coefficients,
    single_mode_scattering,
    split_constants,
)


class AnalyticEngine(BaseEngine):
    """
    Engine built on the closed-form amplitudes.

    By default the exact disentangled constants are used. With
    ``split_form`` (implied by either modified constant) the engine
    evaluates the printed split form instead, where an omitted g_qu2' or
    g_p' equals the coupling's own g_qu2 or g_p.
    """

    kind = EngineKind.ANALYTIC

    def __init__(
        self,
        context=None,
        split_form: bool = False,
        g_qu2_prime: Optional[complex] = None,
        g_p_prime: Optional[complex] = None,
    ) -> None:
        super().__init__(context)
        self.g_qu2_prime = g_qu2_prime
        self.g_p_prime = g_p_prime
        self.split_form = split_form or g_qu2_prime is not None or g_p_prime is not None

    def scatter(self, coupling: CouplingSet, state: JointState) -> JointState:
        split = None
        if self.split_form:
            split = split_constants(coupling, self.g_qu2_prime, self.g_p_prime)
            self.logger.debug(
                f"Split form g_qu2'={split.g_qu2_prime:.6g}, g_p'={split.g_p_prime:.6g}"
            )
        return single_mode_scattering(coupling, state, self.ctl, split=split)

    def compton(
        self,
        alpha1: complex,
        alpha2: complex,
        g_p12: complex,
        trunc: TruncationConfig,
    ) -> JointState:
        return compton_coefficients(alpha1, alpha2, g_p12, trunc, self.ctl)
