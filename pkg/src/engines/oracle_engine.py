"""Matrix-exponential evolution engine."""

from src.core.base_engine import BaseEngine
from src.core.types import CouplingSet, EngineKind, JointState, TruncationConfig
from src.simulation.oracle import (
    build_single_mode_generator,
    build_two_mode_generator,
    evolve,
)
from src.simulation.state import two_mode_coherent_state


class OracleEngine(BaseEngine):
    """Engine exponentiating the truncated generator block by block."""

    kind = EngineKind.ORACLE

    def scatter(self, coupling: CouplingSet, state: JointState) -> JointState:
        gen = build_single_mode_generator(coupling, state.trunc)
        self.logger.debug(f"Generator dimension {gen.dimension}, nnz {gen.matrix.nnz}")
        return evolve(gen, state)

    def compton(
        self,
        alpha1: complex,
        alpha2: complex,
        g_p12: complex,
        trunc: TruncationConfig,
    ) -> JointState:
        gen = build_two_mode_generator(g_p12, trunc)
        return evolve(gen, two_mode_coherent_state(trunc, alpha1, alpha2))
