"""Evolution engines selectable per scenario."""

from typing import Optional

from src.core.base_engine import BaseEngine
from src.core.types import EngineKind, RunContext
from src.engines.analytic_engine import AnalyticEngine
from src.engines.oracle_engine import OracleEngine

__all__ = ["AnalyticEngine", "OracleEngine", "get_engine"]


def get_engine(
    kind: EngineKind,
    context: Optional[RunContext] = None,
    split_form: bool = False,
    g_qu2_prime: Optional[complex] = None,
    g_p_prime: Optional[complex] = None,
) -> BaseEngine:
    """
    Engine instance for a single evolution path.

    Args:
        kind: Engine to build
        context: Run context carrying the correlation id
        split_form: Evaluate the printed split form (analytic only)
        g_qu2_prime: Modified second-order constant (analytic only)
        g_p_prime: Modified ponderomotive constant (analytic only)

    Raises:
        ValueError: For EngineKind.BOTH, which the runner expands itself,
            or for split-form options on the oracle
    """
    if kind is EngineKind.ANALYTIC:
        return AnalyticEngine(
            context, split_form=split_form, g_qu2_prime=g_qu2_prime, g_p_prime=g_p_prime
        )
    if kind is EngineKind.ORACLE:
        if split_form or g_qu2_prime is not None or g_p_prime is not None:
            raise ValueError("the oracle engine has no split form")
        return OracleEngine(context)
    raise ValueError(f"no single engine for {kind.value}")
