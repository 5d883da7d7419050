"""
Scenario runner.

Dispatches a validated scenario to the simulation modules and writes its
output file set. Every number written comes from a library call; the
runner only arranges rows.
"""

import logging
import math
import platform
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from src.cli.config import (
    ComptonScenario,
    CouplingBlock,
    CouplingScenario,
    EvolveCoherentScenario,
    EvolveVacuumScenario,
    KdScenario,
    PhaseSweepScenario,
    ScenarioConfig,
)
from src.config.settings import get_settings
from src.core.base_engine import BaseEngine
from src.core.constants import SPEED_OF_LIGHT
from src.core.exceptions import SimulationError
from src.core.reporting import ResultWriter
from src.core.types import (
    CouplingSet,
    EngineKind,
    JointState,
    RunContext,
    RunResult,
    StandingWaveParams,
    Subsystem,
    TruncationConfig,
)
from src.engines import get_engine
from src.simulation.coupling import (
    assemble_coupling_set,
    coupling_from_polar,
    first_order_coupling,
    ponderomotive_coupling,
    second_order_coupling,
)
from src.simulation.observables import (
    coincidence_table,
    electron_spectrum,
    photon_joint_distribution,
    purity,
    reduced_density,
    spectrum_moments,
    von_neumann_entropy,
)
from src.simulation.ponderomotive import (
    kd_default_half_width,
    kd_eta,
    kd_momentum_distribution,
    kd_orders,
)
from src.simulation.state import (
    auto_truncation,
    coherent_joint_state,
    electron_kinematics,
    vacuum_joint_state,
)
from src.utils.data_loader import DataLoader

PACKAGE_NAME = "electron-photon-sim"


def package_version() -> str:
    try:
        return metadata.version(PACKAGE_NAME)
    except metadata.PackageNotFoundError:
        return "0+unknown"


@dataclass
class RunOutcome:
    """Files written by a run and its metadata record."""

    paths: List[Path]
    meta: Dict[str, Any]
    context: Optional[RunContext] = field(repr=False, default=None)


class ScenarioRunner:
    """
    Runs one scenario end to end.

    Attributes:
        config: Validated scenario
        writer: Output writer
        engines: Engines in output order; with ``both`` the first one
            produces the files and the second one the gap diagnostic
    """

    def __init__(
        self,
        config: ScenarioConfig,
        out_dir: Optional[str] = None,
        svg: Optional[bool] = None,
        engine: Optional[EngineKind] = None,
        base_path: Optional[Path] = None,
        context: Optional[RunContext] = None,
    ) -> None:
        self.config = config
        self.settings = get_settings()
        self.context = context or RunContext(
            run_id=_new_run_id(), scenario=config.name or config.kind
        )
        self.logger = logging.LoggerAdapter(
            logging.getLogger(__name__), {"run_id": self.context.run_id}
        )
        self.kind = engine or config.engine
        out = out_dir or config.out_dir or self.settings.output.out_dir
        self.writer = ResultWriter(
            out, svg=self.settings.output.svg if svg is None else svg, context=self.context
        )
        self.loader = DataLoader(base_path)
        self.engines, self.split_engine = self._build_engines()
        self.meta: Dict[str, Any] = {
            "run_id": self.context.run_id,
            "kind": config.kind,
            "engine": self.kind.value,
            "config": config.model_dump(mode="json"),
            "versions": {
                PACKAGE_NAME: package_version(),
                "numpy": np.__version__,
                "python": platform.python_version(),
            },
            "diagnostics": {},
        }

    def _build_engines(self) -> Tuple[List[BaseEngine], Optional[BaseEngine]]:
        block = getattr(self.config, "coupling", None)
        split = None
        if block is not None and block.uses_split_form:
            split = block.split_options()
        if self.kind is EngineKind.BOTH:
            engines = [
                get_engine(EngineKind.ANALYTIC, self.context),
                get_engine(EngineKind.ORACLE, self.context),
            ]
            # split form is a diagnostic next to the exact pair
            if split is None:
                return engines, None
            return engines, get_engine(EngineKind.ANALYTIC, self.context, **split)
        if split and self.kind is EngineKind.ORACLE:
            self.logger.warning("Split-form constants are ignored by the oracle engine")
            split = None
        return [get_engine(self.kind, self.context, **(split or {}))], None

    def run(self) -> RunOutcome:
        """
        Execute the scenario and write its outputs.

        Raises:
            SimulationError: Physics-layer failures
            OSError: Input or output file failures
        """
        handlers: Dict[str, Callable[[], None]] = {
            "coupling": self._run_coupling,
            "evolve-vacuum": self._run_evolve,
            "evolve-coherent": self._run_evolve,
            "phase-sweep": self._run_phase_sweep,
            "kd": self._run_kd,
            "compton": self._run_compton,
        }
        self.context.start_time = time.time()
        self.logger.info(f"Scenario {self.context.scenario} ({self.config.kind}) started")
        try:
            handlers[self.config.kind]()
            self.context.result = RunResult.SUCCEEDED
        except SimulationError as e:
            self.context.result = RunResult.FAILED
            self.context.error_name = e.name
            self.meta["error"] = {"name": e.name, "message": str(e), "context": e.context}
            self.logger.error(f"Scenario failed with {e.name}: {e}")
            raise
        finally:
            self.context.end_time = time.time()
            self.meta["result"] = (self.context.result or RunResult.FAILED).value
            self.meta["duration_s"] = self.context.duration
            try:
                self.writer.write_meta(self.meta)
            except OSError as e:
                self.logger.error(f"Could not write run_meta: {e}")
        self.logger.info(
            f"Scenario {self.context.scenario} finished in {self.context.duration:.3f} s"
        )
        return RunOutcome(paths=list(self.writer.written), meta=self.meta, context=self.context)

    def _truncation(self, g_qu: float = 0.0, g_qu2: float = 0.0, alpha: float = 0.0) -> TruncationConfig:
        if self.config.truncation is not None:
            return self.config.truncation.to_config()
        return auto_truncation(g_qu, g_qu2, alpha)

    def _gap(self, states: List[JointState]) -> None:
        if len(states) < 2:
            return
        gap = float(np.max(np.abs(states[0].probabilities - states[1].probabilities)))
        self.meta["diagnostics"]["max_abs_difference"] = max(
            gap, self.meta["diagnostics"].get("max_abs_difference", 0.0)
        )
        if gap > self.settings.run.gap_warn_threshold:
            self.logger.warning(f"Analytic and oracle probabilities differ by {gap:.3e}")

    def _split_gap(
        self, coupling: CouplingSet, seed: JointState, oracle: JointState
    ) -> None:
        # recorded, not enforced: the split form may leak far past leak_tol
        assert self.split_engine is not None
        split = self.split_engine.scatter(coupling, seed)
        gap = float(np.max(np.abs(split.probabilities - oracle.probabilities)))
        diag = self.meta["diagnostics"]
        diag["split_form_gap"] = gap
        diag["split_form_leakage"] = split.leakage
        self.logger.info(
            f"Split form differs from the oracle by {gap:.3e} "
            f"(leakage {split.leakage:.3e})"
        )

    def _record_leakage(self, state: JointState) -> None:
        diag = self.meta["diagnostics"]
        diag["leakage"] = max(diag.get("leakage", 0.0), state.leakage)
        diag["tail_weight"] = max(diag.get("tail_weight", 0.0), state.tail_weight)

    def _run_coupling(self) -> None:
        cfg: CouplingScenario = self.config  # type: ignore[assignment]
        electron = electron_kinematics(cfg.electron_energy_ev)
        profiles = [self.loader.load_field_profile(p.path, p.omega) for p in cfg.profiles]
        first = profiles[0]
        g_qu = first_order_coupling(first, electron)
        g_qu2 = second_order_coupling(first, first, electron)
        g_p = ponderomotive_coupling(first, first, electron)
        coupling = assemble_coupling_set(g_qu, g_qu2, cfg.phase_matched, g_p)

        values: List[Tuple[str, complex]] = [
            ("g_qu", coupling.g_qu),
            ("g_qu2", coupling.g_qu2),
            ("g_p", coupling.g_p),
        ]
        if len(profiles) == 2:
            second = profiles[1]
            values += [
                ("g_qu_2", first_order_coupling(second, electron)),
                ("g_qu2_12", second_order_coupling(first, second, electron)),
                ("g_p_12", ponderomotive_coupling(first, second, electron)),
            ]
        self.writer.write_csv(
            "couplings.csv",
            ("name", "re", "im", "abs", "arg"),
            (
                (name, v.real, v.imag, abs(v), math.atan2(v.imag, v.real) if v else 0.0)
                for name, v in values
            ),
        )
        self.meta["observables"] = {
            "delta_phi": coupling.delta_phi,
            "gamma": electron.gamma,
            "v_e": electron.v_e,
        }

    def _coupling(self, block: CouplingBlock) -> CouplingSet:
        return coupling_from_polar(
            block.abs_g_qu,
            block.abs_g_qu2,
            block.delta_phi,
            phi_g1=block.phi_g1,
            phase_matched=block.phase_matched,
        )

    def _run_evolve(self) -> None:
        cfg = self.config
        coupling = self._coupling(cfg.coupling)  # type: ignore[union-attr]
        if isinstance(cfg, EvolveCoherentScenario):
            alpha = cfg.alpha.value
            trunc = self._truncation(cfg.coupling.abs_g_qu, cfg.coupling.abs_g_qu2, abs(alpha))
            states = [e.evolve_coherent(coupling, alpha, trunc) for e in self.engines]
            seed = coherent_joint_state(trunc, alpha)
        else:
            assert isinstance(cfg, EvolveVacuumScenario)
            trunc = self._truncation(cfg.coupling.abs_g_qu, cfg.coupling.abs_g_qu2)
            states = [e.evolve_vacuum(coupling, trunc) for e in self.engines]
            seed = vacuum_joint_state(trunc)
        self._gap(states)
        if self.split_engine is not None:
            self._split_gap(coupling, seed, states[1])
        state = states[0]
        self._record_leakage(state)

        table = coincidence_table(state)
        k_values = trunc.k_values
        self.writer.write_csv(
            "pnk.csv",
            ("n", "k", "P"),
            (
                (n, int(k_values[j]), table.P[n, j])
                for n, j in zip(*np.nonzero(table.P))
            ),
        )
        self.writer.write_csv("spectrum.csv", ("k", "P"), zip(k_values, table.P_k))
        rho = reduced_density(state, Subsystem.ELECTRON)
        mean, var = spectrum_moments(k_values, table.P_k)
        self.meta["observables"] = {
            "entropy": von_neumann_entropy(rho),
            "purity": purity(rho),
            "mean_k": mean,
            "var_k": var,
        }
        self.writer.plot_bars("spectrum.svg", k_values, table.P_k, "k", "P_k")
        self.writer.plot_heatmap(
            "pnk.svg",
            table.P,
            (k_values[0] - 0.5, k_values[-1] + 0.5, -0.5, trunc.n_max + 0.5),
            "k",
            "n",
        )

    def _sweep_point(self, phase: float, trunc: TruncationConfig) -> Tuple[float, np.ndarray, List[JointState]]:
        cfg: PhaseSweepScenario = self.config  # type: ignore[assignment]
        coupling = coupling_from_polar(cfg.abs_g_qu, cfg.abs_g_qu2, phase)
        states = [e.evolve_vacuum(coupling, trunc) for e in self.engines]
        entropy = von_neumann_entropy(reduced_density(states[0], Subsystem.ELECTRON))
        return entropy, electron_spectrum(states[0])[1], states

    def _run_phase_sweep(self) -> None:
        cfg: PhaseSweepScenario = self.config  # type: ignore[assignment]
        trunc = self._truncation(cfg.abs_g_qu, cfg.abs_g_qu2)
        phases = np.linspace(cfg.phase_min, cfg.phase_max, cfg.steps)
        workers = self.settings.run.parallel_workers

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                points = list(pool.map(lambda ph: self._sweep_point(float(ph), trunc), phases))
        else:
            points = [self._sweep_point(float(ph), trunc) for ph in phases]

        for _, _, states in points:
            self._gap(states)
            self._record_leakage(states[0])

        k_values = trunc.k_values
        self.writer.write_csv(
            "entropy.csv", ("delta_phi", "S"), ((ph, p[0]) for ph, p in zip(phases, points))
        )
        self.writer.write_csv(
            "spectrum.csv",
            ("delta_phi", "k", "P"),
            (
                (ph, int(k), pk)
                for ph, p in zip(phases, points)
                for k, pk in zip(k_values, p[1])
            ),
        )
        moments = [spectrum_moments(k_values, p[1]) for p in points]
        self.writer.write_csv(
            "moments.csv",
            ("delta_phi", "mean_k", "var_k"),
            ((ph, m[0], m[1]) for ph, m in zip(phases, moments)),
        )
        best = int(np.argmax([p[0] for p in points]))
        self.meta["observables"] = {
            "max_entropy": points[best][0],
            "delta_phi_at_max": float(phases[best]),
        }
        self.writer.plot_line("entropy.svg", phases, np.array([p[0] for p in points]), "delta_phi", "S")
        self.writer.plot_heatmap(
            "spectrum.svg",
            np.array([p[1] for p in points]),
            (k_values[0] - 0.5, k_values[-1] + 0.5, phases[0], phases[-1]),
            "k",
            "delta_phi",
        )

    def _run_kd(self) -> None:
        cfg: KdScenario = self.config  # type: ignore[assignment]
        electron = electron_kinematics(cfg.electron_energy_ev)
        params = StandingWaveParams(E0=cfg.E0, L=cfg.L, omega0=cfg.omega0, electron=electron)
        eta = kd_eta(params)
        N = cfg.n_half_width if cfg.n_half_width is not None else kd_default_half_width(eta)
        P = kd_momentum_distribution(eta, N)
        orders = kd_orders(N)
        self.writer.write_csv(
            "kd.csv",
            ("n", "momentum_over_kp", "P"),
            ((int(n), 2 * int(n), p) for n, p in zip(orders, P)),
        )
        self.meta["observables"] = {"eta": eta, "k_p": cfg.omega0 / SPEED_OF_LIGHT}
        self.writer.plot_bars("kd.svg", 2 * orders, P, "momentum / k_p", "P_n")

    def _run_compton(self) -> None:
        cfg: ComptonScenario = self.config  # type: ignore[assignment]
        a1, a2, g = cfg.alpha1.value, cfg.alpha2.value, cfg.g_p12.value
        trunc = self._truncation(alpha=abs(a1) + abs(a2))
        states = [e.evolve_compton(a1, a2, g, trunc) for e in self.engines]
        self._gap(states)
        state = states[0]
        self._record_leakage(state)

        joint = photon_joint_distribution(state)
        self.writer.write_csv(
            "joint_photon.csv",
            ("n1", "n2", "P"),
            ((n1, n2, joint[n1, n2]) for n1, n2 in zip(*np.nonzero(joint))),
        )
        k_values, p_k = electron_spectrum(state)
        self.writer.write_csv("spectrum.csv", ("k", "P"), zip(k_values, p_k))
        mean, var = spectrum_moments(k_values, p_k)
        self.meta["observables"] = {"mean_k": mean, "var_k": var}
        self.writer.plot_heatmap(
            "joint_photon.svg",
            joint,
            (-0.5, trunc.n_max + 0.5, -0.5, trunc.n_max + 0.5),
            "n2",
            "n1",
        )
        self.writer.plot_bars("spectrum.svg", k_values, p_k, "k", "P_k")


def _new_run_id() -> str:
    return uuid.uuid4().hex[:8]


def run_scenario(
    config: ScenarioConfig,
    out_dir: Optional[str] = None,
    svg: Optional[bool] = None,
    engine: Optional[EngineKind] = None,
    base_path: Optional[Path] = None,
    context: Optional[RunContext] = None,
) -> RunOutcome:
    """Run one validated scenario; see ``ScenarioRunner.run``."""
    return ScenarioRunner(config, out_dir, svg, engine, base_path, context).run()
