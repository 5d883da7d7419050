"""
Scenario document schema.

A scenario is one JSON object whose ``kind`` selects the parameter block;
pydantic validates ranges and resolves the discriminated union.
"""

import math
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.types import EngineKind, TruncationConfig

MAX_COUPLING = 5.0
MAX_N = 512


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TruncationBlock(_Strict):
    """Explicit window; auto-sized when absent."""

    k_min: int = Field(le=0)
    k_max: int = Field(ge=0)
    n_max: int = Field(ge=0, le=MAX_N)
    leak_tol: float = Field(default=1e-8, gt=0.0, lt=1.0)

    def to_config(self) -> TruncationConfig:
        return TruncationConfig(
            k_min=self.k_min, k_max=self.k_max, n_max=self.n_max, leak_tol=self.leak_tol
        )


class ComplexValue(_Strict):
    re: float = 0.0
    im: float = 0.0

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


class CouplingBlock(_Strict):
    """
    Single-mode couplings in polar form.

    ``split_form`` selects the printed split operator for the analytic
    engine; giving g_qu2_prime or g_p_prime implies it. An omitted prime
    equals the unprimed constant.
    """

    abs_g_qu: float = Field(ge=0.0, le=MAX_COUPLING)
    abs_g_qu2: float = Field(default=0.0, ge=0.0, le=MAX_COUPLING)
    delta_phi: float = 0.0
    phi_g1: float = 0.0
    phase_matched: bool = True
    split_form: bool = False
    g_qu2_prime: Optional[ComplexValue] = None
    g_p_prime: Optional[ComplexValue] = None

    @field_validator("g_p_prime")
    @classmethod
    def _imaginary(cls, v: Optional[ComplexValue]) -> Optional[ComplexValue]:
        if v is not None and v.re != 0.0:
            raise ValueError("g_p_prime must be imaginary for a unitary rotation")
        return v

    @property
    def uses_split_form(self) -> bool:
        primed = self.g_qu2_prime is not None or self.g_p_prime is not None
        return self.split_form or primed

    def split_options(self) -> Dict[str, Any]:
        """Keyword arguments for ``get_engine``."""
        g2, gp = self.g_qu2_prime, self.g_p_prime
        return {
            "split_form": self.uses_split_form,
            "g_qu2_prime": g2.value if g2 is not None else None,
            "g_p_prime": gp.value if gp is not None else None,
        }


class ProfileRef(_Strict):
    """Field-profile CSV and its mode frequency."""

    path: str
    omega: float = Field(gt=0.0)


class _ScenarioBase(_Strict):
    name: Optional[str] = None
    out_dir: Optional[str] = None
    engine: EngineKind = EngineKind.ANALYTIC
    truncation: Optional[TruncationBlock] = None


class CouplingScenario(_ScenarioBase):
    kind: Literal["coupling"]
    electron_energy_ev: float = Field(default=200e3, gt=0.0)
    profiles: List[ProfileRef] = Field(min_length=1, max_length=2)
    phase_matched: bool = True


class EvolveVacuumScenario(_ScenarioBase):
    kind: Literal["evolve-vacuum"]
    coupling: CouplingBlock


class EvolveCoherentScenario(_ScenarioBase):
    kind: Literal["evolve-coherent"]
    coupling: CouplingBlock
    alpha: ComplexValue


class PhaseSweepScenario(_ScenarioBase):
    kind: Literal["phase-sweep"]
    abs_g_qu: float = Field(ge=0.0, le=MAX_COUPLING)
    abs_g_qu2: float = Field(ge=0.0, le=MAX_COUPLING)
    phase_min: float = -2.0 * math.pi
    phase_max: float = 2.0 * math.pi
    steps: int = Field(default=81, ge=2, le=10001)

    @model_validator(mode="after")
    def _ordered(self) -> "PhaseSweepScenario":
        if self.phase_max <= self.phase_min:
            raise ValueError("phase_max must exceed phase_min")
        return self


class KdScenario(_ScenarioBase):
    kind: Literal["kd"]
    electron_energy_ev: float = Field(default=200e3, gt=0.0)
    E0: float = Field(ge=0.0)
    L: float = Field(gt=0.0)
    omega0: float = Field(gt=0.0)
    n_half_width: Optional[int] = Field(default=None, ge=0)


class ComptonScenario(_ScenarioBase):
    kind: Literal["compton"]
    alpha1: ComplexValue
    alpha2: ComplexValue
    g_p12: ComplexValue

    @field_validator("g_p12")
    @classmethod
    def _bounded(cls, v: ComplexValue) -> ComplexValue:
        if abs(v.value) > MAX_COUPLING:
            raise ValueError(f"|g_p12| must be <= {MAX_COUPLING}")
        return v


ScenarioConfig = Annotated[
    Union[
        CouplingScenario,
        EvolveVacuumScenario,
        EvolveCoherentScenario,
        PhaseSweepScenario,
        KdScenario,
        ComptonScenario,
    ],
    Field(discriminator="kind"),
]


class ScenarioDocument(BaseModel):
    """Wrapper resolving the union from a raw JSON object."""

    scenario: ScenarioConfig


def parse_scenario(data: dict) -> ScenarioConfig:
    """
    Validate a raw scenario object.

    Raises:
        pydantic.ValidationError: On schema or range violations
    """
    return ScenarioDocument(scenario=data).scenario
