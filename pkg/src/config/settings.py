"""
Configuration settings for the simulator.

This module provides typed configuration using Pydantic settings for the
numerical defaults (truncation tolerances, series control), output handling
and run-level options shared by the library, the engines and the CLI.
"""

import os

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class TruncationSettings(BaseSettings):
    """Defaults for finite index windows."""

    model_config = SettingsConfigDict(env_prefix="ETP_TRUNC_")

    leak_tol: float = Field(
        default=1e-8,
        gt=0.0,
        lt=1.0,
        description="Maximum probability allowed near the truncation boundary",
    )

    n_max_cap: int = Field(
        default=512, ge=1, description="Largest photon cutoff auto-sizing may pick"
    )

    k_margin: int = Field(
        default=4,
        ge=2,
        description="Extra electron ladder steps beyond n_max on each side",
    )

    tail_target: float = Field(
        default=1e-12,
        gt=0.0,
        description="Tail probability auto-sizing aims to leave outside the window",
    )


class SeriesSettings(BaseSettings):
    """Defaults for closed-form series evaluation."""

    model_config = SettingsConfigDict(env_prefix="ETP_SERIES_")

    term_tol: float = Field(
        default=1e-16, gt=0.0, description="Relative size of the last kept term"
    )

    max_index: int = Field(
        default=200, ge=10, description="Cap on every summation index"
    )


class OutputSettings(BaseSettings):
    """Settings for result files."""

    model_config = SettingsConfigDict(env_prefix="ETP_OUTPUT_")

    out_dir: str = Field(default="results", description="Default output directory")

    svg: bool = Field(default=False, description="Render SVG plots next to CSVs")

    float_digits: int = Field(
        default=17, ge=6, le=17, description="Significant digits in CSV output"
    )


class RunSettings(BaseSettings):
    """General run settings."""

    model_config = SettingsConfigDict(env_prefix="ETP_RUN_")

    log_level: str = Field(
        default="INFO",
        description="Logging level: DEBUG, INFO, WARNING, ERROR, CRITICAL",
    )

    parallel_workers: int = Field(
        default=1, ge=1, description="Worker threads for sweep points"
    )

    logging_config: str = Field(
        default=os.path.join(os.path.dirname(__file__), "logging.yaml"),
        description="Path of the logging dictConfig YAML",
    )

    gap_warn_threshold: float = Field(
        default=1e-6,
        description="Analytic/oracle probability gap above which a warning is logged",
    )


class Settings(BaseSettings):
    """Main settings class combining all configuration sections."""

    truncation: TruncationSettings = Field(default_factory=TruncationSettings)
    series: SeriesSettings = Field(default_factory=SeriesSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)
    run: RunSettings = Field(default_factory=RunSettings)


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """
    Get the global settings instance.

    Returns:
        Settings: The configured settings instance
    """
    return settings

