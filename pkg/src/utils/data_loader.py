"""
Scenario and field-profile loading utilities.

This module loads scenario documents (JSON) and sampled field profiles
(CSV) with caching, logging and error mapping to the simulator's error
hierarchy.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from src.core.exceptions import InvalidProfile
from src.core.types import FieldProfile

FIELD_CSV_HEADER = ("z_m", "Ex_re", "Ex_im", "Ey_re", "Ey_im", "Ez_re", "Ez_im")


class DataLoader:
    """
    Utility class for loading scenario inputs from external files.

    Relative paths resolve against ``base_path`` (the directory of the
    scenario document when loaded through the CLI).
    """

    def __init__(self, base_path: Optional[Union[str, Path]] = None) -> None:
        """
        Initialize the data loader.

        Args:
            base_path: Base directory for relative paths (defaults to cwd)
        """
        self.base_path = Path(base_path or ".")
        self.logger = logging.getLogger(__name__)
        self._cache: Dict[str, Any] = {}

    def resolve(self, filename: Union[str, Path]) -> Path:
        path = Path(filename)
        return path if path.is_absolute() else self.base_path / path

    def load_json(self, filename: Union[str, Path], use_cache: bool = True) -> Any:
        """
        Load a JSON document.

        Raises:
            FileNotFoundError: If the file doesn't exist
            json.JSONDecodeError: If the JSON is invalid
        """
        file_path = self.resolve(filename)
        key = str(file_path)
        if use_cache and key in self._cache:
            self.logger.debug(f"Loading cached JSON data: {file_path}")
            return self._cache[key]

        try:
            with open(file_path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError:
            self.logger.error(f"JSON file not found: {file_path}")
            raise
        except json.JSONDecodeError as e:
            self.logger.error(f"Invalid JSON in file {file_path}: {e}")
            raise

        if use_cache:
            self._cache[key] = data
        self.logger.info(f"Loaded JSON document: {file_path}")
        return data

    def load_field_profile(self, filename: Union[str, Path], omega: float) -> FieldProfile:
        """
        Load a sampled field profile.

        The CSV header must be ``z_m,Ex_re,Ex_im,Ey_re,Ey_im,Ez_re,Ez_im``;
        one row per sample in SI units.

        Args:
            filename: CSV path
            omega: Mode angular frequency in rad/s

        Raises:
            FileNotFoundError: If the file doesn't exist
            InvalidProfile: On a wrong header, unparsable rows, NaN/Inf or a
                non-monotone grid
        """
        file_path = self.resolve(filename)
        with open(file_path, "r", encoding="utf-8") as f:
            header = tuple(col.strip() for col in f.readline().strip().split(","))
            if header != FIELD_CSV_HEADER:
                self.logger.error(f"Bad field CSV header in {file_path}: {header}")
                raise InvalidProfile(
                    f"expected header {','.join(FIELD_CSV_HEADER)}, got {','.join(header)}",
                    path=str(file_path),
                )
            try:
                table = np.loadtxt(f, delimiter=",", ndmin=2)
            except ValueError as e:
                raise InvalidProfile(f"unparsable row in {file_path}: {e}") from e

        if table.shape[1] != len(FIELD_CSV_HEADER):
            raise InvalidProfile(
                f"expected {len(FIELD_CSV_HEADER)} columns, got {table.shape[1]}"
            )
        E = table[:, 1::2] + 1j * table[:, 2::2]
        self.logger.info(f"Loaded field profile {file_path} ({len(table)} samples)")
        return FieldProfile(z=table[:, 0], E=E, omega=omega)


def write_field_profile(path: Union[str, Path], profile: FieldProfile) -> None:
    """Write a profile in the CSV layout ``load_field_profile`` reads."""
    columns = [profile.z]
    for axis in range(3):
        columns += [profile.E[:, axis].real, profile.E[:, axis].imag]
    np.savetxt(
        path,
        np.column_stack(columns),
        delimiter=",",
        header=",".join(FIELD_CSV_HEADER),
        comments="",
        fmt="%.17g",
    )
