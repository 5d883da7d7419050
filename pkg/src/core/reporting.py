"""
Result writing and Allure reporting utilities.

``ResultWriter`` serializes scenario results as deterministic CSV tables,
a ``run_meta.json`` record and optional SVG plots. ``AllureReporter`` and
``AllureSteps`` attach the same tables to test reports.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import allure
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.config.settings import get_settings  # noqa: E402
from src.core.types import RunContext  # noqa: E402

Row = Sequence[Any]


def format_value(value: Any, digits: int) -> str:
    """Fixed formatting so identical inputs give byte-identical files."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        # avoid "-0"
        return format(value + 0.0, f".{digits}g")
    return str(value)


class ResultWriter:
    """
    Writes the output file set of one scenario run.

    Attributes:
        out_dir: Output directory (created on first write)
        digits: Significant digits for floats
        svg: Whether ``plot_*`` calls render files
        written: Paths written so far, in order
    """

    def __init__(
        self,
        out_dir: Union[str, Path],
        svg: bool = False,
        context: Optional[RunContext] = None,
    ) -> None:
        self.out_dir = Path(out_dir)
        self.svg = svg
        self.digits = get_settings().output.float_digits
        self.written: List[Path] = []
        run_id = context.run_id if context else "-"
        self.logger = logging.LoggerAdapter(logging.getLogger(__name__), {"run_id": run_id})

    def _path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Row]) -> Path:
        """
        Write a CSV table.

        Raises:
            OSError: If the file cannot be written
        """
        path = self._path(name)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            count = 0
            for row in rows:
                writer.writerow([format_value(v, self.digits) for v in row])
                count += 1
        self.written.append(path)
        self.logger.info(f"Wrote {path} ({count} rows)")
        return path

    def write_meta(self, meta: Dict[str, Any]) -> Path:
        path = self._path("run_meta.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump(meta, f, indent=2, sort_keys=True, default=str)
            f.write("\n")
        self.written.append(path)
        return path

    def _save(self, fig: "plt.Figure", name: str) -> Optional[Path]:
        path = self._path(name)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        self.written.append(path)
        self.logger.debug(f"Rendered {path}")
        return path

    def plot_bars(
        self, name: str, x: np.ndarray, y: np.ndarray, xlabel: str, ylabel: str
    ) -> Optional[Path]:
        """Bar plot of a distribution; no-op unless SVG output is on."""
        if not self.svg:
            return None
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.bar(x, y, width=0.8, color="tab:blue")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        fig.tight_layout()
        return self._save(fig, name)

    def plot_heatmap(
        self,
        name: str,
        values: np.ndarray,
        extent: Sequence[float],
        xlabel: str,
        ylabel: str,
    ) -> Optional[Path]:
        """Heatmap with values[row, col] drawn over ``extent``; no-op unless SVG is on."""
        if not self.svg:
            return None
        fig, ax = plt.subplots(figsize=(5, 4))
        image = ax.imshow(values, origin="lower", extent=extent, aspect="auto", cmap="viridis")
        fig.colorbar(image, ax=ax)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        fig.tight_layout()
        return self._save(fig, name)

    def plot_line(
        self, name: str, x: np.ndarray, y: np.ndarray, xlabel: str, ylabel: str
    ) -> Optional[Path]:
        if not self.svg:
            return None
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(x, y, marker=".")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        fig.tight_layout()
        return self._save(fig, name)


class AllureReporter:
    """
    Helper class for attaching simulation artifacts to Allure reports.
    """

    def __init__(self, context: Optional[RunContext] = None) -> None:
        """
        Initialize the Allure reporter.

        Args:
            context: Optional run context
        """
        self.context = context
        self.logger = logging.getLogger(__name__)

    @allure.step("Attach JSON data: {name}")
    def attach_json(self, data: Union[Dict[str, Any], str], name: str = "JSON Data") -> None:
        """
        Attach JSON data to the Allure report.

        Args:
            data: JSON data (dict or string)
            name: Name for the attachment
        """
        try:
            json_str = (
                json.dumps(data, indent=2, default=str) if isinstance(data, dict) else str(data)
            )
            allure.attach(json_str, name=name, attachment_type=allure.attachment_type.JSON)
            self.logger.debug(f"JSON data attached to Allure report: {name}")
        except Exception as e:
            self.logger.error(f"Failed to attach JSON data: {str(e)}")

    @allure.step("Attach table: {name}")
    def attach_table(
        self, header: Sequence[str], rows: Iterable[Row], name: str = "Table"
    ) -> None:
        """
        Attach a table as CSV.

        Args:
            header: Column names
            rows: Table rows
            name: Name for the attachment
        """
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v, 10) for v in row])
        try:
            allure.attach(
                buffer.getvalue(), name=name, attachment_type=allure.attachment_type.CSV
            )
        except Exception as e:
            self.logger.error(f"Failed to attach table: {str(e)}")


class AllureSteps:
    """
    Context manager for Allure steps with logging.
    """

    def __init__(
        self,
        step_name: str,
        logger: Optional[Union[logging.Logger, logging.LoggerAdapter[logging.Logger]]] = None,
    ) -> None:
        self.step_name = step_name
        self.logger = logger or logging.getLogger(__name__)
        self.step_context = None

    def __enter__(self):
        self.step_context = allure.step(self.step_name)
        self.step_context.__enter__()
        self.logger.info(f"Starting step: {self.step_name}")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type:
            self.logger.error(f"Step failed: {self.step_name} - {str(exc_val)}")
        else:
            self.logger.info(f"Step completed: {self.step_name}")
        self.step_context.__exit__(exc_type, exc_val, exc_tb)


def get_allure_reporter(context: Optional[RunContext] = None) -> AllureReporter:
    """
    Get an Allure reporter instance with optional context.

    Args:
        context: Optional run context

    Returns:
        AllureReporter: Configured Allure reporter
    """
    return AllureReporter(context)
