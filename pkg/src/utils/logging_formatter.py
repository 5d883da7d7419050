"""
Logging helpers: a formatter that tolerates a missing ``run_id`` and the
dictConfig loader shared by the CLI and the test session.
"""

from __future__ import annotations

import logging
import logging.config
from pathlib import Path
from typing import Optional, Union

import yaml


class SafeFormatter(logging.Formatter):
    """
    A safe formatter that handles missing fields gracefully.

    Records emitted outside an engine or scenario run carry no ``run_id``;
    this formatter fills in a placeholder instead of raising.
    """

    def format(self, record):
        """
        Format the log record safely.

        Args:
            record: LogRecord instance

        Returns:
            str: Formatted log message
        """
        if not hasattr(record, "run_id"):
            record.run_id = "-"

        return super().format(record)


def configure_logging(
    config_path: Optional[Union[str, Path]] = None, level: Optional[str] = None
) -> None:
    """
    Configure logging from the YAML dictConfig, falling back to basicConfig.

    Args:
        config_path: Path to the logging YAML (defaults to the packaged one)
        level: Optional console level override
    """
    if config_path is None:
        config_path = Path(__file__).resolve().parent.parent / "config" / "logging.yaml"
    path = Path(config_path)

    if path.exists():
        with open(path, "r", encoding="utf-8") as f:
            logging_config = yaml.safe_load(f)

        # File handlers write relative to the working directory
        Path("logs").mkdir(exist_ok=True)

        if level:
            logging_config["handlers"]["console"]["level"] = level.upper()

        logging.config.dictConfig(logging_config)
    else:
        logging.basicConfig(
            level=(level or "INFO").upper(),
            format="%(asctime)s [%(levelname)8s] %(name)s: %(message)s",
        )


def get_run_logger(
    name: str, run_id: str
) -> Union[logging.Logger, logging.LoggerAdapter[logging.Logger]]:
    """
    Get a logger adapter that stamps every record with a run id.

    Args:
        name: Logger name
        run_id: Short correlation id of the current run

    Returns:
        LoggerAdapter carrying ``run_id`` in ``extra``
    """
    return logging.LoggerAdapter(logging.getLogger(name), {"run_id": run_id})
