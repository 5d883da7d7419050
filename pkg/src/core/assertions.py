"""
Reusable numeric assertion helpers.

This module provides tolerance-aware assertions with rich error messages,
logging integration, and Allure attachments so that a failing physics check
reports where and by how much it missed.
"""

from __future__ import annotations

import logging
from typing import Any, Optional, Union

import allure
import numpy as np


class AssertionHelper:
    """
    Helper class for numeric assertions with logging and reporting.

    Every method runs as an Allure step; failures are logged at ERROR and
    the offending values are attached to the report.
    """

    def __init__(
        self,
        logger: Optional[
            Union[logging.Logger, logging.LoggerAdapter[logging.Logger]]
        ] = None,
    ) -> None:
        """
        Initialize the assertion helper.

        Args:
            logger: Optional logger instance for assertion logging
        """
        self.logger = logger or logging.getLogger(__name__)

    def _fail(self, error_msg: str, details: str, name: str) -> None:
        self.logger.error(f"Assertion failed: {error_msg}")
        allure.attach(details, name=name, attachment_type=allure.attachment_type.TEXT)
        raise AssertionError(error_msg)

    @allure.step("Assert equals: {expected}")
    def assert_equals(
        self, actual: Any, expected: Any, message: Optional[str] = None
    ) -> None:
        """
        Assert that two values are equal.

        Raises:
            AssertionError: If values are not equal
        """
        if actual != expected:
            error_msg = message or (
                f"Values are not equal.\n"
                f"Expected: {expected} (type: {type(expected).__name__})\n"
                f"Actual: {actual} (type: {type(actual).__name__})"
            )
            self._fail(
                error_msg,
                f"Expected: {expected}\nActual: {actual}",
                "Assertion Failure Details",
            )
        self.logger.debug(f"Assertion passed: {actual} == {expected}")

    @allure.step("Assert close: {expected} (tol {tol})")
    def assert_close(
        self,
        actual: complex,
        expected: complex,
        tol: float,
        relative: bool = False,
        message: Optional[str] = None,
    ) -> None:
        """
        Assert |actual - expected| <= tol (times |expected| when relative).

        Args:
            actual: Computed value
            expected: Reference value
            tol: Absolute or relative tolerance
            relative: Scale the tolerance by |expected|
            message: Optional custom error message

        Raises:
            AssertionError: If the difference exceeds the tolerance
        """
        diff = abs(actual - expected)
        limit = tol * abs(expected) if relative else tol
        if not diff <= limit:
            error_msg = message or (
                f"Values differ beyond tolerance.\n"
                f"Expected: {expected}\nActual: {actual}\n"
                f"Difference: {diff:.3e} > {limit:.3e}"
            )
            self._fail(
                error_msg,
                f"Expected: {expected!r}\nActual: {actual!r}\nDifference: {diff!r}",
                "Close Assertion Failure",
            )
        self.logger.debug(f"Assertion passed: |{actual} - {expected}| = {diff:.3e}")

    @allure.step("Assert arrays close (atol {atol})")
    def assert_allclose(
        self,
        actual: np.ndarray,
        expected: np.ndarray,
        atol: float,
        rtol: float = 0.0,
        message: Optional[str] = None,
    ) -> None:
        """
        Assert elementwise |actual - expected| <= atol + rtol |expected|.

        Raises:
            AssertionError: On shape mismatch or any element out of tolerance
        """
        actual = np.asarray(actual)
        expected = np.asarray(expected)
        if actual.shape != expected.shape:
            self._fail(
                message or f"Shape mismatch: {actual.shape} vs {expected.shape}",
                f"Actual shape: {actual.shape}\nExpected shape: {expected.shape}",
                "Shape Mismatch",
            )
        diff = np.abs(actual - expected)
        bad = diff > atol + rtol * np.abs(expected)
        if np.any(bad):
            worst = np.unravel_index(int(np.argmax(diff)), diff.shape)
            error_msg = message or (
                f"{int(bad.sum())} of {diff.size} elements out of tolerance.\n"
                f"Worst at {tuple(int(i) for i in worst)}: "
                f"actual {actual[worst]}, expected {expected[worst]}, "
                f"difference {diff[worst]:.3e}"
            )
            self._fail(
                error_msg,
                np.array2string(diff, precision=3, threshold=200),
                "Elementwise Differences",
            )
        self.logger.debug(
            f"Assertion passed: max difference {float(diff.max(initial=0.0)):.3e}"
        )

    @allure.step("Assert greater than: {threshold}")
    def assert_greater_than(
        self, actual: float, threshold: float, message: Optional[str] = None
    ) -> None:
        """
        Assert that a value is greater than a threshold.

        Raises:
            AssertionError: If value is not greater than threshold
        """
        if not actual > threshold:
            error_msg = message or (
                f"Value is not greater than threshold.\n"
                f"Actual: {actual}\nThreshold: {threshold}"
            )
            self._fail(
                error_msg,
                f"Actual: {actual}\nThreshold: {threshold}",
                "Greater Than Assertion Failure",
            )
        self.logger.debug(f"Assertion passed: {actual} > {threshold}")

    @allure.step("Assert less than: {threshold}")
    def assert_less_than(
        self, actual: float, threshold: float, message: Optional[str] = None
    ) -> None:
        """
        Assert that a value is less than a threshold.

        Raises:
            AssertionError: If value is not less than threshold
        """
        if not actual < threshold:
            error_msg = message or (
                f"Value is not less than threshold.\n"
                f"Actual: {actual}\nThreshold: {threshold}"
            )
            self._fail(
                error_msg,
                f"Actual: {actual}\nThreshold: {threshold}",
                "Less Than Assertion Failure",
            )
        self.logger.debug(f"Assertion passed: {actual} < {threshold}")

    @allure.step("Assert probability distribution")
    def assert_distribution(
        self, probabilities: np.ndarray, tol: float = 1e-9, message: Optional[str] = None
    ) -> None:
        """
        Assert entries are non-negative and sum to 1 within tol.

        Raises:
            AssertionError: If any entry is negative or the sum is off
        """
        p = np.asarray(probabilities, dtype=float)
        total = float(p.sum())
        if np.any(p < -tol) or abs(total - 1.0) > tol:
            error_msg = message or (
                f"Not a probability distribution: sum {total!r}, min {float(p.min())!r}"
            )
            self._fail(
                error_msg,
                f"Sum: {total!r}\nMin: {float(p.min())!r}\nTolerance: {tol}",
                "Distribution Assertion Failure",
            )
        self.logger.debug(f"Assertion passed: distribution sums to {total:.15f}")


# Global assertion helper instance
assertions = AssertionHelper()


def get_assertion_helper(
    logger: Optional[
        Union[logging.Logger, logging.LoggerAdapter[logging.Logger]]
    ] = None,
) -> AssertionHelper:
    """
    Get an assertion helper instance with optional logger.

    Args:
        logger: Optional logger for assertion logging

    Returns:
        AssertionHelper: Configured assertion helper
    """
    return AssertionHelper(logger)
