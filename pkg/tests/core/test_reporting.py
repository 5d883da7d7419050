"""
Tests for result files and value formatting.
"""

import json

import allure
import numpy as np
import pytest

from src.core.reporting import ResultWriter, format_value


@pytest.mark.unit
@allure.epic("Reporting")
@allure.feature("Formatting")
@allure.title("Values format the same way on every run")
@pytest.mark.parametrize(
    "value, expected",
    [
        (True, "true"),
        (np.bool_(False), "false"),
        (3, "3"),
        (np.int64(-2), "-2"),
        (0.1, "0.10000000000000001"),
        (-0.0, "0"),
        (np.float64(1e-20), "9.9999999999999995e-21"),
        ("g_qu", "g_qu"),
    ],
)
def test_format_value(value, expected) -> None:
    assert format_value(value, 17) == expected


@pytest.mark.unit
@allure.epic("Reporting")
@allure.feature("Result Files")
@allure.title("CSV tables and run metadata land in the output directory")
def test_result_writer(assertions, tmp_path, run_context) -> None:
    out = tmp_path / "nested" / "out"
    writer = ResultWriter(out, svg=False, context=run_context)

    path = writer.write_csv("spectrum.csv", ("k", "P"), [(-1, 0.25), (0, 0.75)])
    assertions.assert_equals(path.read_text(encoding="utf-8"), "k,P\n-1,0.25\n0,0.75\n")

    meta_path = writer.write_meta({"run_id": run_context.run_id, "value": 1.5})
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    assertions.assert_equals(meta["run_id"], run_context.run_id)
    assertions.assert_equals(writer.written, [path, meta_path])

    with allure.step("Plots are skipped without SVG output"):
        assertions.assert_equals(
            writer.plot_bars("p.svg", np.arange(3), np.ones(3), "k", "P"), None
        )
        assertions.assert_equals((out / "p.svg").exists(), False)


@pytest.mark.unit
@allure.epic("Reporting")
@allure.feature("Result Files")
@allure.title("SVG plots render when enabled")
def test_svg_plots(assertions, tmp_path, allure_reporter) -> None:
    writer = ResultWriter(tmp_path, svg=True)
    bars = writer.plot_bars("bars.svg", np.arange(-2, 3), np.full(5, 0.2), "k", "P_k")
    heat = writer.plot_heatmap("heat.svg", np.eye(3), (-0.5, 2.5, -0.5, 2.5), "k", "n")
    line = writer.plot_line("line.svg", np.linspace(0, 1, 5), np.arange(5.0), "phi", "S")

    for path in (bars, heat, line):
        assertions.assert_equals(path.read_text(encoding="utf-8").lstrip().startswith("<?xml"), True)
    allure_reporter.attach_table(("file",), [(p.name,) for p in writer.written], "Rendered plots")
