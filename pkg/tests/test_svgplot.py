"""SVG figure generation: structure and determinism."""

import xml.etree.ElementTree as ET

from qaplon.svgplot import boxplot, errorbar_plot, scatter, strip_plot


def well_formed(svg_text):
    root = ET.fromstring(svg_text)
    assert root.tag.endswith("svg")
    return root


def test_boxplot_well_formed_and_deterministic():
    groups = {"rl/greedy": [0.5, 0.6, 0.7, 0.65], "uni/greedy": [0.2, 0.3, 0.25]}
    a = boxplot(groups, title="Q by class")
    b = boxplot(groups, title="Q by class")
    assert a == b
    well_formed(a)
    assert "Q by class" in a


def test_strip_plot_contains_points():
    svg = strip_plot({"rl": [1.0, 2.0, 3.0], "uni": [0.5, -0.5]})
    root = well_formed(svg)
    circles = [e for e in root.iter() if e.tag.endswith("circle")]
    assert len(circles) == 5


def test_scatter_with_regression_line():
    svg = scatter([1, 2, 3, 4], [1.1, 1.9, 3.2, 3.8], slope=0.95, intercept=0.1)
    root = well_formed(svg)
    lines = [e for e in root.iter() if e.tag.endswith("line")]
    assert any(e.get("stroke") == "firebrick" for e in lines)


def test_errorbar_plot_two_series():
    svg = errorbar_plot(
        ["5", "6", "7"],
        {"self": ([0.5, 0.4, 0.3], [0.02, 0.02, 0.01]),
         "out": ([0.1, 0.08, 0.05], [0.01, 0.01, 0.01])},
    )
    well_formed(svg)
    assert "self" in svg and "out" in svg
