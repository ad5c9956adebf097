import csv
import io
import math
import re

import pytest

from caperc.output import Axes, emit_csv, emit_svg, svg_coordinates


def test_csv_roundtrip_single_row():
    buf = io.StringIO()
    emit_csv([{"a": 1, "b": "x,y", "c": 0.1, "d": None, "e": True}], buf)
    text = buf.getvalue()
    assert "\r" not in text
    rows = list(csv.DictReader(io.StringIO(text)))
    assert rows == [{"a": "1", "b": "x,y", "c": "0.10000000000000001", "d": "", "e": "true"}]


@pytest.mark.parametrize("x", [0.1, 1 / 3, math.pi * 1e-300, 2.0**60 + 1.5, -5e-324, 123456789.123456789])
def test_floats_are_lossless(x):
    buf = io.StringIO()
    emit_csv([{"v": x}], buf)
    assert float(buf.getvalue().splitlines()[1]) == x


def test_csv_fixed_columns():
    buf = io.StringIO()
    emit_csv([{"b": 2, "a": 1}], buf, columns=["a", "b", "c"])
    assert buf.getvalue() == "a,b,c\n1,2,\n"


def test_csv_empty_without_header():
    with pytest.raises(ValueError):
        emit_csv([], io.StringIO())


def test_svg_log_x_positions():
    pts = [(1e4, 1.0), (1e5, 2.0), (1e6, 4.0)]
    axes = Axes(log_x=True, width=500, height=300, margin=50)
    buf = io.StringIO()
    emit_svg(pts, axes, buf)
    svg = buf.getvalue()
    circles = re.findall(r'<circle class="point" cx="([\d.]+)" cy="([\d.]+)"', svg)
    assert len(circles) == 3
    xs = [float(c[0]) for c in circles]
    ys = [float(c[1]) for c in circles]
    # equal decades -> equal spacing between 50 and 450
    assert xs == pytest.approx([50, 250, 450], abs=1e-3)
    # linear y: 1 -> bottom (250), 4 -> top (50), 2 -> a third of the way up
    assert ys == pytest.approx([250, 250 - 200 / 3, 50], abs=1e-3)
    assert 'data-x="10000"' in svg


def test_svg_rejects_non_positive_log():
    with pytest.raises(ValueError):
        svg_coordinates([(0, 1), (1, 2)], Axes(log_x=True))
