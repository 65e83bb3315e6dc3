import math
import re

import numpy as np
import pytest

from eegconn.connectivity import ConnectivityMatrix, DifferenceMatrix
from eegconn.dsp import get_band
from eegconn.errors import ConfigurationError, InputError
from eegconn.montage import build_region_map
from eegconn.render import (
    NEGATIVE,
    POSITIVE,
    RADIUS,
    SIZE,
    chord_pairs,
    layout,
    render_circular,
    render_svg,
)

THETA = get_band("theta")
LABELS = ["Fp1", "F3", "F4", "C3", "T7", "P3", "O1"]


def diff(values):
    return DifferenceMatrix(LABELS, THETA, "PLV", "a", "b", np.asarray(values, dtype=float))


def zeros():
    return diff(np.zeros((len(LABELS), len(LABELS))))


def chords(svg):
    return re.findall(r'<path class="chord" data-a="([^"]+)" data-b="([^"]+)" d="([^"]+)" '
                      r'stroke="([^"]+)" stroke-width="[^"]+" stroke-opacity="([^"]+)"', svg)


def nodes(svg):
    return {c: (float(x), float(y)) for c, x, y in
            re.findall(r'data-channel="([^"]+)" data-region="[^"]+" cx="([^"]+)" cy="([^"]+)"', svg)}


RM = build_region_map(LABELS)


def test_all_zero_matrix():
    svg = render_svg(zeros(), RM)
    assert svg.startswith("<?xml") and svg.rstrip().endswith("</svg>")
    assert chords(svg) == []
    assert set(nodes(svg)) == set(LABELS)
    for region in ("Prefrontal", "Frontal", "Central", "Temporal", "Parietal", "Occipital"):
        assert f">{region}</text>" in svg


def test_single_chord_at_node_positions():
    v = np.zeros((7, 7))
    v[1, 5] = v[5, 1] = -0.4
    v[0, 6] = v[6, 0] = 0.1
    svg = render_svg(diff(v), RM, top_k=1)
    (a, b, d, color, opacity), = chords(svg)
    assert (a, b) == ("F3", "P3") and color == NEGATIVE and float(opacity) == 1.0
    pts = [float(t) for t in d.replace("M", "").replace("Q", "").split()]
    pos = nodes(svg)
    # chord ends sit just inside each node, on the same radius line
    c = SIZE / 2
    for (x, y), ch in ((pts[0:2], "F3"), (pts[4:6], "P3")):
        nx, ny = pos[ch]
        assert math.atan2(x - c, c - y) == pytest.approx(math.atan2(nx - c, c - ny), abs=0.01)
        assert math.hypot(x - c, y - c) == pytest.approx(RADIUS - 6, abs=0.01)
    assert pts[2:4] == [c, c]


def test_opacity_and_colour():
    v = np.zeros((7, 7))
    v[0, 1] = v[1, 0] = 0.5
    v[2, 3] = v[3, 2] = -0.25
    got = {(a, b): (col, float(op)) for a, b, _, col, op in chords(render_svg(diff(v), RM))}
    assert got == {("F3", "Fp1"): (POSITIVE, 1.0), ("C3", "F4"): (NEGATIVE, 0.5)}


def test_connectivity_matrix_is_neutral():
    v = np.eye(7)
    v[0, 1] = v[1, 0] = 0.7
    m = ConnectivityMatrix(LABELS, THETA, "PLV", "a", v)
    (_, _, _, color, _), = chords(render_svg(m, RM))
    assert color not in (POSITIVE, NEGATIVE)


def test_top_k_and_ties():
    v = np.full((7, 7), 0.3)
    np.fill_diagonal(v, 0)
    got = chord_pairs(diff(v), 3)
    assert [(a, b) for a, b, _ in got] == [("C3", "F3"), ("C3", "F4"), ("C3", "Fp1")]
    assert len(chords(render_svg(diff(v), RM, top_k=5))) == 5


def test_byte_identical(tmp_path, rng):
    v = np.triu(rng.uniform(-1, 1, (7, 7)), 1)
    d = diff(v + v.T)
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    render_circular(d, RM, 10, p1)
    render_circular(d, RM, 10, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_layout_groups_regions_in_order():
    groups, angles = layout(LABELS, RM)
    assert [str(r) for r, _ in groups] == [
        "Prefrontal", "Frontal", "Central", "Temporal", "Parietal", "Occipital"]
    order = sorted(LABELS, key=angles.get)
    assert order == ["Fp1", "F3", "F4", "C3", "T7", "P3", "O1"]


def test_errors():
    with pytest.raises(ConfigurationError):
        render_svg(zeros(), RM, top_k=0)
    with pytest.raises(InputError, match="O1"):
        render_svg(zeros(), build_region_map(LABELS[:-1]))
