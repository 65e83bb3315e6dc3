"""Circular connectivity diagrams as standalone SVG.

Channels sit on a circle grouped by region (fixed region order, labels
sorted within a region) and coloured by region. The ``top_k`` strongest
pairs by absolute value are drawn as chords through the centre with
opacity proportional to ``|value| / max |value|``. Output is plain text
built from fixed-precision numbers, so identical input gives identical
bytes.
"""
from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .connectivity import DifferenceMatrix
from .errors import ConfigurationError, InputError
from .montage import REGION_ORDER, RegionMap

REGION_COLORS = {
    "Prefrontal": "#9467bd",
    "Frontal": "#1f77b4",
    "Central": "#2ca02c",
    "Temporal": "#ff7f0e",
    "Parietal": "#d62728",
    "Occipital": "#8c564b",
}
POSITIVE = "#b2182b"
NEGATIVE = "#2166ac"
NEUTRAL = "#333333"

SIZE = 800
RADIUS = 300.0
GAP_SLOTS = 2


def _f(x):
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def layout(channels, rm: RegionMap):
    """Angle (radians, clockwise from 12 o'clock) for each channel."""
    groups = []
    for region in REGION_ORDER:
        members = sorted(c for c in channels if rm[c] == region)
        if members:
            groups.append((region, members))
    n_slots = sum(len(m) for _, m in groups) + GAP_SLOTS * len(groups)
    angles, slot = {}, 0
    for _, members in groups:
        for c in members:
            angles[c] = 2 * math.pi * slot / max(n_slots, 1)
            slot += 1
        slot += GAP_SLOTS
    return groups, angles


def _xy(angle, r=RADIUS):
    c = SIZE / 2
    return c + r * math.sin(angle), c - r * math.cos(angle)


def chord_pairs(m, top_k):
    """Strongest nonzero pairs by |value|, ties broken by label pair."""
    iu, ju = np.triu_indices(len(m.channels), 1)
    rows = []
    for i, j in zip(iu.tolist(), ju.tolist()):
        v = float(m.values[i, j])
        if v != 0.0:
            a, b = sorted((m.channels[i], m.channels[j]))
            rows.append((-abs(v), a, b, v))
    rows.sort()
    return [(a, b, v) for _, a, b, v in rows[:top_k]]


def render_svg(m, rm: RegionMap, top_k: int = 200, title: str | None = None) -> str:
    if top_k < 1:
        raise ConfigurationError(f"top_k must be at least 1, got {top_k}")
    missing = rm.missing(m.channels)
    if missing:
        raise InputError(f"channels without a region: {', '.join(missing)}")
    groups, angles = layout(m.channels, rm)
    chords = chord_pairs(m, top_k)
    vmax = max((abs(v) for _, _, v in chords), default=0.0)
    is_diff = isinstance(m, DifferenceMatrix)
    if title is None:
        if is_diff:
            cond = f"{m.condition_a} - {m.condition_b}"
        else:
            cond = f"{m.condition}"
        title = f"{m.metric} {m.band.name} {cond}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect width="{SIZE}" height="{SIZE}" fill="#ffffff"/>',
        f'<text x="{SIZE // 2}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{escape(title)}</text>',
        '<g id="chords" fill="none">',
    ]
    # weakest first so strong chords are painted on top
    for a, b, v in reversed(chords):
        x1, y1 = _xy(angles[a], RADIUS - 6)
        x2, y2 = _xy(angles[b], RADIUS - 6)
        color = (POSITIVE if v > 0 else NEGATIVE) if is_diff else NEUTRAL
        opacity = abs(v) / vmax if vmax > 0 else 0.0
        out.append(
            f'<path class="chord" data-a="{escape(a)}" data-b="{escape(b)}" '
            f'd="M {_f(x1)} {_f(y1)} Q {_f(SIZE / 2)} {_f(SIZE / 2)} {_f(x2)} {_f(y2)}" '
            f'stroke="{color}" stroke-width="1.5" stroke-opacity="{opacity:.3f}"/>'
        )
    out.append("</g>")
    out.append('<g id="nodes" font-family="sans-serif" font-size="7">')
    for region, members in groups:
        color = REGION_COLORS[str(region)]
        for c in members:
            x, y = _xy(angles[c])
            lx, ly = _xy(angles[c], RADIUS + 14)
            out.append(
                f'<circle class="node" data-channel="{escape(c)}" data-region="{region}" '
                f'cx="{_f(x)}" cy="{_f(y)}" r="4" fill="{color}"/>'
            )
            out.append(
                f'<text x="{_f(lx)}" y="{_f(ly)}" text-anchor="middle" '
                f'dominant-baseline="middle">{escape(c)}</text>'
            )
    out.append("</g>")
    out.append('<g id="legend" font-family="sans-serif" font-size="12">')
    for k, (region, _) in enumerate(groups):
        y = 44 + 18 * k
        out.append(f'<rect x="12" y="{y}" width="12" height="12" fill="{REGION_COLORS[str(region)]}"/>')
        out.append(f'<text x="30" y="{y + 10}">{region}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_circular(m, rm: RegionMap, top_k: int = 200, path=None) -> str:
    """Render ``m`` and optionally write it to ``path``; returns the SVG text."""
    svg = render_svg(m, rm, top_k)
    if path is not None:
        Path(path).write_text(svg)
    return svg
