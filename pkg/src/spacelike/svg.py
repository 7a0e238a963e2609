"""Minimal SVG heatmaps of grid quantities.

One rectangle per node, a linear blue-white-red color map between the finite
minimum and maximum, and a legend bar labelled with both.  NaN nodes are left
blank.  Output is plain text and deterministic.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

# (position, r, g, b); linear interpolation between stops
_STOPS = np.array(
    [
        [0.0, 49, 54, 149],
        [0.25, 116, 173, 209],
        [0.5, 247, 247, 247],
        [0.75, 244, 109, 67],
        [1.0, 165, 0, 38],
    ]
)


def colormap(t):
    """RGB triples (ints in 0..255) for ``t`` in [0, 1]."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    rgb = [np.interp(t, _STOPS[:, 0], _STOPS[:, c]) for c in (1, 2, 3)]
    return np.rint(np.stack(rgb, axis=-1)).astype(int)


def _hex(rgb):
    return "#%02x%02x%02x" % tuple(int(c) for c in rgb)


def heatmap(values, title="", cell=6, path=None):
    """Render a ``(nx, ny)`` grid, ``x`` to the right and ``y`` upward.

    Returns the SVG text and writes it to ``path`` when given.
    """
    values = np.asarray(values, dtype=float)
    nx, ny = values.shape
    finite = np.isfinite(values)
    lo = float(values[finite].min()) if finite.any() else 0.0
    hi = float(values[finite].max()) if finite.any() else 0.0
    span = hi - lo if hi > lo else 1.0

    w, hgt = nx * cell, ny * cell
    legend_w = 70
    top = 24
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w + legend_w + 20}" '
        f'height="{hgt + top + 10}" font-family="sans-serif" font-size="11">',
        f'<text x="4" y="15">{escape(title)}</text>',
        f'<g transform="translate(4,{top})" shape-rendering="crispEdges">',
    ]
    colors = colormap(np.where(finite, (values - lo) / span, 0.0))
    for i in range(nx):
        for j in range(ny):
            if finite[i, j]:
                out.append(
                    f'<rect x="{i * cell}" y="{(ny - 1 - j) * cell}" width="{cell}" '
                    f'height="{cell}" fill="{_hex(colors[i, j])}"/>'
                )
    out.append("</g>")

    # legend: vertical bar, max on top
    lx, steps = w + 14, 32
    bar = hgt / steps
    for k in range(steps):
        t = 1.0 - k / (steps - 1)
        out.append(
            f'<rect x="{lx}" y="{top + k * bar:.3f}" width="14" height="{bar + 0.5:.3f}" '
            f'fill="{_hex(colormap(t))}"/>'
        )
    out.append(f'<text x="{lx + 18}" y="{top + 9}">max {hi:.4g}</text>')
    out.append(f'<text x="{lx + 18}" y="{top + hgt}">min {lo:.4g}</text>')
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
