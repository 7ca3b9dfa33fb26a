"""Deterministic SVG rendering of a layout frame.

Circles are drawn largest-first so small words stay visible inside
clusters; the red fill opacity of each circle is proportional to its
normalized stress. Output is byte-stable for identical frames.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .layout import Viewport
from .session import Frame

FILL = "#cc2200"
STROKE = "#444444"
MAX_FILL_OPACITY = 0.6
MIN_FONT = 8.0


def _fmt(value: float) -> str:
    return f"{value:.3f}"


def frame_to_svg(frame: Frame, viewport: Viewport) -> str:
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        (
            f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{_fmt(viewport.width)}" height="{_fmt(viewport.height)}" '
            f'viewBox="{_fmt(viewport.x_min)} {_fmt(viewport.y_min)} '
            f'{_fmt(viewport.width)} {_fmt(viewport.height)}">'
        ),
        (
            f'<rect x="{_fmt(viewport.x_min)}" y="{_fmt(viewport.y_min)}" '
            f'width="{_fmt(viewport.width)}" height="{_fmt(viewport.height)}" fill="#ffffff"/>'
        ),
    ]
    ordered = sorted(frame.agents, key=lambda a: (-a.r, a.id))
    for agent in ordered:
        opacity = MAX_FILL_OPACITY * agent.stress
        parts.append(
            f'<circle cx="{_fmt(agent.x)}" cy="{_fmt(agent.y)}" r="{_fmt(agent.r)}" '
            f'fill="{FILL}" fill-opacity="{_fmt(opacity)}" stroke="{STROKE}" stroke-width="1"/>'
        )
    for agent in ordered:
        font = max(MIN_FONT, 0.45 * agent.r)
        parts.append(
            f'<text x="{_fmt(agent.x)}" y="{_fmt(agent.y)}" text-anchor="middle" '
            f'dominant-baseline="central" font-family="sans-serif" '
            f'font-size="{_fmt(font)}">{escape(agent.label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
