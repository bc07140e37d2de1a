"""Orthographic SVG rendering of trajectories on the sphere."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .sphere import normalize

VIEWBOX = 1000.0
RADIUS = 450.0
HIDDEN_OPACITY = 0.25

COLORS = {
    "green": "#1a9850",
    "blue": "#2166ac",
    "black": "#111111",
    "red": "#d7301f",
    "purple": "#762a83",
    "orange": "#f46d43",
}


def view_basis(view_axis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Screen-right, screen-up and toward-viewer unit vectors."""
    w = normalize(view_axis)
    up_hint = np.array([0.0, 0.0, 1.0]) if abs(w[2]) < 0.99 else np.array([0.0, 1.0, 0.0])
    right = normalize(np.cross(up_hint, w))
    up = np.cross(w, right)
    return right, up, w


def project(points: np.ndarray, view_axis) -> tuple[np.ndarray, np.ndarray]:
    """Screen coordinates and a visibility mask for points on the unit sphere."""
    right, up, w = view_basis(view_axis)
    pts = np.atleast_2d(points)
    x = VIEWBOX / 2 + RADIUS * (pts @ right)
    y = VIEWBOX / 2 - RADIUS * (pts @ up)
    return np.stack([x, y], axis=1), (pts @ w) >= 0.0


def _runs(mask: np.ndarray):
    start = 0
    for i in range(1, len(mask) + 1):
        if i == len(mask) or mask[i] != mask[start]:
            yield start, i, bool(mask[start])
            start = i


def _path(xy: np.ndarray) -> str:
    head = f"M{xy[0, 0]:.2f},{xy[0, 1]:.2f}"
    return head + "".join(f" L{x:.2f},{y:.2f}" for x, y in xy[1:])


def render(trajectories, markers=(), view_axis=(1.0, 0.6, 0.8), title: str = "") -> str:
    """SVG document for ``(points, color)`` trajectories and ``(point, color)`` markers."""
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {VIEWBOX:.0f} {VIEWBOX:.0f}" '
        f'width="{VIEWBOX:.0f}" height="{VIEWBOX:.0f}">',
        f'<rect width="{VIEWBOX:.0f}" height="{VIEWBOX:.0f}" fill="white"/>',
        f'<circle cx="{VIEWBOX / 2:.0f}" cy="{VIEWBOX / 2:.0f}" r="{RADIUS:.0f}" '
        'fill="none" stroke="#888888" stroke-width="1.5"/>',
    ]
    if title:
        out.append(f'<text x="20" y="30" font-family="sans-serif" font-size="20">{escape(title)}</text>')
    for points, color in trajectories:
        pts = np.asarray(points, dtype=float)
        if len(pts) < 2:
            continue
        xy, vis = project(pts, view_axis)
        stroke = COLORS.get(color, color)
        for a, b, visible in _runs(vis):
            # overlap by one sample so visible and hidden pieces join up
            seg = xy[max(a - 1, 0):b]
            if len(seg) < 2:
                continue
            opacity = 1.0 if visible else HIDDEN_OPACITY
            out.append(
                f'<path d="{_path(seg)}" fill="none" stroke="{stroke}" '
                f'stroke-width="1.2" stroke-opacity="{opacity:.2f}"/>'
            )
    for point, color in markers:
        xy, vis = project(np.asarray(point, dtype=float), view_axis)
        opacity = 1.0 if vis[0] else HIDDEN_OPACITY
        out.append(
            f'<circle cx="{xy[0, 0]:.2f}" cy="{xy[0, 1]:.2f}" r="5" '
            f'fill="{COLORS.get(color, color)}" fill-opacity="{opacity:.2f}"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def great_circle(normal, samples: int = 181) -> np.ndarray:
    """Points on the great circle orthogonal to ``normal`` (for reference grids)."""
    n = normalize(normal)
    a = normalize(np.cross(n, [1.0, 0.0, 0.0] if abs(n[0]) < 0.9 else [0.0, 1.0, 0.0]))
    b = np.cross(n, a)
    t = np.linspace(0.0, 2.0 * math.pi, samples)
    return np.outer(np.cos(t), a) + np.outer(np.sin(t), b)
