"""Minimal SVG rendering of networks, domains, and solved games.

Output is plain SVG markup with deterministic float formatting, so
identical inputs produce byte-identical files. Strategy overlays follow
one convention throughout: traveler edge probability maps to stroke
width, ambusher probability maps to fill opacity.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .netflow import VertexCapNetwork
from .polygeom import AmbushMinCut, PolygonalDomain
from .samplers import SampledGraph


def _fmt(x: float) -> str:
    return f"{float(x):.6g}"


def _attrs(**kwargs) -> str:
    return " ".join(f'{k.replace("_", "-")}="{v}"' for k, v in kwargs.items())


def line(x1, y1, x2, y2, **style) -> str:
    return f"<line {_attrs(x1=_fmt(x1), y1=_fmt(y1), x2=_fmt(x2), y2=_fmt(y2))} {_attrs(**style)} />"


def circle(cx, cy, r, **style) -> str:
    return f"<circle {_attrs(cx=_fmt(cx), cy=_fmt(cy), r=_fmt(r))} {_attrs(**style)} />"


def polygon(points, **style) -> str:
    coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    return f'<polygon points="{coords}" {_attrs(**style)} />'


def document(elements: list[str], viewbox: tuple[float, float, float, float]) -> str:
    x, y, w, h = viewbox
    head = (
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_fmt(x)} {_fmt(y)} {_fmt(w)} {_fmt(h)}" '
        f'width="{_fmt(640)}" height="{_fmt(640 * h / max(w, 1e-9))}">'
    )
    return "\n".join([head, *elements, "</svg>"]) + "\n"


class _Frame:
    """World-to-view transform flipping the y axis."""

    def __init__(self, x0, y0, x1, y1, margin=1.0):
        self.x0, self.y1 = x0 - margin, y1 + margin
        self.w = (x1 - x0) + 2 * margin
        self.h = (y1 - y0) + 2 * margin

    def pt(self, x, y):
        return x, self.y1 - y

    @property
    def viewbox(self):
        return (self.x0, 0.0, self.w, self.h)


def _domain_elements(domain: PolygonalDomain, frame: _Frame) -> list[str]:
    parts = [
        polygon(
            [frame.pt(*v) for v in domain.outer],
            fill="#fcfcf8", stroke="#333333", stroke_width=0.06,
        )
    ]
    for hole in domain.holes:
        parts.append(
            polygon([frame.pt(*v) for v in hole], fill="#8d8d8d", stroke="none")
        )
    for seg, color in ((domain.source_segment, "#2f7ed8"), (domain.sink_segment, "#16405f")):
        (x1, y1), (x2, y2) = seg
        parts.append(
            line(*frame.pt(x1, y1), *frame.pt(x2, y2), stroke=color, stroke_width=0.18)
        )
    return parts


def render_domain(
    domain: PolygonalDomain,
    cut: AmbushMinCut | None = None,
    placements: list[tuple[np.ndarray, float]] | None = None,
) -> str:
    """Domain outline with the sealing cut (dashed) and ambush points as
    reach-radius circles."""
    frame = _Frame(*domain.bbox)
    parts = _domain_elements(domain, frame)
    if cut is not None:
        for (a, b) in cut.segments:
            parts.append(
                line(
                    *frame.pt(a[0], a[1]), *frame.pt(b[0], b[1]),
                    stroke="#c02020", stroke_width=0.07,
                    stroke_dasharray="0.25,0.18",
                )
            )
    if placements:
        reach = cut.reach if cut is not None else 0.3
        for point, prob in placements:
            x, y = frame.pt(point[0], point[1])
            parts.append(
                circle(
                    x, y, reach, fill="#c02020", fill_opacity=_fmt(min(prob * 2, 0.8)),
                    stroke="#c02020", stroke_width=0.03,
                )
            )
    return document(parts, frame.viewbox)


def _layered_layout(net: VertexCapNetwork) -> dict[int, tuple[float, float]]:
    """Breadth-first layering from the source; good enough to read."""
    depth = {net.source: 0}
    queue = deque([net.source])
    while queue:
        u = queue.popleft()
        for v in net.successors(u):
            if v not in depth:
                depth[v] = depth[u] + 1
                queue.append(v)
    for v in sorted(net.vertices):
        depth.setdefault(v, (max(depth.values()) + 1) if depth else 0)
    layers: dict[int, list[int]] = {}
    for v, d in depth.items():
        layers.setdefault(d, []).append(v)
    coords = {}
    for d, members in layers.items():
        for i, v in enumerate(sorted(members)):
            coords[v] = (2.0 * d, -(len(members) - 1) / 2.0 + i)
    return coords


def render_network(
    net: VertexCapNetwork,
    p: dict | None = None,
    q: dict | None = None,
) -> str:
    """Network with edge widths proportional to traveler probability and
    vertex shading proportional to ambush probability."""
    coords = _layered_layout(net)
    xs = [c[0] for c in coords.values()]
    ys = [c[1] for c in coords.values()]
    frame = _Frame(min(xs), min(ys), max(xs), max(ys))
    parts = []
    for u, v in sorted(net.edges):
        width = 0.02 + 0.25 * (p.get((u, v), 0.0) if p else 0.15)
        parts.append(
            line(
                *frame.pt(*coords[u]), *frame.pt(*coords[v]),
                stroke="#2f7ed8", stroke_width=_fmt(width),
            )
        )
    for v in sorted(net.vertices):
        x, y = frame.pt(*coords[v])
        opacity = min(q.get(v, 0.0), 1.0) if q else 0.0
        parts.append(
            circle(x, y, 0.22, fill="#ffffff", stroke="#333333", stroke_width=0.04)
        )
        if opacity > 0:
            parts.append(circle(x, y, 0.22, fill="#c02020", fill_opacity=_fmt(opacity)))
        parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y + 0.07)}" font-size="0.2" '
            f'text-anchor="middle">{v}</text>'
        )
    return document(parts, frame.viewbox)


def render_scag(
    domain: PolygonalDomain,
    graph: SampledGraph,
    p: dict | None = None,
    q: dict | None = None,
    sites: dict | None = None,
    reach: float | None = None,
) -> str:
    """Sampled game overlay: graph edges weighted by traveler flow and
    reach zones shaded by ambush probability."""
    frame = _Frame(*domain.bbox)
    parts = _domain_elements(domain, frame)
    if sites and q and reach:
        for k in sorted(sites):
            prob = q.get(k, 0.0)
            if prob <= 1e-9:
                continue
            x, y = frame.pt(*sites[k])
            parts.append(
                circle(
                    x, y, reach, fill="#c02020",
                    fill_opacity=_fmt(min(3.0 * prob, 0.85)),
                    stroke="none",
                )
            )
    for u, v in sorted(graph.edges):
        flow = p.get((u, v), 0.0) if p else 0.0
        if p is not None and flow <= 1e-9:
            continue
        width = 0.015 + 0.3 * flow
        parts.append(
            line(
                *frame.pt(*graph.points[u]), *frame.pt(*graph.points[v]),
                stroke="#2f7ed8", stroke_width=_fmt(width), stroke_linecap="round",
            )
        )
    for i in sorted(graph.points):
        x, y = frame.pt(*graph.points[i])
        parts.append(circle(x, y, 0.045, fill="#555555", stroke="none"))
    return document(parts, frame.viewbox)
