"""SVG rendering of instances and solutions."""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .model import Instance, Solution

_COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"]
_SCALE = 80.0
_MARGIN = 60.0


def render_svg(instance: Instance, solution: Solution | None, path: str) -> None:
    """Vertices as labeled circles, edges as lines, one colored polyline per
    agent trajectory annotated with event times, agents drawn to diameter
    scale.  An empty or missing solution yields a graph-only picture."""
    g = instance.graph
    xs = [g.position(v).x for v in g.vertex_ids]
    ys = [g.position(v).y for v in g.vertex_ids]
    pad = max((a.diameter for a in instance.agents), default=0.2) + 0.4
    x0, y1 = min(xs) - pad, max(ys) + pad

    def to_px(x: float, y: float) -> tuple[float, float]:
        return (_MARGIN + (x - x0) * _SCALE, _MARGIN + (y1 - y) * _SCALE)

    width = _MARGIN * 2 + (max(xs) + pad - x0) * _SCALE
    height = _MARGIN * 2 + (y1 - (min(ys) - pad)) * _SCALE
    root = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=f"{width:.0f}",
        height=f"{height:.0f}",
        viewBox=f"0 0 {width:.0f} {height:.0f}",
    )
    for u, v in g.edges:
        pu, pv = to_px(*_xy(g, u)), to_px(*_xy(g, v))
        ET.SubElement(
            root, "line",
            x1=f"{pu[0]:.1f}", y1=f"{pu[1]:.1f}", x2=f"{pv[0]:.1f}", y2=f"{pv[1]:.1f}",
            stroke="#bbbbbb", attrib={"stroke-width": "1"},
        )
    for vid in g.vertex_ids:
        cx, cy = to_px(*_xy(g, vid))
        ET.SubElement(
            root, "circle", cx=f"{cx:.1f}", cy=f"{cy:.1f}", r="5",
            fill="#eeeeee", stroke="#333333",
        )
        label = ET.SubElement(
            root, "text", x=f"{cx + 7:.1f}", y=f"{cy - 7:.1f}",
            attrib={"font-size": "11", "fill": "#333333"},
        )
        label.text = str(vid)

    if solution is not None:
        for idx, agent_id in enumerate(sorted(solution.plans)):
            color = _COLORS[idx % len(_COLORS)]
            plan = solution.plans[agent_id]
            diameter = instance.agent(agent_id).diameter
            start_px = to_px(*_xy(g, instance.start[agent_id]))
            ET.SubElement(
                root, "circle",
                cx=f"{start_px[0]:.1f}", cy=f"{start_px[1]:.1f}",
                r=f"{diameter / 2 * _SCALE:.1f}", fill=color, opacity="0.35",
            )
            points = [start_px]
            times = [0.0]
            for ev in plan.events:
                points.append(to_px(*_xy(g, ev.to_v)))
                times.append(ev.interval.end)
            ET.SubElement(
                root, "polyline",
                points=" ".join(f"{px:.1f},{py:.1f}" for px, py in points),
                fill="none", stroke=color,
                attrib={"stroke-width": "2", "stroke-opacity": "0.8"},
            )
            for (px, py), t in zip(points, times):
                mark = ET.SubElement(
                    root, "text",
                    x=f"{px + 4:.1f}", y=f"{py + 12 + 11 * idx:.1f}",
                    attrib={"font-size": "9", "fill": color},
                )
                mark.text = f"t={t:.3f}"

    ET.ElementTree(root).write(path, encoding="unicode", xml_declaration=True)


def _xy(graph, vid: int) -> tuple[float, float]:
    p = graph.position(vid)
    return p.x, p.y
