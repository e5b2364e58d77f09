"""Headless SVG emitter: overhead trajectories plus a delta-q trace."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Optional
from xml.sax.saxutils import escape

from .runner import read_trace

SCALE = 180.0  # px per metre
MARGIN = 40.0
DQ_HEIGHT = 160.0
ROBOT_COLOUR = "#1f5fbf"
HUMAN_COLOURS = ("#c0392b", "#e67e22", "#8e44ad")


class PlotError(ValueError):
    pass


class _Svg:
    def __init__(self, width: float, height: float):
        self.width, self.height = width, height
        self.parts: list[str] = []

    def add(self, s: str) -> None:
        self.parts.append(s)

    def line(self, x1, y1, x2, y2, stroke="#000", width=1.0, extra=""):
        self.add(f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
                 f'stroke="{stroke}" stroke-width="{width}" {extra}/>')

    def polyline(self, pts, stroke, width=1.5, extra=""):
        coords = " ".join(f"{x:.1f},{y:.1f}" for x, y in pts)
        self.add(f'<polyline points="{coords}" fill="none" stroke="{stroke}" stroke-width="{width}" {extra}/>')

    def circle(self, cx, cy, r, fill="none", stroke="none", extra=""):
        self.add(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="{r:.1f}" fill="{fill}" stroke="{stroke}" {extra}/>')

    def text(self, x, y, s, size=12, extra=""):
        self.add(f'<text x="{x:.1f}" y="{y:.1f}" font-family="sans-serif" font-size="{size}" {extra}>'
                 f'{escape(s)}</text>')

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{self.width:.0f}" '
                f'height="{self.height:.0f}" viewBox="0 0 {self.width:.0f} {self.height:.0f}">')
        return "\n".join([head, *self.parts, "</svg>"]) + "\n"


def render_svg(trace_text: str, reports: list[dict], scenario_meta: Optional[dict] = None,
               enforce_threshold: float = 0.2) -> str:
    rows = read_trace(trace_text)
    ticks = sorted({r["tick"] for r in rows})
    if len(ticks) < 2:
        raise PlotError("trace holds fewer than two ticks; nothing to plot")

    meta = scenario_meta or {}
    arena = meta.get("arena", {})
    all_x = [r["pos"].x for r in rows]
    all_y = [r["pos"].y for r in rows]
    width_m = arena.get("width", max(all_x) + 0.2)
    height_m = arena.get("height", max(all_y) + 0.2)

    arena_w, arena_h = width_m * SCALE, height_m * SCALE
    svg = _Svg(arena_w + 2 * MARGIN, arena_h + DQ_HEIGHT + 3 * MARGIN)

    def px(x: float, y: float) -> tuple[float, float]:
        return MARGIN + x * SCALE, MARGIN + (height_m - y) * SCALE

    svg.add(f'<rect x="{MARGIN}" y="{MARGIN}" width="{arena_w:.1f}" height="{arena_h:.1f}" '
            f'fill="#fafafa" stroke="#333"/>')

    radius = meta.get("params", {}).get("proximity_radius", 0.5)
    for g in meta.get("goals", []):
        cx, cy = px(*g["position"])
        colour = "#d62728" if g.get("dangerous") else "#2ca02c"
        svg.circle(cx, cy, radius * SCALE, stroke=colour, extra='stroke-dasharray="4 4"')
        svg.circle(cx, cy, 8, fill=colour)
        svg.text(cx + 10, cy - 10, g["id"] + (" (danger)" if g.get("dangerous") else ""))

    roles = {a["id"]: a.get("role") for a in meta.get("agents", [])}
    paths: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        paths.setdefault(r["agent_id"], []).append(px(r["pos"].x, r["pos"].y))
    human_idx = 0
    for agent_id, pts in paths.items():
        if roles.get(agent_id) == "ethical-robot" or (not roles and agent_id == "robot"):
            colour = ROBOT_COLOUR
        else:
            colour = HUMAN_COLOURS[human_idx % len(HUMAN_COLOURS)]
            human_idx += 1
        svg.polyline(pts, colour, 2.0)
        svg.add(f'<rect x="{pts[0][0] - 5:.1f}" y="{pts[0][1] - 5:.1f}" width="10" height="10" '
                f'fill="none" stroke="{colour}"/>')
        svg.add(f'<rect x="{pts[-1][0] - 5:.1f}" y="{pts[-1][1] - 5:.1f}" width="10" height="10" '
                f'fill="{colour}"/>')
        svg.text(pts[-1][0] + 8, pts[-1][1] + 16, agent_id, 11, f'fill="{colour}"')

    for rep in reports:
        change = rep.get("goal_change")
        if rep["decision"]["action"] == "enforce" and change and change["target"] is not None:
            cx, cy = px(*change["target"])
            svg.circle(cx, cy, 4, fill="#f1c40f", stroke="#7f6000")

    # Delta-q against governor cycle.
    top = 2 * MARGIN + arena_h
    svg.add(f'<rect x="{MARGIN}" y="{top:.1f}" width="{arena_w:.1f}" height="{DQ_HEIGHT}" '
            f'fill="#fff" stroke="#333"/>')
    svg.text(MARGIN, top - 6, "delta q per governor cycle", 12)
    if reports:
        cycles = [rep["cycle"] for rep in reports]
        dq = [rep["delta_q"] for rep in reports]
        hi = max(max(dq), enforce_threshold) * 1.1 or 1.0
        c0, c1 = min(cycles), max(cycles)
        span = (c1 - c0) or 1

        def qpx(c: float, v: float) -> tuple[float, float]:
            return MARGIN + (c - c0) / span * arena_w, top + DQ_HEIGHT - v / hi * DQ_HEIGHT

        ty = qpx(c0, enforce_threshold)[1]
        svg.line(MARGIN, ty, MARGIN + arena_w, ty, "#999", 1, 'stroke-dasharray="3 3"')
        svg.polyline([qpx(c, v) for c, v in zip(cycles, dq)], "#333", 1.5)
        svg.text(MARGIN + arena_w - 60, top + DQ_HEIGHT + 16, f"cycle {c1}", 10)
        svg.text(MARGIN - 30, top + 10, f"{hi:.2f}", 10)
    return svg.render()


def plot(trace_path: Path | str, report_path: Path | str, output_path: Path | str,
         scenario_meta: Optional[dict] = None) -> Path:
    """Write the SVG; nothing is written when the inputs cannot be plotted."""
    trace_path, report_path, output_path = Path(trace_path), Path(report_path), Path(output_path)
    try:
        trace_text = trace_path.read_text()
    except OSError as exc:
        raise PlotError(f"cannot read trace {trace_path}: {exc.strerror or exc}") from exc
    reports = []
    if report_path.exists():
        for n, line in enumerate(report_path.read_text().splitlines(), start=1):
            if line.strip():
                try:
                    reports.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise PlotError(f"malformed report line {n} in {report_path}: {exc}") from exc
    threshold = (scenario_meta or {}).get("params", {}).get("enforce_threshold", 0.2)
    try:
        text = render_svg(trace_text, reports, scenario_meta, threshold)
    except PlotError:
        raise
    except ValueError as exc:
        raise PlotError(f"malformed trace {trace_path}: {exc}") from exc

    fd, tmp = tempfile.mkstemp(dir=output_path.parent, suffix=".svg.tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, output_path)
    return output_path
