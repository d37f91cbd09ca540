"""Self-contained SVG line charts, deterministic byte-for-byte.

No plotting dependency: charts are simple polylines with linear or log
axes, optional point markers, and shaded bands. Numbers are formatted with
fixed precision so the same data always yields the same file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

PALETTE = ("#d62728", "#1f77b4", "#2c2c2c", "#2ca02c", "#9467bd",
           "#ff7f0e", "#8c564b", "#17becf")


@dataclass
class Series:
    label: str
    x: list
    y: list                     # None/NaN entries split the line
    color: str | None = None
    markers: bool = False
    dashed: bool = False


@dataclass
class Band:
    x: list
    low: list
    high: list
    color: str = "#1f77b4"
    opacity: float = 0.2


@dataclass
class Chart:
    series: list
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    log_x: bool = False
    log_y: bool = False
    bands: list = field(default_factory=list)


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _tick_label(value: float) -> str:
    if value == 0:
        return "0"
    if abs(value) >= 1000 or abs(value) < 0.01:
        return f"{value:.0e}".replace("e-0", "e-").replace("e+0", "e")
    text = f"{value:.3f}".rstrip("0").rstrip(".")
    return text or "0"


def _linear_ticks(lo: float, hi: float, n: int = 6) -> list:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    magnitude = 10 ** math.floor(math.log10(raw))
    for mult in (1, 2, 2.5, 5, 10):
        step = mult * magnitude
        if step >= raw:
            break
    start = math.ceil(lo / step) * step
    ticks = []
    value = start
    while value <= hi + step * 1e-9:
        ticks.append(round(value, 10))
        value += step
    return ticks


def _log_ticks(lo: float, hi: float) -> list:
    first = math.floor(math.log10(lo))
    last = math.ceil(math.log10(hi))
    return [10.0 ** e for e in range(first, last + 1)]


def _finite(values, log: bool):
    out = []
    for v in values:
        if v is None:
            continue
        v = float(v)
        if math.isnan(v) or math.isinf(v) or (log and v <= 0):
            continue
        out.append(v)
    return out


def render_chart(chart: Chart, width: int = 720, height: int = 460) -> str:
    margin_left, margin_right, margin_top, margin_bottom = 64, 16, 34, 46
    plot_w = width - margin_left - margin_right
    plot_h = height - margin_top - margin_bottom

    xs: list = []
    ys: list = []
    for s in chart.series:
        xs.extend(_finite(s.x, chart.log_x))
        ys.extend(_finite(s.y, chart.log_y))
    for b in chart.bands:
        xs.extend(_finite(b.x, chart.log_x))
        ys.extend(_finite(b.low, chart.log_y) + _finite(b.high, chart.log_y))
    if not xs or not ys:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if not chart.log_y:
        pad = (y_hi - y_lo) * 0.05 or 1.0
        y_lo, y_hi = y_lo - pad, y_hi + pad
    if not chart.log_x and x_hi == x_lo:
        x_hi = x_lo + 1.0

    def sx(v: float) -> float:
        if chart.log_x:
            t = (math.log10(v) - math.log10(x_lo)) / (math.log10(x_hi) - math.log10(x_lo) or 1.0)
        else:
            t = (v - x_lo) / (x_hi - x_lo)
        return margin_left + t * plot_w

    def sy(v: float) -> float:
        if chart.log_y:
            t = (math.log10(v) - math.log10(y_lo)) / (math.log10(y_hi) - math.log10(y_lo) or 1.0)
        else:
            t = (v - y_lo) / (y_hi - y_lo)
        return margin_top + (1.0 - t) * plot_h

    parts = [f'<g font-family="sans-serif" font-size="12">']
    parts.append(
        f'<rect x="{margin_left}" y="{margin_top}" width="{plot_w}" height="{plot_h}" '
        f'fill="#fdfdfd" stroke="#999"/>')
    if chart.title:
        parts.append(f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" '
                     f'font-size="14">{_escape(chart.title)}</text>')

    x_ticks = _log_ticks(x_lo, x_hi) if chart.log_x else _linear_ticks(x_lo, x_hi)
    y_ticks = _log_ticks(y_lo, y_hi) if chart.log_y else _linear_ticks(y_lo, y_hi)
    for t in x_ticks:
        if not (x_lo <= t <= x_hi):
            continue
        px = sx(t)
        parts.append(f'<line x1="{_fmt(px)}" y1="{margin_top}" x2="{_fmt(px)}" '
                     f'y2="{margin_top + plot_h}" stroke="#e3e3e3"/>')
        parts.append(f'<text x="{_fmt(px)}" y="{margin_top + plot_h + 16}" '
                     f'text-anchor="middle">{_tick_label(t)}</text>')
    for t in y_ticks:
        if not (y_lo <= t <= y_hi):
            continue
        py = sy(t)
        parts.append(f'<line x1="{margin_left}" y1="{_fmt(py)}" '
                     f'x2="{margin_left + plot_w}" y2="{_fmt(py)}" stroke="#e3e3e3"/>')
        parts.append(f'<text x="{margin_left - 6}" y="{_fmt(py + 4)}" '
                     f'text-anchor="end">{_tick_label(t)}</text>')
    if chart.xlabel:
        parts.append(f'<text x="{margin_left + plot_w / 2:.0f}" y="{height - 8}" '
                     f'text-anchor="middle">{_escape(chart.xlabel)}</text>')
    if chart.ylabel:
        parts.append(f'<text x="14" y="{margin_top + plot_h / 2:.0f}" text-anchor="middle" '
                     f'transform="rotate(-90 14 {margin_top + plot_h / 2:.0f})">'
                     f'{_escape(chart.ylabel)}</text>')

    for b in chart.bands:
        points = []
        upper = [(x, h) for x, h in zip(b.x, b.high) if _ok(x, h, chart)]
        lower = [(x, l) for x, l in zip(b.x, b.low) if _ok(x, l, chart)]
        for x, v in upper + lower[::-1]:
            points.append(f"{_fmt(sx(x))},{_fmt(sy(v))}")
        if points:
            parts.append(f'<polygon points="{" ".join(points)}" fill="{b.color}" '
                         f'opacity="{b.opacity}"/>')

    legend_y = margin_top + 14
    for i, s in enumerate(chart.series):
        color = s.color or PALETTE[i % len(PALETTE)]
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        segment: list = []
        segments = [segment]
        for x, v in zip(s.x, s.y):
            if _ok(x, v, chart):
                segment.append(f"{_fmt(sx(float(x)))},{_fmt(sy(float(v)))}")
            elif segment:
                segment = []
                segments.append(segment)
        for seg in segments:
            if len(seg) > 1:
                parts.append(f'<polyline points="{" ".join(seg)}" fill="none" '
                             f'stroke="{color}" stroke-width="1.6"{dash}/>')
        if s.markers:
            for x, v in zip(s.x, s.y):
                if _ok(x, v, chart):
                    parts.append(f'<circle cx="{_fmt(sx(float(x)))}" '
                                 f'cy="{_fmt(sy(float(v)))}" r="2.4" fill="{color}"/>')
        if s.label:
            lx = margin_left + plot_w - 150
            parts.append(f'<line x1="{lx}" y1="{legend_y - 4}" x2="{lx + 22}" '
                         f'y2="{legend_y - 4}" stroke="{color}" stroke-width="2"{dash}/>')
            parts.append(f'<text x="{lx + 28}" y="{legend_y}">{_escape(s.label)}</text>')
            legend_y += 16
    parts.append("</g>")
    return "\n".join(parts)


def _ok(x, v, chart: Chart) -> bool:
    if x is None or v is None:
        return False
    x, v = float(x), float(v)
    if math.isnan(x) or math.isnan(v):
        return False
    if chart.log_x and x <= 0:
        return False
    if chart.log_y and v <= 0:
        return False
    return True


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_svg(path, charts, width: int = 720, height: int = 460) -> None:
    """Write one or more charts stacked vertically into a single SVG file."""
    if isinstance(charts, Chart):
        charts = [charts]
    total_h = height * len(charts)
    body = []
    for i, chart in enumerate(charts):
        body.append(f'<g transform="translate(0 {i * height})">')
        body.append(render_chart(chart, width=width, height=height))
        body.append("</g>")
    svg = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
           f'height="{total_h}" viewBox="0 0 {width} {total_h}">\n'
           + "\n".join(body) + "\n</svg>\n")
    with open(path, "w", encoding="utf-8") as out:
        out.write(svg)
