"""Self-contained SVG charts for sweep results (no plotting dependency).

Line charts plot mean stopping time against the sweep axis with +/-1
standard-error bars; delta sweeps use ``log10(1/delta)`` on the x axis.
Bar charts show mean pulls per arm for single-point allocation presets.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from lucbh.harness import SweepResult

WIDTH, HEIGHT = 800, 500
LEFT, RIGHT, TOP, BOTTOM = 80, 170, 40, 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")

_AXIS_LABELS = {
    "delta": "log(1/δ)",
    "t_s": "offline samples per arm T_S",
    "v_suboptimal": "bias bound V on suboptimal arms",
    "v_all": "bias bound V (all arms)",
}


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    first = math.ceil(lo / step) * step
    out = []
    x = first
    while x <= hi + 1e-9 * step:
        out.append(round(x, 10))
        x += step
    return out


def _fmt(x: float) -> str:
    return f"{x:g}"


def _label(case: str, algorithm: str) -> str:
    return "Pure LUCB" if algorithm == "pure_lucb" else f"LUCB-H ({case})"


def _frame(title: str, xlabel: str, ylabel: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<text x="{LEFT + (WIDTH - LEFT - RIGHT) / 2}" y="{HEIGHT - 15}" '
        f'text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="18" y="{TOP + (HEIGHT - TOP - BOTTOM) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 18 {TOP + (HEIGHT - TOP - BOTTOM) / 2})">{escape(ylabel)}</text>',
    ]


def _axes(x_ticks, y_ticks, sx, sy) -> list[str]:
    x0, x1 = LEFT, WIDTH - RIGHT
    y0, y1 = HEIGHT - BOTTOM, TOP
    parts = [
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
    ]
    for value, label in x_ticks:
        x = sx(value)
        parts.append(f'<line x1="{x:.2f}" y1="{y0}" x2="{x:.2f}" y2="{y0 + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.2f}" y="{y0 + 18}" text-anchor="middle">{escape(label)}</text>')
    for value in y_ticks:
        y = sy(value)
        parts.append(f'<line x1="{x0 - 5}" y1="{y:.2f}" x2="{x1}" y2="{y:.2f}" stroke="#ddd"/>')
        parts.append(f'<text x="{x0 - 8}" y="{y + 4:.2f}" text-anchor="end">{_fmt(value)}</text>')
    return parts


def _legend(labels: list[str]) -> list[str]:
    parts = []
    x = WIDTH - RIGHT + 15
    for j, label in enumerate(labels):
        y = TOP + 10 + 20 * j
        color = COLORS[j % len(COLORS)]
        parts.append(f'<rect x="{x}" y="{y - 9}" width="12" height="12" fill="{color}"/>')
        parts.append(f'<text x="{x + 18}" y="{y + 1}">{escape(label)}</text>')
    return parts


def line_chart(result: SweepResult) -> str:
    spec = result.spec
    log_x = spec.axis == "delta"

    def xval(v: float) -> float:
        return math.log10(1.0 / v) if log_x else float(v)

    xs = [xval(v) for v in spec.grid]
    lows = [p.stats.mean_tau - p.stats.stderr_tau for p in result.points]
    highs = [p.stats.mean_tau + p.stats.stderr_tau for p in result.points]
    x_lo, x_hi = min(xs), max(xs)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    y_lo, y_hi = 0.0, max(highs) * 1.05 if highs else 1.0
    y_lo = min(y_lo, min(lows, default=0.0))

    def sx(x: float) -> float:
        return LEFT + (x - x_lo) / (x_hi - x_lo) * (WIDTH - LEFT - RIGHT)

    def sy(y: float) -> float:
        return HEIGHT - BOTTOM - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - TOP - BOTTOM)

    x_ticks = [(x, _fmt(x)) for x in xs]
    parts = _frame(spec.name, _AXIS_LABELS[spec.axis], "mean stopping time E[τ]")
    parts += _axes(x_ticks, _ticks(y_lo, y_hi), sx, sy)
    labels = []
    for j, series in enumerate(spec.series):
        color = COLORS[j % len(COLORS)]
        labels.append(_label(series.case, series.algorithm))
        pts = [p for p in result.points if p.case == series.case and p.algorithm == series.algorithm]
        coords = [(sx(xval(p.axis_value)), p.stats) for p in pts]
        path = " ".join(f"{x:.2f},{sy(s.mean_tau):.2f}" for x, s in coords)
        parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, s in coords:
            top, bot = sy(s.mean_tau + s.stderr_tau), sy(s.mean_tau - s.stderr_tau)
            parts.append(
                f'<line x1="{x:.2f}" y1="{top:.2f}" x2="{x:.2f}" y2="{bot:.2f}" stroke="{color}"/>'
            )
            parts.append(f'<circle cx="{x:.2f}" cy="{sy(s.mean_tau):.2f}" r="3" fill="{color}"/>')
    parts += _legend(labels)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def bar_chart(result: SweepResult) -> str:
    spec = result.spec
    value = spec.grid[0]
    points = [p for p in result.points if p.axis_value == value]
    k = spec.k
    y_hi = max((max(p.stats.mean_pulls) for p in points), default=1.0) * 1.05
    group_w = (WIDTH - LEFT - RIGHT) / k
    bar_w = group_w * 0.8 / max(len(points), 1)

    def sy(y: float) -> float:
        return HEIGHT - BOTTOM - y / y_hi * (HEIGHT - TOP - BOTTOM)

    x_ticks = [(LEFT + group_w * (i + 0.5), f"arm {i + 1}") for i in range(k)]
    title = f"{spec.name}: samples per arm ({spec.axis}={_fmt(value)})"
    parts = _frame(title, "arm", "mean samples")
    parts += _axes(x_ticks, _ticks(0.0, y_hi), lambda x: x, sy)
    labels = []
    for j, p in enumerate(points):
        color = COLORS[j % len(COLORS)]
        labels.append(_label(p.case, p.algorithm))
        for i, pulls in enumerate(p.stats.mean_pulls):
            x = LEFT + group_w * i + group_w * 0.1 + bar_w * j
            parts.append(
                f'<rect x="{x:.2f}" y="{sy(pulls):.2f}" width="{bar_w:.2f}" '
                f'height="{sy(0) - sy(pulls):.2f}" fill="{color}"/>'
            )
    parts += _legend(labels)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render(result: SweepResult) -> str:
    if result.spec.chart == "bars":
        return bar_chart(result)
    return line_chart(result)
