"""Dependency-free SVG rendering of a 2-D scatter with covering boxes.

Output is a plain string built with fixed-precision formatting, so a given
input always renders byte-identically.
"""

from __future__ import annotations

from .boxes import Box
from .errors import DomainError
from .prim import BoxRecord, CoveringReport
from .stats import Dataset

_WIDTH = 640
_HEIGHT = 480
_MARGIN = 54
_MAX_POINTS = 20000

# stroke color ramp from light to dark blue, graded by covering order
_RAMP_LIGHT = (158, 202, 225)
_RAMP_DARK = (8, 48, 107)


def _ramp_color(i: int, total: int) -> str:
    f = 0.0 if total <= 1 else i / (total - 1)
    rgb = tuple(
        round(a + f * (b - a)) for a, b in zip(_RAMP_LIGHT, _RAMP_DARK)
    )
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def project_report(report: CoveringReport, dims) -> CoveringReport:
    """Covering report with each box restricted to ``dims``, renumbered
    0..len(dims)-1 to match a column-selected dataset. Masses, volumes and
    densities are carried through unchanged (plot annotations only).
    """
    dims = tuple(int(d) for d in dims)
    entries = []
    for e in report.entries:
        intervals = []
        for d in dims:
            if d not in e.box.dims:
                raise DomainError(f"covering box has no interval on dimension {d}")
            intervals.append(e.box.intervals[e.box.dims.index(d)])
        entries.append(
            BoxRecord(
                box=Box(tuple(range(len(dims))), tuple(intervals)),
                mass=e.mass,
                count=e.count,
                volume=e.volume,
                density=e.density,
            )
        )
    return CoveringReport(tuple(entries), report.beta_T)


def render_boxes_svg(data: Dataset, report: CoveringReport) -> str:
    """SVG text for a 2-D dataset and its covering boxes."""
    if data.p != 2:
        raise DomainError(f"box plot needs exactly 2 columns, got {data.p}")
    for entry in report.entries:
        if set(entry.box.dims) != {0, 1}:
            raise DomainError(
                f"covering box dims {entry.box.dims} do not match a 2-column dataset"
            )

    xs = data.values[:, 0]
    ys = data.values[:, 1]
    x_lo = min(float(xs.min()), *(e.box.intervals[e.box.dims.index(0)][0] for e in report.entries))
    x_hi = max(float(xs.max()), *(e.box.intervals[e.box.dims.index(0)][1] for e in report.entries))
    y_lo = min(float(ys.min()), *(e.box.intervals[e.box.dims.index(1)][0] for e in report.entries))
    y_hi = max(float(ys.max()), *(e.box.intervals[e.box.dims.index(1)][1] for e in report.entries))
    x_pad = 0.05 * (x_hi - x_lo) or 1.0
    y_pad = 0.05 * (y_hi - y_lo) or 1.0
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    inner_w = _WIDTH - 2 * _MARGIN
    inner_h = _HEIGHT - 2 * _MARGIN

    def sx(x: float) -> float:
        return _MARGIN + (x - x_lo) / (x_hi - x_lo) * inner_w

    def sy(y: float) -> float:
        # SVG y axis points down
        return _HEIGHT - _MARGIN - (y - y_lo) / (y_hi - y_lo) * inner_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{inner_w}" height="{inner_h}" '
        f'fill="none" stroke="#999999" stroke-width="1"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        x_val = x_lo + frac * (x_hi - x_lo)
        y_val = y_lo + frac * (y_hi - y_lo)
        px = sx(x_val)
        py = sy(y_val)
        parts.append(
            f'<text x="{px:.2f}" y="{_HEIGHT - _MARGIN + 18}" font-size="11" '
            f'text-anchor="middle" fill="#444444">{x_val:.3g}</text>'
        )
        parts.append(
            f'<text x="{_MARGIN - 8}" y="{py:.2f}" font-size="11" '
            f'text-anchor="end" dominant-baseline="middle" fill="#444444">{y_val:.3g}</text>'
        )
    parts.append(f'<g fill="#555555" fill-opacity="0.45">')
    step = max(1, data.n // _MAX_POINTS)
    for i in range(0, data.n, step):
        parts.append(
            f'<circle cx="{sx(float(xs[i])):.2f}" cy="{sy(float(ys[i])):.2f}" r="1.8"/>'
        )
    parts.append("</g>")
    total = len(report.entries)
    for i, entry in enumerate(report.entries):
        x_interval = entry.box.intervals[entry.box.dims.index(0)]
        y_interval = entry.box.intervals[entry.box.dims.index(1)]
        left = sx(x_interval[0])
        top = sy(y_interval[1])
        w = sx(x_interval[1]) - left
        h = sy(y_interval[0]) - top
        parts.append(
            f'<rect x="{left:.2f}" y="{top:.2f}" width="{w:.2f}" height="{h:.2f}" '
            f'fill="none" stroke="{_ramp_color(i, total)}" stroke-width="1.6"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_boxes_svg(data: Dataset, report: CoveringReport, path) -> None:
    """Write the scatter-plus-boxes SVG to ``path``."""
    svg = render_boxes_svg(data, report)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(svg)
