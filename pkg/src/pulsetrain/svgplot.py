"""Deterministic SVG rendering for ROC curves and diel grids.

Documents are plain generated text with fixed-precision coordinates and no
timestamps, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import numpy as np

from .evaluation import DielGrid, RocCurve


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_roc_svg(curve: RocCurve, width: int = 480, height: int = 480) -> str:
    """ROC polyline in a unit box with gridlines and an AUC caption."""
    m = 50  # margin for axis labels
    plot_w, plot_h = width - 2 * m, height - 2 * m

    def px(fpr: float) -> float:
        return m + fpr * plot_w

    def py(tpr: float) -> float:
        return height - m - tpr * plot_h

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{m}" y="{m}" width="{plot_w}" height="{plot_h}" fill="white" stroke="black"/>',
    ]
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        lines.append(
            f'<line x1="{_fmt(px(tick))}" y1="{_fmt(py(0))}" x2="{_fmt(px(tick))}" '
            f'y2="{_fmt(py(0) + 4)}" stroke="black"/>'
        )
        lines.append(
            f'<text x="{_fmt(px(tick))}" y="{_fmt(py(0) + 16)}" font-size="10" '
            f'text-anchor="middle">{tick:g}</text>'
        )
        lines.append(
            f'<line x1="{_fmt(px(0) - 4)}" y1="{_fmt(py(tick))}" x2="{_fmt(px(0))}" '
            f'y2="{_fmt(py(tick))}" stroke="black"/>'
        )
        lines.append(
            f'<text x="{_fmt(px(0) - 8)}" y="{_fmt(py(tick) + 3)}" font-size="10" '
            f'text-anchor="end">{tick:g}</text>'
        )
    lines.append(
        f'<line x1="{_fmt(px(0))}" y1="{_fmt(py(0))}" x2="{_fmt(px(1))}" y2="{_fmt(py(1))}" '
        'stroke="grey" stroke-dasharray="4 4"/>'
    )
    pts = " ".join(f"{_fmt(px(fpr))},{_fmt(py(tpr))}" for fpr, tpr in curve.points)
    lines.append(f'<polyline points="{pts}" fill="none" stroke="blue" stroke-width="1.5"/>')
    lines.append(
        f'<text x="{_fmt(px(0.6))}" y="{_fmt(py(0.1))}" font-size="12">AUC = {curve.auc:.4f}</text>'
    )
    lines.append(
        f'<text x="{width / 2:.0f}" y="{height - 8}" font-size="12" text-anchor="middle">'
        "False positive rate</text>"
    )
    lines.append(
        f'<text x="14" y="{height / 2:.0f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 14 {height / 2:.0f})">True positive rate</text>'
    )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_diel_svg(grid: DielGrid, cell_px: float = 4.0, row_px: float = 3.0) -> str:
    """Date (rows, downward) versus time-of-day (columns) activity map.

    Night bins are shaded grey, merged into horizontal runs per row;
    each nonzero count cell gets one black mark.
    """
    m_left, m_top, m_bottom = 70, 10, 30
    n_rows = len(grid.dates)
    n_cols = grid.bins_per_day
    width = int(m_left + n_cols * cell_px + 10)
    height = int(m_top + max(n_rows, 1) * row_px + m_bottom)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{m_left}" y="{m_top}" width="{_fmt(n_cols * cell_px)}" '
        f'height="{_fmt(max(n_rows, 1) * row_px)}" fill="white" stroke="black"/>',
    ]

    for i in range(n_rows):
        y = m_top + i * row_px
        # merge consecutive night bins into one rect
        b = 0
        while b < n_cols:
            if grid.night_mask[i, b]:
                b0 = b
                while b < n_cols and grid.night_mask[i, b]:
                    b += 1
                lines.append(
                    f'<rect x="{_fmt(m_left + b0 * cell_px)}" y="{_fmt(y)}" '
                    f'width="{_fmt((b - b0) * cell_px)}" height="{_fmt(row_px)}" '
                    'fill="#cccccc"/>'
                )
            else:
                b += 1
    for i in range(n_rows):
        y = m_top + i * row_px
        for b in np.nonzero(grid.counts[i])[0] if n_cols else []:
            lines.append(
                f'<rect x="{_fmt(m_left + b * cell_px)}" y="{_fmt(y)}" '
                f'width="{_fmt(cell_px)}" height="{_fmt(row_px)}" fill="black"/>'
            )

    label_step = max(1, n_rows // 8) if n_rows else 1
    for i in range(0, n_rows, label_step):
        lines.append(
            f'<text x="{m_left - 4}" y="{_fmt(m_top + i * row_px + row_px)}" font-size="9" '
            f'text-anchor="end">{grid.dates[i].isoformat()}</text>'
        )
    for hour in range(0, 25, 6):
        x = m_left + hour / 24.0 * n_cols * cell_px
        lines.append(
            f'<text x="{_fmt(x)}" y="{height - m_bottom + 14}" font-size="9" '
            f'text-anchor="middle">{hour:02d}:00</text>'
        )
    lines.append(
        f'<text x="{_fmt(m_left + n_cols * cell_px / 2)}" y="{height - 4}" font-size="11" '
        'text-anchor="middle">Local time</text>'
    )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_svg(obj) -> str:
    """Dispatch on the plot object type."""
    if isinstance(obj, RocCurve):
        return render_roc_svg(obj)
    if isinstance(obj, DielGrid):
        return render_diel_svg(obj)
    raise TypeError(f"no SVG renderer for {type(obj).__name__}")
