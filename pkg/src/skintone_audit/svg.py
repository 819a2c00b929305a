"""Deterministic standalone SVG charts (no plotting dependency).

Byte output is a pure function of the inputs: fixed float formatting, fixed
element ordering, no timestamps.
"""

from __future__ import annotations

from .ita import CATEGORY_ORDER

_W, _H = 640, 400
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 60, 20, 30, 50


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _frame(title: str, body: list[str], comment: str = "") -> str:
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
    ]
    if comment:
        parts.append(f"<!-- {comment} -->")
    parts.append(
        f'<text x="{_W // 2}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>'
    )
    parts.extend(body)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def histogram_svg(counts: dict, title: str = "Skin tone distribution", comment: str = "") -> str:
    """Bar chart of per-category counts, lightest bin leftmost.

    ``counts`` maps category abbreviation to a nonnegative count; missing
    categories plot as zero.
    """
    labels = [c.value for c in CATEGORY_ORDER]
    values = [int(counts.get(lbl, 0)) for lbl in labels]
    vmax = max(max(values), 1)
    plot_w = _W - _MARGIN_L - _MARGIN_R
    plot_h = _H - _MARGIN_T - _MARGIN_B
    bar_w = plot_w / len(labels)

    body = []
    body.append(
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T + plot_h}" '
        f'x2="{_MARGIN_L + plot_w}" y2="{_MARGIN_T + plot_h}" stroke="black"/>'
    )
    body.append(
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" '
        f'x2="{_MARGIN_L}" y2="{_MARGIN_T + plot_h}" stroke="black"/>'
    )
    for i, (lbl, v) in enumerate(zip(labels, values)):
        h = plot_h * v / vmax
        x = _MARGIN_L + i * bar_w + 0.1 * bar_w
        y = _MARGIN_T + plot_h - h
        body.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(0.8 * bar_w)}" '
            f'height="{_fmt(h)}" fill="#4878a8"/>'
        )
        body.append(
            f'<text x="{_fmt(x + 0.4 * bar_w)}" y="{_H - _MARGIN_B + 18}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="11">{lbl}</text>'
        )
        body.append(
            f'<text x="{_fmt(x + 0.4 * bar_w)}" y="{_fmt(y - 4)}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="10">{v}</text>'
        )
    return _frame(title, body, comment)


def accuracy_vs_ita_svg(
    points,
    errors=None,
    fit=None,
    title: str = "Accuracy vs ITA",
    comment: str = "",
) -> str:
    """Scatter of (midpoint angle, accuracy) with optional error bars and a
    fitted line.

    ``points`` is a sequence of (x_degrees, accuracy); ``errors`` optional
    per-point standard errors; ``fit`` an object with slope/intercept.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if not pts:
        raise ValueError("no points to plot")
    xs = [p[0] for p in pts]
    x_lo, x_hi = min(xs) - 3.0, max(xs) + 3.0
    y_lo, y_hi = 0.0, 1.0
    plot_w = _W - _MARGIN_L - _MARGIN_R
    plot_h = _H - _MARGIN_T - _MARGIN_B

    def sx(x):
        return _MARGIN_L + plot_w * (x - x_lo) / (x_hi - x_lo)

    def sy(y):
        return _MARGIN_T + plot_h * (1.0 - (y - y_lo) / (y_hi - y_lo))

    body = []
    body.append(
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="black"/>'
    )
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        body.append(
            f'<text x="{_MARGIN_L - 8}" y="{_fmt(sy(frac) + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{frac:.2f}</text>'
        )
    if fit is not None:
        body.append(
            f'<line x1="{_fmt(sx(x_lo))}" y1="{_fmt(sy(fit.intercept + fit.slope * x_lo))}" '
            f'x2="{_fmt(sx(x_hi))}" y2="{_fmt(sy(fit.intercept + fit.slope * x_hi))}" '
            f'stroke="#b04030" stroke-width="1.5"/>'
        )
    for i, (x, y) in enumerate(pts):
        if errors is not None and errors[i]:
            e = float(errors[i])
            body.append(
                f'<line x1="{_fmt(sx(x))}" y1="{_fmt(sy(y - e))}" '
                f'x2="{_fmt(sx(x))}" y2="{_fmt(sy(y + e))}" stroke="#404040"/>'
            )
        body.append(
            f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="4" fill="#4878a8"/>'
        )
        body.append(
            f'<text x="{_fmt(sx(x))}" y="{_H - _MARGIN_B + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{x:g}</text>'
        )
    return _frame(title, body, comment)
