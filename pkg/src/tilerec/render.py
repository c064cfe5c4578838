"""Static pictures: a hand-written SVG of a window (optionally with a certificate
overlay) and a matplotlib chart of census class counts."""

from __future__ import annotations

import colorsys
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .recurrence import PatternF, WitnessCertificate, _conjugated
from .tiling import TilingWindow

SCALE = 40.0  # pixels per unit length
MARGIN = 10.0


def _fmt(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _points(poly: np.ndarray) -> str:
    # SVG y grows downward, so flip
    return " ".join(f"{_fmt(px * SCALE)},{_fmt(-py * SCALE)}" for px, py in poly)


def prototile_color(i: int, count: int) -> str:
    """Evenly spaced hues, so colors depend only on the prototile's table position."""
    h = (i / max(count, 1)) % 1.0
    r, g, b = colorsys.hls_to_rgb(h, 0.72, 0.55)
    return f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}"


def certificate_copies(cert: WitnessCertificate, F: PatternF) -> list[np.ndarray]:
    """Polygons of each recurring copy of the certificate patch, one array per u."""
    polys = cert.patch.polygons
    out = []
    for u, corr in zip(F, cert.corrections):
        shift = cert.n * u
        if cert.variant == "thm1":
            out.append(polys + shift + np.asarray(corr, dtype=float))
        elif cert.variant == "thm2":
            out.append(_conjugated(corr, shift, cert.base)(polys))
        else:
            out.append(np.stack([_conjugated(s, shift, cert.base)(p) for s, p in zip(corr, polys)]))
    return out


def render_svg(w: TilingWindow, cert: WitnessCertificate | None = None,
               F: PatternF | None = None) -> str:
    """SVG text with one filled ``<polygon>`` per tile.

    With a certificate, the base patch and its copies are drawn as outlined
    groups (class ``patch``) and each n·u as an arrow from the base point.
    """
    if cert is not None and F is None:
        F = cert.pattern
    if cert is not None and F is None:
        raise ValueError("a certificate overlay needs the pattern F")
    polys = w.polygons
    pts = polys.reshape(-1, 2) if len(polys) else np.zeros((1, 2))
    overlays = []
    if cert is not None:
        overlays = [cert.patch.polygons] + certificate_copies(cert, F)
        pts = np.concatenate([pts] + [o.reshape(-1, 2) for o in overlays])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    x0, y0 = lo[0] * SCALE - MARGIN, -hi[1] * SCALE - MARGIN
    width, height = (hi - lo) * SCALE + 2 * MARGIN
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(width)} {_fmt(height)}" '
        f'width="{_fmt(width)}" height="{_fmt(height)}">',
        '<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" '
        'markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#202020"/></marker></defs>',
        '<g class="tiles" stroke="#303030" stroke-width="0.8" stroke-linejoin="round">',
    ]
    count = len(w.prototiles)
    for p, poly in zip(w.proto_index.tolist(), polys):
        proto = escape(w.prototiles[p].id, {'"': "&quot;"})
        lines.append(f'<polygon data-proto="{proto}" fill="{prototile_color(p, count)}" '
                     f'points="{_points(poly)}"/>')
    lines.append("</g>")
    if cert is not None:
        for k, group in enumerate(overlays):
            role = "base" if k == 0 else f"copy-{k}"
            color = "#c00000" if k == 0 else "#0040c0"
            lines.append(f'<g class="patch" data-role="{role}" fill="none" stroke="{color}" stroke-width="2">')
            lines.extend(f'<polygon points="{_points(poly)}"/>' for poly in group)
            lines.append("</g>")
        bx, by = cert.base
        lines.append('<g class="pattern" stroke="#202020" stroke-width="1.5">')
        for u in F:
            ex, ey = cert.base + cert.n * u
            lines.append(f'<line x1="{_fmt(bx * SCALE)}" y1="{_fmt(-by * SCALE)}" x2="{_fmt(ex * SCALE)}" '
                         f'y2="{_fmt(-ey * SCALE)}" marker-end="url(#arrow)"/>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(path, w: TilingWindow, cert=None, F=None) -> None:
    Path(path).write_text(render_svg(w, cert, F), encoding="utf-8")


def plot_class_counts(report, path) -> None:
    """PNG of T2 class counts against window radius, one line per mode."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series: dict[str, tuple[list, list]] = {}
    for c in report.censuses:
        xs, ys = series.setdefault(c.mode, ([], []))
        xs.append(c.window_radius)
        ys.append(c.class_count)
    fig, ax = plt.subplots(figsize=(5, 3.5), dpi=100)
    for mode in sorted(series):
        xs, ys = series[mode]
        ax.plot(xs, ys, marker="o", label=mode)
    ax.set_xlabel("window radius")
    ax.set_ylabel("two-tile classes")
    ax.set_title(f"verdict: {report.verdict}")
    ax.set_ylim(bottom=0)
    if not math.isclose(max(max(v[1]) for v in series.values()), 0):
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
