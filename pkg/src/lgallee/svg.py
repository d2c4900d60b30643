"""Minimal SVG emitter for phase portraits, diagrams and basin rasters.

Fixed 800x800 viewBox; data coordinates map into a 720x720 plot area.  Glyphs:
attractor filled disk, repeller open disk, saddle cross, saddle-node
half-filled disk, other degenerate points open diamond.  Unstable cycles and
neutral-saddle curve pieces are dashed.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

SIZE = 800
PAD = 40

PALETTE = ["#f28e2b", "#9c9c9c", "#4e79a7", "#59a14f", "#b07aa1", "#76b7b2", "#edc948", "#ff9da7"]
UNDECIDED_COLOR = "#ffffff"


def _n(x: float) -> str:
    return f"{x:.3f}".rstrip("0").rstrip(".")


class Canvas:
    def __init__(self, xlim=(0.0, 1.1), ylim=(0.0, 1.1), xlabel="u", ylabel="v", title=""):
        self.xlim, self.ylim = xlim, ylim
        self.parts: list[str] = []
        self.xlabel, self.ylabel, self.title = xlabel, ylabel, title

    def px(self, x, y):
        (x0, x1), (y0, y1) = self.xlim, self.ylim
        span = SIZE - 2 * PAD
        return PAD + (x - x0) / (x1 - x0) * span, SIZE - PAD - (y - y0) / (y1 - y0) * span

    def polyline(self, pts, color="#000", width=1.5, dashed=False, closed=False, cls=""):
        pts = list(pts)
        if len(pts) < 2:
            return
        coords = " ".join(f"{_n(a)},{_n(b)}" for a, b in (self.px(x, y) for x, y in pts))
        tag = "polygon" if closed else "polyline"
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        c = f' class="{cls}"' if cls else ""
        self.parts.append(f'<{tag}{c} points="{coords}" fill="none" stroke="{color}" '
                          f'stroke-width="{width}"{dash}/>')

    def glyph(self, kind: str, x, y, r=6):
        cx, cy = self.px(x, y)
        a, b = _n(cx), _n(cy)
        if kind == "attractor":
            self.parts.append(f'<circle class="attractor" cx="{a}" cy="{b}" r="{r}" fill="#000"/>')
        elif kind == "repeller":
            self.parts.append(f'<circle class="repeller" cx="{a}" cy="{b}" r="{r}" fill="#fff" stroke="#000"/>')
        elif kind in ("saddle", "nonhyperbolic-saddle"):
            d = r
            self.parts.append(
                f'<path class="saddle" d="M{_n(cx - d)},{_n(cy - d)}L{_n(cx + d)},{_n(cy + d)}'
                f'M{_n(cx - d)},{_n(cy + d)}L{_n(cx + d)},{_n(cy - d)}" stroke="#000" stroke-width="2"/>')
        elif kind in ("stable-saddle-node", "unstable-saddle-node"):
            self.parts.append(
                f'<g class="saddle-node"><circle cx="{a}" cy="{b}" r="{r}" fill="#fff" stroke="#000"/>'
                f'<path d="M{_n(cx)},{_n(cy - r)}A{r},{r} 0 0 0 {_n(cx)},{_n(cy + r)}Z" fill="#000"/></g>')
        else:
            self.parts.append(
                f'<path class="degenerate" d="M{a},{_n(cy - r)}L{_n(cx + r)},{b}L{a},{_n(cy + r)}'
                f'L{_n(cx - r)},{b}Z" fill="#fff" stroke="#000"/>')

    def rect(self, x0, y0, x1, y1, color):
        ax, ay = self.px(x0, y1)
        bx, by = self.px(x1, y0)
        self.parts.append(f'<rect x="{_n(ax)}" y="{_n(ay)}" width="{_n(bx - ax)}" '
                          f'height="{_n(by - ay)}" fill="{color}" stroke="none"/>')

    def text(self, x, y, s, size=12):
        cx, cy = self.px(x, y)
        self.parts.append(f'<text x="{_n(cx)}" y="{_n(cy)}" font-size="{size}">{escape(s)}</text>')

    def render(self) -> str:
        x0, y0 = self.px(self.xlim[0], self.ylim[0])
        x1, y1 = self.px(self.xlim[1], self.ylim[1])
        frame = (f'<rect x="{_n(x0)}" y="{_n(y1)}" width="{_n(x1 - x0)}" height="{_n(y0 - y1)}" '
                 f'fill="none" stroke="#000"/>')
        labels = [
            f'<text x="{SIZE // 2}" y="{SIZE - 8}" font-size="14">{escape(self.xlabel)}</text>',
            f'<text x="8" y="{SIZE // 2}" font-size="14">{escape(self.ylabel)}</text>',
            f'<text x="{PAD}" y="24" font-size="14">{escape(self.title)}</text>',
        ]
        ticks = [
            f'<text x="{_n(x0)}" y="{_n(y0 + 16)}" font-size="10">{self.xlim[0]:g}</text>',
            f'<text x="{_n(x1 - 20)}" y="{_n(y0 + 16)}" font-size="10">{self.xlim[1]:g}</text>',
            f'<text x="{_n(x0 - 34)}" y="{_n(y0)}" font-size="10">{self.ylim[0]:g}</text>',
            f'<text x="{_n(x0 - 34)}" y="{_n(y1 + 10)}" font-size="10">{self.ylim[1]:g}</text>',
        ]
        clip = (f'<clipPath id="plot"><rect x="{_n(x0)}" y="{_n(y1)}" width="{_n(x1 - x0)}" '
                f'height="{_n(y0 - y1)}"/></clipPath>')
        body = "\n".join(self.parts)
        return (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" '
                f'width="{SIZE}" height="{SIZE}">\n<defs>{clip}</defs>\n'
                f'<rect width="{SIZE}" height="{SIZE}" fill="#fff"/>\n'
                f'<g clip-path="url(#plot)">\n{body}\n</g>\n{frame}\n'
                + "\n".join(labels + ticks) + "\n</svg>\n")
