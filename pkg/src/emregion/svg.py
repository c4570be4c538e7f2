"""Minimal SVG 1.1 writer.  Geometry stays in math coordinates; y is
flipped only when a coordinate is formatted."""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

PALETTE = {
    # (in_EA, in_EB, in_EC) -> fill
    (1, 1, 1): "#b7e4c7",
    (0, 1, 1): "#ffd6a5",
    (1, 0, 1): "#fdffb6",
    (1, 1, 0): "#caffbf",
    (0, 0, 1): "#ffadad",
    (0, 1, 0): "#ffc6ff",
    (1, 0, 0): "#a0c4ff",
    (0, 0, 0): "#e0e0e0",
}


class SvgCanvas:
    def __init__(self, box, size: int = 800):
        self.box = box
        self.size = size
        self.sx = size / box.width
        self.sy = size / box.height
        self.layers: list[tuple[str, list[str]]] = []

    def _x(self, x: float) -> str:
        return f"{(x - self.box.xmin) * self.sx:.3f}"

    def _y(self, y: float) -> str:
        return f"{(self.box.ymax - y) * self.sy:.3f}"

    def layer(self, name: str) -> list[str]:
        items: list[str] = []
        self.layers.append((name, items))
        return items

    def polygon(self, layer: list[str], pts: Iterable[Sequence[float]], style: str):
        coords = " ".join(f"{self._x(x)},{self._y(y)}" for x, y in pts)
        layer.append(f'<polygon points="{coords}" style="{style}"/>')

    def polyline(self, layer: list[str], pts: Iterable[Sequence[float]], style: str):
        coords = " ".join(f"{self._x(x)},{self._y(y)}" for x, y in pts)
        layer.append(f'<polyline points="{coords}" style="{style}"/>')

    def line(self, layer: list[str], p0, p1, style: str):
        layer.append(f'<line x1="{self._x(p0[0])}" y1="{self._y(p0[1])}" '
                     f'x2="{self._x(p1[0])}" y2="{self._y(p1[1])}" style="{style}"/>')

    def circle(self, layer: list[str], c, radius_px: float, style: str):
        layer.append(f'<circle cx="{self._x(c[0])}" cy="{self._y(c[1])}" '
                     f'r="{radius_px:.2f}" style="{style}"/>')

    def text(self, layer: list[str], at, label: str, style: str = "font-size:14px"):
        layer.append(f'<text x="{self._x(at[0])}" y="{self._y(at[1])}" style="{style}">{label}</text>')

    def raster(self, layer: list[str], codes: np.ndarray, colors: dict):
        """Run-length rectangles for a (rows, cols) code grid; row 0 is ymin."""
        rows, cols = codes.shape
        cw = self.size / cols
        ch = self.size / rows
        for j in range(rows):
            row = codes[j]
            cuts = np.flatnonzero(np.diff(row)) + 1
            starts = np.concatenate([[0], cuts])
            ends = np.concatenate([cuts, [cols]])
            top = (rows - 1 - j) * ch
            for s, e in zip(starts, ends):
                fill = colors.get(int(row[s]))
                if fill is None:
                    continue
                layer.append(f'<rect x="{s * cw:.3f}" y="{top:.3f}" width="{(e - s) * cw:.3f}" '
                             f'height="{ch:.3f}" style="fill:{fill};stroke:none"/>')

    def render(self) -> str:
        out = [
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
            '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{self.size}" height="{self.size}" viewBox="0 0 {self.size} {self.size}">',
            f'<rect x="0" y="0" width="{self.size}" height="{self.size}" style="fill:#ffffff"/>',
        ]
        for name, items in self.layers:
            out.append(f'<g id="{name}">')
            out.extend(items)
            out.append("</g>")
        out.append("</svg>")
        return "\n".join(out) + "\n"
