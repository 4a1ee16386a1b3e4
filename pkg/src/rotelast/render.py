"""SVG arrow plots of a planar rotation-angle field."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import Field


@dataclass(frozen=True)
class ArrowScene:
    """Angles ``phi[i, j]`` at points ``(x_i, y_j)``; ``i`` runs along x.

    ``glyph_length`` is a fraction of the spacing between neighbouring
    points, ``canvas`` the square image size in pixels.
    """

    angles: np.ndarray
    glyph_length: float = 0.8
    canvas: int = 600

    def __post_init__(self):
        a = np.array(self.angles, dtype=float)
        if a.ndim != 2 or min(a.shape) < 1:
            raise ValueError(f"angles must be a non-empty 2D array, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("angles must be finite")
        if not 0 < self.glyph_length <= 1.5:
            raise ValueError("glyph_length must lie in (0, 1.5]")
        if self.canvas < 16:
            raise ValueError("canvas must be at least 16 pixels")
        a.setflags(write=False)
        object.__setattr__(self, "angles", a)

    @classmethod
    def from_field(cls, phi: Field, **kwargs) -> "ArrowScene":
        if phi.kind != "scalar" or phi.grid.dims[2] != 1:
            raise ValueError("arrow scenes need a scalar field on an (nx, ny, 1) grid")
        return cls(phi.data[:, :, 0], **kwargs)

    @property
    def cell(self) -> float:
        """Pixel distance between neighbouring glyph centres."""
        return self.canvas / max(self.angles.shape)

    def centre(self, i: int, j: int) -> tuple[float, float]:
        nx, ny = self.angles.shape
        c = self.cell
        ox = (self.canvas - nx * c) / 2
        oy = (self.canvas - ny * c) / 2
        # image rows grow downwards, physical y grows upwards
        return ox + (i + 0.5) * c, oy + (ny - 1 - j + 0.5) * c


def _num(x: float) -> str:
    s = f"{x:.3f}"
    return "0.000" if s == "-0.000" else s


def svg_text(scene: ArrowScene) -> str:
    """SVG 1.1 document with one arrow per sample.

    Every glyph shares the same local geometry, a shaft along +x centred on
    the origin with a filled head at its tip, and is placed by
    ``translate(cx cy) rotate(-phi)``; the sign flip accounts for the image
    y axis pointing down.
    """
    nx, ny = scene.angles.shape
    length = scene.glyph_length * scene.cell
    half = 0.5 * length
    head = 0.3 * length
    barb = head * math.tan(math.radians(25.0))
    stroke = max(0.5, 0.06 * scene.cell)
    shaft = f'<line x1="{_num(-half)}" y1="0" x2="{_num(half)}" y2="0"/>'
    tip = (
        f'<polygon points="{_num(half)},0 {_num(half - head)},{_num(-barb)} '
        f'{_num(half - head)},{_num(barb)}"/>'
    )
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{scene.canvas}" '
        f'height="{scene.canvas}" viewBox="0 0 {scene.canvas} {scene.canvas}">',
        f'<rect x="0" y="0" width="{scene.canvas}" height="{scene.canvas}" fill="white"/>',
        f'<g stroke="black" stroke-width="{_num(stroke)}" fill="black" stroke-linecap="round">',
    ]
    for j in range(ny - 1, -1, -1):
        for i in range(nx):
            cx, cy = scene.centre(i, j)
            deg = -math.degrees(float(scene.angles[i, j]))
            rot = f"{deg:.6f}"
            if rot == "-0.000000":
                rot = "0.000000"
            out.append(
                f'<g class="glyph" data-i="{i}" data-j="{j}" '
                f'transform="translate({_num(cx)} {_num(cy)}) rotate({rot})">{shaft}{tip}</g>'
            )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_arrow_svg(scene: ArrowScene, path) -> None:
    text = svg_text(scene)
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)
