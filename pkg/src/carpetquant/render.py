"""Static SVG pictures of the carpet with a codebook on top.

The unit square maps to a 900 by 900 viewBox with the origin at the bottom
left, so ``y`` grows upwards as in the usual mathematical orientation.
"""

from __future__ import annotations

from fractions import Fraction
from xml.sax.saxutils import escape

from .errors import InputError
from .geometry import Codebook
from .measure import RATIO, word_apply, words

__all__ = ["SIZE", "MAX_CARPET_DEPTH", "render_svg"]

SIZE = 900
MAX_CARPET_DEPTH = 7


def _num(q: Fraction) -> str:
    # fixed precision keeps the output byte-stable
    s = f"{float(q):.4f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def render_svg(codebook: Codebook, carpet_depth: int = 3, title: str = "") -> str:
    if not 0 <= carpet_depth <= MAX_CARPET_DEPTH:
        raise InputError(f"carpet depth must lie in 0..{MAX_CARPET_DEPTH}")
    side = RATIO**carpet_depth * SIZE
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" '
        f'width="{SIZE}" height="{SIZE}">'
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append(f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>')
    out.append('<g fill="#c8c8c8" stroke="none">')
    for w in words(carpet_depth):
        x, y = word_apply(w, (0, 0))
        top = (1 - y) * SIZE - side
        out.append(f'<rect x="{_num(x * SIZE)}" y="{_num(top)}" width="{_num(side)}" height="{_num(side)}"/>')
    out.append("</g>")
    out.append('<g fill="#c0392b" stroke="black" stroke-width="1">')
    r = max(3, 12 - len(codebook) // 16)
    for x, y in codebook:
        out.append(f'<circle cx="{_num(x * SIZE)}" cy="{_num((1 - y) * SIZE)}" r="{r}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
