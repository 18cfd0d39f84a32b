"""Codebooks, nearest-site assignment and exact square-versus-cell classification.

Ties between equidistant sites always go to the lowest index.  Voronoi cells
are closed here: a point on a bisector belongs to both neighbouring cells,
which is what lets a square that only touches a bisector along an edge or a
corner still be attributed to one site.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional

from .errors import InputError
from .measure import Point, as_point

__all__ = [
    "Codebook",
    "Square",
    "SYMMETRIES",
    "sq_dist",
    "nearest_site",
    "classify_square",
    "transform_codebook",
    "transform_square",
]


def sq_dist(p, q) -> Fraction:
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    return dx * dx + dy * dy


@dataclass(frozen=True)
class Codebook:
    """An ordered list of distinct exact points in the unit square."""

    points: tuple[Point, ...]

    def __init__(self, points: Iterable):
        pts = tuple(as_point(p) for p in points)
        if not pts:
            raise InputError("a codebook needs at least one point")
        if len(set(pts)) != len(pts):
            raise InputError("codebook points must be pairwise distinct")
        for x, y in pts:
            if not (0 <= x <= 1 and 0 <= y <= 1):
                raise InputError(f"point ({x}, {y}) lies outside the unit square")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __getitem__(self, i) -> Point:
        return self.points[i]

    def as_set(self) -> frozenset[Point]:
        return frozenset(self.points)

    def as_floats(self) -> list[tuple[float, float]]:
        return [(float(x), float(y)) for x, y in self.points]

    def __repr__(self) -> str:
        inner = ", ".join(f"({x}, {y})" for x, y in self.points)
        return f"Codebook([{inner}])"


@dataclass(frozen=True)
class Square:
    """Closed axis-aligned square ``[x0, x0 + side] x [y0, y0 + side]``."""

    lower_corner: Point
    side: Fraction

    def corners(self) -> tuple[Point, Point, Point, Point]:
        x, y = self.lower_corner
        s = self.side
        return ((x, y), (x + s, y), (x, y + s), (x + s, y + s))


def nearest_site(codebook, p) -> int:
    """Index of the closest site; exact ties go to the lowest index."""
    p = as_point(p)
    best, best_d = 0, None
    for i, a in enumerate(codebook):
        d = sq_dist(p, a)
        if best_d is None or d < best_d:
            best, best_d = i, d
    return best


def classify_square(codebook, square) -> Optional[int]:
    """Return the site whose closed cell contains the whole square, or ``None``.

    Voronoi cells are convex, so the square lies in cell ``j`` exactly when
    all four corners do.  If several sites qualify the lowest index is
    returned (this can only happen for degenerate inputs).
    """
    corners = [as_point(c) for c in square.corners()]
    dists = [[sq_dist(c, a) for a in codebook] for c in corners]
    for j in range(len(codebook)):
        if all(row[j] <= min(row) for row in dists):
            return j
    return None


# The eight symmetries of the unit square, as maps on exact points.
SYMMETRIES: dict[str, Callable[[Point], Point]] = {
    "identity": lambda p: (p[0], p[1]),
    "rot90": lambda p: (1 - p[1], p[0]),
    "rot180": lambda p: (1 - p[0], 1 - p[1]),
    "rot270": lambda p: (p[1], 1 - p[0]),
    "flip_x": lambda p: (1 - p[0], p[1]),
    "flip_y": lambda p: (p[0], 1 - p[1]),
    "transpose": lambda p: (p[1], p[0]),
    "antitranspose": lambda p: (1 - p[1], 1 - p[0]),
}


def transform_codebook(g: Callable[[Point], Point], codebook) -> Codebook:
    return Codebook(g(p) for p in codebook)


def transform_square(g: Callable[[Point], Point], square) -> Square:
    images = [g(c) for c in square.corners()]
    corner = (min(x for x, _ in images), min(y for _, y in images))
    return Square(corner, square.side)
