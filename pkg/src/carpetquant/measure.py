"""The carpet measure: similitudes, cylinder squares, moments and atomic discretizations.

The measure ``P`` is the invariant probability of the four corner maps

    S_1(x) = x/3,  S_2(x) = x/3 + (2/3, 0),  S_3(x) = x/3 + (0, 2/3),  S_4(x) = x/3 + (2/3, 2/3)

each taken with weight 1/4.  A word ``"412"`` names the cylinder square
``S_4(S_1(S_2([0, 1]^2)))``.  Words are plain strings over ``"1234"``; the
empty string is the whole unit square.

Every number produced here is a :class:`fractions.Fraction`.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple

import numpy as np

from .errors import InputError, ResourceError

__all__ = [
    "ALPHABET",
    "RATIO",
    "MAX_ATOM_DEPTH",
    "Point",
    "Similitude",
    "SIMILITUDES",
    "CylinderSquare",
    "MomentData",
    "MOMENTS",
    "HalfCarpet",
    "WeightedPoint",
    "as_point",
    "check_word",
    "similitude_apply",
    "word_apply",
    "words",
    "cylinder",
    "atoms",
    "atom_arrays",
    "cylinder_point_distortion",
    "cantor_atoms",
    "marginal_atoms",
    "diagonal_half",
    "write_atoms_csv",
    "read_atoms_csv",
]

Point = tuple[Fraction, Fraction]

ALPHABET = "1234"
RATIO = Fraction(1, 3)
MAX_ATOM_DEPTH = 12

_HALF = Fraction(1, 2)
_TWO_THIRDS = Fraction(2, 3)


def as_point(p) -> Point:
    """Coerce a pair of numbers (ints, Fractions, ``"p/q"`` strings) to an exact point."""
    x, y = p
    return (Fraction(x), Fraction(y))


@dataclass(frozen=True)
class Similitude:
    index: int
    translation: Point
    ratio: Fraction = RATIO

    def __call__(self, p) -> Point:
        x, y = p
        return (x * self.ratio + self.translation[0], y * self.ratio + self.translation[1])


SIMILITUDES = {
    1: Similitude(1, (Fraction(0), Fraction(0))),
    2: Similitude(2, (_TWO_THIRDS, Fraction(0))),
    3: Similitude(3, (Fraction(0), _TWO_THIRDS)),
    4: Similitude(4, (_TWO_THIRDS, _TWO_THIRDS)),
}


def check_word(word) -> str:
    """Normalise ``word`` to a string over ``"1234"``.

    Accepts strings or sequences of integers, so ``[1, 2]`` and ``"12"`` are
    the same word.
    """
    if not isinstance(word, str):
        word = "".join(str(c) for c in word)
    bad = set(word) - set(ALPHABET)
    if bad:
        raise InputError(f"invalid symbol(s) {sorted(bad)} in word {word!r}")
    return word


def similitude_apply(i, p) -> Point:
    try:
        s = SIMILITUDES[int(i)]
    except (KeyError, ValueError, TypeError):
        raise InputError(f"similitude index must be one of 1..4, got {i!r}") from None
    return s(as_point(p))


def word_apply(word, p) -> Point:
    """Apply ``S_w = S_{w1} o ... o S_{wk}``; the last letter acts first."""
    word = check_word(word)
    x, y = as_point(p)
    for c in reversed(word):
        tx, ty = SIMILITUDES[int(c)].translation
        x, y = x * RATIO + tx, y * RATIO + ty
    return (x, y)


def words(k: int) -> Iterator[str]:
    """All words of length ``k`` in lexicographic order (1 < 2 < 3 < 4)."""
    if k < 0:
        raise InputError("word length must be non-negative")
    for letters in itertools.product(ALPHABET, repeat=k):
        yield "".join(letters)


@dataclass(frozen=True)
class CylinderSquare:
    word: str
    lower_corner: Point
    side: Fraction
    centroid: Point
    weight: Fraction

    @property
    def depth(self) -> int:
        return len(self.word)

    def corners(self) -> tuple[Point, Point, Point, Point]:
        x, y = self.lower_corner
        s = self.side
        return ((x, y), (x + s, y), (x, y + s), (x + s, y + s))

    def children(self) -> tuple["CylinderSquare", ...]:
        return tuple(cylinder(self.word + c) for c in ALPHABET)

    def contains(self, p) -> bool:
        x, y = p
        x0, y0 = self.lower_corner
        return x0 <= x <= x0 + self.side and y0 <= y <= y0 + self.side


def cylinder(word) -> CylinderSquare:
    word = check_word(word)
    k = len(word)
    corner = word_apply(word, (0, 0))
    side = RATIO**k
    centroid = (corner[0] + side / 2, corner[1] + side / 2)
    return CylinderSquare(word, corner, side, centroid, Fraction(1, 4**k))


@dataclass(frozen=True)
class MomentData:
    mean: Point
    variance: Fraction
    coordinate_variance: Fraction


# E(X) = (1/2, 1/2); each coordinate is Cantor distributed with variance 1/8.
MOMENTS = MomentData(
    mean=(_HALF, _HALF),
    variance=Fraction(1, 4),
    coordinate_variance=Fraction(1, 8),
)


class WeightedPoint(NamedTuple):
    point: Point
    mass: Fraction


def atoms(k: int, max_depth: int = MAX_ATOM_DEPTH) -> list[WeightedPoint]:
    """The depth-``k`` discretization: one atom of mass ``4**-k`` per cylinder centroid."""
    if k < 0:
        raise InputError("depth must be non-negative")
    if k > max_depth:
        raise ResourceError(f"depth {k} exceeds the configured maximum {max_depth}")
    xs, ys, den = atom_arrays(k, max_depth=max_depth)
    mass = Fraction(1, 4**k)
    return [
        WeightedPoint((Fraction(int(x), den), Fraction(int(y), den)), mass)
        for x, y in zip(xs.tolist(), ys.tolist())
    ]


def atom_arrays(k: int, max_depth: int = MAX_ATOM_DEPTH) -> tuple[np.ndarray, np.ndarray, int]:
    """Integer numerators of the depth-``k`` atom coordinates over the common denominator ``2*3**k``.

    Same lexicographic order as :func:`atoms`; every atom has mass ``4**-k``.
    """
    if k < 0:
        raise InputError("depth must be non-negative")
    if k > max_depth:
        raise ResourceError(f"depth {k} exceeds the configured maximum {max_depth}")
    # letter -> (x bit, y bit) of its translation
    bx = np.array([0, 1, 0, 1], dtype=np.int64)
    by = np.array([0, 0, 1, 1], dtype=np.int64)
    xs = np.ones(1, dtype=np.int64)
    ys = np.ones(1, dtype=np.int64)
    for j in range(1, k + 1):
        # letter j (1-based, most significant first) contributes 4 * b * 3**(k - j)
        scale = 4 * 3 ** (k - j)
        xs = (xs[:, None] + scale * bx[None, :]).reshape(-1)
        ys = (ys[:, None] + scale * by[None, :]).reshape(-1)
    return xs, ys, 2 * 3**k


def cylinder_point_distortion(word, a) -> Fraction:
    """``integral over J_w of |x - a|^2 dP``, in closed form."""
    word = check_word(word)
    a = as_point(a)
    k = len(word)
    cx, cy = word_apply(word, MOMENTS.mean)
    return Fraction(1, 4**k) * (MOMENTS.variance / 9**k + (cx - a[0]) ** 2 + (cy - a[1]) ** 2)


def cantor_atoms(k: int) -> list[WeightedPoint]:
    """Depth-``k`` atoms of the middle-thirds Cantor distribution, built from ``x/3`` and ``x/3 + 2/3``."""
    if k < 0:
        raise InputError("depth must be non-negative")
    pts = [_HALF]
    for _ in range(k):
        pts = [p * RATIO for p in pts] + [p * RATIO + _TWO_THIRDS for p in pts]
    pts.sort()
    mass = Fraction(1, 2**k)
    return [WeightedPoint((p,), mass) for p in pts]


def marginal_atoms(k: int, axis: str = "x") -> list[WeightedPoint]:
    """Project :func:`atoms` onto one axis and merge coincident coordinates."""
    try:
        idx = {"x": 0, "y": 1}[axis]
    except KeyError:
        raise InputError(f"axis must be 'x' or 'y', got {axis!r}") from None
    merged: dict[Fraction, Fraction] = {}
    for pt, mass in atoms(k):
        merged[pt[idx]] = merged.get(pt[idx], Fraction(0)) + mass
    return [WeightedPoint((c,), merged[c]) for c in sorted(merged)]


@dataclass(frozen=True)
class HalfCarpet:
    """The part of the carpet strictly below the main diagonal.

    ``centroid`` and ``variance`` are conditional on the half, whose mass is 1/2.
    The other three diagonal halves are images under square symmetries.
    """

    mass: Fraction
    centroid: Point
    variance: Fraction


def diagonal_half() -> HalfCarpet:
    """Solve the self-similar fixed point for the lower-right half ``L = {x1 > x2}``.

    ``L`` is the union of ``J_2`` (half of L's mass) with ``S_1(L)`` and
    ``S_4(L)`` (a quarter each), which gives linear equations for the first
    and second moments of ``L``.
    """
    q = Fraction(1, 4)
    t2 = SIMILITUDES[2].translation
    t4 = SIMILITUDES[4].translation
    c2 = word_apply("2", MOMENTS.mean)
    # h = c2/2 + (h/3)/4 + (h/3 + t4)/4   =>   h (1 - 1/6) = c2/2 + t4/4
    h = tuple((c2[i] / 2 + t4[i] * q) / (1 - Fraction(1, 6)) for i in range(2))

    second_full = MOMENTS.variance + sum(m * m for m in MOMENTS.mean)
    mean = MOMENTS.mean

    def image_second(t, m1, m2):
        # E|X/3 + t|^2 given E X = m1 and E|X|^2 = m2
        return m2 / 9 + Fraction(2, 3) * (t[0] * m1[0] + t[1] * m1[1]) + t[0] ** 2 + t[1] ** 2

    # M = E_L|X|^2 = 1/2 * E|S_2 X|^2 + 1/4 * E_L|X|^2/9 + 1/4 * E_L|S_4 X|^2
    const = _HALF * image_second(t2, mean, second_full) + q * image_second(t4, h, Fraction(0))
    m2 = const / (1 - q / 9 - q / 9)
    var = m2 - h[0] ** 2 - h[1] ** 2
    return HalfCarpet(_HALF, (h[0], h[1]), var)


def write_atoms_csv(k: int, fh) -> None:
    """Write ``atoms(k)`` as CSV with columns word, x_num, x_den, y_num, y_den, mass_num, mass_den."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["word", "x_num", "x_den", "y_num", "y_den", "mass_num", "mass_den"])
    for word, (pt, mass) in zip(words(k), atoms(k)):
        w.writerow(
            [word or "-", pt[0].numerator, pt[0].denominator, pt[1].numerator,
             pt[1].denominator, mass.numerator, mass.denominator]
        )


def read_atoms_csv(fh) -> list[WeightedPoint]:
    out = []
    for row in csv.DictReader(fh):
        pt = (Fraction(int(row["x_num"]), int(row["x_den"])),
              Fraction(int(row["y_num"]), int(row["y_den"])))
        out.append(WeightedPoint(pt, Fraction(int(row["mass_num"]), int(row["mass_den"]))))
    return out

