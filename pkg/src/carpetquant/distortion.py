"""Certified distortion, exact cell centroids and Lloyd iteration.

The exact evaluator walks the cylinder tree.  A cylinder lying inside one
closed Voronoi cell contributes its closed-form integral

    4^-k * (9^-k * V + |centroid - a|^2)

and is not refined further.  Cylinders that still straddle a bisector at the
depth cap contribute a rational bracket instead, so the result is an
:class:`Interval` that is a single point whenever everything resolves.

Leaf bracket
    upper: ``w * min_a (9^-K V + |c - a|^2)``, the exact integral of the best
    single site over the cylinder.
    lower: ``w * min_a dist(a, J)^2`` with ``dist`` the exact distance from the
    site to the closed square.  Both are rational and both are at least as
    tight as the ball bracket ``[w max(0, d - r)^2, w (d + r)^2]`` with
    ``r = sqrt(2) / (2 * 3^K)``, because the square sits inside that ball.

Diagonal split
    When the only sites competing for a cylinder centred on a diagonal of
    the unit square are mirror images across that diagonal, the bisector is
    the diagonal itself.  The measure is symmetric about it, so each site
    receives exactly half the cylinder, with the centroid and variance of
    the corresponding half-carpet (see :func:`carpetquant.measure.diagonal_half`).
    Only :func:`cell_centroids` and :func:`split_distortion` use this rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import AmbiguousCellError, DegenerateCellError, InputError
from .geometry import SYMMETRIES, Codebook
from .measure import (
    ALPHABET,
    MOMENTS,
    Point,
    WeightedPoint,
    as_point,
    atom_arrays,
    check_word,
    cylinder_point_distortion,
    diagonal_half,
    word_apply,
)

__all__ = [
    "Interval",
    "LloydReport",
    "AtomSet",
    "distortion_bounds",
    "split_distortion",
    "partial_sum_lower_bound",
    "cell_centroid",
    "cell_centroids",
    "is_cvt",
    "atom_distortion",
    "lloyd_step",
    "lloyd_run",
]

_V = MOMENTS.variance
_LETTER_BITS = {"1": (0, 0), "2": (1, 0), "3": (0, 1), "4": (1, 1)}


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise InputError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, value) -> bool:
        return self.lo <= value <= self.hi

    def __str__(self) -> str:
        if self.exact:
            return f"[{self.lo}]"
        return f"[{self.lo}, {self.hi}] (~[{float(self.lo):.9f}, {float(self.hi):.9f}])"


# ---------------------------------------------------------------------------
# cylinder descent


class _SiteTable:
    """Integer form of a codebook for fast, exact domination tests.

    Sites are stored as ``A_i = D * a_i`` with ``D`` the lcm of all
    denominators.  Site ``j`` dominates site ``i`` on the square of depth
    ``k`` with centre ``C / (2 * 3^k)`` iff

        D * (C . (A_i - A_j) + |A_i - A_j|_1) + 3^k * (|A_j|^2 - |A_i|^2) <= 0,

    which is the maximum over the square of ``|x - a_j|^2 - |x - a_i|^2``
    scaled by the positive constant ``D^2 * 3^k``.
    """

    def __init__(self, codebook: Codebook):
        self.points = codebook.points
        den = 1
        for x, y in self.points:
            den = math.lcm(den, x.denominator, y.denominator)
        self.den = den
        self.ints = [(int(x * den), int(y * den)) for x, y in self.points]
        n = len(self.points)
        norms = [ax * ax + ay * ay for ax, ay in self.ints]
        self.pair = [[None] * n for _ in range(n)]
        for i, (xi, yi) in enumerate(self.ints):
            for j, (xj, yj) in enumerate(self.ints):
                if i != j:
                    dx, dy = xi - xj, yi - yj
                    self.pair[i][j] = (dx, dy, abs(dx) + abs(dy), norms[j] - norms[i])

    def undominated(self, cand: Sequence[int], cx: int, cy: int, p3: int) -> list[int]:
        if len(cand) == 1:
            return list(cand)
        d = self.den
        keep = []
        for i in cand:
            row = self.pair[i]
            for j in cand:
                if j == i:
                    continue
                dx, dy, l1, q = row[j]
                if d * (cx * dx + cy * dy + l1) + p3 * q <= 0:
                    break
            else:
                keep.append(i)
        return keep


@dataclass(frozen=True)
class _Node:
    kind: str  # "resolved" | "split" | "ambiguous"
    word: str
    ix: int
    iy: int
    sites: tuple[int, ...]  # resolved: (j,); split: (site owning piece 0, site owning piece 1)
    axis: str = ""  # "main" | "anti" for split nodes

    @property
    def depth(self) -> int:
        return len(self.word)

    @property
    def weight(self) -> Fraction:
        return Fraction(1, 4 ** len(self.word))

    @property
    def centroid(self) -> Point:
        den = 2 * 3 ** len(self.word)
        return (Fraction(2 * self.ix + 1, den), Fraction(2 * self.iy + 1, den))

    @property
    def side(self) -> Fraction:
        return Fraction(1, 3 ** len(self.word))

    @property
    def lower_corner(self) -> Point:
        s = self.side
        return (self.ix * s, self.iy * s)


def _split_pair(table: _SiteTable, word: str, cand: list[int]) -> Optional[tuple[str, tuple[int, int]]]:
    if len(cand) != 2:
        return None
    i, j = cand
    a, b = table.points[i], table.points[j]
    if set(word) <= {"1", "4"} and b == (a[1], a[0]):
        # piece 0 is the half below the main diagonal
        return "main", (i, j) if a[0] > a[1] else (j, i)
    if set(word) <= {"2", "3"} and b == (1 - a[1], 1 - a[0]):
        # piece 0 is the half below the anti-diagonal
        return "anti", (i, j) if a[0] + a[1] < 1 else (j, i)
    return None


def _descend(codebook: Codebook, depth_cap: int, split: bool) -> Iterator[_Node]:
    """Yield terminal cylinders in lexicographic order."""
    table = _SiteTable(codebook)
    stack = [("", 0, 0, tuple(range(len(codebook))))]
    while stack:
        word, ix, iy, cand = stack.pop()
        k = len(word)
        live = table.undominated(cand, 2 * ix + 1, 2 * iy + 1, 3**k)
        if len(live) == 1:
            yield _Node("resolved", word, ix, iy, (live[0],))
            continue
        if split:
            hit = _split_pair(table, word, live)
            if hit is not None:
                yield _Node("split", word, ix, iy, hit[1], hit[0])
                continue
        if k >= depth_cap:
            yield _Node("ambiguous", word, ix, iy, tuple(live))
            continue
        live = tuple(live)
        for c in reversed(ALPHABET):
            bx, by = _LETTER_BITS[c]
            stack.append((word + c, 3 * ix + 2 * bx, 3 * iy + 2 * by, live))


def _cyl_integral(node: _Node, a: Point) -> Fraction:
    c = node.centroid
    k = node.depth
    return node.weight * (_V / 9**k + (c[0] - a[0]) ** 2 + (c[1] - a[1]) ** 2)


def _square_sq_dist(node: _Node, a: Point) -> Fraction:
    x0, y0 = node.lower_corner
    s = node.side
    dx = max(x0 - a[0], Fraction(0), a[0] - x0 - s)
    dy = max(y0 - a[1], Fraction(0), a[1] - y0 - s)
    return dx * dx + dy * dy


def distortion_bounds(codebook, depth_cap: int) -> Interval:
    """Certified enclosure ``[lo, hi]`` of ``V(P; codebook)``."""
    if depth_cap < 0:
        raise InputError("depth_cap must be non-negative")
    codebook = codebook if isinstance(codebook, Codebook) else Codebook(codebook)
    exact = Fraction(0)
    lo_extra = Fraction(0)
    hi_extra = Fraction(0)
    pts = codebook.points
    for node in _descend(codebook, depth_cap, split=False):
        if node.kind == "resolved":
            exact += _cyl_integral(node, pts[node.sites[0]])
        else:
            hi_extra += min(_cyl_integral(node, pts[j]) for j in node.sites)
            lo_extra += node.weight * min(_square_sq_dist(node, pts[j]) for j in node.sites)
    return Interval(exact + lo_extra, exact + hi_extra)


_HALF = diagonal_half()
# centroids of the four diagonal halves of the unit carpet
_HALF_CENTROIDS = {
    "main": (_HALF.centroid, SYMMETRIES["transpose"](_HALF.centroid)),
    "anti": (SYMMETRIES["rot270"](_HALF.centroid), SYMMETRIES["rot90"](_HALF.centroid)),
}


def _split_pieces(node: _Node) -> list[tuple[int, Fraction, Point]]:
    """(site, mass, centroid) for the two halves of a split cylinder."""
    mass = node.weight / 2
    return [
        (site, mass, word_apply(node.word, h))
        for site, h in zip(node.sites, _HALF_CENTROIDS[node.axis])
    ]


def split_distortion(codebook, depth_cap: int) -> Fraction:
    """Exact ``V(P; codebook)`` using the diagonal split; raises if anything stays ambiguous."""
    codebook = codebook if isinstance(codebook, Codebook) else Codebook(codebook)
    pts = codebook.points
    total = Fraction(0)
    for node in _descend(codebook, depth_cap, split=True):
        if node.kind == "resolved":
            total += _cyl_integral(node, pts[node.sites[0]])
        elif node.kind == "split":
            var = _HALF.variance / 9**node.depth
            for site, mass, c in _split_pieces(node):
                a = pts[site]
                total += mass * (var + (c[0] - a[0]) ** 2 + (c[1] - a[1]) ** 2)
        else:
            raise AmbiguousCellError(node.word, node.sites)
    return total


def cell_centroids(codebook, depth_cap: int) -> list[tuple[Point, Fraction]]:
    """Exact ``(centroid, mass)`` of every Voronoi cell.

    Raises :class:`AmbiguousCellError` if a cylinder is still shared at the
    depth cap and :class:`DegenerateCellError` for a cell of zero mass.
    """
    codebook = codebook if isinstance(codebook, Codebook) else Codebook(codebook)
    n = len(codebook)
    mass = [Fraction(0)] * n
    mx = [Fraction(0)] * n
    my = [Fraction(0)] * n
    for node in _descend(codebook, depth_cap, split=True):
        if node.kind == "resolved":
            pieces = [(node.sites[0], node.weight, node.centroid)]
        elif node.kind == "split":
            pieces = _split_pieces(node)
        else:
            raise AmbiguousCellError(node.word, node.sites)
        for site, w, c in pieces:
            mass[site] += w
            mx[site] += w * c[0]
            my[site] += w * c[1]
    out = []
    for j in range(n):
        if mass[j] == 0:
            raise DegenerateCellError(j)
        out.append(((mx[j] / mass[j], my[j] / mass[j]), mass[j]))
    return out


def cell_centroid(codebook, site: int, depth_cap: int) -> tuple[Point, Fraction]:
    codebook = codebook if isinstance(codebook, Codebook) else Codebook(codebook)
    if not 0 <= site < len(codebook):
        raise InputError(f"site {site} out of range for a codebook of size {len(codebook)}")
    mass = Fraction(0)
    mx = my = Fraction(0)
    for node in _descend(codebook, depth_cap, split=True):
        if site not in node.sites:
            continue
        if node.kind == "resolved":
            pieces = [(site, node.weight, node.centroid)]
        elif node.kind == "split":
            pieces = _split_pieces(node)
        else:
            raise AmbiguousCellError(node.word, node.sites)
        for s, w, c in pieces:
            if s == site:
                mass += w
                mx += w * c[0]
                my += w * c[1]
    if mass == 0:
        raise DegenerateCellError(site)
    return (mx / mass, my / mass), mass


def is_cvt(codebook, depth_cap: int) -> bool:
    """True iff every site is the exact centroid of its own cell."""
    codebook = codebook if isinstance(codebook, Codebook) else Codebook(codebook)
    return all(c == a for (c, _), a in zip(cell_centroids(codebook, depth_cap), codebook))


def partial_sum_lower_bound(point, words: Iterable, include_variance_terms: bool = True) -> Fraction:
    """Sum of cylinder integrals of ``|x - point|^2`` over non-overlapping cylinders.

    Any such sum over cylinders inside a cell bounds that cell's distortion
    from below.  With ``include_variance_terms=False`` the within-cylinder
    variance ``4^-k 9^-k V`` is left out of each term.
    """
    point = as_point(point)
    ws = [check_word(w) for w in words]
    for a in ws:
        for b in ws:
            if a is not b and b.startswith(a):
                raise InputError(f"cylinders {a!r} and {b!r} overlap")
    if len(set(ws)) != len(ws):
        raise InputError("duplicate words in the cylinder list")
    total = Fraction(0)
    for w in ws:
        term = cylinder_point_distortion(w, point)
        if not include_variance_terms:
            term -= Fraction(1, 4 ** len(w)) * _V / 9 ** len(w)
        total += term
    return total


# ---------------------------------------------------------------------------
# Lloyd iteration on atomic measures


class AtomSet:
    """Exact atoms as integer numerators over common denominators.

    ``x = xs / den``, ``y = ys / den``, ``mass = ms / mden``.
    """

    def __init__(self, xs, ys, den: int, ms, mden: int):
        self.xs = np.asarray(xs)
        self.ys = np.asarray(ys)
        self.ms = np.asarray(ms)
        self.den = int(den)
        self.mden = int(mden)
        if int(self.ms.sum()) != self.mden:
            raise InputError("atom masses must sum to 1")
        if (self.ms <= 0).any():
            raise InputError("atom masses must be positive")
        self._fx = self.xs.astype(float) / self.den
        self._fy = self.ys.astype(float) / self.den

    def __len__(self) -> int:
        return len(self.xs)

    @classmethod
    def from_depth(cls, k: int) -> "AtomSet":
        xs, ys, den = atom_arrays(k)
        return cls(xs, ys, den, np.ones(len(xs), dtype=np.int64), 4**k)

    @classmethod
    def from_weighted(cls, atoms: Iterable[WeightedPoint]) -> "AtomSet":
        atoms = [WeightedPoint(as_point(p), Fraction(m)) for p, m in atoms]
        if not atoms:
            raise InputError("empty atom list")
        den = 1
        mden = 1
        for (x, y), m in atoms:
            den = math.lcm(den, x.denominator, y.denominator)
            mden = math.lcm(mden, m.denominator)
        xs = [int(x * den) for (x, _), _ in atoms]
        ys = [int(y * den) for (_, y), _ in atoms]
        ms = [int(m * mden) for _, m in atoms]
        big = max(map(abs, xs + ys)) * max(ms) * len(atoms) > 2**40
        dtype = object if big else np.int64
        return cls(np.array(xs, dtype=dtype), np.array(ys, dtype=dtype), den,
                   np.array(ms, dtype=dtype), mden)

    def point(self, i: int) -> Point:
        return (Fraction(int(self.xs[i]), self.den), Fraction(int(self.ys[i]), self.den))

    def mass(self, i: int) -> Fraction:
        return Fraction(int(self.ms[i]), self.mden)


def _as_atoms(atoms) -> AtomSet:
    return atoms if isinstance(atoms, AtomSet) else AtomSet.from_weighted(atoms)


def _wide(arr: np.ndarray, bound: int) -> np.ndarray:
    # exact sums need Python ints once int64 could overflow
    return arr.astype(object) if bound >= 2**62 else arr.astype(np.int64)


@dataclass
class _Assignment:
    labels: np.ndarray  # lowest-index nearest site per atom
    ties: dict[int, tuple[int, ...]]  # atom -> all exactly-nearest sites (only when > 1)
    distortion: Fraction


def _assign(codebook: Codebook, atoms: AtomSet) -> _Assignment:
    pts = codebook.points
    fx = np.array([float(x) for x, _ in pts])
    fy = np.array([float(y) for _, y in pts])
    d = (atoms._fx[:, None] - fx[None, :]) ** 2 + (atoms._fy[:, None] - fy[None, :]) ** 2
    labels = np.argmin(d, axis=1)
    ties: dict[int, tuple[int, ...]] = {}
    if len(pts) > 1:
        part = np.partition(d, 1, axis=1)
        near = np.nonzero(part[:, 1] - part[:, 0] <= 1e-9)[0]
        for i in near.tolist():
            p = atoms.point(i)
            exact = [(p[0] - a[0]) ** 2 + (p[1] - a[1]) ** 2 for a in pts]
            best = min(exact)
            winners = tuple(j for j, e in enumerate(exact) if e == best)
            labels[i] = winners[0]
            if len(winners) > 1:
                ties[i] = winners
    distortion = _labelled_distortion(codebook, atoms, labels)
    return _Assignment(labels, ties, distortion)


def _site_sums(atoms: AtomSet, labels: np.ndarray, n: int):
    """Per-site integer sums of m, m*x, m*y, m*(x^2 + y^2)."""
    xs, ys, ms = atoms.xs, atoms.ys, atoms.ms
    top = max(int(np.abs(xs).max()), int(np.abs(ys).max()), 1)
    mtop = int(ms.max())
    count = len(xs)
    ms_w = _wide(ms, mtop * count)
    mx = _wide(ms, mtop * top * count) * _wide(xs, mtop * top * count)
    my = _wide(ms, mtop * top * count) * _wide(ys, mtop * top * count)
    bound2 = mtop * top * top * 2 * count
    mq = _wide(ms, bound2) * (_wide(xs, bound2) ** 2 + _wide(ys, bound2) ** 2)
    out = []
    for arr in (ms_w, mx, my, mq):
        acc = np.zeros(n, dtype=arr.dtype)
        if arr.dtype == object:
            acc[:] = 0
        np.add.at(acc, labels, arr)
        out.append([int(v) for v in acc])
    return out


def _labelled_distortion(codebook: Codebook, atoms: AtomSet, labels: np.ndarray) -> Fraction:
    n = len(codebook)
    sm, sx, sy, sq = _site_sums(atoms, labels, n)
    den, mden = atoms.den, atoms.mden
    total = Fraction(0)
    for j, (ax, ay) in enumerate(codebook.points):
        if sm[j] == 0:
            continue
        # sum m |x - a|^2 = sum m|x|^2 - 2 a . sum m x + |a|^2 sum m
        m = Fraction(sm[j], mden)
        second = Fraction(sq[j], mden * den * den)
        first_x = Fraction(sx[j], mden * den)
        first_y = Fraction(sy[j], mden * den)
        total += second - 2 * (ax * first_x + ay * first_y) + (ax * ax + ay * ay) * m
    return total


def atom_distortion(codebook, atoms) -> Fraction:
    """Exact distortion of ``codebook`` on an atomic measure."""
    codebook = codebook if isinstance(codebook, Codebook) else Codebook(codebook)
    return _assign(codebook, _as_atoms(atoms)).distortion


def _update(codebook: Codebook, atoms: AtomSet, asg: _Assignment, ties: str) -> Codebook:
    n = len(codebook)
    labels = asg.labels
    split = ties == "split" and asg.ties
    if split:
        labels = labels.copy()
        tied = np.array(sorted(asg.ties), dtype=np.int64)
        # tied atoms are re-added below with their mass shared equally
        keep = np.ones(len(labels), dtype=bool)
        keep[tied] = False
        sm, sx, sy, _ = _site_sums(_subset(atoms, keep), labels[keep], n)
    else:
        sm, sx, sy, _ = _site_sums(atoms, labels, n)
    mass = [Fraction(v, atoms.mden) for v in sm]
    mxs = [Fraction(v, atoms.mden * atoms.den) for v in sx]
    mys = [Fraction(v, atoms.mden * atoms.den) for v in sy]
    if split:
        for i, winners in asg.ties.items():
            share = atoms.mass(i) / len(winners)
            px, py = atoms.point(i)
            for j in winners:
                mass[j] += share
                mxs[j] += share * px
                mys[j] += share * py
    new = []
    for j in range(n):
        if mass[j] == 0:
            raise DegenerateCellError(j)
        new.append((mxs[j] / mass[j], mys[j] / mass[j]))
    return Codebook(new)


def _subset(atoms: AtomSet, keep: np.ndarray) -> AtomSet:
    sub = AtomSet.__new__(AtomSet)
    sub.xs, sub.ys, sub.ms = atoms.xs[keep], atoms.ys[keep], atoms.ms[keep]
    sub.den, sub.mden = atoms.den, atoms.mden
    sub._fx, sub._fy = atoms._fx[keep], atoms._fy[keep]
    return sub


def _check_ties(ties: str) -> None:
    if ties not in ("lowest", "split"):
        raise InputError(f"ties must be 'lowest' or 'split', got {ties!r}")


def lloyd_step(codebook, atoms, ties: str = "lowest") -> Codebook:
    """One Lloyd update: move every site to the mass-weighted mean of its atoms.

    ``ties="lowest"`` gives an equidistant atom to the lowest-index site;
    ``ties="split"`` shares its mass equally between all nearest sites.
    """
    _check_ties(ties)
    codebook = codebook if isinstance(codebook, Codebook) else Codebook(codebook)
    atoms = _as_atoms(atoms)
    return _update(codebook, atoms, _assign(codebook, atoms), ties)


@dataclass
class LloydReport:
    codebook: Codebook
    distortion: Fraction
    iterations: int
    converged: bool
    history: list[Fraction] = field(default_factory=list)


def lloyd_run(initial, atoms, max_iter: int = 100, ties: str = "lowest") -> LloydReport:
    """Iterate :func:`lloyd_step` until the codebook stops changing exactly.

    ``history`` holds the atom distortion of every codebook visited, starting
    with ``initial``; it is non-increasing.
    """
    _check_ties(ties)
    if max_iter < 1:
        raise InputError("max_iter must be at least 1")
    current = initial if isinstance(initial, Codebook) else Codebook(initial)
    atoms = _as_atoms(atoms)
    asg = _assign(current, atoms)
    history = [asg.distortion]
    for it in range(1, max_iter + 1):
        nxt = _update(current, atoms, asg, ties)
        if nxt == current:
            return LloydReport(current, asg.distortion, it, True, history)
        current = nxt
        asg = _assign(current, atoms)
        history.append(asg.distortion)
    return LloydReport(current, asg.distortion, max_iter, False, history)
