"""Optimal sets of n-means: base sets, the level decomposition, counts and errors.

For ``n >= 4`` write ``n = m 4^l + k`` with ``m`` in {1, 2, 3} and
``0 <= k < 4^l``.  An optimal set places a copy of an optimal ``m``-set in
every level-``l`` cylinder, except for a chosen subset ``t`` of ``k``
cylinders which get an optimal ``(m+1)``-set instead.

Enumeration order is fixed: subsets ``t`` in lexicographic order of their
sorted word tuples, then per-cylinder variant choices in mixed radix with the
first cylinder (lexicographically) as the most significant digit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Sequence

from .errors import InputError
from .geometry import SYMMETRIES, Codebook
from .measure import check_word, word_apply, words

__all__ = [
    "Decomposition",
    "VARIANT_COUNTS",
    "BASE_ERRORS",
    "base_set",
    "decompose",
    "optimal_set",
    "optimal_set_at",
    "optimal_count",
    "quantization_error",
    "enumerate_optimal",
    "variant_maps",
    "cylinder_counts",
]

_F = Fraction

VARIANT_COUNTS = {1: 1, 2: 2, 3: 4, 4: 1}

# V_1 .. V_4; V_4 is re-derived by the exact evaluator in the tests.
BASE_ERRORS = {1: _F(1, 4), 2: _F(5, 36), 3: _F(1, 12), 4: _F(1, 36)}

_ALPHA3 = ((_F(1, 6), _F(1, 6)), (_F(5, 6), _F(1, 6)), (_F(1, 2), _F(5, 6)))

_BASE = {
    1: [((_F(1, 2), _F(1, 2)),)],
    2: [
        ((_F(1, 6), _F(1, 2)), (_F(5, 6), _F(1, 2))),
        ((_F(1, 2), _F(1, 6)), (_F(1, 2), _F(5, 6))),
    ],
    # the printed three-point set and its images under the rotations of the square
    3: [tuple(SYMMETRIES[g](p) for p in _ALPHA3) for g in ("identity", "rot180", "rot270", "rot90")],
    4: [tuple(word_apply(c, (_F(1, 2), _F(1, 2))) for c in "1234")],
}


def base_set(m: int, variant: int = 0) -> Codebook:
    if m not in _BASE:
        raise InputError(f"base sets exist for m in 1..4, got {m}")
    if not 0 <= variant < VARIANT_COUNTS[m]:
        raise InputError(f"m={m} has {VARIANT_COUNTS[m]} variant(s), got index {variant}")
    return Codebook(_BASE[m][variant])


@dataclass(frozen=True)
class Decomposition:
    n: int
    level: int
    m: int
    k: int
    t: tuple[str, ...] = field(default=())

    @property
    def cells(self) -> int:
        return 4**self.level


def decompose(n: int) -> Decomposition:
    """``n = m 4^l + k`` with ``4^l <= n < 4^(l+1)``."""
    n = int(n)
    if n < 4:
        raise InputError(f"the level decomposition needs n >= 4, got {n}")
    level = (n.bit_length() - 1) // 2
    base = 4**level
    m = n // base
    return Decomposition(n, level, m, n - m * base)


def optimal_count(n: int) -> int:
    n = int(n)
    if n < 1:
        raise InputError("n must be positive")
    if n < 4:
        return {1: 1, 2: 2, 3: 4}[n]
    d = decompose(n)
    cells = d.cells
    count = (2 ** (d.m - 1)) ** (cells - d.k) * math.comb(cells, d.k)
    if d.m in (1, 2):
        count *= 2 ** (d.m * d.k)
    return count


def quantization_error(n: int) -> Fraction:
    n = int(n)
    if n < 1:
        raise InputError("n must be positive")
    if n <= 4:
        return BASE_ERRORS[n]
    d = decompose(n)
    cells = d.cells
    plain = (d.m + 1) * cells - n
    extra = n - d.m * cells
    return (plain * BASE_ERRORS[d.m] + extra * BASE_ERRORS[d.m + 1]) / 36**d.level


def _normalise_t(d: Decomposition, t) -> tuple[str, ...]:
    t = tuple(sorted({check_word(w) for w in (t or ())}))
    if len(t) != d.k:
        raise InputError(f"n={d.n} needs |t| = {d.k} level-{d.level} words, got {len(t)}")
    for w in t:
        if len(w) != d.level:
            raise InputError(f"word {w!r} in t is not a level-{d.level} word")
    return t


def optimal_set(n: int, t: Sequence[str] = (), variants: Optional[Mapping[str, int] | int] = None) -> Codebook:
    """Build the optimal set for ``n`` from the extra-point subset ``t`` and variant choices.

    ``variants`` maps level-``l`` words to the variant index of the base set
    placed in that cylinder (missing words use variant 0).  For ``n <= 3``
    it is a plain integer.
    """
    n = int(n)
    if n < 1:
        raise InputError("n must be positive")
    if n < 4:
        if t:
            raise InputError("t must be empty for n <= 3")
        v = variants if isinstance(variants, int) else 0
        return base_set(n, v)
    d = decompose(n)
    tset = set(_normalise_t(d, t))
    variants = variants or {}
    if isinstance(variants, int):
        raise InputError("variants must map words to variant indices for n >= 4")
    variants = {check_word(w): int(v) for w, v in variants.items()}
    unknown = [w for w in variants if len(w) != d.level]
    if unknown:
        raise InputError(f"variant keys {unknown} are not level-{d.level} words")
    pts = []
    for w in words(d.level):
        m = d.m + 1 if w in tset else d.m
        for p in base_set(m, variants.get(w, 0)):
            pts.append(word_apply(w, p))
    return Codebook(pts)


def _choices(d: Decomposition, t: Sequence[str]) -> list[tuple[str, int]]:
    tset = set(t)
    return [(w, VARIANT_COUNTS[d.m + 1 if w in tset else d.m]) for w in words(d.level)]


def enumerate_optimal(n: int, limit: Optional[int] = None) -> Iterator[Codebook]:
    """Yield distinct optimal sets in the fixed order, at most ``limit`` of them."""
    if limit is not None and limit < 1:
        raise InputError("limit must be at least 1")
    n = int(n)
    produced = 0
    for t, variants in _enumerate_specs(n):
        if limit is not None and produced >= limit:
            return
        yield optimal_set(n, t, variants)
        produced += 1


def variant_maps(n: int, t: Sequence[str]) -> Iterator[dict[str, int]]:
    """All variant maps compatible with the subset ``t``, in enumeration order."""
    d = decompose(n)
    choices = _choices(d, _normalise_t(d, t))
    for digits in itertools.product(*(range(r) for _, r in choices)):
        yield {w: v for (w, _), v in zip(choices, digits) if v}


def _enumerate_specs(n: int):
    if n < 4:
        for v in range(VARIANT_COUNTS[n]):
            yield (), v
        return
    d = decompose(n)
    for t in itertools.combinations(list(words(d.level)), d.k):
        for variants in variant_maps(n, t):
            yield t, variants


def _unrank_combination(pool: Sequence[str], k: int, rank: int) -> tuple[str, ...]:
    out = []
    start = 0
    for slots in range(k, 0, -1):
        for i in range(start, len(pool)):
            block = math.comb(len(pool) - i - 1, slots - 1)
            if rank < block:
                out.append(pool[i])
                start = i + 1
                break
            rank -= block
    return tuple(out)


def optimal_set_at(n: int, index: int) -> tuple[Codebook, tuple[str, ...], dict[str, int]]:
    """The ``index``-th set of :func:`enumerate_optimal` without enumerating the ones before it."""
    n = int(n)
    total = optimal_count(n)
    if not 0 <= index < total:
        raise InputError(f"index {index} out of range for {total} optimal sets")
    if n < 4:
        return base_set(n, index), (), {}
    d = decompose(n)
    pool = list(words(d.level))
    # every subset t admits the same number of variant maps
    per_t = total // math.comb(d.cells, d.k)
    t = _unrank_combination(pool, d.k, index // per_t)
    rest = index % per_t
    choices = _choices(d, t)
    digits = []
    for _, r in reversed(choices):
        digits.append(rest % r)
        rest //= r
    digits.reverse()
    variants = {w: v for (w, _), v in zip(choices, digits) if v}
    return optimal_set(n, t, variants), t, variants


def cylinder_counts(codebook, level: int) -> dict[str, int]:
    """Number of codebook points in each closed level-``level`` cylinder, plus ``""`` for points in none."""
    counts = {w: 0 for w in words(level)}
    counts[""] = 0
    side = Fraction(1, 3**level)
    corners = {w: word_apply(w, (0, 0)) for w in words(level)}
    for x, y in codebook:
        hit = [w for w, (cx, cy) in corners.items() if cx <= x <= cx + side and cy <= y <= cy + side]
        if not hit:
            counts[""] += 1
        for w in hit:
            counts[w] += 1
    return counts
