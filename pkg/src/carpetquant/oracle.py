"""Brute-force cross-check: multi-start Lloyd on the depth-k atomic measure.

Random numbers come from numpy's PCG64 bit generator.  The run seed feeds a
``SeedSequence`` which is spawned into one independent child stream per
restart, so restart ``i`` sees the same numbers whatever the thread count.

Initial codebooks use k-means++ seeding over atoms: the first atom is drawn
by mass, each later one with probability proportional to mass times squared
distance to the nearest chosen atom.  Already chosen atoms have zero weight,
so draws are without replacement.

Because atoms sit at cylinder centroids, a codebook whose cells are unions of
depth-k cylinders has true distortion equal to its atom distortion plus
``V * 9^-k`` (V = 1/4).  That sum is reported as ``corrected_distortion``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .distortion import (
    AtomSet,
    Interval,
    LloydReport,
    distortion_bounds,
    is_cvt,
    lloyd_run,
    partial_sum_lower_bound,
    split_distortion,
)
from .errors import DegenerateCellError, InputError
from .geometry import Codebook
from .measure import MAX_ATOM_DEPTH, MOMENTS
from .optimal import base_set, enumerate_optimal, optimal_count, quantization_error

__all__ = [
    "THREADS_ENV",
    "MATCH_TOLERANCE",
    "BETA3",
    "DIAGONAL_PAIR",
    "BETA3_WORDS",
    "DIAGONAL_PAIR_WORDS",
    "OracleConfig",
    "OracleResult",
    "TrapReport",
    "brute_force",
    "initial_codebook",
    "match_optimal",
    "diagonal_trap_check",
    "thread_count",
]

THREADS_ENV = "CARPETQUANT_THREADS"
MATCH_TOLERANCE = 1e-6
_MATCH_LIMIT = 4096  # largest family scanned by match_optimal

_F = Fraction

# Three-point centroidal configuration that is not optimal.
BETA3 = Codebook([(_F(5, 6), _F(5, 6)), (_F(13, 90), _F(19, 30)), (_F(19, 30), _F(13, 90))])
# Two-point centroidal configuration split by the main diagonal.
DIAGONAL_PAIR = Codebook([(_F(7, 10), _F(3, 10)), (_F(3, 10), _F(7, 10))])

# Cylinders lying wholly in the cell of (13/90, 19/30) under BETA3; the
# mirror images carry the same mass for (19/30, 13/90).
BETA3_WORDS = (
    "3", "13", "113", "143", "1113", "1143", "1413", "1443",
    "11113", "11143", "11413", "11443", "14113", "14143", "14413", "14443",
    "111113", "111143", "111413", "111443", "114113", "114143",
)
# Cylinders lying wholly in the cell of (7/10, 3/10) under DIAGONAL_PAIR.
DIAGONAL_PAIR_WORDS = (
    "2", "12", "42", "112", "412", "142", "442",
    "1112", "1412", "1142", "1442", "4112", "4412", "4142", "4442",
)


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


@dataclass(frozen=True)
class OracleConfig:
    n: int
    depth: int
    restarts: int = 64
    seed: int = 0
    max_iter: int = 100

    def __post_init__(self):
        if self.n < 1:
            raise InputError("n must be positive")
        if not 0 <= self.depth <= MAX_ATOM_DEPTH:
            raise InputError(f"depth must lie in 0..{MAX_ATOM_DEPTH}")
        if self.n > 4**self.depth:
            raise InputError(f"n={self.n} exceeds the {4**self.depth} atoms at depth {self.depth}")
        if self.restarts < 1:
            raise InputError("restarts must be at least 1")
        if self.max_iter < 1:
            raise InputError("max_iter must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")


@dataclass
class OracleResult:
    config: OracleConfig
    best: LloydReport
    best_restart: int
    corrected_distortion: Fraction
    matched_optimal: Optional[int]
    # one report per restart, None where a cell emptied
    runs: list[Optional[LloydReport]] = field(default_factory=list)

    @property
    def restart_distortions(self) -> list[Optional[Fraction]]:
        return [None if r is None else r.distortion for r in self.runs]

    @property
    def degenerate_restarts(self) -> int:
        return sum(d is None for d in self.restart_distortions)

    @property
    def best_hits(self) -> int:
        """Restarts that reached the best distortion."""
        return sum(d == self.best.distortion for d in self.restart_distortions)


def initial_codebook(atoms: AtomSet, n: int, rng: np.random.Generator) -> Codebook:
    """k-means++ seeding over atoms, drawing without replacement."""
    mass = atoms.ms.astype(float)
    chosen = [int(rng.choice(len(atoms), p=mass / mass.sum()))]
    d2 = (atoms._fx - atoms._fx[chosen[0]]) ** 2 + (atoms._fy - atoms._fy[chosen[0]]) ** 2
    for _ in range(1, n):
        w = mass * d2
        w[chosen] = 0.0
        total = w.sum()
        if total <= 0:
            # every remaining atom coincides with a chosen one; fall back to mass
            w = mass.copy()
            w[chosen] = 0.0
            total = w.sum()
        i = int(rng.choice(len(atoms), p=w / total))
        chosen.append(i)
        d2 = np.minimum(d2, (atoms._fx - atoms._fx[i]) ** 2 + (atoms._fy - atoms._fy[i]) ** 2)
    return Codebook(atoms.point(i) for i in chosen)


def _one_restart(atoms: AtomSet, config: OracleConfig, seq: np.random.SeedSequence):
    rng = np.random.Generator(np.random.PCG64(seq))
    start = initial_codebook(atoms, config.n, rng)
    try:
        return lloyd_run(start, atoms, max_iter=config.max_iter)
    except DegenerateCellError:
        return None


def _linf_match(a: Codebook, b: Codebook, tol: float) -> bool:
    if len(a) != len(b):
        return False
    fa = np.array(a.as_floats())
    fb = np.array(b.as_floats())
    cost = np.abs(fa[:, None, :] - fb[None, :, :]).max(axis=2)
    # a perfect matching using only pairs within tol exists iff this assignment costs 0
    rows, cols = linear_sum_assignment((cost > tol).astype(float))
    return bool((cost[rows, cols] <= tol).all())


def match_optimal(codebook: Codebook, n: int, tol: float = MATCH_TOLERANCE) -> Optional[int]:
    """Index of the first enumerated optimal set within ``tol`` in L-infinity after matching."""
    if len(codebook) != n or optimal_count(n) > _MATCH_LIMIT:
        return None
    for index, candidate in enumerate(enumerate_optimal(n)):
        if _linf_match(codebook, candidate, tol):
            return index
    return None


def brute_force(config: OracleConfig) -> OracleResult:
    atoms = AtomSet.from_depth(config.depth)
    children = np.random.SeedSequence(config.seed).spawn(config.restarts)
    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda s: _one_restart(atoms, config, s), children))
    else:
        reports = [_one_restart(atoms, config, s) for s in children]

    best_i = None
    for i, rep in enumerate(reports):
        if rep is not None and (best_i is None or rep.distortion < reports[best_i].distortion):
            best_i = i
    if best_i is None:
        raise DegenerateCellError(-1)
    best = reports[best_i]
    corrected = best.distortion + MOMENTS.variance / 9**config.depth
    return OracleResult(
        config=config,
        best=best,
        best_restart=best_i,
        corrected_distortion=corrected,
        matched_optimal=match_optimal(best.codebook, config.n),
        runs=reports,
    )


@dataclass
class TrapReport:
    depth: int
    # the diagonal two-point configuration
    pair_is_cvt: bool
    pair_distortion: Fraction
    pair_lower_bound: Fraction
    pair_lloyd: LloydReport
    pair_lloyd_shift: float
    # the non-optimal three-point configuration
    beta3_is_cvt: bool
    beta3_bounds: Interval
    beta3_lower_bound: Fraction
    beta3_lloyd: LloydReport
    alpha3_distortion: Fraction
    v2: Fraction
    v3: Fraction

    @property
    def pair_trapped(self) -> bool:
        return self.pair_is_cvt and self.pair_lower_bound > self.v2

    @property
    def beta3_trapped(self) -> bool:
        return self.beta3_is_cvt and self.beta3_bounds.lo > self.v3 and self.alpha3_distortion < self.beta3_bounds.lo


def _shift(a: Codebook, b: Codebook) -> float:
    return max(abs(float(p) - float(q)) for u, v in zip(a, b) for p, q in zip(u, v))


def diagonal_trap_check(depth: int, cap: int = 12) -> TrapReport:
    """Show that two centroidal configurations are fixed points yet not optimal.

    Exact checks use the symmetric split of diagonal cylinders.  The Lloyd
    runs on depth-``depth`` atoms share tied atoms equally as well, which
    keeps the diagonal pair from drifting off its axis of symmetry.
    """
    if depth < 6:
        raise InputError("the trap check needs depth >= 6")
    atoms = AtomSet.from_depth(depth)
    pair_lloyd = lloyd_run(DIAGONAL_PAIR, atoms, ties="split")
    beta_lloyd = lloyd_run(BETA3, atoms, ties="split")
    return TrapReport(
        depth=depth,
        pair_is_cvt=is_cvt(DIAGONAL_PAIR, cap),
        pair_distortion=split_distortion(DIAGONAL_PAIR, cap),
        pair_lower_bound=2 * partial_sum_lower_bound(DIAGONAL_PAIR[0], DIAGONAL_PAIR_WORDS),
        pair_lloyd=pair_lloyd,
        pair_lloyd_shift=_shift(DIAGONAL_PAIR, pair_lloyd.codebook),
        beta3_is_cvt=is_cvt(BETA3, cap),
        beta3_bounds=distortion_bounds(BETA3, cap),
        beta3_lower_bound=MOMENTS.variance / 36
        + 2 * partial_sum_lower_bound(BETA3[1], BETA3_WORDS),
        beta3_lloyd=beta_lloyd,
        alpha3_distortion=distortion_bounds(base_set(3), 2).lo,
        v2=quantization_error(2),
        v3=quantization_error(3),
    )
