"""Quantization dimension and the scaled error sequence ``n^(2/beta) V_n``.

``beta = log 4 / log 3`` solves ``4 * 3^-beta = 1``.  Because
``4^(2/beta) = 9``, the scaled error at ``n = 4^l`` is the exact rational
``9^l V_(4^l) = 1/4``.

Writing ``n = x 4^l`` with ``x`` in ``[1, 4)``, the closed form of ``V_n`` gives

    n^(2/beta) V_n = g(x) = x^(2/beta) (13 - 4x) / 36   for x in [1, 2]
    n^(2/beta) V_n = h(x) = x^(2/beta) (9 - 2x) / 36    for x in [2, 4]

exactly, for every level.  ``g`` rises from 1/4 to a maximum just below
``x = 2``; ``h`` rises again to about 0.4831 near ``x = 2.76`` and falls back
to 1/4 at ``x = 4``.  :func:`f_paper` is the published variant with ``13 - x``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import sympy

from .errors import InputError
from .optimal import decompose, quantization_error

__all__ = [
    "BETA_SYMBOLIC",
    "ScaledSample",
    "ProfileReport",
    "beta",
    "power_two_over_beta",
    "dimension_estimate",
    "scaled_error",
    "exact_scaled_at_power",
    "limit_g",
    "limit_h",
    "limit_profile",
    "f_paper",
    "scaled_profile",
    "write_profile_csv",
]

BETA_SYMBOLIC = sympy.log(4) / sympy.log(3)

# private context so callers' mpmath settings are left alone
_mp = mpmath.mp.clone()
_mp.dps = 40
_TWO_OVER_BETA = 2 * _mp.log(3) / _mp.log(4)


def beta() -> float:
    return float(_mp.log(4) / _mp.log(3))


def power_two_over_beta(n: int) -> sympy.Expr:
    """Exact ``n^(2/beta)``; simplifies to an integer whenever ``n`` is a power of 2."""
    return sympy.simplify(sympy.Integer(n) ** (2 / BETA_SYMBOLIC))


def _ln_rational(q: Fraction):
    # math.log would overflow converting huge numerators to float
    return _mp.log(_mp.mpf(q.numerator)) - _mp.log(_mp.mpf(q.denominator))


def dimension_estimate(n: int) -> float:
    """``2 log n / (-log V_n)``."""
    n = int(n)
    if n < 2:
        raise InputError("the dimension estimate needs n >= 2")
    v = quantization_error(n)
    return float(2 * _mp.log(n) / -_ln_rational(v))


def scaled_error(n: int) -> float:
    n = int(n)
    if n < 1:
        raise InputError("n must be positive")
    return float(_mp.exp(_TWO_OVER_BETA * _mp.log(n) + _ln_rational(quantization_error(n))))


def exact_scaled_at_power(level: int) -> Fraction:
    """``(4^l)^(2/beta) V_(4^l) = 9^l V_(4^l)``, as an exact rational."""
    if level < 0:
        raise InputError("level must be non-negative")
    return 9**level * quantization_error(4**level)


def _xp(x: float) -> float:
    return float(_mp.power(_mp.mpf(x), _TWO_OVER_BETA))


def limit_g(x: float) -> float:
    return _xp(x) * (13 - 4 * x) / 36


def limit_h(x: float) -> float:
    return _xp(x) * (9 - 2 * x) / 36


def limit_profile(x: float) -> float:
    """The limit function on ``[1, 4]``: ``g`` on ``[1, 2]`` and ``h`` on ``[2, 4]``."""
    if not 1 <= x <= 4:
        raise InputError("x must lie in [1, 4]")
    return limit_g(x) if x <= 2 else limit_h(x)


def f_paper(x: float) -> float:
    """``x^(2/beta) (13 - x) / 36``, the published form; its range on [1, 2] is [1/3, 11/12]."""
    return _xp(x) * (13 - x) / 36


@dataclass(frozen=True)
class ScaledSample:
    n: int
    level: int
    x: float
    v_n: Fraction
    scaled: float
    limit: float
    f_paper: float | None


@dataclass
class ProfileReport:
    samples: list[ScaledSample]
    inf_observed: float
    sup_observed: float
    # restricted to 4^l <= n < 2 * 4^l
    inf_lower_half: float
    sup_lower_half: float
    dimension_estimates: list[tuple[int, float]] = field(default_factory=list)
    f_paper_range: tuple[float, float] = (1 / 3, 11 / 12)


def scaled_profile(level_min: int, level_max: int, grid_points: int = 64) -> ProfileReport:
    """Sample ``n = round(x 4^l)`` on a uniform grid of ``x`` in ``[1, 4)`` for each level."""
    if not 1 <= level_min <= level_max <= 15:
        raise InputError("levels must satisfy 1 <= level_min <= level_max <= 15")
    if grid_points < 1:
        raise InputError("grid_points must be positive")
    samples = []
    seen = set()
    for level in range(level_min, level_max + 1):
        base = 4**level
        for i in range(grid_points):
            n = round(Fraction(grid_points + 3 * i, grid_points) * base)
            if n >= 4 * base or n in seen:
                continue
            seen.add(n)
            assert decompose(n).level == level
            x = n / base
            samples.append(
                ScaledSample(
                    n=n,
                    level=level,
                    x=x,
                    v_n=quantization_error(n),
                    scaled=scaled_error(n),
                    limit=limit_profile(x),
                    f_paper=f_paper(x) if x <= 2 else None,
                )
            )
    scaled = [s.scaled for s in samples]
    low = [s.scaled for s in samples if s.x < 2] or scaled
    dims = [(4**lv, dimension_estimate(4**lv)) for lv in range(level_min, level_max + 1)]
    return ProfileReport(
        samples=samples,
        inf_observed=min(scaled),
        sup_observed=max(scaled),
        inf_lower_half=min(low),
        sup_lower_half=max(low),
        dimension_estimates=dims,
    )


def write_profile_csv(report: ProfileReport, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["ell", "n", "x", "v_n_num", "v_n_den", "scaled", "g_or_h", "f_paper"])
    for s in report.samples:
        w.writerow(
            [s.level, s.n, repr(s.x), s.v_n.numerator, s.v_n.denominator,
             f"{s.scaled:.15g}", f"{s.limit:.15g}",
             "" if s.f_paper is None else f"{s.f_paper:.15g}"]
        )
