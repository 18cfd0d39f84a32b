from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carpetquant.distortion import (
    AtomSet,
    Interval,
    atom_distortion,
    cell_centroid,
    cell_centroids,
    distortion_bounds,
    is_cvt,
    lloyd_run,
    lloyd_step,
    partial_sum_lower_bound,
    split_distortion,
)
from carpetquant.errors import AmbiguousCellError, DegenerateCellError, InputError
from carpetquant.geometry import SYMMETRIES, Codebook, transform_codebook
from carpetquant.measure import atoms, cylinder_point_distortion
from carpetquant.oracle import BETA3, BETA3_WORDS, DIAGONAL_PAIR, DIAGONAL_PAIR_WORDS

CENTER = Codebook([(F(1, 2), F(1, 2))])
ALPHA2 = Codebook([(F(1, 6), F(1, 2)), (F(5, 6), F(1, 2))])
ALPHA3 = Codebook([(F(1, 6), F(1, 6)), (F(5, 6), F(1, 6)), (F(1, 2), F(5, 6))])
V = F(1, 4)

coord = st.fractions(min_value=0, max_value=1, max_denominator=9)
codebooks = st.lists(st.tuples(coord, coord), min_size=1, max_size=6, unique=True).map(Codebook)


def test_interval():
    iv = Interval(F(1), F(2))
    assert not iv.exact and iv.width == 1 and F(3, 2) in iv
    with pytest.raises(InputError):
        Interval(F(2), F(1))


def test_bounds_examples():
    assert distortion_bounds(CENTER, 1) == Interval(V, V)
    assert distortion_bounds(ALPHA2, 2) == Interval(F(5, 36), F(5, 36))
    assert distortion_bounds(ALPHA3, 2) == Interval(F(1, 12), F(1, 12))


def test_unresolved_bounds_are_brackets():
    iv = distortion_bounds(BETA3, 4)
    assert not iv.exact
    assert F(233, 2700) in iv


def test_beta3_exact_value():
    # the diagonal split pins the value the brackets close in on
    assert split_distortion(BETA3, 6) == F(233, 2700)
    assert F(233, 2700) in distortion_bounds(BETA3, 12)


def test_split_distortion_needs_a_resolvable_codebook():
    cb = Codebook([(F(1, 5), F(2, 7)), (F(3, 4), F(1, 9))])
    with pytest.raises(AmbiguousCellError):
        split_distortion(cb, 2)


def test_partial_sums():
    assert partial_sum_lower_bound((F(1, 6), F(1, 6)), ["1"]) == F(1, 144)
    s = V / 36 + 2 * partial_sum_lower_bound((F(13, 90), F(19, 30)), BETA3_WORDS)
    assert s == F(1247143, 14929920)
    assert 2 * partial_sum_lower_bound(DIAGONAL_PAIR[0], DIAGONAL_PAIR_WORDS) == F(775, 5184)
    no_var = partial_sum_lower_bound((F(1, 6), F(1, 6)), ["1"], include_variance_terms=False)
    assert no_var == 0


@pytest.mark.parametrize("ws", [["1", "12"], ["3", "3"]])
def test_partial_sum_rejects_overlap(ws):
    with pytest.raises(InputError):
        partial_sum_lower_bound((0, 0), ws)


def test_cell_centroid_examples():
    assert cell_centroid(ALPHA2, 0, 1) == ((F(1, 6), F(1, 2)), F(1, 2))
    assert cell_centroid(ALPHA3, 2, 1) == ((F(1, 2), F(5, 6)), F(1, 2))
    assert cell_centroid(CENTER, 0, 0) == ((F(1, 2), F(1, 2)), 1)


def test_cell_centroid_ambiguity_is_local():
    cb = Codebook([(F(1, 6), F(1, 6)), (F(1, 5), F(1, 5)), (F(5, 6), F(1, 6)),
                   (F(1, 6), F(5, 6)), (F(5, 6), F(5, 6))])
    # J_4 is resolved for site 4 even though sites 0 and 1 fight inside J_1
    assert cell_centroid(cb, 4, 3) == ((F(5, 6), F(5, 6)), F(1, 4))
    with pytest.raises(AmbiguousCellError) as info:
        cell_centroid(cb, 0, 3)
    assert set(info.value.candidates) == {0, 1}


def test_degenerate_cell():
    # (1/100, 0) shadows (0, 0) from every atom
    with pytest.raises(DegenerateCellError) as info:
        lloyd_step(Codebook([(0, 0), (F(1, 100), 0), (1, 1)]), atoms(1))
    assert info.value.site == 0
    assert "restart" in str(info.value)
    # the centre's cell meets the carpet only in cylinder corners
    pts = [(F(a, 6), F(b, 6)) for b in (1, 5) for a in (1, 5)] + [(F(1, 2), F(1, 2))]
    with pytest.raises(DegenerateCellError) as info:
        cell_centroids(Codebook(pts), 3)
    assert info.value.site == 4


def test_is_cvt_examples():
    assert is_cvt(ALPHA3, 2)
    assert is_cvt(CENTER, 0)
    assert not is_cvt(Codebook([(F(1, 4), F(1, 2)), (F(3, 4), F(1, 2))]), 4)
    assert is_cvt(BETA3, 12)
    assert is_cvt(DIAGONAL_PAIR, 8)
    assert split_distortion(DIAGONAL_PAIR, 8) == F(17, 100)


def test_lloyd_step_examples():
    a2 = atoms(2)
    assert lloyd_step(ALPHA2, a2) == ALPHA2
    assert lloyd_step(CENTER, atoms(1)) == CENTER
    got = lloyd_step(Codebook([(0, 0), (1, 1)]), atoms(1))
    assert got == Codebook([(F(7, 18), F(7, 18)), (F(5, 6), F(5, 6))])


def test_lloyd_step_split_ties():
    got = lloyd_step(Codebook([(0, 0), (1, 1)]), atoms(1), ties="split")
    assert got == Codebook([(F(1, 3), F(1, 3)), (F(2, 3), F(2, 3))])
    with pytest.raises(InputError):
        lloyd_step(ALPHA2, atoms(1), ties="random")


def test_lloyd_run_examples():
    a4 = atoms(4)
    rep = lloyd_run(ALPHA2, a4, 100)
    assert rep.converged and rep.iterations == 1 and rep.codebook == ALPHA2
    rep = lloyd_run(Codebook([(F(1, 4), F(1, 2)), (F(3, 4), F(1, 2))]), a4, 100)
    assert rep.converged and rep.codebook == ALPHA2
    rep = lloyd_run(Codebook([(F(1, 10), F(9, 10))]), atoms(3), 100)
    assert rep.codebook == CENTER and rep.iterations == 2
    assert lloyd_run(CENTER, atoms(3)).iterations == 1


def test_lloyd_run_stops_at_max_iter():
    rep = lloyd_run(Codebook([(0, 0), (F(1, 3), 0), (1, 1)]), atoms(4), max_iter=1)
    assert rep.iterations == 1 and not rep.converged


def test_atomset_from_weighted_matches_depth():
    a = AtomSet.from_weighted(atoms(3))
    b = AtomSet.from_depth(3)
    assert atom_distortion(ALPHA3, a) == atom_distortion(ALPHA3, b)


def test_atomset_rejects_bad_masses():
    with pytest.raises(InputError):
        AtomSet.from_weighted([((0, 0), F(1, 2))])


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_atom_consistency(k):
    # exact distortion minus atom distortion is V / 9^k when cells resolve
    for cb in (CENTER, ALPHA2, ALPHA3):
        exact = distortion_bounds(cb, k)
        assert exact.exact
        assert exact.lo - atom_distortion(cb, AtomSet.from_depth(k)) == V / 9**k


@settings(max_examples=25, deadline=None)
@given(codebooks)
def test_bracket_monotone(cb):
    prev = None
    for K in range(0, 5):
        iv = distortion_bounds(cb, K)
        assert iv.lo <= iv.hi
        if prev is not None:
            assert prev.lo <= iv.lo and iv.hi <= prev.hi
        prev = iv


@settings(max_examples=25, deadline=None)
@given(codebooks, st.integers(0, 4))
def test_bracket_upper_end_is_atom_value(cb, K):
    # at cap k the upper end is the depth-k atom distortion plus V/9^k
    iv = distortion_bounds(cb, K)
    assert iv.hi == atom_distortion(cb, AtomSet.from_depth(K)) + V / 9**K
    inner = distortion_bounds(cb, K + 2)
    assert iv.lo <= inner.lo <= inner.hi <= iv.hi


@settings(max_examples=20, deadline=None)
@given(codebooks, st.sampled_from(sorted(SYMMETRIES)), st.integers(1, 3))
def test_bounds_equivariant(cb, name, K):
    g = SYMMETRIES[name]
    assert distortion_bounds(transform_codebook(g, cb), K) == distortion_bounds(cb, K)


@settings(max_examples=25, deadline=None)
@given(codebooks, st.integers(1, 4))
def test_lloyd_monotone(cb, k):
    a = AtomSet.from_depth(k)
    if len(cb) > len(a):
        return
    try:
        rep = lloyd_run(cb, a, max_iter=30)
    except DegenerateCellError:
        return
    h = rep.history
    assert all(x >= y for x, y in zip(h, h[1:]))
    # strict until the fixed point: every recorded step changed the codebook
    assert all(x > y for x, y in zip(h, h[1:])) or rep.converged


def test_cylinder_integral_decomposes():
    # sum of leaf integrals over a resolved partition equals the parent integral
    a = (F(1, 3), F(2, 5))
    assert sum(cylinder_point_distortion(c, a) for c in "1234") == cylinder_point_distortion("", a)
