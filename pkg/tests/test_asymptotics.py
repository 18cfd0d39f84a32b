import io
import math
from fractions import Fraction as F

import pytest
import sympy

from carpetquant.asymptotics import (
    BETA_SYMBOLIC,
    beta,
    dimension_estimate,
    exact_scaled_at_power,
    f_paper,
    limit_g,
    limit_h,
    limit_profile,
    power_two_over_beta,
    scaled_error,
    scaled_profile,
    write_profile_csv,
)
from carpetquant.errors import InputError
from carpetquant.optimal import quantization_error

P = 2 * math.log(3) / math.log(4)  # 2/beta


def test_beta():
    assert beta() == pytest.approx(1.2618595071429148, abs=1e-15)
    assert abs(3 ** beta() - 4) < 1e-12
    assert sympy.simplify(4 ** (2 / BETA_SYMBOLIC)) == 9
    assert power_two_over_beta(8) == 27
    assert power_two_over_beta(4) == 9


def test_dimension_examples():
    assert dimension_estimate(4) == pytest.approx(2 * math.log(4) / math.log(36), rel=1e-14)
    assert dimension_estimate(2) == pytest.approx(2 * math.log(2) / math.log(36 / 5), rel=1e-14)
    assert abs(dimension_estimate(4**100) - 1.25395) < 1e-5
    with pytest.raises(InputError):
        dimension_estimate(1)


def test_dimension_monotone_and_converging():
    est = [dimension_estimate(4**lv) for lv in range(1, 60)]
    assert all(a < b < beta() for a, b in zip(est, est[1:]))
    assert beta() - dimension_estimate(4**800) < 1e-3
    assert beta() - dimension_estimate(4**790) > 1e-3


def test_scaled_error_examples():
    assert scaled_error(8) == pytest.approx(5 / 12, rel=1e-14)
    assert scaled_error(5) == pytest.approx(5**P * 2 / 81, rel=1e-12)
    assert scaled_error(1) == pytest.approx(0.25)
    with pytest.raises(InputError):
        scaled_error(0)


def test_exact_anchor():
    assert all(exact_scaled_at_power(lv) == F(1, 4) for lv in range(51))


@pytest.mark.parametrize("n", [5, 7, 11, 23, 100, 1000, 12345, 4**9 + 17])
def test_closed_form_limit_functions(n):
    level = (n.bit_length() - 1) // 2
    x = n / 4**level
    assert scaled_error(n) == pytest.approx(limit_profile(x), rel=1e-12)


def test_seams():
    assert limit_g(1) == pytest.approx(0.25)
    assert limit_g(2) == pytest.approx(5 / 12) and limit_h(2) == pytest.approx(5 / 12)
    assert limit_h(4) == pytest.approx(0.25)
    assert f_paper(1) == pytest.approx(1 / 3)
    assert f_paper(2) == pytest.approx(11 / 12)
    with pytest.raises(InputError):
        limit_profile(4.5)


def test_limit_maxima():
    xh = 9 * P / (2 * P + 2)
    assert limit_h(xh) == pytest.approx(0.483171, abs=1e-6)
    assert all(limit_h(xh) >= limit_h(2 + i / 1000) for i in range(2001))
    grid = [1 + i / 20000 for i in range(20001)]
    gmax = max(grid, key=limit_g)
    assert gmax == pytest.approx(13 / (2 * beta() + 4), abs=1e-4)
    assert limit_g(gmax) == pytest.approx(0.416678, abs=1e-6)


def test_profile():
    rep = scaled_profile(10, 10, 64)
    assert len(rep.samples) == 64
    assert rep.inf_observed <= rep.sup_observed
    assert abs(rep.inf_observed - 0.25) < 1e-4
    assert abs(rep.sup_observed - limit_h(9 * P / (2 * P + 2))) < 1e-3
    assert rep.sup_observed - rep.inf_observed > 0.2
    assert rep.sup_lower_half < 5 / 12 + 1e-9
    for s in rep.samples:
        assert s.scaled > 0 and s.v_n == quantization_error(s.n)
        assert 1 <= s.x < 4


def test_profile_levels_checked():
    with pytest.raises(InputError):
        scaled_profile(0, 3)
    with pytest.raises(InputError):
        scaled_profile(3, 16)


def test_profile_csv():
    buf = io.StringIO()
    write_profile_csv(scaled_profile(2, 3, 4), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "ell,n,x,v_n_num,v_n_den,scaled,g_or_h,f_paper"
    ell, n, x, num, den, *_ = lines[1].split(",")
    assert F(int(num), int(den)) == quantization_error(int(n))
