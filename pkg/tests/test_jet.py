import math

import numpy as np
import pytest

from riccati_fam import jet as J
from riccati_fam.jet import Jet


def test_product_and_quotient_rules():
    x = Jet.variable(2.0)
    f = x * x * x / (x + 1.0)
    # f = x^3/(x+1): f' = (2x^3+3x^2)/(x+1)^2, f'' = (2x^3+6x^2+6x)/(x+1)^3
    assert f.v == pytest.approx(8 / 3)
    assert f.d == pytest.approx((16 + 12) / 9)
    assert f.dd == pytest.approx((16 + 24 + 12) / 27)


def test_exp_log_chain():
    x = Jet.variable(0.3)
    f = J.exp(2.0 * x)
    assert (f.v, f.d, f.dd) == pytest.approx((math.exp(0.6), 2 * math.exp(0.6), 4 * math.exp(0.6)))
    g = J.log(x)
    assert (g.v, g.d, g.dd) == pytest.approx((math.log(0.3), 1 / 0.3, -1 / 0.09))


def test_integer_power_and_reflected_ops():
    x = Jet.variable(1.5)
    f = 1.0 / x**2 - 3.0
    assert f.v == pytest.approx(1 / 2.25 - 3)
    assert f.d == pytest.approx(-2 / 1.5**3)
    assert f.dd == pytest.approx(6 / 1.5**4)


def test_dispatch_on_plain_arrays():
    xs = np.array([0.0, 1.0])
    assert np.allclose(J.exp(xs), np.exp(xs))


def test_expm1_keeps_small_arguments():
    x = Jet.variable(1e-12)
    f = J.expm1(x)
    assert f.v == pytest.approx(1e-12, rel=1e-12)
    assert (f.d, f.dd) == pytest.approx((1.0, 1.0))
