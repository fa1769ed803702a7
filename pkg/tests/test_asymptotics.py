import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fraclap import DomainError, FracOrder, PreconditionError, catalog_field
from fraclap import asymptotics as asy


@given(st.floats(0.1, 5.0), st.floats(-10, 10).filter(lambda a: abs(a) > 1e-3))
def test_exact_power_law_recovered(p, a):
    x = asy.dyadic_points(2.0, 8)
    fit = asy.fit_tail_exponent(x, a * x ** -p)
    assert fit.exponent == pytest.approx(p, abs=1e-10)
    assert fit.amplitude == pytest.approx(a, rel=1e-9)
    assert fit.r_squared == pytest.approx(1.0)


def test_fit_rejects_bad_input():
    x = asy.dyadic_points(1.0, 8)
    with pytest.raises(DomainError):
        asy.fit_tail_exponent(x[:5], x[:5] ** -2)
    with pytest.raises(DomainError):
        asy.fit_tail_exponent(x, np.sin(x))
    with pytest.raises(DomainError):
        asy.fit_tail_exponent(x[::-1], x ** -2)
    with pytest.raises(DomainError):
        asy.dyadic_points(0.0, 3)


def test_dyadic_points_per_octave():
    assert np.allclose(asy.dyadic_points(4.0, 5, 2), 4.0 * 2 ** (np.arange(5) / 2))


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_bump_image_tail(s):
    fit = asy.image_tail_fit(catalog_field("bump"), FracOrder(s), asy.dyadic_points(4.0, 9, 2))
    assert fit.exponent == pytest.approx(1 + 2 * s, abs=0.05)
    assert fit.amplitude < 0


def test_torsion_image_tail_s03():
    fit = asy.image_tail_fit(catalog_field("sqrt_torsion"), FracOrder(0.3), asy.dyadic_points(4.0, 9, 2))
    assert fit.exponent == pytest.approx(1.6, abs=0.05)


def test_layer_tail():
    rep = asy.layer_tail_check()
    assert rep.fit.exponent == pytest.approx(1.0, abs=0.01)
    assert rep.amplitude_measured == pytest.approx(1 / math.pi, rel=0.02)
    assert rep.amplitude_general == 1.0
    assert rep.passed
    with pytest.raises(PreconditionError):
        asy.layer_tail_check(0.3)


def test_layer_residual():
    assert asy.residual_check_layer().max_residual <= 1e-3


def test_layer_minus_heaviside_no_cancellation():
    x = np.array([1e8, -1e8])
    d = asy.layer_minus_heaviside(x)
    assert d[0] == pytest.approx(-1 / (math.pi * 1e8), rel=1e-12)
    assert d[1] == pytest.approx(1 / (math.pi * 1e8), rel=1e-8)


def test_well_curvature():
    h = 1e-4
    assert (asy.well(h) - 2 * asy.well(0) + asy.well(-h)) / h ** 2 == pytest.approx(1.0, rel=1e-6)
    x = np.linspace(-3, 3, 7)
    assert np.allclose(asy.layer_nonlinearity(x), x / (math.pi * (1 + x ** 2)))
