import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fraclap import (DomainError, FracOrder, PreconditionError, QuadratureBudget, TailModel, catalog_field,
                     field_from_function, frac_lap, frac_lap_pv, frac_lap_second_difference)
from fraclap.fields import lincomb
from fraclap.quadrature import convergence_study, with_radius


def lap(u, s, x, exact=True):
    return frac_lap_second_difference(u, FracOrder(s), x, exact=exact).value


def gaussian_multiplier_value(s, x):
    """(-Delta)^s exp(-x^2) by direct Fourier integration (independent oracle)."""
    from scipy.integrate import quad
    f = lambda xi: xi ** (2 * s) * math.sqrt(math.pi) * math.exp(-xi * xi / 4) * math.cos(xi * x) / math.pi
    return quad(f, 0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=400)[0]


@pytest.mark.parametrize("x", np.linspace(-0.9, 0.9, 7))
def test_torsion_profile_is_one(x):
    assert lap(catalog_field("sqrt_torsion"), 0.5, x) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("s", [0.1, 0.3, 0.5, 0.7, 0.9])
@pytest.mark.parametrize("x", [0.0, 0.7, 2.5])
def test_gaussian_against_fourier_integral(s, x):
    assert lap(catalog_field("gaussian"), s, x) == pytest.approx(gaussian_multiplier_value(s, x), abs=1e-9)


def test_gaussian_half_at_origin_closed_form():
    assert lap(catalog_field("gaussian"), 0.5, 0.0) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-10)


@pytest.mark.parametrize("x", [-0.8, 0.0, 0.45])
def test_inverse_sqrt_is_half_harmonic(x):
    assert abs(lap(catalog_field("inv_sqrt_harmonic"), 0.5, x)) < 1e-5


@pytest.mark.parametrize("x", [-3.0, 0.0, 1.5])
def test_layer_identity(x):
    assert lap(catalog_field("arctan_layer"), 0.5, x) == pytest.approx(x / (math.pi * (1 + x * x)), abs=1e-8)


def test_cauchy_power_tail():
    # (-Delta)^(1/2) of 1/(pi(1+x^2)) is the x-derivative of the conjugate: (1-x^2)/(pi(1+x^2)^2)
    u = catalog_field("cauchy_kernel")
    for x in (0.0, 0.5, 2.0):
        assert lap(u, 0.5, x) == pytest.approx((1 - x * x) / (math.pi * (1 + x * x) ** 2), abs=1e-7)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_pv_route_agrees(s):
    u = catalog_field("gaussian")
    a = frac_lap_second_difference(u, FracOrder(s), 0.3, exact=True)
    b = frac_lap_pv(u, FracOrder(s), 0.3, exact=True)
    assert abs(a.value - b.value) <= a.estimated_error + b.estimated_error + 1e-6


def test_sampled_mode_close_to_exact():
    u = catalog_field("gaussian", h=0.01)
    rep = frac_lap_second_difference(u, FracOrder(0.4), 0.2)
    assert abs(rep.value - lap(u, 0.4, 0.2)) <= max(rep.estimated_error, 1e-6)


def test_sampled_mode_point_must_be_inside():
    u = catalog_field("bump")
    with pytest.raises(PreconditionError):
        frac_lap_second_difference(u, FracOrder(0.5), 1.999)


def test_report_budget_recorded():
    rep = frac_lap_second_difference(catalog_field("bump"), FracOrder(0.5), 0.0, exact=True)
    assert rep.budget["truncation_radius"] > 0 and rep.estimated_error >= 0


def test_frac_lap_unknown_method():
    with pytest.raises(DomainError):
        frac_lap(catalog_field("bump"), FracOrder(0.5), [0.0], method="fft")


def test_convergence_study_errors_decrease():
    runs = [(catalog_field("gaussian", h=h), QuadratureBudget()) for h in (0.08, 0.04, 0.02)]
    tab = convergence_study(runs, FracOrder(0.3), 0.0, reference=gaussian_multiplier_value(0.3, 0.0))
    assert tab.errors_decrease()
    assert tab.observed_order > 1.5


def test_truncation_radius_irrelevant_for_compact_tail():
    u = catalog_field("gaussian")
    vals = [frac_lap_second_difference(u, FracOrder(0.3), 0.0, with_radius(QuadratureBudget(), R), True).value
            for R in (15.0, 1e3, 1e6)]
    assert max(vals) - min(vals) < 1e-12


# ---------------------------------------------------------------------------
# invariants

orders = st.floats(0.05, 0.95)


@given(orders, st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2))
def test_linearity(s, a, b, x):
    u = catalog_field("bump", window=(-12, 12))
    v = catalog_field("gaussian")
    w = lincomb(a, u, b, v)
    lhs = lap(w, s, x)
    rhs = a * lap(u, s, x) + b * lap(v, s, x)
    assert lhs == pytest.approx(rhs, abs=1e-8 * (1 + abs(a) + abs(b)))


@given(orders, st.floats(-3, 3), st.floats(-2, 2))
def test_translation_equivariance(s, shift, x):
    u = catalog_field("gaussian")
    assert lap(u.translated(shift), s, x + shift) == pytest.approx(lap(u, s, x), abs=1e-8)


@given(orders, st.floats(0.5, 3.0), st.floats(-1.5, 1.5))
def test_scaling_law(s, lam, x):
    u = catalog_field("gaussian")
    ul = field_from_function(lambda t: np.exp(-(lam * np.asarray(t)) ** 2), -25, 25, 0.01, TailModel.compact())
    assert lap(ul, s, x) == pytest.approx(lam ** (2 * s) * lap(u, s, lam * x), abs=1e-8 * lam ** (2 * s))


@given(orders, st.floats(-5, 5), st.floats(-3, 3))
def test_constants_annihilated(s, c, x):
    u = field_from_function(lambda t: np.full_like(np.asarray(t, dtype=float), c), -5, 5, 0.01,
                            TailModel.limits(c, c))
    assert abs(lap(u, s, x)) < 1e-10 * (1 + abs(c))
    assert abs(lap(u, s, x / 2, exact=False)) < 1e-10 * (1 + abs(c))


@given(orders, st.floats(0.0, 1.8))
def test_even_symmetry(s, x):
    u = catalog_field("bump")
    assert lap(u, s, x) == pytest.approx(lap(u, s, -x), abs=1e-10)


@given(orders, st.floats(-2, 2))
def test_deterministic(s, x):
    u = catalog_field("gaussian")
    a = frac_lap_second_difference(u, FracOrder(s), x, exact=True)
    b = frac_lap_second_difference(u, FracOrder(s), x, exact=True)
    assert a.value == b.value and a.estimated_error == b.estimated_error


def test_arctan_closed_form():
    u = catalog_field("arctan")
    assert lap(u, 0.5, 2.0) == pytest.approx(0.4, abs=1e-4)
    assert lap(u, 0.5, 2.0, exact=False) == pytest.approx(0.4, abs=1e-4)
