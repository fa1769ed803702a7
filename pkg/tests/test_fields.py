import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fraclap import DomainError, PreconditionError, TailModel, catalog_field, field_from_samples
from fraclap.fields import CATALOG, DEFAULT_WINDOWS, field_from_closed_form, lincomb


def test_tail_parse_roundtrip():
    assert TailModel.parse("compact").kind == "compact"
    p = TailModel.parse("power:2.5,3")
    assert (p.amplitude, p.exponent, p.parity) == (2.5, 3.0, "even")
    assert TailModel.parse("power:1,2,odd").parity == "odd"
    lim = TailModel.parse("limits:-1,1,2")
    assert (lim.left, lim.right, lim.approach) == (-1.0, 1.0, 2.0)


@pytest.mark.parametrize("text", ["", "power:1", "limits:1,2", "power:a,b", "wavy", "compact:1"])
def test_tail_parse_rejects(text):
    with pytest.raises(DomainError):
        TailModel.parse(text)


def test_power_tail_needs_positive_exponent():
    with pytest.raises(DomainError):
        TailModel.power(1.0, 0.0)


def test_samples_need_uniform_grid():
    with pytest.raises(DomainError):
        field_from_samples([0, 1, 3], [0, 1, 0], TailModel.compact())


def test_compact_tail_needs_vanishing_edges():
    with pytest.raises(PreconditionError):
        field_from_samples([0, 1, 2], [1, 1, 1], TailModel.compact())


def test_window_must_contain_support():
    with pytest.raises(DomainError):
        field_from_closed_form("sqrt_torsion", -0.5, 0.5, 0.01)


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_catalog_default_windows(name):
    u = catalog_field(name)
    assert u.window == pytest.approx(DEFAULT_WINDOWS[name])
    assert u.has_closed_form


@given(st.floats(-1.9, 1.9))
def test_quadratic_interpolation_accuracy(t):
    u = catalog_field("bump", h=0.005)
    assert abs(u.evaluate(np.array([t]))[0] - u.evaluate(np.array([t]), exact=True)[0]) < 1e-5


def test_limits_extrapolation_matches_edge():
    u = catalog_field("arctan")
    far = u.evaluate(np.array([-1e6, 50.0, 1e6]))
    assert far[0] == pytest.approx(-math.pi / 2, abs=1e-4)
    assert far[1] == pytest.approx(math.atan(50.0), abs=1e-12)
    assert far[2] == pytest.approx(math.pi / 2, abs=1e-4)


def test_singular_field_refuses_sampled_evaluation():
    u = catalog_field("inv_sqrt_harmonic")
    with pytest.raises(PreconditionError):
        u.evaluate(np.array([0.0]))


def test_lincomb_tail_and_values():
    u = catalog_field("bump", window=(-12, 12))
    v = catalog_field("gaussian")
    w = lincomb(2.0, u, -1.0, v)
    t = np.linspace(-3, 3, 7)
    assert np.allclose(w.evaluate(t, exact=True), 2 * u.evaluate(t, exact=True) - v.evaluate(t, exact=True))
    assert w.tail.kind == "compact"
