import math

import numpy as np
import pytest

from fraclap import DomainError, FracOrder, PreconditionError, catalog_field
from fraclap import extension as ex
from fraclap.quadrature import frac_lap_second_difference


def test_extension_of_arctan_is_explicit():
    # harmonic extension of arctan(x) is arctan(x/(1+y))
    u = catalog_field("arctan")
    for x, y in ((0.0, 1.0), (1.0, 0.5), (2.0, 2.0)):
        assert ex.harmonic_extension(u, x, y, exact=True) == pytest.approx(math.atan2(x, 1 + y), abs=1e-8)


def test_extension_of_step_is_half_on_axis():
    u = catalog_field("heaviside_mollified")
    for y in (0.1, 1.0, 10.0):
        assert ex.harmonic_extension(u, 0.0, y, exact=True) == pytest.approx(0.5, abs=1e-12)


def test_extension_of_cauchy_density_shifts_time():
    u = catalog_field("cauchy_kernel")
    assert ex.harmonic_extension(u, 0.7, 0.5, exact=True) == pytest.approx(1.5 / (math.pi * (2.25 + 0.49)), abs=1e-9)


@pytest.mark.parametrize("x", np.linspace(-0.9, 0.9, 5))
def test_trace_of_torsion_profile(x):
    ext = ex.HalfPlaneExtension(catalog_field("sqrt_torsion"), exact=True)
    rep = ex.neumann_trace(ext, x)
    assert abs(rep.value - 1.0) < 1e-3
    assert abs(rep.value - 1.0) <= rep.estimated_error + 1e-9


@pytest.mark.parametrize("x", [-2.0, -0.4, 0.0, 1.2])
def test_trace_agrees_with_quadrature_within_error_bars(x):
    u = catalog_field("gaussian")
    q = frac_lap_second_difference(u, FracOrder(0.5), x, exact=True)
    t = ex.neumann_trace(ex.HalfPlaneExtension(u, exact=True), x)
    assert abs(q.value - t.value) <= q.estimated_error + t.estimated_error


def test_trace_records_schedule():
    rep = ex.neumann_trace(ex.HalfPlaneExtension(catalog_field("gaussian")), 0.0)
    assert rep.budget["heights"] == list(ex.DEFAULT_HEIGHTS)
    assert len(rep.budget["extrapolants"]) == len(ex.DEFAULT_HEIGHTS)


def test_heights_shrink_near_kink():
    rep = ex.neumann_trace(ex.HalfPlaneExtension(catalog_field("sqrt_torsion"), exact=True), 0.9)
    assert rep.budget["heights"][0] <= 0.0625 * 0.1 + 1e-15


def test_require_half():
    with pytest.raises(PreconditionError):
        ex.require_half(FracOrder(0.3))
    ex.require_half(0.5)


@pytest.mark.parametrize("heights", [(0.1, 0.05), (0.1, 0.1, 0.05), (0.1, -0.05, -0.1)])
def test_height_schedule_validation(heights):
    with pytest.raises(DomainError):
        ex.HalfPlaneExtension(catalog_field("gaussian"), heights=heights)


def test_nonpositive_height_rejected():
    with pytest.raises(DomainError):
        ex.harmonic_extension(catalog_field("gaussian"), 0.0, 0.0)


def test_energy_is_quadratic_and_zero_for_zero():
    u = catalog_field("arctan")
    e1 = ex.dirichlet_energy_check(u, window=(-2, 2), height=1.0)
    u2 = catalog_field("arctan")
    from fraclap.fields import lincomb
    e2 = ex.dirichlet_energy_check(lincomb(2.0, u, 0.0, u2), window=(-2, 2), height=1.0)
    assert e2 == pytest.approx(4 * e1, rel=1e-12)
    zero = lincomb(0.0, u, 0.0, u2)
    assert ex.dirichlet_energy_check(zero, window=(-2, 2), height=1.0) == 0.0


def test_energy_refinement_stable():
    u = catalog_field("gaussian")
    a = ex.dirichlet_energy_check(u, window=(-3, 3), height=2.0)
    b = ex.dirichlet_energy_check(u, window=(-3, 3), height=2.0, refine=1)
    assert a == pytest.approx(b, rel=1e-10)


def test_neville_exact_for_polynomials():
    ys = [0.4, 0.2, 0.1, 0.05]
    vals = [3.0 - 2 * y + 5 * y ** 2 - y ** 3 for y in ys]
    assert ex._neville(ys, vals)[-1][0] == pytest.approx(3.0, abs=1e-12)
