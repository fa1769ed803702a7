import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fraclap import DomainError, FracOrder, normalization_constant
from fraclap.core import EvalReport, oracle_integral
from fraclap.special import gamma


@pytest.mark.parametrize("s", np.round(np.arange(1, 10) / 10, 1))
def test_constant_times_oracle_integral_is_one(s):
    assert normalization_constant(FracOrder(s)) * oracle_integral(s) == pytest.approx(1.0, abs=1e-8)


def test_constant_half_is_one_over_pi():
    assert normalization_constant(FracOrder(0.5)) == pytest.approx(1.0 / math.pi, rel=1e-13)


@given(st.floats(0.01, 0.99))
def test_paper_constant_drops_factor_s(s):
    std = normalization_constant(FracOrder(s))
    lit = normalization_constant(FracOrder(s, paper_constant=True))
    assert std == pytest.approx(s * lit, rel=1e-14)


@given(st.floats(0.01, 0.99), st.integers(1, 3))
def test_constant_positive(s, n):
    assert normalization_constant(FracOrder(s, N=n)) > 0


@pytest.mark.parametrize("s", [0.0, 1.0, -0.2, 1.5, float("nan"), float("inf")])
def test_order_out_of_range(s):
    with pytest.raises(DomainError):
        FracOrder(s)


def test_order_bad_dimension():
    with pytest.raises(DomainError):
        FracOrder(0.5, N=0)
    with pytest.raises(DomainError):
        FracOrder(0.5, N=2).require_1d()


@given(st.floats(0.05, 50.0))
def test_gamma_matches_stdlib(x):
    assert gamma(x) == pytest.approx(math.gamma(x), rel=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        gamma(x)


def test_eval_report_rejects_nonfinite():
    with pytest.raises(DomainError):
        EvalReport(float("nan"), 0.0)
    with pytest.raises(DomainError):
        EvalReport(1.0, -1.0)


def test_gamma_half_integer():
    assert gamma(1.5) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-13)


@pytest.mark.parametrize("x", np.geomspace(0.05, 25, 40))
def test_gamma_recurrence(x):
    assert gamma(x + 1) == pytest.approx(x * gamma(x), rel=1e-12)


def test_constant_two_dimensions():
    assert normalization_constant(FracOrder(0.5, N=2)) == pytest.approx(1 / (2 * math.pi), rel=1e-13)
