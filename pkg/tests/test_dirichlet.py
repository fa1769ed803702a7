import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from fraclap import DomainError, FracOrder, PreconditionError, normalization_constant
from fraclap import dirichlet as dr


def hat_weight_brute(k, s):
    """Kernel integrated against the unit hat centred at k; the first cell adds the quadratic part."""
    f = lambda r: max(0.0, 1 - abs(r - k)) * r ** (-1 - 2 * s)
    lo = max(1.0, k - 1.0)
    return quad(f, lo, k + 1, points=[k], epsabs=1e-14, epsrel=1e-13)[0]


def split_weight_brute(k, s, gamma):
    beta = gamma - 1 - 2 * s
    f = lambda r: max(0.0, 1 - abs(r - k)) * r ** beta
    return quad(f, k - 1, k + 1, points=[k], epsabs=1e-14, epsrel=1e-13)[0] / k ** gamma


@pytest.mark.parametrize("s", [0.2, 0.5, 0.8])
def test_hat_weights_brute_force(s):
    w = dr.hat_weights(60, s)
    for k in (1, 2, 3, 10, 39, 40, 41, 60):
        assert w[k] == pytest.approx(hat_weight_brute(k, s), rel=1e-9)


@pytest.mark.parametrize("s,gamma", [(0.2, None), (0.5, None), (0.5, 1.2), (0.3, 1.9)])
def test_split_weights_brute_force(s, gamma):
    g = 1 + s if gamma is None else gamma
    w = dr.split_weights(60, s, gamma)
    for k in (1, 2, 5, 39, 40, 41, 60):
        assert w[k] == pytest.approx(split_weight_brute(k, s, g), rel=1e-9)


@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_tail_sums_brute_force(s):
    # sum_{k > K} w_k = int over [K, inf) of the partial hat mass against the kernel
    K = 5
    tail_hat = quad(lambda r: min(1.0, r - K) * r ** (-1 - 2 * s), K, K + 1)[0] + (K + 1) ** (-2 * s) / (2 * s)
    assert dr.hat_tail_sum(K, s) == pytest.approx(tail_hat, rel=1e-10)
    kmax = 200000
    # w_k ~ k^(-1-2s); the remainder past kmax by the midpoint integral
    direct = math.fsum(dr.split_weights(kmax, s)[K + 1:]) + (kmax + 0.5) ** (-2 * s) / (2 * s)
    assert float(dr.split_tail_sum(K, s)) == pytest.approx(direct, rel=1e-6)


def test_split_tail_sum_matches_partial_sums():
    s = 0.4
    w = dr.split_weights(300, s)
    assert float(dr.split_tail_sum(10, s)) - float(dr.split_tail_sum(300, s)) == pytest.approx(
        math.fsum(w[11:301]), rel=1e-12)


@pytest.mark.parametrize("scheme", ["hat", "split"])
def test_three_unknown_system_by_hand(scheme):
    s, h = 0.4, 0.25
    order = FracOrder(s)
    sysm = dr.assemble((0.0, 1.0), h, order, scheme=scheme)
    assert sysm.n == 3
    scale = normalization_constant(order) * h ** (-2 * s)
    w = dr.hat_weights(10, s) if scheme == "hat" else dr.split_weights(10, s)
    if scheme == "hat":
        w[1] += 1 / (2 - 2 * s)
        diag = 2 * (1 / (2 - 2 * s) + 1 / (2 * s))
    else:
        diag = 2 * float(dr.split_tail_sum(0, s))
    expected = np.array([[diag, -w[1], -w[2]], [-w[1], diag, -w[1]], [-w[2], -w[1], diag]]) * scale
    assert np.allclose(sysm.matrix, expected, rtol=1e-13)
    # diagonal = twice the full weight sum
    assert diag == pytest.approx(2 * (math.fsum(w[1:11]) + float(
        dr.hat_tail_sum(10, s) if scheme == "hat" else dr.split_tail_sum(10, s))), rel=1e-12)


@pytest.mark.parametrize("scheme", ["auto", "hat", "split"])
def test_torsion_recovered(scheme):
    sol = dr.solve(dr.assemble((-1, 1), 1 / 64, FracOrder(0.5), scheme=scheme), 1.0)
    assert sol.max_error(dr.fractional_torsion_profile(0.5)) < 0.03
    assert sol.residual < 1e-10


def test_torsion_accuracy_at_fine_grid():
    sol = dr.solve(dr.assemble((-1, 1), 1 / 256, FracOrder(0.5)), 1.0)
    assert sol.max_error(dr.fractional_torsion_profile(0.5)) <= 1e-2


def test_split_rejected_gamma():
    with pytest.raises(DomainError):
        dr.split_weights(5, 0.5, gamma=0.9)
    with pytest.raises(DomainError):
        dr.assemble((-1, 1), 0.1, FracOrder(0.5), scheme="magic")


def test_grid_must_fit_interval():
    with pytest.raises(DomainError):
        dr.assemble((-1, 1), 0.3, FracOrder(0.5))


@given(st.floats(0.05, 0.95), st.sampled_from([1 / 8, 1 / 16, 1 / 32]), st.sampled_from(dr.SCHEMES))
def test_m_matrix_structure(s, h, scheme):
    sysm = dr.assemble((-1, 1), h, FracOrder(s), scheme=scheme)
    A = sysm.matrix
    off = A - np.diag(np.diag(A))
    assert np.all(np.diag(A) > 0) and np.all(off <= 0)
    assert np.all(A.sum(axis=1) >= -1e-10 * np.abs(A).max())
    assert np.max(np.abs(sysm.full_row_sums)) <= 1e-9 * np.abs(A).max()


@given(st.floats(0.05, 0.95), st.floats(0.0, 3.0), st.floats(0.0, 2.0), st.sampled_from(dr.SCHEMES))
def test_maximum_principle(s, f, g, scheme):
    ext = lambda t: np.full_like(np.asarray(t, dtype=float), g)
    sysm = dr.assemble((-1, 1), 1 / 16, FracOrder(s), ext, g_tail=dr.TailModel.limits(g, g), exact_g=True,
                       scheme=scheme)
    u = dr.solve(sysm, f).values
    assert u.min() >= g - 1e-9
    if f == 0.0:
        assert np.allclose(u, g, atol=1e-9)


def test_constant_exterior_reproduced():
    ext = lambda t: np.full_like(np.asarray(t, dtype=float), 2.0)
    sysm = dr.assemble((-1, 1), 1 / 32, FracOrder(0.3), ext, g_tail=dr.TailModel.limits(2.0, 2.0), exact_g=True)
    assert np.allclose(dr.solve(sysm, 0.0).values, 2.0, atol=1e-10)


def test_torsion_eigenvalue_half_is_one():
    assert dr.torsion_eigenvalue(FracOrder(0.5)) == pytest.approx(1.0, abs=1e-9)


def test_illposedness_gap_matches_exterior_integral():
    ext1 = lambda y: np.zeros_like(np.asarray(y, dtype=float))
    ext2 = lambda y: np.where(np.abs(y) > 1, (np.abs(y) - 1) * np.exp(-(np.abs(y) - 1)), 0.0) * (np.abs(y) <= 40)
    u = lambda t: np.sqrt(np.clip(1 - np.asarray(t) ** 2, 0, None))
    gap = dr.illposedness_gap(u, ext1, ext2, FracOrder(0.5), 0.0, breakpoints=(-1, 1))
    ref = dr.exterior_difference_integral(ext1, ext2, FracOrder(0.5), 0.0)
    assert abs(gap) > 0.1 and gap == pytest.approx(ref, abs=1e-6)


def test_illposedness_requires_equal_traces():
    one = lambda y: np.ones_like(np.asarray(y, dtype=float))
    zero = lambda y: np.zeros_like(np.asarray(y, dtype=float))
    with pytest.raises(DomainError):
        dr.illposedness_gap(zero, zero, one, FracOrder(0.5), 0.0)
    with pytest.raises(PreconditionError):
        dr.illposedness_gap(zero, zero, zero, FracOrder(0.5), 1.5)


def test_harnack_report():
    rows = dr.harnack_violation_report([(-0.5, 0.5), (-0.99, 0.99), (0.2, 0.6)])
    assert rows[0].ratio == pytest.approx(2 / math.sqrt(3))
    assert rows[1].ratio >= 7
    assert rows[2].inf == pytest.approx(1 / math.sqrt(0.96))
    with pytest.raises(DomainError):
        dr.harnack_violation_report([(-1.0, 0.5)])


def test_regional_operator_differs_from_full():
    from fraclap import catalog_field
    u = catalog_field("sqrt_torsion")
    reg = dr.regional_frac_lap(u, FracOrder(0.5), 0.0, (-1.0, 1.0))
    # full operator = regional + exterior term; with zero exterior the latter is C u(0) * 2/(2s)
    ext = dr.exterior_term(lambda y: np.zeros_like(y), 1.0, FracOrder(0.5), 0.0, (-1.0, 1.0))
    assert ext == pytest.approx(2 / math.pi, rel=1e-10)
    assert reg + ext == pytest.approx(1.0, abs=1e-8)
