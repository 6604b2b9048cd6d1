import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_cpoly, worked_family
from coronaglue.errors import DomainError
from coronaglue.polyalg import (
    CPoly,
    ParamFamily,
    SPoly,
    ZSPoly,
    eval_family,
    partial_s,
)


def test_eval_examples():
    assert CPoly([1, 2, 1]).eval(1j) == pytest.approx(2j)
    assert CPoly.zero().eval(3.7 - 2j) == 0
    assert CPoly.monomial(3).eval(2.0) == pytest.approx(8.0)


def test_derivative_examples():
    assert CPoly([1, 2, 1]).derivative() == CPoly([2, 2])
    assert CPoly([5.0]).derivative() == CPoly.zero()
    assert CPoly.monomial(5).derivative() == CPoly.monomial(4, 5.0)
    assert CPoly([1, 2, 1]).derivative().degree == 1


def test_canonical_form():
    p = CPoly([1, 2, 0, 0])
    assert p.degree == 1
    assert CPoly([0, 0, 0]).is_zero
    assert (CPoly([1, 1]) - CPoly([0, 1])).degree == 0


def test_eval_family_examples():
    family = worked_family()
    np.testing.assert_allclose(eval_family(family, 1.0, [0.0]), [1.0, 1.0])
    np.testing.assert_allclose(eval_family(family, 0.0, [1.0]), [0.0, 3.0])
    one = ParamFamily([ZSPoly([SPoly([1.0])])], [(0.0, 1.0)])
    np.testing.assert_allclose(eval_family(one, 0.3 + 0.1j, [0.7]), [1.0])


def test_eval_family_rejects_outside_domain():
    family = worked_family()
    with pytest.raises(DomainError):
        eval_family(family, 0.0, [1.5])
    with pytest.raises(DomainError):
        eval_family(family, 0.0, [-0.2])


def test_partial_s_examples():
    family = worked_family()
    d = partial_s(family, (1,))
    np.testing.assert_allclose(eval_family(d, 0.5, [0.3]), [0.0, 1.0])
    same = partial_s(family, (0,))
    np.testing.assert_allclose(
        eval_family(same, 0.5, [0.3]), eval_family(family, 0.5, [0.3])
    )
    sq = ParamFamily([ZSPoly([SPoly([0.0]), SPoly([0.0, 0.0, 1.0])])],
                     [(0.0, 1.0)])
    dd = partial_s(sq, (2,))
    np.testing.assert_allclose(eval_family(dd, 1.0, [0.5]), [2.0])


def test_partial_s_commutes_exactly():
    sixth = 1.0 / 6.0
    f = ZSPoly([SPoly([[0.5, sixth], [sixth, 2.0]]), SPoly([[sixth, 1.0]])])
    family = ParamFamily([f], [(0.0, 1.0), (0.0, 1.0)])
    a = partial_s(partial_s(family, (1, 0)), (0, 1))
    b = partial_s(partial_s(family, (0, 1)), (1, 0))
    for ca, cb in zip(a.components, b.components):
        assert ca.coeffs == cb.coeffs


@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_product_evaluation_consistent(da, db, seed):
    rng = np.random.default_rng(seed)
    p = random_cpoly(rng, da)
    q = random_cpoly(rng, db)
    z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    lhs = (p * q).eval(z)
    rhs = p.eval(z) * q.eval(z)
    assert abs(lhs - rhs) <= 1e-12 * (1.0 + abs(rhs))


@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_derivative_product_rule(da, db, seed):
    rng = np.random.default_rng(seed)
    p = random_cpoly(rng, da)
    q = random_cpoly(rng, db)
    lhs = (p * q).derivative()
    rhs = p.derivative() * q + p * q.derivative()
    n = max(len(lhs.coeffs), len(rhs.coeffs))
    a = np.zeros(n, dtype=complex)
    b = np.zeros(n, dtype=complex)
    a[: len(lhs.coeffs)] = lhs.coeffs
    b[: len(rhs.coeffs)] = rhs.coeffs
    scale = 1.0 + np.abs(b).max()
    np.testing.assert_allclose(a, b, atol=1e-12 * scale)


def test_partial_matches_finite_differences():
    family = worked_family()
    deriv = partial_s(family, (1,))
    h = 1e-4
    z = 0.4 + 0.3j
    for s in (0.25, 0.5, 0.75):
        fd = (eval_family(family, z, [s + h]) - eval_family(family, z, [s - h])) / (2 * h)
        an = eval_family(deriv, z, [s])
        np.testing.assert_allclose(fd, an, rtol=1e-6, atol=1e-9)


def test_spoly_grid_and_bounds():
    p = SPoly([1.0, -2.0, 0.5])
    xs = np.linspace(0, 1, 7)
    np.testing.assert_allclose(p.eval_grid([xs]), [p.eval([x]) for x in xs])
    assert p.abs_coeff_bound([(0.0, 1.0)]) == pytest.approx(3.5)
    q = SPoly([[1.0, 2.0], [3.0, 4.0]])
    assert q.eval([0.5, 0.25]) == pytest.approx(1 + 2 * 0.25 + 3 * 0.5 + 4 * 0.125)
    assert q.abs_coeff_bound([(0.0, 1.0), (-2.0, 1.0)]) == pytest.approx(
        1 + 2 * 2 + 3 + 4 * 2
    )


def test_zspoly_product_against_pointwise():
    rng = np.random.default_rng(7)
    a = ZSPoly([SPoly(rng.standard_normal(3)), SPoly(rng.standard_normal(2))])
    b = ZSPoly([SPoly(rng.standard_normal(2)), SPoly(rng.standard_normal(3))])
    prod = a * b
    for s in ([0.2], [0.9]):
        for z in (0.5, -0.3 + 0.8j):
            assert prod.eval(z, s) == pytest.approx(a.eval(z, s) * b.eval(z, s))


def test_family_validation():
    with pytest.raises(DomainError):
        ParamFamily([ZSPoly([SPoly([1.0])])], [(0.0, 0.0)])
    with pytest.raises(ValueError):
        ParamFamily([], [(0.0, 1.0)])
