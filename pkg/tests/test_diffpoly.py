from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy.polys.domains import QQ_I

from hill_spectra.diffpoly import (
    DepthLimitError,
    DiffMonomial,
    DiffPolynomial,
    MAX_DEPTH,
    PiPolynomial,
    a_k,
    a_k_exact,
    eval_density,
    isobaric_degree,
    leading_split,
    sk,
)
from hill_spectra.potential import Potential

from conftest import potentials


def rational_potentials():
    half = Fraction(1, 2)
    return [
        Potential.cos(1, 2),
        Potential({1: QQ_I(Fraction(1, 3), Fraction(1, 5)), -1: QQ_I(Fraction(1, 3), Fraction(-1, 5)),
                   2: QQ_I(0, Fraction(2, 7)), -2: QQ_I(0, Fraction(-2, 7))}),
        Potential({1: half, -1: half, 3: Fraction(-3, 4), -3: Fraction(-3, 4)}),
    ]


def test_sk_examples():
    assert str(sk(1)) == "q"
    assert str(sk(2)) == "-q'"
    assert str(sk(3)) == "q'' - q^2"
    assert str(sk(4)) == "-q''' + 4*q*q'"


def test_sk_recursion_identity():
    for k in range(2, 10):
        acc = -sk(k).diff()
        for j in range(1, k):
            acc = acc - sk(k - j) * sk(j)
        assert acc == sk(k + 1)


def test_depth_limit():
    assert sk(MAX_DEPTH)
    with pytest.raises(DepthLimitError):
        sk(MAX_DEPTH + 1)
    with pytest.raises(ValueError):
        sk(0)


def test_isobaric_degree_examples():
    assert isobaric_degree(sk(1)) == 1
    assert isobaric_degree(sk(3)) == 2
    assert isobaric_degree(sk(5)) == 3
    mixed = DiffPolynomial.from_monomials([DiffMonomial(Fraction(1), (0,)),
                                           DiffMonomial(Fraction(1), (0, 0))])
    assert isobaric_degree(mixed) == "inhomogeneous"


@pytest.mark.parametrize("k", range(1, MAX_DEPTH + 1))
def test_isobaric_homogeneity(k):
    assert isobaric_degree(sk(k)) == 1 + Fraction(k - 1, 2)


def test_leading_split_examples():
    lead, rest = leading_split(2)
    assert lead.orders == (1,) and lead.coeff == -1 and not rest
    lead, rest = leading_split(3)
    assert lead.orders == (2,) and lead.coeff == 1 and str(rest) == "-q^2"
    lead, rest = leading_split(4)
    assert lead.orders == (3,) and lead.coeff == -1
    assert all(max(o) <= 1 for o in rest.terms)


@pytest.mark.parametrize("k", range(2, MAX_DEPTH + 1))
def test_leading_split_structure(k):
    lead, rest = leading_split(k)
    assert lead.coeff == (-1) ** (k - 1)
    assert all(len(o) >= 2 and max(o) <= k - 3 for o in rest.terms)


def test_eval_density_examples(cos2):
    s = eval_density(sk(1), cos2)
    assert s.coefficient(1) == 1 and s.coefficient(-1) == 1 and s.mean == 0
    sq = eval_density(DiffPolynomial.q() * DiffPolynomial.q(), cos2)
    assert sq.mean == pytest.approx(2) and sq.coefficient(2) == pytest.approx(1)
    assert sq.coefficient(-2) == pytest.approx(1) and sq.coefficient(1) == 0
    q = Potential.sin(2, 0.7) + Potential.cos(1, 0.2)
    d = eval_density(DiffPolynomial.q().diff(), q)
    assert np.allclose([d.coefficient(n) for n in range(-2, 3)],
                       q.derivative(1).coefficient_array())


def test_a_k_examples(cos2):
    assert a_k(1, cos2) == 0
    assert a_k(2, cos2) == 0
    assert a_k(3, cos2) == pytest.approx(-2)
    assert a_k(5, cos2) == pytest.approx(8 * np.pi ** 2)


@pytest.mark.parametrize("q", rational_potentials())
def test_even_means_vanish_exactly(q):
    for k in (2, 4, 6, 8, 10, 12):
        assert a_k_exact(k, q).is_zero()


@pytest.mark.parametrize("q", rational_potentials())
def test_a3_is_minus_l2_norm_exactly(q):
    norm2 = QQ_I.zero
    for n, c in q.coeffs.items():
        c = c if hasattr(c, "x") else QQ_I.convert(Fraction(c))
        norm2 += c * QQ_I(c.x, -c.y)
    assert a_k_exact(3, q) == PiPolynomial({0: -norm2})


def test_exact_and_float_means_agree():
    q = rational_potentials()[1]
    for k in range(1, 8):
        assert abs(complex(a_k_exact(k, q)) - a_k(k, q)) < 1e-9 * max(1, abs(a_k(k, q)))


@given(potentials(max_bandwidth=3), st.sampled_from([0.3, 0.7]), st.integers(1, 7))
def test_means_translation_invariant(q, t, k):
    # floating-point scale of the largest monomial: r factors, k + 1 - 2r derivatives
    L, w = q.l1_coefficient_norm(), 2 * np.pi * q.bandwidth
    scale = max([1.0] + [L ** r * w ** (k + 1 - 2 * r) for r in range(1, (k + 1) // 2 + 1)])
    a, b = a_k(k, q), a_k(k, q.translate(t))
    assert abs(a - b) <= 1e-12 * scale


@given(potentials(), st.integers(1, 6))
def test_pure_derivative_integrates_to_zero(q, k):
    p = DiffPolynomial.from_monomials([DiffMonomial(Fraction(1), (k,))])
    assert abs(eval_density(p, q).mean) < 1e-12
