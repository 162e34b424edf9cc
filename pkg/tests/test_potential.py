import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hill_spectra.potential import Potential

from conftest import potentials


def test_sobolev_norm_examples(cos2):
    assert Potential.zero().sobolev_norm(3) == 0
    assert cos2.sobolev_norm(0) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert cos2.sobolev_norm(2) == pytest.approx(math.sqrt(2), abs=1e-15)


def test_pairing_examples(cos2):
    assert cos2.pairing("cos", 1) == pytest.approx(1.0)
    assert abs(cos2.pairing("sin", 1)) < 1e-15
    assert Potential.sin(1).pairing("sin", 1) == pytest.approx(0.5)
    assert cos2.pairing("exp", 1) == pytest.approx(1.0)


def test_pairing_matches_quadrature():
    q = Potential({1: 0.3 - 0.2j, -1: 0.1 + 0.4j, 2: 0.5j, -3: 0.7})
    x = np.arange(512) / 512
    qx = q.evaluate(x)
    for n in (1, 2, 3):
        assert abs(q.pairing("exp", n) - np.mean(qx * np.exp(-2j * np.pi * n * x))) < 1e-13
        assert abs(q.pairing("cos", n) - np.mean(qx * np.cos(2 * np.pi * n * x))) < 1e-13
        assert abs(q.pairing("sin", n) - np.mean(qx * np.sin(2 * np.pi * n * x))) < 1e-13


def test_pairing_rejects_zero_index(cos2):
    with pytest.raises(ValueError):
        cos2.pairing("sin", 0)
    with pytest.raises(ValueError):
        cos2.pairing("cos", 0)


def test_evaluate_examples(cos2):
    assert Potential.zero().evaluate(0.3) == 0
    assert cos2.evaluate(0.0) == pytest.approx(2.0)
    assert abs(cos2.evaluate(0.25)) < 1e-15


def test_derivative_examples(cos2):
    assert Potential.sin(1).derivative(0) == Potential.sin(1)
    d = Potential.sin(1).derivative(1)
    assert np.allclose(d.coefficient_array(), Potential.cos(1, 2 * np.pi).coefficient_array())
    d2 = cos2.derivative(2)
    assert np.allclose(d2.coefficient_array(), Potential.cos(1, -8 * np.pi ** 2).coefficient_array())


def test_zero_mean_enforced():
    with pytest.raises(ValueError):
        Potential({0: 1.0, 1: 1.0})


def test_real_flag_requires_symmetry():
    with pytest.raises(ValueError):
        Potential({1: 1.0}, is_real=True)
    assert not Potential.sin(1, 1j).is_real
    assert Potential.sin(1).is_real and not Potential.sin(1).is_even
    assert Potential.cos(2, 0.3).is_even


def test_translate_rotates_coefficients():
    q = Potential.cos(1, 2.0) + Potential.sin(3, 0.5)
    t = 0.3
    x = np.linspace(0, 1, 17)
    assert np.allclose(q.translate(t).evaluate(x), q.evaluate(x + t), atol=1e-14)


@given(potentials(), st.integers(0, 3))
def test_sobolev_norm_monotone(q, N):
    assert q.sobolev_norm(N) <= q.sobolev_norm(N + 1) * (1 + 1e-14)


@given(potentials())
def test_pairings_reconstruct_coefficients(q):
    for n in range(1, q.bandwidth + 1):
        c, s = q.pairing("cos", n), q.pairing("sin", n)
        assert abs(c - 1j * s - q.pairing("exp", n)) < 1e-14
        assert abs(c + 1j * s - q.pairing("exp", -n)) < 1e-14


@given(potentials())
def test_derivative_composes(q):
    assert np.allclose(q.derivative(1).derivative(1).coefficient_array(),
                       q.derivative(2).coefficient_array(), rtol=1e-14, atol=1e-12)


@given(potentials(real=True))
def test_real_potentials_evaluate_real(q):
    x = np.arange(64) / 64
    assert np.max(np.abs(np.imag(q.evaluate(x)))) <= 1e-14


@given(potentials())
def test_json_round_trip(q):
    back = Potential.from_json(q.to_json())
    assert back == q
    assert back.is_real == q.is_real
    assert back.digest() == q.digest()
