import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hill_spectra.products import (
    DomainError,
    IsolatingFamily,
    PerturbedSequence,
    corollary24_product,
    corollary24_residuals,
    hilbert_norm_check,
    hilbert_norm_ratio,
    hilbert_transform,
    lemma_bound,
    lemma_bound_check,
    power_tail,
    product_eval,
    ratio_product,
    sine_product_excluding,
    unit_perturbation,
)

PI2 = math.pi ** 2
vectors = st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=30).map(
    lambda v: np.array([complex(*t) for t in v]))


def test_hilbert_unit_vector():
    h = hilbert_transform([1.0] + [0.0] * 9)
    assert h[0] == 0
    n = np.arange(2, 11)
    assert np.allclose(h[1:], 1 / (n - 1) + 1 / (n + 1), rtol=1e-15)
    assert np.all(hilbert_transform(np.zeros(5), 8) == 0)


def test_hilbert_norm_monte_carlo():
    assert hilbert_norm_check(trials=1000, seed=0) <= 2 * math.pi


@given(vectors, vectors, st.floats(-2, 2), st.floats(-2, 2))
def test_hilbert_linear(x, y, a, b):
    L = max(len(x), len(y))
    x = np.pad(x, (0, L - len(x)))
    y = np.pad(y, (0, L - len(y)))
    lhs = hilbert_transform(a * x + b * y, 2 * L)
    rhs = a * hilbert_transform(x, 2 * L) + b * hilbert_transform(y, 2 * L)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(lhs)))


@given(vectors)
def test_hilbert_norm_bound(x):
    assert hilbert_norm_ratio(x, 4 * len(x)) <= 2 * math.pi


def test_product_eval_examples():
    v = product_eval(np.zeros(10), tail_l1=0.0)
    assert v.value == 1 and v.tail_bound == 0
    M = 2000
    m = np.arange(1, M + 1)
    v = product_eval(-1.0 / (m * m * PI2), tail_law=(1 / PI2, 2))
    assert v.contains(math.sin(1.0))
    assert v.tail_bound < 1e-4


def test_product_eval_bracket_contains_longer_truncation():
    m = np.arange(1, 4001)
    a = 0.3j / m ** 1.5
    short = product_eval(a[:200], tail_law=(0.3, 1.5))
    assert short.contains(np.prod(1 + a))


def test_product_eval_rejects_divergent_tail():
    with pytest.raises(DomainError):
        power_tail(1.0, 1.0, 10)


def test_lemma_bound_random_sequences():
    assert lemma_bound_check(trials=1000, seed=0) <= 1.0


def test_lemma_bound_hypothesis():
    with pytest.raises(DomainError):
        lemma_bound([0.6])


def test_isolating_family():
    fam = IsolatingFamily.standard()
    assert fam.check(64) == []
    assert fam.contains(3, 9 * PI2 + 0.2 * PI2) and not fam.contains(3, 9 * PI2 + 0.3 * PI2)
    with pytest.raises(DomainError):
        IsolatingFamily(0, 2.0)


def test_ratio_product_identity():
    a = PerturbedSequence({m: 1.0 / m for m in range(1, 20)})
    assert ratio_product(a, a, 25 * PI2, 5).value == 1


def test_ratio_product_decay():
    a = PerturbedSequence({m: 1.0 / m for m in range(1, 65)}, tail_law=(1.0, 1.0))
    b = PerturbedSequence()
    scaled = [n * abs(ratio_product(a, b, n * n * PI2, n).value - 1) for n in range(4, 65)]
    assert max(scaled) < 0.1


def test_ratio_product_separation_violation():
    a = PerturbedSequence({1: 1.0})
    with pytest.raises(DomainError):
        ratio_product(a, PerturbedSequence(), 4 * PI2 + 0.5 * PI2, 2)


def test_sine_product_closed_form():
    for n in (1, 4, 9):
        lam = n * n * PI2 + 0.1
        s = math.sqrt(lam)
        closed = math.sin(s) / s * n * n * PI2 / (n * n * PI2 - lam)
        assert sine_product_excluding(lam, n) == pytest.approx(closed, rel=1e-9)
        assert sine_product_excluding(n * n * PI2, n) == pytest.approx((-1) ** (n + 1) / 2)


def test_sine_product_matches_truncation():
    n, lam = 3, 9 * PI2 + 0.1
    M = 200000
    m = np.array([k for k in range(1, M + 1) if k != n], dtype=float)
    # omitted factors m > M contribute exp(-lam sum 1/(m^2 pi^2)) ~ exp(-lam / (pi^2 (M + 1/2)))
    direct = np.prod((m * m * PI2 - lam) / (m * m * PI2)) * math.exp(-lam / (PI2 * (M + 0.5)))
    assert sine_product_excluding(lam, n) == pytest.approx(direct, rel=1e-9)


def test_corollary_residuals_bounded():
    a = unit_perturbation(64)
    assert a.l2_norm() == pytest.approx(1.0)
    rows = corollary24_residuals(a, range(8, 65))
    assert max(r[2] for r in rows) < 0.1
    unperturbed = [n * abs(corollary24_product(PerturbedSequence(), n * n * PI2 + 0.1, n)
                           - (-1) ** (n + 1) / 2) for n in range(8, 65)]
    assert max(unperturbed) < 0.1
