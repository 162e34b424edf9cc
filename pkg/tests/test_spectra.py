import math

import numpy as np
import pytest
from hypothesis import given, settings

from hill_spectra.odecore import monodromy
from hill_spectra.potential import Potential
from hill_spectra.spectra import (
    BranchError,
    ConsistencyError,
    build_table,
    dirichlet_eigs,
    floquet_exponents,
    galerkin_oracle,
    lexicographic_sort,
    neumann_eigs,
    periodic_eigs,
)

from conftest import potentials

MIXED = Potential.sin(1, 0.3) + Potential.cos(3, 0.1)
N2 = (np.arange(1, 33) * np.pi) ** 2


def rel(a, b):
    return np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(1.0, np.abs(np.asarray(b))))


def test_free_spectra():
    zero = Potential.zero()
    assert rel(dirichlet_eigs(zero, 32), N2) < 1e-12
    eta = neumann_eigs(zero, 32)
    assert abs(eta[0]) < 1e-12 and rel(eta[1:], N2) < 1e-12
    per = periodic_eigs(zero, 32)
    assert abs(per.lambda0) < 1e-10
    assert rel(per.lo, N2) < 1e-10 and rel(per.hi, N2) < 1e-10
    assert per.near_degenerate == tuple(range(1, 33))


@pytest.mark.parametrize("q", [Potential.cos(1, 2.0), MIXED], ids=["cos2", "mixed"])
def test_dirichlet_and_neumann_match_oracle(q):
    assert rel(dirichlet_eigs(q, 20), galerkin_oracle(q, "dirichlet", 96)[:20]) < 1e-8
    assert rel(neumann_eigs(q, 20), galerkin_oracle(q, "neumann", 96)[:21]) < 1e-8


@pytest.mark.parametrize("q", [Potential.cos(1, 2.0), MIXED], ids=["cos2", "mixed"])
def test_periodic_matches_oracle(q):
    per = periodic_eigs(q, 20)
    ref = np.sort(np.concatenate([galerkin_oracle(q, "periodic", 128),
                                  galerkin_oracle(q, "antiperiodic", 128)]).real)
    assert rel(np.sort(per.flat().real), ref[:41]) < 1e-8


def test_dirichlet_shift_vanishes_beyond_first_mode(cos2):
    mu = dirichlet_eigs(cos2, 12)
    shifts = np.abs(mu - N2[:12])
    assert np.all(np.diff(shifts[1:]) < 0)
    assert shifts[11] < 1e-3


def test_small_amplitude_gap():
    eps = 0.05
    per = periodic_eigs(Potential.cos(1, 2 * eps), 1)
    assert (per.hi[0] - per.lo[0]) == pytest.approx(2 * eps, rel=0.01)


def test_floquet_examples(cos2):
    assert np.max(np.abs(floquet_exponents(Potential.zero(), N2[:8]).kappa)) < 1e-12
    assert np.max(np.abs(floquet_exponents(cos2, dirichlet_eigs(cos2, 24)).kappa)) < 1e-9
    q = Potential.sin(1)
    k1 = floquet_exponents(q, dirichlet_eigs(q, 1)).kappa[0]
    assert 2 * math.pi * k1 == pytest.approx(0.5, abs=1e-2)


def test_floquet_branch_error():
    with pytest.raises(BranchError):
        floquet_exponents(Potential.zero(), [(1.6 * math.pi) ** 2])


def test_floquet_consistency_error(cos2):
    mu1 = dirichlet_eigs(cos2, 1)[0]
    with pytest.raises(ConsistencyError):
        floquet_exponents(cos2, [mu1 + 0.5])


def test_galerkin_examples(cos2):
    assert rel(galerkin_oracle(Potential.zero(), "dirichlet", 16), N2[:16]) < 1e-14
    a = galerkin_oracle(cos2, "dirichlet", 96)[:20]
    b = galerkin_oracle(cos2, "dirichlet", 128)[:20]
    assert rel(a, b) < 1e-9


def test_oracle_interlacing(cos2):
    per = np.sort(np.concatenate([galerkin_oracle(cos2, "periodic", 64),
                                  galerkin_oracle(cos2, "antiperiodic", 64)]).real)
    mu = galerkin_oracle(cos2, "dirichlet", 64).real
    for n in range(1, 16):
        assert per[2 * n - 1] - 1e-9 <= mu[n - 1] <= per[2 * n] + 1e-9


def test_lexicographic_sort():
    vals = [2 + 1j, 1 + 5j, 2 - 1j, 1 - 5j]
    assert list(lexicographic_sort(vals)) == [1 - 5j, 1 + 5j, 2 - 1j, 2 + 1j]


@pytest.mark.parametrize("q", [Potential.zero(), Potential.cos(1, 2.0), MIXED],
                         ids=["zero", "cos2", "mixed"])
def test_table_invariants(q):
    table = build_table(q, 24)
    assert table.check_invariants() == []
    if q.is_zero:
        assert np.max(np.abs(table.kappa)) == 0 and np.max(np.abs(table.gap)) < 1e-8


def test_complex_table_is_lexicographic():
    q = Potential.cos(1, 2.0) + Potential.sin(1, 0.05j)
    table = build_table(q, 12)
    assert table.lexicographic and table.check_invariants() == []


def test_wronskian_at_dirichlet_eigenvalues(cos2):
    mu = dirichlet_eigs(cos2, 24)
    M, _, _, _ = monodromy(cos2, mu)
    assert np.max(np.abs(M[0] * M[3] - 1)) < 1e-9


def test_kappa_certificate():
    mu = dirichlet_eigs(MIXED, 24)
    assert np.max(floquet_exponents(MIXED, mu).mismatch) < 1e-8


def test_translation_isospectral():
    q = Potential.cos(1, 2.0) + Potential.sin(2, 0.7) + Potential.cos(3, 0.2)
    a = periodic_eigs(q, 16).flat()
    b = periodic_eigs(q.translate(0.3), 16).flat()
    assert np.max(np.abs(a - b) / np.maximum(1, np.abs(a))) < 1e-9


def test_table_rejects_bad_arguments(cos2):
    with pytest.raises(ValueError):
        build_table(cos2, 0)
    with pytest.raises(ValueError):
        build_table(cos2, 4, tol=1e-3)


def test_table_output_deterministic(cos2):
    a, b = build_table(cos2, 8), build_table(cos2, 8)
    assert a.to_csv() == b.to_csv() and a.to_json() == b.to_json()
    header = a.to_csv().splitlines()[0]
    assert header.startswith("n,lambda_lo_re,lambda_lo_im,lambda_hi_re") and header.endswith("gap_re,gap_im")


@settings(max_examples=10)
@given(potentials(real=True, max_bandwidth=3))
def test_random_real_tables_interlace(q):
    assert build_table(q, 10).check_invariants() == []
