import json

import numpy as np
import pytest

from hill_spectra.asymptotics import DomainError
from hill_spectra.potential import Potential
from hill_spectra.spectra import build_table
from hill_spectra.verify import (
    THEOREM_IDS,
    _spectral_data,
    even_potential_suite,
    thread_count,
    uniformity_scan,
    verify_theorem,
)

SIN_MIX = Potential.sin(1) + Potential.sin(2, 0.5)


@pytest.mark.parametrize("theorem", THEOREM_IDS)
def test_zero_potential_passes(theorem):
    report = verify_theorem(Potential.zero(), theorem, 1, (6, 12))
    assert report.status == "pass"
    assert all(r.residual < 1e-9 for r in report.rows)


def test_theorem1_superpolynomial_decay():
    report = verify_theorem(SIN_MIX, "1", 0, (6, 40))
    assert report.status == "pass" and report.slope <= -2


def test_theorem4_mu_bounded_and_decreasing(cos2):
    report = verify_theorem(cos2, "4mu", 2, (6, 32))
    assert report.status == "pass"
    scaled = [r.scaled_residual for r in report.rows]
    assert max(scaled) <= report.tolerances["cap"]
    assert scaled[-1] < scaled[0]


def test_below_resolution_is_inconclusive():
    report = verify_theorem(Potential.sin(1), "1", 0, (6, 48))
    assert report.status == "inconclusive" and "below resolution" in report.note


def test_domain_errors(cos2):
    with pytest.raises(DomainError):
        verify_theorem(Potential.sin(1, 1j), "B")
    with pytest.raises(DomainError):
        verify_theorem(cos2, "7")
    with pytest.raises(DomainError):
        verify_theorem(cos2, "3", 0, (10, 5))
    with pytest.raises(DomainError):
        verify_theorem(cos2, "3", -1)


def test_complex_potential_allowed_for_midpoints(cos2):
    q = cos2 + Potential.sin(1, 0.05j)
    assert verify_theorem(q, "3", 1, (6, 24)).status == "pass"


def test_rows_sorted_and_floor_marked(cos2):
    report = verify_theorem(cos2, "cor32", 0, (6, 20))
    ns = [r.n for r in report.rows]
    assert ns == sorted(ns)
    assert any(r.at_floor for r in report.rows)


def test_midpoint_two_ways(cos2):
    table = build_table(cos2, 20, tol=1e-14)
    report = verify_theorem(cos2, "3", 0, (1, 20))
    assert np.max(np.abs(np.array([r.computed[0] for r in report.rows]) - table.tau)) < 1e-10


def _signed(report):
    return np.array([r.computed[0] - r.predicted[0] for r in report.rows])


def test_corollary_residual_identity():
    q = Potential.cos(1, 1.0) + Potential.sin(2, 0.4) + Potential.cos(3, 0.3)
    cor = _signed(verify_theorem(q, "cor32", 2, (6, 20)))
    tau = _signed(verify_theorem(q, "3", 2, (6, 20)))
    mu = _signed(verify_theorem(q, "4mu", 2, (6, 20)))
    assert np.max(np.abs(cor - (tau - mu))) < 1e-10


def test_pair_theorems_agree_on_real_potentials():
    q = Potential.cos(1, 1.0) + Potential.sin(2, 0.4)
    a = verify_theorem(q, "2", 1, (6, 20))
    b = verify_theorem(q, "B", 1, (6, 20))
    assert np.allclose([r.residual for r in a.rows], [r.residual for r in b.rows], atol=1e-12)


def test_reports_deterministic(cos2):
    a = verify_theorem(cos2, "4", 1, (6, 16))
    _spectral_data.cache_clear()
    b = verify_theorem(cos2, "4", 1, (6, 16))
    assert a.to_csv() == b.to_csv() and a.to_json() == b.to_json()
    data = json.loads(a.to_json())
    assert data["status"] == "pass" and data["theorem"] == "4"


def test_uniformity_scan_monotone_in_amplitude():
    family = [Potential.sin(1, t) for t in (0.2, 0.4, 0.6, 0.8, 1.0)]
    scan = uniformity_scan(family, "4mu", 0, (6, 20))
    assert scan.passed
    maxima = [r.max_scaled for r in scan.reports]
    assert maxima == sorted(maxima)


def test_uniformity_scan_random_family():
    rng = np.random.default_rng(3)
    family = []
    for _ in range(10):
        coeffs = {}
        for n in range(1, 4):
            c = complex(*rng.standard_normal(2))
            coeffs[n], coeffs[-n] = c, c.conjugate()
        q = Potential(coeffs)
        family.append(q.scale(rng.uniform(0.2, 1.0) / q.sobolev_norm(0)))
    scan = uniformity_scan(family, "3", 1, (6, 20), threads=4)
    assert scan.passed and np.isfinite(scan.max_scaled)
    serial = uniformity_scan(family, "3", 1, (6, 20), threads=1)
    assert serial.max_scaled == scan.max_scaled


def test_uniformity_scan_empty():
    with pytest.raises(DomainError):
        uniformity_scan([], "3")


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("HILL_SPECTRA_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("HILL_SPECTRA_THREADS", "junk")
    assert thread_count() >= 1


@pytest.mark.parametrize("q", [Potential.cos(1, 2.0), Potential.cos(1) + Potential.cos(2, 0.3)],
                         ids=["cos2", "cos+cos"])
def test_even_suite(q):
    report = even_potential_suite(q)
    assert report.passed
    assert json.loads(report.to_json())["passed"]


def test_even_suite_rejects_odd_potential():
    with pytest.raises(DomainError):
        even_potential_suite(Potential.sin(1))


def test_floor_bound_too_loose_is_inconclusive():
    q = Potential.cos(1, 2.0) + Potential.sin(2, 0.5)
    report = verify_theorem(q, "gap", 2, (6, 32))
    assert report.status == "inconclusive"
    assert report.max_scaled <= report.tolerances["cap"]
