"""Deterministic report bundle used by the determinism acceptance check."""
from __future__ import annotations

import sys

from hill_spectra.potential import Potential
from hill_spectra.products import corollary24_residuals, hilbert_norm_check, lemma_bound_check, unit_perturbation
from hill_spectra.spectra import build_table
from hill_spectra.verify import _spectral_data, verify_theorem


def wide_potential() -> Potential:
    """Real potential with sixteen active modes and algebraically decaying coefficients."""
    q = Potential.zero()
    for k in range(1, 17):
        q = q + Potential.cos(k, 2.0 / k ** 3) + Potential.sin(k, 1.0 / k ** 4)
    return q


def report_bundle(seed: int = 0) -> str:
    _spectral_data.cache_clear()
    cos2 = Potential.cos(1, 2.0)
    parts = [
        build_table(Potential.sin(1, 0.3) + Potential.cos(3, 0.1), 12).to_csv(),
        verify_theorem(cos2, "4", 1, (6, 20)).to_csv(),
        verify_theorem(Potential.sin(1) + Potential.sin(2, 0.5), "1", 0, (6, 24)).to_json(),
        verify_theorem(wide_potential(), "gap", 1, (6, 24)).to_json(),
        "%.17g" % hilbert_norm_check(200, seed=seed),
        "%.17g" % lemma_bound_check(200, seed=seed),
        "\n".join("%d,%.17g" % (n, r) for n, _, r in corollary24_residuals(unit_perturbation(), range(8, 20))),
    ]
    return "\n".join(parts)


if __name__ == "__main__":
    sys.stdout.write(report_bundle(int(sys.argv[1]) if len(sys.argv) > 1 else 0))
