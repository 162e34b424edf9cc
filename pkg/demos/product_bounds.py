"""Numerical checks of the Hilbert-type inequality and the infinite-product estimates."""
import math

from hill_spectra.products import (
    corollary24_residuals,
    hilbert_norm_check,
    lemma_bound_check,
    unit_perturbation,
)

print(f"max Hilbert ratio  {hilbert_norm_check(500, seed=1):.4f}  (bound 2pi = {2 * math.pi:.4f})")
print(f"max product ratio  {lemma_bound_check(500, seed=1):.4f}  (bound 1)")
for n, f, r in corollary24_residuals(unit_perturbation(64), range(8, 65, 8)):
    print(f"n={n:3d}  f_n={complex(f).real:+.6f}  n*|f_n - (-1)^(n+1)/2| = {r:.3e}")
