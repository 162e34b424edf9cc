"""Scaled residuals and fitted decay slopes for several asymptotic statements."""
from hill_spectra.potential import Potential
from hill_spectra.verify import verify_theorem

q = Potential.cos(1, 2.0) + Potential.sin(2, 0.5)
for theorem in ("1", "4mu", "4eta", "3", "gap"):
    for N in (0, 1, 2):
        print(verify_theorem(q, theorem, N, (6, 32)).summary())
