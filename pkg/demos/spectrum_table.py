"""Print the four spectra of the Mathieu potential 2cos(2 pi x) next to a Galerkin check."""
import numpy as np

from hill_spectra.potential import Potential
from hill_spectra.spectra import build_table, galerkin_oracle

q = Potential.cos(1, 2.0)
table = build_table(q, 10)
print(table.to_csv())
mu_ref = galerkin_oracle(q, "dirichlet", 128)[:10]
print("max |mu - Galerkin| =", float(np.max(np.abs(table.mu - mu_ref))))
