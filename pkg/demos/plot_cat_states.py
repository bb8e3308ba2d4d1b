"""
Cat states in a truncated Fock space
====================================

Build an odd cat, look at its populations and quadrature marginals, and
check the parity node at the origin.
"""

import numpy as np

from penning_tomo.fock import coherent_state, number_distribution, odd_cat_state, quadrature_pdf

cat = odd_cat_state(1.5, dim=32)
print("mean excitation:", round(cat.mean_number(), 6), "closed form:", round(2.25 / np.tanh(2.25), 6))

# only odd levels are populated
for n, p in enumerate(cat.populations[:8]):
    print(f"  p_{n} = {p:.4f}")

###############################################################################
# The marginal of every rotated quadrature vanishes at X = 0.

x = np.linspace(-5, 5, 11)
for phi in (0.0, np.pi / 4, np.pi / 2):
    print(f"phi={phi:.2f}", np.round(quadrature_pdf(cat, phi, x), 4))

###############################################################################
# Displacing a coherent state back to the origin leaves the vacuum.

p = number_distribution(coherent_state(1.5), 1.5)
print("P(n=0) after displacing |1.5> by 1.5:", round(p[0], 12))
