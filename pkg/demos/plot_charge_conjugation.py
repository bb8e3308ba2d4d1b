"""
Particle versus antiparticle phase-space grids
==============================================

Charge conjugation acts on the cyclotron mode as complex conjugation in the
Fock basis, i.e. the reflection E -> E* of the quasiprobability.
"""

import numpy as np

from penning_tomo.analysis import charge_conjugation_test
from penning_tomo.fock import odd_cat_state
from penning_tomo.grids import square_grid

grid = square_grid(3.0, 21)
real_cat = odd_cat_state(1.5)
tilted = odd_cat_state(1.5 * np.exp(1j * np.pi / 4))

# a tilted cat is matched by the antiparticle state tilted the other way
for label, particle, anti in [("real cat vs itself", real_cat, real_cat),
                              ("real cat vs tilted cat", real_cat, tilted),
                              ("tilted cat vs its mirror", tilted, odd_cat_state(1.5 * np.exp(-1j * np.pi / 4)))]:
    ok, rep = charge_conjugation_test(particle, anti, grid, s=0.0, tol=1e-3)
    print(f"{label:26s} pass={ok}  max|dW|={rep.max_abs_err:.2e}")
