"""
Penning-trap frequencies and the magnetic bottle
================================================

Derive the mode frequencies of a typical electron trap and the axial shift
produced by one cyclotron quantum.
"""

import numpy as np

from penning_tomo.trap import TrapConfig, axial_frequency_shift, cyclotron_shift, derive_frequencies, thermal_axial_spread

cfg = TrapConfig(B=5.0, V0=10.0, d=3.3e-3, b=100.0, temperature=4.2)
f = derive_frequencies(cfg)
print(f"cyclotron  {f.omega_c / 2 / np.pi / 1e9:.3f} GHz")
print(f"axial      {f.omega_z / 2 / np.pi / 1e6:.3f} MHz")

# each quantum shifts the axial frequency by the same amount (to first order)
shifts = axial_frequency_shift(f, np.arange(4)) - f.omega_z
print("axial shift per level [rad/s]:", np.round(shifts, 4))

###############################################################################
# Thermal axial motion in the bottle pulls the cyclotron frequency.

z2 = thermal_axial_spread(f, cfg)
print(f"<z^2> = {z2:.3e} m^2, cyclotron pull = {cyclotron_shift(f, cfg) - f.omega_c:.3e} rad/s")
