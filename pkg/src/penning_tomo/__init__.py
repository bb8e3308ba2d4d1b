"""Simulated tomography of the cyclotron state of a trapped electron.

Two readout schemes are simulated on a truncated Fock space: rotated
quadrature sampling reconstructed by inverse Radon transform, and
displaced excitation counting reconstructed by a weighted parity series.
Both return s-parametrized Wigner functions on a complex-plane grid and can
be checked against the exact values from the density matrix.
"""

from .analysis import (
    ComparisonReport,
    charge_conjugation_grid_test,
    charge_conjugation_test,
    compare,
    conjugate_grid,
    oracle_wigner,
)
from .errors import (
    ConstraintError,
    CutoffError,
    DegenerateStateError,
    GridMismatchError,
    InvalidStateError,
    TomographyError,
)
from .fock import (
    QuantumState,
    coherent_state,
    displacement_matrix,
    even_cat_state,
    fock_state,
    number_distribution,
    odd_cat_state,
    quadrature_pdf,
    thermal_state,
)
from .grids import CartesianGrid, PointGrid, WignerGrid, default_pnt_grid, square_grid
from .measurement import (
    OhtProtocol,
    OhtRecord,
    PntProtocol,
    PntRecord,
    run_protocol,
    sample_excitation_number,
    sample_quadrature,
)
from .oht import MarginalSet, analytic_marginals, build_marginals, inverse_radon
from .pnt import DisplacedNumberEstimate, estimate_probs, reconstruct_grid, wigner_point

__version__ = "0.1.0"
