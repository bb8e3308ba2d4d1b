"""Exact quasiprobabilities, grid comparison, and the charge-conjugation test.

Charge conjugation of the cyclotron mode is modelled as complex conjugation
of the density matrix in the Fock basis. On phase space this is the
reflection ``E -> E*``: the Wigner function of the conjugated state at ``E``
equals the original one at ``E*``. It is the antiunitary map that acts on
the cyclotron mode alone; no other definition is implied.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import GridMismatchError
from .fock import QuantumState, number_distribution
from .grids import CartesianGrid, GridSpec, WignerGrid
from .pnt import series_weights

__all__ = [
    "ComparisonReport",
    "oracle_wigner",
    "compare",
    "conjugate_grid",
    "charge_conjugation_test",
    "charge_conjugation_grid_test",
]


def oracle_wigner(state: QuantumState, grid: GridSpec, s: float) -> WignerGrid:
    """Exact s-parametrized quasiprobability from the density matrix."""
    values = np.empty(grid.points().size)
    for i, E in enumerate(grid.points()):
        p = number_distribution(state, E)
        values[i] = np.dot(series_weights(s, p.size), p)
    return WignerGrid(grid, values, {"s": float(s), "method": "ORACLE", "dim": state.dim})


@dataclass(frozen=True)
class ComparisonReport:
    rmse: float
    max_abs_err: float
    relative_rmse: float
    sign_agreement: float
    n_above_floor: int
    pointwise_z_pass: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def compare(reference: WignerGrid, estimate: WignerGrid) -> ComparisonReport:
    """Pointwise metrics of ``estimate`` against ``reference``.

    Signs are compared only where ``|reference|`` exceeds 5 % of its maximum.
    ``pointwise_z_pass`` is the fraction of points within three standard
    errors, using whichever grid carries them.
    """
    reference.check_compatible(estimate)
    a, b = reference.values, estimate.values
    diff = b - a
    rmse = float(np.sqrt(np.mean(diff**2)))
    peak = float(np.max(np.abs(a)))
    mask = np.abs(a) > 0.05 * peak
    sign = float(np.mean(np.sign(a[mask]) == np.sign(b[mask]))) if mask.any() else 1.0
    z_pass = None
    err = estimate.stderr if estimate.stderr is not None else reference.stderr
    if err is not None:
        z_pass = float(np.mean(np.abs(diff) <= 3.0 * err))
    return ComparisonReport(
        rmse=rmse,
        max_abs_err=float(np.max(np.abs(diff))),
        relative_rmse=rmse / peak if peak > 0 else (0.0 if rmse == 0 else float("inf")),
        sign_agreement=sign,
        n_above_floor=int(mask.sum()),
        pointwise_z_pass=z_pass,
    )


def _reflection_index(grid: GridSpec) -> np.ndarray:
    pts = grid.points()
    if isinstance(grid, CartesianGrid):
        if grid.im_min != -grid.im_max:
            raise GridMismatchError("Cartesian grid must be symmetric in Im E to reflect")
        idx = np.arange(pts.size).reshape(grid.shape)[::-1, :]
        return idx.ravel()
    idx = np.empty(pts.size, dtype=int)
    for i, E in enumerate(pts):
        j = int(np.argmin(np.abs(pts - np.conj(E))))
        if abs(pts[j] - np.conj(E)) > 1e-12:
            raise GridMismatchError(f"grid has no mirror point for {E}")
        idx[i] = j
    return idx


def conjugate_grid(wg: WignerGrid) -> WignerGrid:
    """Apply ``E -> E*`` to a quasiprobability grid (values permuted, never recomputed)."""
    idx = _reflection_index(wg.grid)
    stderr = wg.stderr[idx] if wg.stderr is not None else None
    return WignerGrid(wg.grid, wg.values[idx], dict(wg.meta), stderr)


def charge_conjugation_test(
    particle: QuantumState,
    antiparticle: QuantumState,
    grid: GridSpec,
    s: float,
    tol: float,
) -> tuple[bool, ComparisonReport]:
    """Compare the particle's exact grid with the conjugated antiparticle's.

    Passes iff the largest pointwise difference is at most ``tol``.
    """
    w_p = oracle_wigner(particle, grid, s)
    w_a = oracle_wigner(antiparticle.conjugate(), grid, s)
    report = compare(w_p, w_a)
    return report.max_abs_err <= tol, report


def charge_conjugation_grid_test(particle: WignerGrid, antiparticle: WignerGrid, tol: float) -> tuple[bool, ComparisonReport]:
    """Same test on two reconstructed grids; the antiparticle grid is reflected."""
    report = compare(particle, conjugate_grid(antiparticle))
    return report.max_abs_err <= tol, report
