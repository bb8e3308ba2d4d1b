r"""Quadrature-histogram reconstruction by inverse Radon transform.

For quadrature marginals :math:`P(X, \phi)` (``X = a e^{-i phi} + h.c.``,
unit vacuum variance) the s-parametrized quasiprobability at :math:`\alpha` is

.. math::

    W(\alpha, s) = \int \frac{dr\,|r|}{4} \int_0^\pi \frac{d\phi}{\pi}
        \int dX\, P(X, \phi)\,
        \exp\Big[\frac{s r^2}{8} + i r\big(\tfrac{X}{2} - \mathrm{Re}(\alpha e^{-i\phi})\big)\Big],

in the same normalization as :mod:`penning_tomo.pnt` (``int W d^2 alpha = pi``).
The half-scaled quadrature ``X/2`` is the one whose mean is
``Re(alpha e^{-i phi})``. The Gaussian factor is the only damping of the
``|r|`` filter, so the integral diverges for ``s >= 0``.

The triple sum is ordered as a per-phase empirical characteristic function
on the ``r`` grid, then one back-projection per grid point.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConstraintError, TomographyError
from .fock import QuantumState, quadrature_pdf
from .grids import GridSpec, WignerGrid
from .measurement import OhtRecord

__all__ = ["MarginalSet", "build_marginals", "analytic_marginals", "default_r_max", "inverse_radon"]

_CHUNK = 256


@dataclass(frozen=True)
class MarginalSet:
    """Per-phase quadrature histograms on shared, uniform bin edges."""

    phases: np.ndarray
    edges: np.ndarray
    densities: np.ndarray
    clipped: np.ndarray
    counts: Optional[np.ndarray] = None

    def __post_init__(self):
        phases = np.asarray(self.phases, dtype=float)
        edges = np.asarray(self.edges, dtype=float)
        dens = np.atleast_2d(np.asarray(self.densities, dtype=float))
        if phases.size == 0:
            raise TomographyError("marginal set is empty")
        if np.any(np.diff(phases) <= 0) or phases[0] < 0 or phases[-1] >= np.pi:
            raise TomographyError("phases must be strictly increasing in [0, pi)")
        widths = np.diff(edges)
        if not np.allclose(widths, widths[0], rtol=1e-9, atol=0):
            raise TomographyError("histogram bins must have uniform width")
        if dens.shape != (phases.size, edges.size - 1):
            raise TomographyError("densities must have shape (n_phases, n_bins)")
        mass = dens.sum(axis=1) * widths[0]
        # an all-zero row is allowed (empty projection)
        ok = (np.abs(mass - 1.0) <= 1e-9) | np.all(dens == 0, axis=1)
        if not ok.all():
            raise TomographyError("each histogram must integrate to 1")
        for name, val in (("phases", phases), ("edges", edges), ("densities", dens)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def bin_width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def mixed_with(self, other: "MarginalSet", weight: float) -> "MarginalSet":
        """Convex combination ``weight * self + (1 - weight) * other``."""
        if not (np.array_equal(self.phases, other.phases) and np.array_equal(self.edges, other.edges)):
            raise TomographyError("marginal sets must share phases and bins to be mixed")
        dens = weight * self.densities + (1 - weight) * other.densities
        return MarginalSet(self.phases, self.edges, dens, weight * self.clipped + (1 - weight) * other.clipped)

    def rotated(self, delta: float) -> "MarginalSet":
        """Shift every phase by ``delta``, folding back into ``[0, pi)``.

        A phase pushed past ``pi`` measures ``-X`` at ``phi - pi``, so its
        histogram is mirrored; the bin edges must be symmetric about zero.
        """
        if not np.allclose(self.edges, -self.edges[::-1], atol=1e-12):
            raise TomographyError("rotation needs bin edges symmetric about zero")
        shifted = self.phases + delta
        turns = np.floor(shifted / np.pi).astype(int)
        new = shifted - turns * np.pi
        dens = np.where((turns % 2 == 1)[:, None], self.densities[:, ::-1], self.densities)
        order = np.argsort(new)
        return MarginalSet(new[order], self.edges, dens[order], self.clipped[order])


def build_marginals(
    records: Sequence[OhtRecord],
    n_bins: int = 64,
    x_range: tuple[float, float] = (-6.0, 6.0),
) -> MarginalSet:
    """Histogram each record's samples; out-of-range samples are dropped and reported.

    Densities are normalized over the in-range samples, and ``clipped`` holds
    the dropped fraction per phase.
    """
    if not records:
        raise TomographyError("no quadrature records")
    phases = np.array([r.phi for r in records])
    if np.unique(phases).size != phases.size:
        raise TomographyError("records contain duplicate phases")
    if n_bins < 16:
        warnings.warn(f"{n_bins} bins is a very coarse marginal estimate", stacklevel=2)
    order = np.argsort(phases)
    edges = np.linspace(x_range[0], x_range[1], n_bins + 1)
    width = edges[1] - edges[0]
    dens = np.zeros((len(records), n_bins))
    clipped = np.zeros(len(records))
    counts = np.zeros(len(records), dtype=int)
    for i, k in enumerate(order):
        x = records[k].samples
        h, _ = np.histogram(x, bins=edges)
        inside = h.sum()
        counts[i] = x.size
        clipped[i] = (x.size - inside) / x.size
        if inside:
            dens[i] = h / (inside * width)
    return MarginalSet(phases[order], edges, dens, clipped, counts)


def analytic_marginals(
    state: QuantumState,
    n_phases: int,
    n_bins: int = 512,
    x_range: tuple[float, float] = (-8.0, 8.0),
    sub: int = 8,
) -> MarginalSet:
    """Noise-free histograms: the exact marginal averaged over each bin."""
    phases = np.arange(n_phases) * np.pi / n_phases
    edges = np.linspace(x_range[0], x_range[1], n_bins + 1)
    width = edges[1] - edges[0]
    # midpoint rule with `sub` nodes per bin
    nodes = edges[0] + (np.arange(n_bins * sub) + 0.5) * width / sub
    dens = np.empty((n_phases, n_bins))
    clipped = np.zeros(n_phases)
    for j, phi in enumerate(phases):
        avg = quadrature_pdf(state, phi, nodes).reshape(n_bins, sub).mean(axis=1)
        mass = avg.sum() * width
        clipped[j] = max(1.0 - mass, 0.0)
        dens[j] = avg / mass
    return MarginalSet(phases, edges, dens, clipped)


def default_r_max(s: float, kernel_floor: float = 1e-6) -> float:
    """Radius where the Gaussian factor ``exp(s r^2 / 8)`` reaches ``kernel_floor``."""
    return float(np.sqrt(8.0 * np.log(1.0 / kernel_floor) / -s))


def inverse_radon(
    marginals: MarginalSet,
    s: float,
    grid: GridSpec,
    r_max: Optional[float] = None,
    n_r: int = 512,
) -> WignerGrid:
    """Back-project the marginals onto ``grid`` at smoothing parameter ``s < 0``.

    The ``r`` integral is a trapezoid rule on ``n_r`` points over
    ``[-r_max, r_max]``; phases enter as a Riemann sum with weight
    ``pi / n_phases``; ``X`` as a sum over bin centres weighted by
    ``density * width``. The real part is returned and the largest imaginary
    residue is kept in ``meta["imag_residue"]``.
    """
    if s >= 0:
        raise ConstraintError(
            f"OHT reconstruction requires s < 0 (got s={s}): the |r| filter is undamped and the "
            "inverse Radon integral does not converge for s >= 0"
        )
    if r_max is None:
        r_max = default_r_max(s)
    if r_max <= 0:
        raise ConstraintError("r_max must be positive")
    if n_r < 64:
        raise ConstraintError(f"n_r must be at least 64, got {n_r}")
    edge_kernel = np.exp(s * r_max**2 / 8.0)
    if edge_kernel > 1e-3:
        warnings.warn(
            f"kernel exp(s r_max^2/8) = {edge_kernel:.3g} has not decayed at r_max={r_max:g}",
            stacklevel=2,
        )

    r = np.linspace(-r_max, r_max, n_r)
    w = np.full(n_r, r[1] - r[0])
    w[[0, -1]] *= 0.5
    filt = w * np.abs(r) / 4.0 * np.exp(s * r**2 / 8.0)

    x = marginals.centers
    mass = marginals.densities * marginals.bin_width
    # empirical characteristic function of X/2 per phase: (n_phases, n_r)
    char = mass @ np.exp(0.5j * np.outer(x, r))
    amp = char * filt[None, :] / marginals.phases.size

    pts = grid.points()
    out = np.empty(pts.size, dtype=complex)
    rot = np.exp(-1j * marginals.phases)
    for start in range(0, pts.size, _CHUNK):
        chunk = pts[start:start + _CHUNK]
        u = (chunk[:, None] * rot[None, :]).real
        phase = np.exp(-1j * u[:, :, None] * r[None, None, :])
        out[start:start + _CHUNK] = np.einsum("pjr,jr->p", phase, amp)

    meta = {
        "s": float(s),
        "method": "OHT",
        "r_max": float(r_max),
        "n_r": int(n_r),
        "n_phases": int(marginals.phases.size),
        "n_bins": int(marginals.densities.shape[1]),
        "imag_residue": float(np.max(np.abs(out.imag))),
        "max_clipped_mass": float(np.max(marginals.clipped)),
    }
    if marginals.counts is not None:
        meta["samples_per_phase"] = sorted({int(c) for c in marginals.counts})
    return WignerGrid(grid, out.real, meta)
