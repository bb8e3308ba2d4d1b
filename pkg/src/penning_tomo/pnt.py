r"""Number-counting reconstruction of s-parametrized quasiprobabilities.

Each grid point ``E`` carries a histogram of excitation numbers measured
after displacing the state. The quasiprobability at ``E`` is the weighted
series

.. math::

    W(E, s) = \frac{2}{1-s} \sum_n \left(\frac{s+1}{s-1}\right)^n p_n(E),

normalized so that :math:`\int W\, d^2E = \pi` (no :math:`1/\pi` prefactor).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConstraintError, TomographyError
from .grids import GridSpec, PointGrid, WignerGrid
from .measurement import PntRecord

__all__ = [
    "DisplacedNumberEstimate",
    "estimate_probs",
    "series_ratio",
    "series_weights",
    "wigner_from_probs",
    "wigner_point",
    "reconstruct_grid",
]


def series_ratio(s: float) -> float:
    if s >= 1:
        raise ConstraintError(f"s must be < 1 for the displaced-number series, got {s}")
    return (s + 1.0) / (s - 1.0)


def series_weights(s: float, n_levels: int) -> np.ndarray:
    """``2 q^n / (1 - s)`` for ``n = 0 .. n_levels-1``."""
    q = series_ratio(s)
    # q == 0 at s = -1: 0.0**0 == 1 keeps the vacuum term
    return 2.0 / (1.0 - s) * q ** np.arange(n_levels)


def wigner_from_probs(probs: Sequence[float], s: float) -> float:
    p = np.asarray(probs, dtype=float)
    return float(np.dot(series_weights(s, p.size), p))


@dataclass(frozen=True)
class DisplacedNumberEstimate:
    E: complex
    probs: np.ndarray
    stderr: np.ndarray
    total: int

    @property
    def n_max(self) -> int:
        return self.probs.size - 1


def estimate_probs(record: PntRecord, n_max: Optional[int] = None) -> DisplacedNumberEstimate:
    """Empirical frequencies of a count record, zero-padded to ``n_max``."""
    if record.total < 1:
        raise TomographyError("record has no events")
    observed = max(record.counts) if record.counts else 0
    if n_max is None:
        n_max = observed
    if observed > n_max:
        raise TomographyError(f"counts observed at n={observed} exceed n_max={n_max}")
    freq = np.zeros(n_max + 1)
    for n, c in record.counts.items():
        freq[n] = c
    freq /= record.total
    return DisplacedNumberEstimate(complex(record.E), freq, np.sqrt(freq * (1 - freq) / record.total), record.total)


def wigner_point(estimate: DisplacedNumberEstimate, s: float) -> tuple[float, float, float]:
    """Series value, its standard error, and a bound on the truncated tail.

    The standard error is the multinomial one, ``Var = (sum w_n^2 p_n - W^2) / N``,
    which keeps the covariances of the frequencies.

    The tail bound covers levels above ``n_max``. For ``|q| < 1`` it is the
    geometric bound; at ``s = 0`` (``|q| = 1``) unobserved levels have zero
    frequency, so the bound is ``2 (1 - sum p_n)``.
    """
    q = series_ratio(s)
    p = estimate.probs
    w = series_weights(s, p.size)
    value = float(np.dot(w, p))
    var = max(float(np.dot(w**2, p)) - value**2, 0.0) / estimate.total
    if abs(q) < 1:
        tail = abs(2.0 / (1.0 - s)) * abs(q) ** (p.size) / (1.0 - abs(q))
    else:
        tail = 2.0 * max(1.0 - float(p.sum()), 0.0)
    return value, float(np.sqrt(var)), float(tail)


def reconstruct_grid(
    records: Sequence[PntRecord],
    s: float,
    n_max: Optional[int] = None,
    grid: Optional[GridSpec] = None,
) -> WignerGrid:
    """Evaluate the series at every record's displacement.

    ``grid`` defaults to the list of record displacements; when given, each
    grid point must match exactly one record's ``E``.
    """
    if not records:
        raise TomographyError("no PNT records to reconstruct")
    series_ratio(s)
    by_E = {complex(r.E): r for r in records}
    if grid is None:
        grid = PointGrid.from_points([r.E for r in records])
    values, errs, tails = [], [], []
    for E in grid.points():
        rec = by_E.get(complex(E))
        if rec is None:
            nearest = min(by_E, key=lambda e: abs(e - E))
            if abs(nearest - E) > 1e-9:
                raise TomographyError(f"no record for grid point {E}")
            rec = by_E[nearest]
        v, se, tb = wigner_point(estimate_probs(rec, n_max), s)
        values.append(v)
        errs.append(se)
        tails.append(tb)
    totals = sorted({r.total for r in records})
    effs = sorted({r.efficiency for r in records})
    meta = {
        "s": float(s),
        "method": "PNT",
        "samples_per_point": totals,
        "efficiency": effs,
        "smoothed": any(e < 1 for e in effs),
        "max_tail_bound": float(max(tails)),
        "seeds": [int(r.seed) for r in records],
    }
    return WignerGrid(grid, np.array(values), meta, np.array(errs))
