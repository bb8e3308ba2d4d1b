"""Seeded Monte-Carlo simulation of the two readout channels.

The homodyne-like channel returns rotated-quadrature values directly: the
axial kick shifts the mean axial momentum in proportion to the quadrature
(see :func:`penning_tomo.trap.kick_readout`), so each shot is modelled as one
draw from the quadrature marginal. The number-counting channel returns the
excitation number of the displaced state.

Measurement is destructive in the trap, so each shot starts from a freshly
prepared copy; here that simply means every draw comes from the same
immutable :class:`~penning_tomo.fock.QuantumState`.

Detector inefficiency ``eta < 1`` is applied forward only: Gaussian noise of
variance ``(1 - eta) / eta`` on each quadrature value, binomial thinning
``Binomial(n, eta)`` on each count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ConstraintError, TomographyError
from .fock import QuantumState, number_distribution, quadrature_pdf
from .grids import GridSpec

__all__ = [
    "OhtRecord",
    "PntRecord",
    "OhtProtocol",
    "PntProtocol",
    "derive_seed",
    "sample_quadrature",
    "sample_counts",
    "sample_excitation_number",
    "run_protocol",
]

X_TABLE = np.linspace(-10.0, 10.0, 4096)


@dataclass(frozen=True)
class OhtRecord:
    phi: float
    samples: np.ndarray
    seed: int
    efficiency: float = 1.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.size == 0:
            raise TomographyError("quadrature record needs at least one sample")
        if not np.all(np.isfinite(s)):
            raise TomographyError("quadrature samples must be finite")
        if not 0.0 <= self.phi < np.pi:
            raise TomographyError(f"phase {self.phi} outside [0, pi)")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)


@dataclass(frozen=True)
class PntRecord:
    E: complex
    counts: dict
    total: int
    seed: int
    efficiency: float = 1.0

    def __post_init__(self):
        counts = {int(k): int(v) for k, v in self.counts.items() if int(v) != 0}
        if any(k < 0 for k in counts) or any(v < 0 for v in counts.values()):
            raise TomographyError("counts must be keyed by nonnegative levels with nonnegative values")
        if self.total <= 0 or sum(counts.values()) != self.total:
            raise TomographyError("counts must sum to a positive total")
        object.__setattr__(self, "counts", dict(sorted(counts.items())))
        object.__setattr__(self, "E", complex(self.E))

    def mean(self) -> float:
        return sum(n * c for n, c in self.counts.items()) / self.total


@dataclass(frozen=True)
class OhtProtocol:
    """Scan ``n_phases`` phases ``k pi / n_phases`` with a fixed shot count each."""

    n_phases: int
    samples_per_phase: int

    @property
    def phases(self) -> np.ndarray:
        return np.arange(self.n_phases) * np.pi / self.n_phases


@dataclass(frozen=True)
class PntProtocol:
    """One count record per displacement point."""

    points: Union[GridSpec, Sequence[complex]]
    samples_per_point: int

    def displacements(self) -> np.ndarray:
        if hasattr(self.points, "points"):
            return self.points.points()
        return np.atleast_1d(np.asarray(self.points, dtype=complex))


def _check_efficiency(efficiency: float) -> None:
    if not 0.0 < efficiency <= 1.0:
        raise ConstraintError(f"efficiency must lie in (0, 1], got {efficiency}")


def _check_shots(n: int) -> None:
    if int(n) < 1:
        raise ConstraintError(f"need at least one sample, got {n}")


def _fresh_seed() -> int:
    return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed for record ``index``.

    The pair is hashed by :class:`numpy.random.SeedSequence` (``entropy =
    master_seed``, ``spawn_key = (index,)``), so each record's stream is
    independent and reproducible on its own.
    """
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def sample_quadrature(
    state: QuantumState,
    phi: float,
    n_samples: int,
    efficiency: float = 1.0,
    seed: Optional[int] = None,
) -> OhtRecord:
    """Draw quadrature values by inverse-CDF sampling of the marginal.

    The CDF is tabulated on 4096 points over ``[-10, 10]`` and inverted by
    linear interpolation.
    """
    _check_shots(n_samples)
    _check_efficiency(efficiency)
    seed = _fresh_seed() if seed is None else int(seed)
    rng = np.random.default_rng(seed)

    pdf = quadrature_pdf(state, phi, X_TABLE)
    steps = 0.5 * (pdf[1:] + pdf[:-1]) * np.diff(X_TABLE)
    cdf = np.concatenate([[0.0], np.cumsum(steps)])
    cdf /= cdf[-1]
    # drop flat stretches in the tails so the inverse is single valued
    cdf_u, first = np.unique(cdf, return_index=True)

    x = np.interp(rng.random(int(n_samples)), cdf_u, X_TABLE[first])
    if efficiency < 1.0:
        x = x + rng.normal(0.0, np.sqrt((1.0 - efficiency) / efficiency), x.size)
    return OhtRecord(float(phi) % np.pi, x, seed, float(efficiency))


def sample_counts(probs, n_samples: int, efficiency: float, rng: np.random.Generator) -> np.ndarray:
    """Categorical draws from ``probs`` followed by optional binomial thinning."""
    p = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    p = p / p.sum()
    n = rng.choice(p.size, size=int(n_samples), p=p)
    if efficiency < 1.0:
        n = rng.binomial(n, efficiency)
    return n


def sample_excitation_number(
    state: QuantumState,
    E: complex,
    n_samples: int,
    efficiency: float = 1.0,
    seed: Optional[int] = None,
) -> PntRecord:
    """Count excitations after the displacement ``E``."""
    _check_shots(n_samples)
    _check_efficiency(efficiency)
    seed = _fresh_seed() if seed is None else int(seed)
    rng = np.random.default_rng(seed)
    outcomes = sample_counts(number_distribution(state, E), n_samples, efficiency, rng)
    levels, counts = np.unique(outcomes, return_counts=True)
    return PntRecord(complex(E), dict(zip(levels.tolist(), counts.tolist())), int(n_samples), seed, float(efficiency))


def run_protocol(
    state: QuantumState,
    protocol: Union[OhtProtocol, PntProtocol],
    efficiency: float = 1.0,
    master_seed: int = 0,
) -> list:
    """Generate one record per phase (OHT) or per displacement point (PNT)."""
    _check_efficiency(efficiency)
    if isinstance(protocol, OhtProtocol):
        if protocol.n_phases < 1:
            raise TomographyError("OHT protocol needs at least one phase")
        return [
            sample_quadrature(state, phi, protocol.samples_per_phase, efficiency, derive_seed(master_seed, k))
            for k, phi in enumerate(protocol.phases)
        ]
    if isinstance(protocol, PntProtocol):
        points = protocol.displacements()
        if points.size == 0:
            raise TomographyError("PNT protocol needs a nonempty grid")
        return [
            sample_excitation_number(state, E, protocol.samples_per_point, efficiency, derive_seed(master_seed, k))
            for k, E in enumerate(points)
        ]
    raise TypeError(f"unknown protocol {protocol!r}")
