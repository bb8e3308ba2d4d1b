r"""Truncated Fock-space numerics for a single bosonic mode.

Natural units (:math:`\hbar = 1`). The rotated quadrature is

.. math::

    \hat X(\phi) = \hat a e^{-i\phi} + \hat a^\dagger e^{i\phi},

with no :math:`1/\sqrt{2}`, so the vacuum has unit quadrature variance.
States are immutable :class:`QuantumState` objects holding a density matrix
(and the amplitude vector when the state is pure).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import eval_genlaguerre, gammaln
from scipy.stats import poisson

from .errors import CutoffError, DegenerateStateError, InvalidStateError

__all__ = [
    "DEFAULT_DIM",
    "TAIL_TOL",
    "QuantumState",
    "coherent_state",
    "odd_cat_state",
    "even_cat_state",
    "fock_state",
    "thermal_state",
    "annihilation",
    "displacement_matrix",
    "hermite_functions",
    "quadrature_pdf",
    "number_distribution",
]

DEFAULT_DIM = 32
TAIL_TOL = 1e-8

_TRACE_TOL = 1e-6


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Cyclotron-mode state on the Fock levels ``0 .. dim-1``.

    Build instances with :meth:`from_vector` or :meth:`from_matrix` (or the
    factory functions below); both validate normalization, hermiticity and
    the truncation tail.
    """

    matrix: np.ndarray
    vector: Optional[np.ndarray] = None

    @classmethod
    def from_vector(cls, amplitudes: Sequence[complex], tail_tol: float = TAIL_TOL) -> "QuantumState":
        vec = np.array(amplitudes, dtype=complex).ravel()
        if vec.size < 2:
            raise CutoffError("dim must be at least 2")
        if not np.all(np.isfinite(vec)):
            raise InvalidStateError("amplitudes must be finite")
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise DegenerateStateError("zero vector cannot be normalized")
        vec = vec / norm
        rho = np.outer(vec, vec.conj())
        _check_tail(np.abs(vec) ** 2, tail_tol)
        return cls(_readonly(rho), _readonly(vec))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, tail_tol: float = TAIL_TOL) -> "QuantumState":
        rho = np.array(matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got shape {rho.shape}")
        if rho.shape[0] < 2:
            raise CutoffError("dim must be at least 2")
        if not np.all(np.isfinite(rho)):
            raise InvalidStateError("density matrix must be finite")
        asym = np.max(np.abs(rho - rho.conj().T))
        if asym > 1e-10:
            raise InvalidStateError(f"density matrix is not Hermitian (max deviation {asym:.3g})")
        rho = 0.5 * (rho + rho.conj().T)
        tr = np.trace(rho).real
        if abs(tr - 1.0) > _TRACE_TOL:
            raise InvalidStateError(f"density matrix trace is {tr!r}, expected 1")
        rho = rho / tr
        _check_tail(np.diag(rho).real, tail_tol)
        return cls(_readonly(rho))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_pure(self) -> bool:
        return self.vector is not None

    @property
    def populations(self) -> np.ndarray:
        return np.clip(np.diag(self.matrix).real, 0.0, None)

    def mean_number(self) -> float:
        return float(np.dot(np.arange(self.dim), np.diag(self.matrix).real))

    def rotated(self, phi: float) -> "QuantumState":
        """Apply ``exp(-i phi n)``: amplitudes ``c_n -> c_n exp(-i n phi)``."""
        ph = np.exp(-1j * phi * np.arange(self.dim))
        if self.vector is not None:
            return QuantumState.from_vector(self.vector * ph, tail_tol=np.inf)
        return QuantumState.from_matrix(ph[:, None] * self.matrix * ph.conj()[None, :], tail_tol=np.inf)

    def conjugate(self) -> "QuantumState":
        """Complex conjugate of the state in the Fock basis."""
        if self.vector is not None:
            return QuantumState(_readonly(self.matrix.conj().copy()), _readonly(self.vector.conj().copy()))
        return QuantumState(_readonly(self.matrix.conj().copy()))


def _check_tail(populations: np.ndarray, tail_tol: float) -> None:
    tail = float(np.sum(populations[-2:]))
    if tail > tail_tol:
        raise CutoffError(
            f"population {tail:.3g} in the top two Fock levels exceeds tail tolerance {tail_tol:g}; "
            f"increase dim (currently {populations.size})"
        )


def _coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    n = np.arange(dim)
    if alpha == 0:
        out = np.zeros(dim, dtype=complex)
        out[0] = 1.0
        return out
    r = abs(alpha)
    log_mag = -0.5 * r**2 + n * np.log(r) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def _check_coherent_cutoff(alpha: complex, dim: int, tail_tol: float = TAIL_TOL) -> None:
    """Reject cutoffs whose top two levels would hold more than ``tail_tol``.

    Uses the untruncated Poisson tail ``P(n >= dim - 2)`` at mean ``|alpha|^2``.
    """
    if dim < 2:
        raise CutoffError("dim must be at least 2")
    mu = abs(alpha) ** 2
    tail = float(poisson.sf(dim - 3, mu)) if mu > 0 else 0.0
    if tail > tail_tol:
        need = int(poisson.isf(tail_tol, mu)) + 3
        raise CutoffError(f"|alpha|={abs(alpha):g} needs dim >= {need}, got {dim}")


def coherent_state(alpha: complex, dim: int = DEFAULT_DIM) -> QuantumState:
    """Coherent state ``|alpha>`` renormalized on the truncated basis."""
    alpha = complex(alpha)
    _check_coherent_cutoff(alpha, dim)
    return QuantumState.from_vector(_coherent_amplitudes(alpha, dim))


def _cat(alpha: complex, dim: int, sign: int) -> QuantumState:
    alpha = complex(alpha)
    if not np.isfinite(alpha):
        raise InvalidStateError("alpha must be finite")
    _check_coherent_cutoff(alpha, dim)
    c = _coherent_amplitudes(alpha, dim)
    parity = (-1.0) ** np.arange(dim)
    # |a> + sign*|-a> keeps levels with (-1)^n == sign; zeroed exactly elsewhere
    amps = np.where(parity == sign, 2.0 * c, 0.0)
    if np.linalg.norm(amps) < 1e-150:
        raise DegenerateStateError("cat state with alpha=0 has no normalizable superposition")
    return QuantumState.from_vector(amps)


def odd_cat_state(alpha: complex, dim: int = DEFAULT_DIM) -> QuantumState:
    """Odd coherent state ``N(|alpha> - |-alpha>)``; only odd levels populated.

    Normalization is done numerically on the truncated basis.
    """
    if complex(alpha) == 0:
        raise DegenerateStateError("odd cat state is undefined for alpha=0")
    return _cat(alpha, dim, -1)


def even_cat_state(alpha: complex, dim: int = DEFAULT_DIM) -> QuantumState:
    """Even coherent state ``N(|alpha> + |-alpha>)``."""
    return _cat(alpha, dim, +1)


def fock_state(n: int, dim: int = DEFAULT_DIM) -> QuantumState:
    if n < 0:
        raise InvalidStateError("Fock level must be nonnegative")
    if n >= dim - 2:
        raise CutoffError(f"Fock level {n} needs dim >= {n + 3}, got {dim}")
    vec = np.zeros(dim, dtype=complex)
    vec[n] = 1.0
    return QuantumState.from_vector(vec)


def thermal_state(nbar: float, dim: int = DEFAULT_DIM) -> QuantumState:
    """Thermal (Bose-Einstein) state with mean excitation ``nbar``."""
    if nbar < 0:
        raise InvalidStateError("mean excitation must be nonnegative")
    n = np.arange(dim)
    if nbar == 0:
        p = (n == 0).astype(float)
    else:
        p = np.exp(n * np.log(nbar / (1 + nbar)) - np.log1p(nbar))
    return QuantumState.from_matrix(np.diag(p / p.sum()))


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)


def _displacement_block(E: complex, n_rows: int, n_cols: int) -> np.ndarray:
    """``<m|D(E)|n>`` for ``m < n_rows``, ``n < n_cols`` from the Laguerre closed form.

    Everything except the Laguerre polynomial is assembled in log space.
    """
    E = complex(E)
    if E == 0:
        return np.eye(n_rows, n_cols, dtype=complex)
    m = np.arange(n_rows)[:, None]
    n = np.arange(n_cols)[None, :]
    lo = np.minimum(m, n)
    k = np.abs(m - n)
    x = abs(E) ** 2
    lag = eval_genlaguerre(lo, k, x)
    log_pref = 0.5 * (gammaln(lo + 1) - gammaln(lo + k + 1)) + k * np.log(abs(E)) - 0.5 * x
    theta = np.angle(E)
    # m >= n carries E^k; m < n carries (-E*)^k
    phase = np.where(m >= n, k * theta, k * (np.pi - theta))
    return lag * np.exp(log_pref + 1j * phase)


def displacement_matrix(E: complex, dim: int) -> np.ndarray:
    r"""Matrix elements of :math:`D(E) = \exp(E a^\dagger - E^* a)` on levels ``0 .. dim-1``.

    The entries are those of the untruncated operator; columns whose
    displaced support reaches past the cutoff are therefore not unit norm.
    """
    if dim < 2:
        raise CutoffError("dim must be at least 2")
    return _displacement_block(E, dim, dim)


def hermite_functions(n_levels: int, x: np.ndarray) -> np.ndarray:
    """Oscillator eigenfunctions ``<x|n>`` for the unit-vacuum-variance quadrature.

    Returns an array of shape ``(n_levels, len(x))``; built by the three-term
    recursion on normalized functions.
    """
    q = np.asarray(x, dtype=float) / np.sqrt(2.0)
    out = np.empty((n_levels,) + q.shape)
    out[0] = np.pi**-0.25 * np.exp(-0.5 * q**2)
    if n_levels > 1:
        out[1] = np.sqrt(2.0) * q * out[0]
    for n in range(1, n_levels - 1):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * q * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    # density in X = sqrt(2) q picks up a Jacobian 1/sqrt(2)
    return out * 2.0**-0.25


def quadrature_pdf(state: QuantumState, phi: float, x_points) -> np.ndarray:
    """Marginal density ``P(x, phi)`` of the rotated quadrature."""
    x = np.atleast_1d(np.asarray(x_points, dtype=float))
    psi = hermite_functions(state.dim, x) * np.exp(-1j * phi * np.arange(state.dim))[:, None]
    if state.vector is not None:
        amp = state.vector @ psi
        p = np.abs(amp) ** 2
    else:
        p = np.einsum("mx,mn,nx->x", psi, state.matrix, psi.conj()).real
    return np.clip(p, 0.0, None)


def _support_top(state: QuantumState) -> int:
    pops = state.populations
    tail = np.cumsum(pops[::-1])[::-1]
    above = np.nonzero(tail > 1e-15)[0]
    return int(above[-1]) if above.size else 0


def default_levels(state: QuantumState, E: complex) -> int:
    """Number of output levels that captures ``D^dag(E) rho D(E)`` to ~1e-15."""
    r = np.sqrt(_support_top(state) + 0.5) + abs(complex(E))
    return max(state.dim, int(np.ceil(r**2 + 8 * r + 10)))


def number_distribution(state: QuantumState, E: complex, n_levels: Optional[int] = None) -> np.ndarray:
    r"""Displaced-number probabilities :math:`p_n = \langle n|D^\dagger(E)\rho D(E)|n\rangle`.

    ``n_levels`` output levels are returned; by default the count is grown
    past ``state.dim`` far enough that the displaced state is captured.
    """
    if n_levels is None:
        n_levels = default_levels(state, E)
    blk = _displacement_block(E, state.dim, n_levels)
    p = np.sum(blk.conj() * (state.matrix @ blk), axis=0).real
    return np.clip(p, 0.0, None)
