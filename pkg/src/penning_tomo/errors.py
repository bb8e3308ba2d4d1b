"""Exception types raised across the package.

Every error derives from :class:`TomographyError` so callers (and the CLI,
which maps them to exit code 2) can catch numerical or constraint failures
in one place without swallowing programming errors.
"""


class TomographyError(Exception):
    """Base class for numerical and physical-constraint failures."""


class CutoffError(TomographyError):
    """The Fock truncation is too small for the requested state."""


class DegenerateStateError(TomographyError):
    """The requested state cannot be normalized (e.g. odd cat at alpha=0)."""


class InvalidStateError(TomographyError):
    """A density matrix or amplitude vector violates a state invariant."""


class ConstraintError(TomographyError):
    """A physical or numerical validity window was violated."""


class GridMismatchError(TomographyError):
    """Two Wigner grids cannot be compared point by point."""
