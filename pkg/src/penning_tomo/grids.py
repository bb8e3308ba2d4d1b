"""Complex-plane grids and the quasiprobability values stored on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Union

import numpy as np

from .errors import GridMismatchError

__all__ = ["CartesianGrid", "PointGrid", "GridSpec", "WignerGrid", "default_pnt_grid", "square_grid", "grid_from_dict"]


@dataclass(frozen=True)
class CartesianGrid:
    """Rectangular grid; points are ordered with the real part varying fastest."""

    re_min: float
    re_max: float
    n_re: int
    im_min: float
    im_max: float
    n_im: int

    def __post_init__(self):
        if self.n_re < 1 or self.n_im < 1:
            raise ValueError("grid needs at least one point per axis")

    @property
    def re_axis(self) -> np.ndarray:
        return np.linspace(self.re_min, self.re_max, self.n_re)

    @property
    def im_axis(self) -> np.ndarray:
        return np.linspace(self.im_min, self.im_max, self.n_im)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_im, self.n_re)

    def points(self) -> np.ndarray:
        re, im = np.meshgrid(self.re_axis, self.im_axis)
        return (re + 1j * im).ravel()

    def to_dict(self) -> dict:
        return {
            "kind": "cartesian",
            "re_min": self.re_min,
            "re_max": self.re_max,
            "n_re": self.n_re,
            "im_min": self.im_min,
            "im_max": self.im_max,
            "n_im": self.n_im,
        }


@dataclass(frozen=True)
class PointGrid:
    """Explicit list of evaluation points."""

    re: tuple[float, ...]
    im: tuple[float, ...]

    def __post_init__(self):
        if len(self.re) != len(self.im) or not self.re:
            raise ValueError("point grid needs equally long, nonempty re/im lists")

    @classmethod
    def from_points(cls, points) -> "PointGrid":
        pts = np.atleast_1d(np.asarray(points, dtype=complex))
        return cls(tuple(float(v) for v in pts.real), tuple(float(v) for v in pts.imag))

    @property
    def shape(self) -> tuple[int]:
        return (len(self.re),)

    def points(self) -> np.ndarray:
        return np.asarray(self.re) + 1j * np.asarray(self.im)

    def to_dict(self) -> dict:
        return {"kind": "points", "re": list(self.re), "im": list(self.im)}


GridSpec = Union[CartesianGrid, PointGrid]


def grid_from_dict(d: dict) -> GridSpec:
    kind = d.get("kind")
    if kind == "cartesian":
        return CartesianGrid(
            float(d["re_min"]), float(d["re_max"]), int(d["n_re"]),
            float(d["im_min"]), float(d["im_max"]), int(d["n_im"]),
        )
    if kind == "points":
        return PointGrid(tuple(float(v) for v in d["re"]), tuple(float(v) for v in d["im"]))
    raise ValueError(f"unknown grid kind {kind!r}")


def square_grid(extent: float, n: int) -> CartesianGrid:
    """``n x n`` grid over ``[-extent, extent]`` on both axes."""
    return CartesianGrid(-extent, extent, n, -extent, extent, n)


def default_pnt_grid() -> CartesianGrid:
    """17 x 15 = 255 points, spacing 0.4, centred on the origin."""
    return CartesianGrid(-3.2, 3.2, 17, -2.8, 2.8, 15)


@dataclass
class WignerGrid:
    """Values of an s-parametrized quasiprobability on a grid.

    ``meta`` always carries ``s`` and ``method`` (``"OHT"``, ``"PNT"`` or
    ``"ORACLE"``); reconstructions add seeds, sample counts and diagnostics.
    """

    grid: GridSpec
    values: np.ndarray
    meta: dict = field(default_factory=dict)
    stderr: Optional[np.ndarray] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).ravel()
        if self.values.size != self.grid.points().size:
            raise ValueError("one value per grid point required")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Wigner values must be finite")
        if self.stderr is not None:
            self.stderr = np.asarray(self.stderr, dtype=float).ravel()
        if "s" not in self.meta:
            raise ValueError("meta must record s")

    @property
    def s(self) -> float:
        return float(self.meta["s"])

    @property
    def points(self) -> np.ndarray:
        return self.grid.points()

    def as_matrix(self) -> np.ndarray:
        """Values reshaped to ``(n_im, n_re)`` (Cartesian grids only)."""
        if not isinstance(self.grid, CartesianGrid):
            raise TypeError("matrix view needs a Cartesian grid")
        return self.values.reshape(self.grid.shape)

    def value_at(self, E: complex) -> float:
        """Value at the grid point nearest ``E``."""
        return float(self.values[np.argmin(np.abs(self.points - E))])

    def check_compatible(self, other: "WignerGrid") -> None:
        if self.grid != other.grid:
            raise GridMismatchError("grids differ in geometry")
        if self.s != other.s:
            raise GridMismatchError(f"grids differ in s ({self.s} vs {other.s})")

    def with_values(self, values, **meta: Any) -> "WignerGrid":
        return WignerGrid(self.grid, np.asarray(values, dtype=float), {**self.meta, **meta}, self.stderr)
