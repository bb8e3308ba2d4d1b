r"""Penning-trap model in SI units.

The textbook expressions are usually quoted in Gaussian units; the SI
versions used here follow from :math:`e/c \to e` in the minimal coupling
(so :math:`|e|B/mc \to eB/m`, :math:`|e|b/2mc \to eb/2m`, and field
coefficients of the form :math:`mc/|e| \to m/|e|`).

Only the cyclotron and axial modes are modelled. The magnetron motion, spin
terms and cyclotron damping are absent by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal, Optional, Union

import numpy as np
from scipy import constants as const

from .errors import ConstraintError

__all__ = [
    "TrapConfig",
    "TrapFrequencies",
    "OhtScheme",
    "PntScheme",
    "FieldConfig",
    "derive_frequencies",
    "kick_readout",
    "axial_frequency_shift",
    "cyclotron_shift",
    "thermal_axial_spread",
    "synthesize_fields",
]

HBAR = const.hbar
E_CHARGE = const.e
M_E = const.m_e
K_B = const.k

# "much shorter than the axial period" and "b << B", read conservatively
KICK_FRACTION = 0.01
BOTTLE_FRACTION = 0.01


@dataclass(frozen=True)
class TrapConfig:
    """Trap parameters.

    Attributes:
        B: uniform magnetic field along +z, tesla.
        V0: electrode potential, volt.
        d: characteristic trap dimension, metre.
        b: magnetic-bottle strength, tesla / metre^2.
        g: homodyne-like coupling, 1 / (metre second), so that ``g z`` is a rate.
        temperature: axial-mode temperature, kelvin.
        particle: ``"electron"`` or ``"positron"``; fixes the sign of the charge.
    """

    B: float = 5.0
    V0: float = 10.0
    d: float = 3.3e-3
    b: float = 0.0
    g: float = 0.0
    temperature: float = 4.2
    particle: Literal["electron", "positron"] = "electron"

    def __post_init__(self):
        if self.B <= 0 or self.V0 <= 0 or self.d <= 0:
            raise ConstraintError("B, V0 and d must be positive")
        if self.b < 0:
            raise ConstraintError("bottle strength b must be nonnegative")
        if self.temperature < 0:
            raise ConstraintError("temperature must be nonnegative")
        if self.particle not in ("electron", "positron"):
            raise ConstraintError(f"unknown particle {self.particle!r}")

    @property
    def mass(self) -> float:
        return M_E

    @property
    def charge(self) -> float:
        return -E_CHARGE if self.particle == "electron" else E_CHARGE

    def with_(self, **changes) -> "TrapConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class TrapFrequencies:
    omega_c: float
    omega_z: float
    kappa: float
    beta: float


def derive_frequencies(config: TrapConfig) -> TrapFrequencies:
    m = config.mass
    omega_c = E_CHARGE * config.B / m
    omega_z = np.sqrt(E_CHARGE * config.V0 / (m * config.d**2))
    kappa = E_CHARGE * config.b / (2 * m)
    beta = np.sqrt(m * omega_c / (2 * HBAR))
    if omega_c <= omega_z:
        raise ConstraintError(
            f"cyclotron frequency {omega_c:.3g} rad/s must exceed axial frequency {omega_z:.3g} rad/s"
        )
    return TrapFrequencies(float(omega_c), float(omega_z), float(kappa), float(beta))


def kick_readout(pz_mean_before, g, tau, xc_value, t, omega_z):
    """Mean axial momentum after a short quadrature-coupled kick.

    ``<p_z(t + tau)> = <p_z(t)> + hbar g tau <X_c(phi)> cos(omega_z t)``.
    The kick must last at most 1 % of the axial period.
    """
    if tau < 0 or tau > KICK_FRACTION * 2 * np.pi / omega_z:
        raise ConstraintError(
            f"kick duration {tau:g} s exceeds {KICK_FRACTION:g} of the axial period "
            f"{2 * np.pi / omega_z:.3g} s"
        )
    return pz_mean_before + HBAR * g * tau * xc_value * np.cos(omega_z * t)


def axial_frequency_shift(freqs: TrapFrequencies, n_c, mass: float = M_E):
    """Axial frequency with ``n_c`` cyclotron quanta in the bottle.

    ``Omega_z^2 = omega_z^2 + 2 hbar kappa n_c / m``.
    """
    n_c = np.asarray(n_c)
    if np.any(n_c < 0):
        raise ConstraintError("cyclotron excitation number must be nonnegative")
    return np.sqrt(freqs.omega_z**2 + 2 * HBAR * freqs.kappa * n_c / mass)


def thermal_axial_spread(freqs: TrapFrequencies, config: TrapConfig) -> float:
    """Thermal ``<z^2> = k_B T / (m omega_z^2)`` of the free axial motion, metre^2."""
    return K_B * config.temperature / (config.mass * freqs.omega_z**2)


def cyclotron_shift(freqs: TrapFrequencies, config: TrapConfig) -> float:
    """Cyclotron frequency pulled by the bottle at the axial thermal spread."""
    return freqs.omega_c + freqs.kappa * thermal_axial_spread(freqs, config)


@dataclass(frozen=True)
class OhtScheme:
    phi: float


@dataclass(frozen=True)
class PntScheme:
    epsilon: complex
    tau: float


@dataclass(frozen=True)
class FieldConfig:
    r"""Coefficients of the applied vector and scalar potentials at one instant.

    .. math::

        A_x &= -\tfrac{B}{2} y + a_x\,z^{k} - b_c\,(y z^2 - y^3/3) \\
        A_y &= \tfrac{B}{2} x + a_y\,z^{k} + b_c\,(x z^2 - x^3/3) \\
        V &= V_0 \frac{x^2 + y^2 - 2 z^2}{4 d^2} + v_2\, z^2

    with ``k = 1`` when ``drive_on_z`` (homodyne-like drive) and ``k = 0``
    otherwise, and ``b_c = b / 2``.
    """

    B: float
    drive_x: float = 0.0
    drive_y: float = 0.0
    drive_on_z: bool = False
    bottle_coeff: float = 0.0
    V0: float = 0.0
    d: float = 1.0
    z2_correction: float = 0.0

    def vector_potential(self, x, y, z):
        zk = z if self.drive_on_z else 1.0
        ax = -0.5 * self.B * y + self.drive_x * zk - self.bottle_coeff * (y * z**2 - y**3 / 3)
        ay = 0.5 * self.B * x + self.drive_y * zk + self.bottle_coeff * (x * z**2 - x**3 / 3)
        return np.array([ax, ay, 0.0 * np.asarray(x)])

    def scalar_potential(self, x, y, z):
        return self.V0 * (x**2 + y**2 - 2 * z**2) / (4 * self.d**2) + self.z2_correction * z**2

    def is_bare(self) -> bool:
        return self.drive_x == 0 and self.drive_y == 0 and self.bottle_coeff == 0 and self.z2_correction == 0


def synthesize_fields(
    config: TrapConfig,
    scheme: Optional[Union[OhtScheme, PntScheme]] = None,
    t: float = 0.0,
) -> FieldConfig:
    """Potentials that realize either readout scheme at time ``t``.

    Homodyne-like: a z-proportional drive of amplitude ``m g / (|e| beta)``
    rotating at ``phi - omega_c t``, plus a ``z^2`` scalar term chosen to
    cancel the ``A^2`` contribution of the drive, i.e. ``q V = -m g^2 z^2 / (2 beta^2)``.

    Number-counting: a uniform circular drive ``2 m / (beta |e|)`` times
    ``(Im, Re)`` of ``epsilon e^{-i omega_c t}`` for ``t <= tau``, then the
    magnetic bottle (coefficient ``b / 2``) for ``t > tau``.
    """
    freqs = derive_frequencies(config)
    m, e = config.mass, E_CHARGE
    bare = FieldConfig(B=config.B, V0=config.V0, d=config.d)
    if scheme is None:
        return bare

    if isinstance(scheme, OhtScheme):
        amp = m * config.g / (e * freqs.beta)
        arg = scheme.phi - freqs.omega_c * t
        z2 = -m * config.g**2 / (2 * config.charge * freqs.beta**2)
        return replace(
            bare,
            drive_x=amp * np.sin(arg),
            drive_y=amp * np.cos(arg),
            drive_on_z=True,
            z2_correction=z2,
        )

    if isinstance(scheme, PntScheme):
        if config.b * config.d**2 > BOTTLE_FRACTION * config.B:
            raise ConstraintError(
                f"bottle field across the trap b d^2 = {config.b * config.d**2:.3g} T is not "
                f"small against B = {config.B:g} T"
            )
        if t <= scheme.tau:
            amp = 2 * m / (freqs.beta * e)
            drive = complex(scheme.epsilon) * np.exp(-1j * freqs.omega_c * t)
            return replace(bare, drive_x=amp * drive.imag, drive_y=amp * drive.real)
        return replace(bare, bottle_coeff=0.5 * config.b)

    raise TypeError(f"unknown scheme {scheme!r}")
