"""
Complex-argument Bessel and Hankel functions of integer and half-integer order.

Values are taken on the principal branch ``-pi < arg z <= pi``. Continuation
to other sheets of the logarithmic surface is handled in :mod:`resonlab.surface`
and :mod:`resonlab.radial`, never here.

The evaluation itself is delegated to the AMOS routines wrapped by
:mod:`scipy.special`; this module owns the order contract, the input checks,
the derivative identities and the scaled Hankel path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as sp

NU_MAX = 60.0
# Hankel values are formed from the exponentially scaled variant below this.
SCALED_HANKEL_IM = -30.0


class BesselError(ValueError):
    """Unsupported order or argument for the Bessel routines."""


@dataclass(frozen=True)
class BesselOrder:
    """Order ``nu`` restricted to ``n`` or ``n + 1/2`` with ``0 <= nu <= 60``."""

    nu: float

    def __post_init__(self):
        nu = float(self.nu)
        if not np.isfinite(nu) or nu < 0:
            raise BesselError(f"order must be finite and nonnegative, got {self.nu!r}")
        if abs(2 * nu - round(2 * nu)) > 1e-12:
            raise BesselError(f"order must be an integer or half-integer, got {self.nu!r}")
        if nu > NU_MAX:
            raise BesselError(f"order {nu} exceeds supported maximum {NU_MAX}")
        object.__setattr__(self, "nu", round(2 * nu) / 2)

    @property
    def half_integer(self) -> bool:
        return round(2 * self.nu) % 2 == 1

    @property
    def parity(self) -> str:
        return "half-integer" if self.half_integer else "integer"

    def __float__(self) -> float:
        return self.nu


@dataclass(frozen=True)
class BesselBundle:
    """J, Y, H1 and the derivatives J', H1' at one point (``scale`` is 0 when unscaled)."""

    j: complex
    y: complex
    h1: complex
    jp: complex
    h1p: complex
    scale: float = 0.0


def as_order(order) -> BesselOrder:
    return order if isinstance(order, BesselOrder) else BesselOrder(order)


def _check_z(z, allow_zero=True):
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise BesselError("non-finite argument")
    if not allow_zero and np.any(z == 0):
        raise BesselError("Hankel/Neumann functions are singular at z = 0")
    return z


def _out(arr):
    return complex(arr) if np.ndim(arr) == 0 else arr


def _entire_jv(order: BesselOrder, z, fn=sp.jv):
    # J_n is entire for integer n; evaluating in Re z >= 0 and reflecting keeps
    # the branch-continuation phase of the general routine off the negative axis
    if order.half_integer:
        return fn(order.nu, z)
    left = z.real < 0
    out = fn(order.nu, np.where(left, -z, z))
    return np.where(left, (-1) ** int(order.nu) * out, out)


def bessel_j(order, z):
    """J_nu(z); accepts scalars or arrays."""
    return _out(_entire_jv(as_order(order), _check_z(z)))


def bessel_y(order, z):
    """Y_nu(z) (Neumann function), principal branch."""
    nu = as_order(order).nu
    z = _check_z(z, allow_zero=False)
    return _out(sp.yv(nu, z))


def hankel1(order, z, scaled: bool = False):
    """
    Hankel function of the first kind.

    With ``scaled=True`` returns ``exp(-i z) H1_nu(z)``, which stays finite for
    large negative ``Im z``. Unscaled values for ``Im z < -30`` are also
    formed from the scaled routine.
    """
    nu = as_order(order).nu
    z = _check_z(z, allow_zero=False)
    he = sp.hankel1e(nu, z)
    if scaled:
        return _out(he)
    out = np.where(z.imag < SCALED_HANKEL_IM, he * np.exp(1j * z), sp.hankel1(nu, z))
    return _out(out)


def bessel_j_scaled(order, z):
    """``exp(-|Im z|) J_nu(z)``."""
    return _out(_entire_jv(as_order(order), _check_z(z), sp.jve))


def bessel_jp(order, z):
    """J_nu'(z) from ``(J_{nu-1} - J_{nu+1}) / 2``."""
    nu = as_order(order).nu
    z = _check_z(z)
    return _out(0.5 * (sp.jv(nu - 1, z) - sp.jv(nu + 1, z)))


def hankel1p(order, z):
    """H1_nu'(z) from ``(H_{nu-1} - H_{nu+1}) / 2``."""
    nu = as_order(order).nu
    z = _check_z(z, allow_zero=False)
    return _out(0.5 * (sp.hankel1(nu - 1, z) - sp.hankel1(nu + 1, z)))


def bessel_bundle(order, z: complex) -> BesselBundle:
    order = as_order(order)
    z = complex(z)
    if z == 0:
        raise BesselError("bundle requires z != 0")
    j = bessel_j(order, z)
    y = bessel_y(order, z)
    return BesselBundle(
        j=j,
        y=y,
        h1=hankel1(order, z),
        jp=bessel_jp(order, z),
        h1p=hankel1p(order, z),
    )


def jh_values(nu: float, z, with_hankel: bool = True):
    """
    Vectorized J, J' (and H1, H1') at order ``nu`` over an array of ``z``.

    Uses ``C_nu' = (nu / z) C_nu - C_{nu+1}``, which needs one fewer order than
    the symmetric form; the channel functions call this in their inner loops.
    """
    z = np.asarray(z, dtype=complex)
    j = sp.jv(nu, z)
    jp = (nu / z) * j - sp.jv(nu + 1, z)
    if not with_hankel:
        return j, jp
    h = sp.hankel1(nu, z)
    hp = (nu / z) * h - sp.hankel1(nu + 1, z)
    return j, jp, h, hp

