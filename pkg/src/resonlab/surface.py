"""
Sheets of the logarithmic Riemann surface and the branch function Sigma.

A point of the surface is a modulus together with a continuous argument.
Sheet ``m`` is the strip ``m*pi < arg < (m+1)*pi``; the physical sheet is
``m = 0``. Every point off the boundary rays is ``e^{i m pi} lambda0`` for a
unique principal ``lambda0`` in the open upper half plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class BoundaryRayError(ValueError):
    """Point lies on a ray ``arg = k*pi`` separating two sheets."""


class BranchCutError(ValueError):
    """Argument lies on a branch cut of Sigma."""


@dataclass(frozen=True)
class SheetPoint:
    modulus: float
    arg: float

    def __post_init__(self):
        if not self.modulus > 0:
            raise ValueError(f"modulus must be positive, got {self.modulus}")

    @property
    def sheet(self) -> int:
        return math.floor(self.arg / math.pi)

    @property
    def value(self) -> complex:
        """The point projected to the complex plane."""
        return self.modulus * complex(math.cos(self.arg), math.sin(self.arg))

    @classmethod
    def from_principal(cls, lambda0: complex, m: int) -> "SheetPoint":
        """The point ``e^{i m pi} lambda0`` of sheet ``m`` (``lambda0`` in the upper half plane)."""
        lambda0 = complex(lambda0)
        if not lambda0.imag > 0:
            raise BoundaryRayError(f"principal point must have Im > 0, got {lambda0}")
        return cls(abs(lambda0), math.atan2(lambda0.imag, lambda0.real) + m * math.pi)


def to_principal(p: SheetPoint) -> tuple[int, complex]:
    """Split ``p`` into its sheet index and the principal representative."""
    m = math.floor(p.arg / math.pi)
    theta = p.arg - m * math.pi
    if theta <= 0.0 or theta >= math.pi:
        raise BoundaryRayError(f"arg={p.arg} is a multiple of pi")
    return m, p.modulus * complex(math.cos(theta), math.sin(theta))


def effective_sheet(d: int, m: int) -> int:
    """
    Sheet index as seen by the free resolvent in dimension ``d``.

    Even ``d`` keeps ``m``; odd ``d`` has only two sheets, so even ``m`` maps
    to 0 and odd ``m`` to -1.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if d % 2 == 0:
        return m
    return 0 if m % 2 == 0 else -1


def sigma(lam, v0: float):
    """
    ``Sigma(lambda) = (lambda^2 - V0)^{1/2}``, realized as ``lambda * sqrt(1 - V0/lambda^2)``.

    The principal square root puts the cuts on ``(-inf, -sqrt(V0)]`` and
    ``[sqrt(V0), inf)`` and gives ``Sigma ~ lambda`` at infinity. Vectorized.
    """
    lam_arr = np.asarray(lam, dtype=complex)
    if v0 == 0:
        out = lam_arr.copy()
    else:
        if np.any(lam_arr == 0):
            raise BranchCutError("sigma is not defined at lambda = 0 by this representation")
        root = math.sqrt(abs(v0))
        if v0 > 0:
            on_cut = (lam_arr.imag == 0) & (np.abs(lam_arr.real) >= root)
        else:
            # a well moves the cut to the imaginary segment [-i root, i root]
            on_cut = (lam_arr.real == 0) & (np.abs(lam_arr.imag) <= root)
        if np.any(on_cut):
            raise BranchCutError("lambda lies on a branch cut of Sigma")
        out = lam_arr * np.sqrt(1.0 - v0 / lam_arr**2)
    return complex(out) if np.ndim(out) == 0 else out
