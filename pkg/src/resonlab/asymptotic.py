"""
Large-order geometry for the channel functions: the map rho, the eye-shaped
region K, leading-order forms of F_0 and G_0, and Newton seeds.

In the scaled variable ``z = lambda / nu`` the resonance strings of a
channel sit just outside the upper boundary of K, where
``Re rho(z) = 0`` and ``Im rho`` runs from 0 (at z = 1) to -pi (at z = -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import bisect

from .rootcount import NonConvergence

TABLE_SIZE = 512
DEFAULT_H_MARGIN = 0.15
DEFAULT_EPSILON = 0.1


@dataclass(frozen=True)
class EyeRegion:
    t0: float
    z0: float
    epsilon: float = DEFAULT_EPSILON


@lru_cache(maxsize=None)
def _t0() -> float:
    return bisect(lambda t: t - 1.0 / math.tanh(t), 1.0, 2.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def eye_region(epsilon: float = DEFAULT_EPSILON) -> EyeRegion:
    """Constants of K: ``t0`` solves ``t = coth t``, ``z0 = sqrt(t0^2 - 1)``."""
    t0 = _t0()
    return EyeRegion(t0=t0, z0=math.sqrt(t0 * t0 - 1.0), epsilon=epsilon)


def rho_map(z):
    """``rho(z) = log((1 + sqrt(1 - z^2)) / z) - sqrt(1 - z^2)`` on principal branches."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValueError("rho is singular at z = 0")
    on_cut = (z.imag == 0) & (np.abs(z.real) > 1)
    if np.any(on_cut):
        raise ValueError("z lies on the cut |Re z| > 1 of rho")
    w = np.sqrt(1 - z * z)
    out = np.log((1 + w) / z) - w
    return complex(out) if out.ndim == 0 else out


def rho_prime(z):
    z = np.asarray(z, dtype=complex)
    out = -np.sqrt(1 - z * z) / z
    return complex(out) if out.ndim == 0 else out


def eye_boundary(t, sign: int = 1):
    """
    Point of the upper boundary of K at parameter ``t`` in ``[0, t0]``.

    ``t = 0`` gives ``sign * 1`` and ``t = t0`` gives ``i z0``.
    """
    t0 = _t0()
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr > t0 * (1 + 1e-15)):
        raise ValueError(f"t must lie in [0, {t0}]")
    t_arr = np.minimum(t_arr, t0)
    with np.errstate(invalid="ignore", divide="ignore"):
        tc = np.where(t_arr > 0, t_arr / np.tanh(np.where(t_arr > 0, t_arr, 1.0)), 1.0)
    re = np.sqrt(np.maximum(tc - t_arr**2, 0.0))
    im = np.sqrt(np.maximum(t_arr**2 - t_arr * np.tanh(t_arr), 0.0))
    out = np.sign(sign) * re + 1j * im
    return complex(out) if out.ndim == 0 else out


@lru_cache(maxsize=None)
def boundary_table():
    """``TABLE_SIZE`` samples ``(t, z, rho)`` along the upper boundary from z = 1 to z = -1."""
    t0 = _t0()
    half = TABLE_SIZE // 2
    t_right = np.linspace(0.0, t0, half)
    t_left = t_right[::-1]
    t = np.concatenate([t_right, t_left])
    z = np.concatenate([eye_boundary(t_right, +1), eye_boundary(t_left, -1)])
    # z = +-1 are the rho cut endpoints; nudge into the open upper half plane
    z = np.where(np.abs(z.imag) < 1e-300, z.real * (1 - 1e-15) + 1e-15j, z)
    rho = np.asarray(rho_map(z))
    t.setflags(write=False)
    z.setflags(write=False)
    rho.setflags(write=False)
    return t, z, rho


def distance_to_boundary(z) -> np.ndarray:
    _, zb, _ = boundary_table()
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return np.min(np.abs(z[:, None] - zb[None, :]), axis=1)


def in_omega(z, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Membership in the strip of width ``epsilon`` above the upper boundary, away from z = +-1."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return ((z.imag > 0) & (distance_to_boundary(z) < epsilon)
            & (np.abs(z - 1) > epsilon) & (np.abs(z + 1) > epsilon))


def olver_leading(nu, z, v0: float, epsilon: float = DEFAULT_EPSILON, check: bool = True):
    """
    Leading-order uniform forms ``(F0_hat, G0_hat)`` at ``lambda = nu * z``::

        F0_hat = (-2i/pi) (1 - V0 sqrt(1 - z^2) / (2 nu z^2))
        G0_hat = exp(-2 nu rho(z)) / (2 pi) * V0 / (2 nu^2 (1 - z^2))
    """
    nu = float(nu)
    z_arr = np.asarray(z, dtype=complex)
    if check and not np.all(in_omega(z_arr, epsilon)):
        raise ValueError(f"z outside the validity strip (epsilon={epsilon})")
    w = np.sqrt(1 - z_arr * z_arr)
    f_hat = (-2j / math.pi) * (1 - v0 * w / (2 * nu * z_arr**2))
    g_hat = np.exp(-2 * nu * np.asarray(rho_map(z_arr))) / (2 * math.pi) * v0 / (2 * nu**2 * (1 - z_arr**2))
    if z_arr.ndim == 0:
        return complex(f_hat), complex(g_hat)
    return f_hat, g_hat


def approx_zeros(nu, m: int, v0: float, h_margin: float = DEFAULT_H_MARGIN) -> np.ndarray:
    """
    Zeros of ``nu^2 exp(2 nu rho) - i m V0 / 4`` in the rho plane::

        rho_k = log(|m| V0 / 4) / (2 nu) - log(nu) / nu + i (pi / nu) (k + sgn(m) / 4)

    keeping every ``k`` with ``Im rho_k`` in ``(-pi + 2 h, -2 h)``, ordered by ``k``.
    ``m`` is the coefficient of ``G`` in ``F - 2 m G`` (for half-integer
    orders every odd sheet has coefficient 1).
    """
    nu = float(nu)
    if nu < 10:
        raise ValueError("approx_zeros needs nu >= 10")
    if m == 0:
        raise ValueError("m must be nonzero")
    if not 0 < h_margin < math.pi / 4:
        raise ValueError(f"h_margin must lie in (0, pi/4) for a nonempty window, got {h_margin}")
    if v0 <= 0:
        raise ValueError("v0 must be positive")
    re = math.log(abs(m) * v0 / 4) / (2 * nu) - math.log(nu) / nu
    off = math.copysign(0.25, m)
    lo, hi = -math.pi + 2 * h_margin, -2 * h_margin
    k_lo = math.floor(lo * nu / math.pi - off)
    k_hi = math.ceil(hi * nu / math.pi - off)
    out = []
    for k in range(k_lo, k_hi + 1):
        im = math.pi / nu * (k + off)
        if lo < im < hi:
            out.append(complex(re, im))
    return np.array(out, dtype=complex)


def invert_rho(rho_target: complex, tol: float = 1e-10, max_iter: int = 50) -> complex:
    """
    The ``z`` near the upper boundary of K with ``rho(z) = rho_target``.

    Starts from the nearest boundary-table sample and runs damped Newton
    with ``rho'(z) = -sqrt(1 - z^2) / z``.
    """
    w = complex(rho_target)
    if abs(w.real) > 0.5 or not (-math.pi - 0.5 <= w.imag <= 0.5):
        raise NonConvergence(f"rho target {w} outside the tube around i(-pi, 0)")
    _, zb, rb = boundary_table()
    i = int(np.argmin(np.abs(rb - w)))
    z = complex(zb[i])
    if w == 0:
        return 1.0 + 0j
    r = complex(rho_map(z)) - w
    for _ in range(max_iter):
        if abs(r) <= tol:
            return z
        step = r / complex(rho_prime(z))
        for _ in range(30):
            zn = z - step
            if zn.imag > 0:
                rn = complex(rho_map(zn)) - w
                if abs(rn) < abs(r):
                    break
            step *= 0.5
        else:
            raise NonConvergence(f"invert_rho stalled at {z} for target {w}")
        z, r = zn, rn
    if abs(r) <= tol:
        return z
    raise NonConvergence(f"invert_rho did not converge for target {w}")


def seed_lambdas(nu, m: int, v0: float, h_margin: float = DEFAULT_H_MARGIN) -> np.ndarray:
    """Newton seeds ``nu * invert_rho(rho_k)`` in the (rescaled) lambda plane."""
    return np.array([float(nu) * invert_rho(r) for r in approx_zeros(nu, m, v0, h_margin)])
