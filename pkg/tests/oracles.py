"""
Independent reference computations for the tests.

Nothing here calls resonlab: spherical Bessel functions come from their
terminating closed forms (or power series near the origin), the 1D barrier
from its explicit matching determinant, multi-step channels from an ODE
integration, and zeros from a dense-grid phase scan polished by mpmath.
"""

import math
from math import factorial

import mpmath
import numpy as np
from scipy.integrate import solve_ivp

SERIES_RADIUS = 3.0


class _NumpyLib:
    exp = staticmethod(np.exp)
    sqrt = staticmethod(lambda x: np.sqrt(np.asarray(x, dtype=complex)))
    cos = staticmethod(np.cos)
    sin = staticmethod(np.sin)

    @staticmethod
    def where(cond, a, b):
        return np.where(cond, a, b)

    @staticmethod
    def abs(x):
        return np.abs(x)


class _MpLib:
    exp = staticmethod(mpmath.exp)
    sqrt = staticmethod(mpmath.sqrt)
    cos = staticmethod(mpmath.cos)
    sin = staticmethod(mpmath.sin)

    @staticmethod
    def where(cond, a, b):
        return a if cond else b

    @staticmethod
    def abs(x):
        return abs(x)


NP, MP = _NumpyLib(), _MpLib()


def _hankel_coeffs(l):
    return [factorial(l + k) / (factorial(k) * factorial(l - k)) for k in range(l + 1)]


def sph_hankel(l, z, kind=1, lib=NP):
    """``h_l^{(1,2)}(z)`` and its derivative from the terminating series."""
    s = 1j if kind == 1 else -1j
    pref = (-s) ** (l + 1)
    e = lib.exp(s * z)
    val = 0
    der = 0
    for k, c in enumerate(_hankel_coeffs(l)):
        a = c * (s / 2) ** k
        # d/dz [e^{sz} z^{-k-1}] = e^{sz} (s z^{-k-1} - (k+1) z^{-k-2})
        val = val + a * z ** (-k - 1)
        der = der + a * (s * z ** (-k - 1) - (k + 1) * z ** (-k - 2))
    return pref * e * val, pref * e * der


def _double_factorial_odd(n):
    out = 1
    for k in range(1, n + 1, 2):
        out *= k
    return out


def reduced_sph_j(l, s2, lib=NP, terms=60):
    """``j_l(s) / s^l`` and ``s j_l'(s) / s^l`` as power series in ``s^2`` (entire, branch free)."""
    val = 0
    dval = 0
    for k in range(terms):
        c = (-0.5) ** k / (factorial(k) * _double_factorial_odd(2 * l + 2 * k + 1))
        val = val + c * s2 ** k
        dval = dval + c * (l + 2 * k) * s2 ** k
    return val, dval


def reduced_sph_j_closed(l, s, lib=NP):
    h1, h1p = sph_hankel(l, s, 1, lib)
    h2, h2p = sph_hankel(l, s, 2, lib)
    j = (h1 + h2) / 2
    jp = (h1p + h2p) / 2
    return j / s ** l, s * jp / s ** l


def spherical_wronskian(l, lam, v0, lib=NP):
    """
    ``[s j_l'(s) h_l(lam) - lam j_l(s) h_l'(lam)] / s^l`` with ``s^2 = lam^2 - v0``.

    Even in ``s``, so the square-root branch never enters; zeros in the lower
    half plane are the d = 3 resonances of the unit step of height ``v0``.
    """
    s2 = lam * lam - v0
    s = lam * lib.sqrt(1 - v0 / (lam * lam))
    if lib is NP:
        small = np.abs(s) < SERIES_RADIUS
        with np.errstate(all="ignore"):
            js, jps = reduced_sph_j(l, s2, lib)
            jc, jpc = reduced_sph_j_closed(l, np.where(small, 1.0, s), lib)
        jv = np.where(small, js, jc)
        jpv = np.where(small, jps, jpc)
    else:
        if abs(s) < SERIES_RADIUS:
            jv, jpv = reduced_sph_j(l, s2, lib)
        else:
            jv, jpv = reduced_sph_j_closed(l, s, lib)
    h, hp = sph_hankel(l, lam, 1, lib)
    return jpv * h - lam * jv * hp


def barrier_determinant(lam, v0, length, lib=NP):
    """
    ``-2i (K^2 + lam^2) sin(K L)/K + 4 lam cos(K L)`` with ``K^2 = lam^2 - v0``:
    the square-barrier matching determinant divided by ``K`` (entire, even in K).
    Zeros in the lower half plane are the 1D resonances.
    """
    k = lam * lib.sqrt(1 - v0 / (lam * lam))
    kl = k * length
    sinc = lib.sin(kl) / k
    return -2j * (k * k + lam * lam) * sinc + 4 * lam * lib.cos(kl)


def phase_scan_zeros(func_np, func_mp, x_lo, x_hi, y_lo, y_hi, h, keep=None, dps=30):
    """
    Zeros of a holomorphic function on a rectangle by a dense-grid phase scan.

    Every grid cell's winding number is the sum of wrapped corner-to-corner
    phase steps; cells with nonzero winding are polished by ``mpmath.findroot``.
    Returns ``(zeros, multiplicities, total_winding)``; ``keep`` filters cells by center.
    """
    nx = int(math.ceil((x_hi - x_lo) / h))
    ny = int(math.ceil((y_hi - y_lo) / h))
    xs = np.linspace(x_lo, x_hi, nx + 1)
    ys = np.linspace(y_lo, y_hi, ny + 1)
    grid = xs[None, :] + 1j * ys[:, None]
    vals = func_np(grid)
    ph = np.angle(vals)

    def wrap(a):
        return (a + np.pi) % (2 * np.pi) - np.pi

    bottom = wrap(ph[:-1, 1:] - ph[:-1, :-1])
    right = wrap(ph[1:, 1:] - ph[:-1, 1:])
    top = wrap(ph[1:, :-1] - ph[1:, 1:])
    left = wrap(ph[:-1, :-1] - ph[1:, :-1])
    wind = np.rint((bottom + right + top + left) / (2 * np.pi)).astype(int)
    centers = (grid[:-1, :-1] + grid[1:, 1:]) / 2
    if keep is not None:
        wind = np.where(keep(centers), wind, 0)
    zeros, mults = [], []
    with mpmath.workdps(dps):
        for iy, ix in zip(*np.nonzero(wind)):
            c = complex(centers[iy, ix])
            z = complex(mpmath.findroot(func_mp, mpmath.mpc(c.real, c.imag), tol=1e-25))
            zeros.append(z)
            mults.append(int(wind[iy, ix]))
    return np.array(zeros), mults, int(wind.sum())


def dedupe(zeros, tol=1e-9):
    out = []
    for z in zeros:
        if all(abs(z - w) > tol * (1 + abs(z)) for w in out):
            out.append(z)
    return np.array(out)


def bessel_series_start(nu, k, r, terms=40):
    """``(J_nu(k r), d/dr J_nu(k r))`` from the power series, with principal ``(k r / 2)^nu``."""
    x = k * r
    val = 0j
    der = 0j
    for m in range(terms):
        c = (-1) ** m / (math.factorial(m) * math.gamma(m + nu + 1))
        p = 2 * m + nu
        val += c * (x / 2) ** p
        der += c * p * (x / 2) ** (p - 1) * (k / 2)
    return val, der


def shoot_channel(nu, lam, steps, r0=1e-2):
    """
    Integrate ``u'' + u'/r + (lam^2 - V(r) - nu^2/r^2) u = 0`` from ``r0`` to
    the support radius, starting from the series of ``J_nu(k1 r)``.

    Returns ``(u(R), u'(R))``. ``steps`` is ``[(radius, height), ...]``.
    """
    r1, h1 = steps[0]
    k1 = lam * np.sqrt(1 - h1 / lam**2 + 0j)
    u, up = bessel_series_start(nu, k1, r0)
    y = np.array([u, up], dtype=complex)
    r_prev = r0
    for r_next, h in steps:
        k2 = lam * lam - h

        def rhs(r, yy, k2=k2):
            return [yy[1], -yy[1] / r - (k2 - nu * nu / (r * r)) * yy[0]]

        sol = solve_ivp(rhs, (r_prev, r_next), y, method="DOP853", rtol=1e-12, atol=1e-14)
        y = sol.y[:, -1]
        r_prev = r_next
    return complex(y[0]), complex(y[1])


def hankel1_mp(nu, z):
    return complex(mpmath.hankel1(nu, z))


def hankel1p_mp(nu, z):
    return complex((mpmath.hankel1(nu - 1, z) - mpmath.hankel1(nu + 1, z)) / 2)


def besselj_mp(nu, z):
    return complex(mpmath.besselj(nu, z))


def random_polynomial(rng, box, max_degree=12, double_prob=0.15, margin=0.05):
    """
    Roots drawn uniformly inside ``box`` (shrunk by ``margin`` of its size),
    occasionally repeated. Returns ``(f, roots)`` where ``roots`` lists each
    distinct root with its multiplicity and ``f`` is the product form.
    """
    deg = int(rng.integers(1, max_degree + 1))
    mx = margin * box.width
    my = margin * box.height
    roots = []
    left = deg
    while left > 0:
        r = complex(rng.uniform(box.re_lo + mx, box.re_hi - mx), rng.uniform(box.im_lo + my, box.im_hi - my))
        k = 2 if (left >= 2 and rng.uniform() < double_prob) else 1
        roots.append((r, k))
        left -= k
    flat = np.array([r for r, k in roots for _ in range(k)])

    def f(lam):
        lam = np.asarray(lam, dtype=complex)
        return np.prod(lam[..., None] - flat, axis=-1)

    return f, roots


def d3_step_resonances(l, v0, radius, h=0.05):
    """
    Lower-half-plane zeros (modulus <= ``radius``) of the spherical
    Wronskian of the unit step: the d = 3 resonances of channel ``l``.
    The grid is offset so no grid line sits on the imaginary axis.
    """
    def f_np(z):
        return spherical_wronskian(l, z, v0, NP)

    def f_mp(z):
        return spherical_wronskian(l, z, v0, MP)

    off = 0.0123
    zs, mults, _ = phase_scan_zeros(f_np, f_mp, -radius - 0.5 + off, radius + 0.5 + off, -radius - 0.5, -1e-3,
                                    h, keep=lambda c: np.abs(c) > 0.5)
    zs = dedupe(zs)
    return zs[np.abs(zs) <= radius]
