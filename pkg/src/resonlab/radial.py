"""
Resonance-defining functions for radial piecewise-constant potentials.

All channel functions work in the rescaled variable ``lambda * R`` (support
radius normalized to 1, heights multiplied by ``R**2``). For one angular
channel with Bessel order ``nu`` and regular interior solution ``u`` (in the
form ``u(r) = J_nu(Sigma r)`` for a single step), the two exterior
Wronskians at ``r = 1`` are::

    F = u'(1) H1_nu(lambda) - lambda u(1) H1_nu'(lambda)
    G = u'(1) J_nu(lambda)  - lambda u(1) J_nu'(lambda)

The continuation formula of H1 to ``e^{i m pi} lambda`` turns the resonance
condition on sheet ``m`` into ``F - 2 c G = 0`` on the principal sheet, with
``c = m`` for integer order. For half-integer order (odd ``d``) every odd
sheet sees ``H1(e^{i m pi} z) ∝ H2(z) = 2 J(z) - H1(z)``, so ``c = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy import special as sp

from .complexfn import BesselOrder, jh_values
from .surface import effective_sheet, sigma

FREE_F0 = -2j / math.pi


class SheetError(ValueError):
    """Requested sheet carries no resonances (physical sheet or identified with it)."""


@dataclass(frozen=True)
class RadialPotential:
    """
    ``V(r) = height_i`` for ``radius_{i-1} <= r < radius_i``, zero beyond the last radius.

    ``steps`` is an ordered sequence of ``(radius, height)`` pairs with
    strictly increasing radii.
    """

    d: int
    steps: tuple

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be an integer >= 1, got {self.d!r}")
        steps = tuple((float(r), float(h)) for r, h in self.steps)
        if not steps:
            raise ValueError("steps must be nonempty")
        prev = 0.0
        for i, (r, h) in enumerate(steps):
            if not (math.isfinite(r) and r > prev):
                raise ValueError(f"steps[{i}].radius must be finite and exceed {prev}, got {r}")
            if not math.isfinite(h):
                raise ValueError(f"steps[{i}].height must be finite, got {h}")
            prev = r
        object.__setattr__(self, "steps", steps)

    @classmethod
    def step(cls, d: int, v0: float, radius: float = 1.0) -> "RadialPotential":
        return cls(d, ((radius, v0),))

    @property
    def support_radius(self) -> float:
        return self.steps[-1][0]

    @property
    def single_step(self) -> bool:
        return len(self.steps) == 1

    @property
    def v0(self) -> float:
        """Height of the innermost step (the only one for the single-step case)."""
        return self.steps[0][1]

    @property
    def is_free(self) -> bool:
        return all(h == 0 for _, h in self.steps)

    def rescaled(self) -> "RadialPotential":
        """Same potential with support radius 1: radii / R, heights * R**2."""
        R = self.support_radius
        return RadialPotential(self.d, tuple((r / R, h * R * R) for r, h in self.steps))


def sph_harm_dim(l: int, d: int) -> int:
    """Dimension of degree-``l`` spherical harmonics on the sphere ``S^{d-1}``."""
    if d < 2:
        raise ValueError(f"sph_harm_dim needs d >= 2, got {d}")
    if l < 0:
        raise ValueError(f"degree must be nonnegative, got {l}")
    second = comb(l + d - 3, l - 2) if l >= 2 else 0
    return comb(l + d - 1, l) - second


@dataclass(frozen=True)
class AngularChannel:
    l: int
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("angular channels need d >= 2; use jost_1d for d = 1")
        if self.l < 0:
            raise ValueError(f"l must be nonnegative, got {self.l}")
        BesselOrder(self.nu)  # enforces the order cap

    @property
    def nu(self) -> float:
        return self.l + (self.d - 2) / 2

    @property
    def order(self) -> BesselOrder:
        return BesselOrder(self.nu)

    @property
    def mult(self) -> int:
        return sph_harm_dim(self.l, self.d)

    @classmethod
    def from_nu(cls, nu: float, d: int) -> "AngularChannel":
        l = nu - (d - 2) / 2
        if abs(l - round(l)) > 1e-12:
            raise ValueError(f"nu={nu} is not l + (d-2)/2 for d={d}")
        return cls(int(round(l)), d)


def _nu(ch) -> float:
    if isinstance(ch, AngularChannel):
        return ch.nu
    return BesselOrder(ch).nu


def _as_array(lam):
    lam = np.asarray(lam, dtype=complex)
    if np.any(lam == 0):
        raise ValueError("lambda = 0 is excluded")
    return lam


def _ret(x):
    return complex(x) if np.ndim(x) == 0 else x


def f0_g0(ch, lam, v0: float):
    """``(F_0, G_0)`` for the unit step of height ``v0``; vectorized over ``lam``."""
    nu = _nu(ch)
    lam = _as_array(lam)
    s = sigma(lam, v0)
    js, jps = jh_values(nu, s, with_hankel=False)
    jl, jpl, hl, hpl = jh_values(nu, lam)
    a = s * jps
    # grouping keeps G exactly 0 when Sigma == lambda
    f = a * hl - (lam * hpl) * js
    g = a * jl - (lam * jpl) * js
    return _ret(f), _ret(g)


def f0(ch, lam, v0: float):
    """``F_0 = Sigma J'(Sigma) H1(lambda) - lambda J(Sigma) H1'(lambda)``; equals ``-2i/pi`` when ``v0 = 0``."""
    return f0_g0(ch, lam, v0)[0]


def g0(ch, lam, v0: float):
    """``G_0 = Sigma J'(Sigma) J(lambda) - lambda J(Sigma) J'(lambda)``; vanishes when ``v0 = 0``."""
    return f0_g0(ch, lam, v0)[1]


def sheet_coefficient(nu: float, m: int) -> int:
    """
    The ``c`` in ``F - 2 c G`` whose principal-sheet zeros are the sheet-``m`` resonances.

    Raises :class:`SheetError` for sheets identified with the physical one.
    """
    half = round(2 * nu) % 2 == 1
    if half:
        if m % 2 == 0:
            raise SheetError(f"for half-integer order sheet {m} is identified with the physical sheet")
        return 1
    if m == 0:
        raise SheetError("the physical sheet carries no resonances for V0 > 0")
    return m


def d_m(ch, lam, v0: float, m: int):
    """
    Sheet-``m`` resonance function ``(F_0 - 2 c G_0) / (-2i/pi)`` for the unit step.

    Normalized so that it is identically 1 when ``v0 = 0``. For integer order
    ``c = m``; for half-integer order ``c = 1`` on every odd sheet.
    """
    c = sheet_coefficient(_nu(ch), m)
    f, g = f0_g0(ch, lam, v0)
    return _ret((np.asarray(f) - 2 * c * np.asarray(g)) / FREE_F0)


def _h_pair(nu: float, z):
    h1 = sp.hankel1(nu, z)
    h2 = sp.hankel2(nu, z)
    return h1, h2, (nu / z) * h1 - sp.hankel1(nu + 1, z), (nu / z) * h2 - sp.hankel2(nu + 1, z)


def _regular_solution(nu: float, lam, pot: RadialPotential):
    """
    ``(u(1), u'(1), k1)`` of the regular solution for a rescaled multi-step potential.

    ``u = J_nu(k1 r)`` in the innermost layer, carried outward by matching
    ``(u, u')`` at every interface. Outer layers use the ``H1``/``H2`` basis:
    one member decays and one grows across the layer, so the transfer product
    carries no cancellation beyond the genuine growth.
    """
    steps = pot.steps
    r1, h1 = steps[0]
    k1 = sigma(lam, h1)
    j, jp = jh_values(nu, k1 * r1, with_hankel=False)
    u, up = j, k1 * jp
    for (r_prev, _), (r_next, h) in zip(steps[:-1], steps[1:]):
        k = sigma(lam, h)
        p1, p2, p1p, p2p = _h_pair(nu, k * r_prev)
        # det [[H1, H2], [k H1', k H2']] = -4i / (pi r)
        c = math.pi * r_prev / (-4j)
        a = c * (k * p2p * u - p2 * up)
        b = c * (-k * p1p * u + p1 * up)
        q1, q2, q1p, q2p = _h_pair(nu, k * r_next)
        u = a * q1 + b * q2
        up = k * (a * q1p + b * q2p)
    return u, up, k1


def exterior_wronskians(ch, lam, pot: RadialPotential):
    """
    ``(F, G)`` for a general step potential, in the rescaled variable ``lam * R``.

    Coincides with :func:`f0_g0` for a single step (``lam`` is then already
    the rescaled variable and ``v0`` the rescaled height).
    """
    nu = _nu(ch)
    lam = _as_array(lam)
    rp = pot.rescaled()
    if rp.single_step:
        return f0_g0(nu, lam, rp.v0)
    u, up, _ = _regular_solution(nu, lam, rp)
    jl, jpl, hl, hpl = jh_values(nu, lam)
    f = up * hl - lam * u * hpl
    g = up * jl - lam * u * jpl
    return _ret(f), _ret(g)


def wronskian_w(ch, lam, pot: RadialPotential, transfer: bool = False):
    """
    Channel Wronskian of the regular solution against the outgoing solution at ``r = R``.

    Returned divided by its free-field value, so that it is identically 1
    for ``V = 0``. With ``phi = r^{-a} u`` and ``a = (d-2)/2``, this equals
    ``(lam / k1)^a * F / (-2i/pi)`` where ``k1`` is the innermost wavenumber.
    ``lam`` is in physical units here. ``transfer=True`` forces the
    interface-matching path even for a single step.
    """
    if isinstance(ch, AngularChannel) and ch.d != pot.d:
        raise ValueError(f"channel dimension {ch.d} does not match potential dimension {pot.d}")
    nu = _nu(ch)
    lam = _as_array(lam) * pot.support_radius
    rp = pot.rescaled()
    alpha = (pot.d - 2) / 2
    if rp.single_step and not transfer:
        f = f0_g0(nu, lam, rp.v0)[0]
    else:
        u, up, _ = _regular_solution(nu, lam, rp)
        _, _, hl, hpl = jh_values(nu, lam)
        f = up * hl - lam * u * hpl
    h1 = rp.v0
    # (lam / k1)^a = (1 - h1 / lam^2)^{-a/2}, principal power: continuous on Im lam > 0
    pref = (1.0 - h1 / lam**2) ** (-alpha / 2) if alpha else 1.0
    return _ret(pref * np.asarray(f) / FREE_F0)


class ChannelFunction:
    """
    Picklable ``lambda -> (F - 2 c G) / (-2i/pi)`` for one channel, sheet and potential.

    Takes the rescaled variable. Vectorized. With ``regularize=True`` the
    value is multiplied by ``(lambda / k1)^nu`` (``k1`` the innermost
    wavenumber). That factor is analytic and zero-free on ``Im lambda > 0``
    and cancels the ``k1^nu`` zero of ``F`` and ``G`` at the threshold
    ``lambda^2 = V``, so contours can pass close to the real axis there.
    """

    def __init__(self, nu: float, pot: RadialPotential, m: int, regularize: bool = False):
        self.nu = float(nu)
        self.pot = pot
        self.m = int(m)
        self.c = sheet_coefficient(self.nu, self.m)
        self.regularize = regularize
        self._inner_height = pot.rescaled().steps[0][1]

    def __call__(self, lam):
        f, g = exterior_wronskians(self.nu, lam, self.pot)
        out = (np.asarray(f) - 2 * self.c * np.asarray(g)) / FREE_F0
        if self.regularize and self.nu and self._inner_height:
            lam = np.asarray(lam, dtype=complex)
            k1 = sigma(lam, self._inner_height)
            with np.errstate(over="ignore"):
                out = out * np.exp(self.nu * (np.log(lam) - np.log(k1)))
        return _ret(out)

    def __repr__(self):
        return f"ChannelFunction(nu={self.nu}, m={self.m}, steps={self.pot.steps})"


def _layer_matrix(lam, h: float, width: float):
    """Transfer matrix of ``(psi, psi')`` across a layer of constant height; entire in ``lam``."""
    k = np.sqrt(lam * lam - h + 0j)
    kw = k * width
    c = np.cos(kw)
    s_over_k = width * np.sinc(kw / math.pi)
    k_s = k * np.sin(kw)
    return c, s_over_k, -k_s, c


def jost_1d(lam, pot: RadialPotential, scaled: bool = False):
    """
    Outgoing-wave coefficient for the even 1D potential built from ``pot``.

    ``V(x) = height_i`` on ``radius_{i-1} <= |x| < radius_i``. With
    ``psi = exp(-i lam x)`` to the left of the support, ``jost_1d`` is the
    coefficient of ``exp(-i lam x)`` to the right. Its zeros in the lower
    half plane are the resonances; it is identically 1 for ``V = 0`` and has
    a pole at ``lam = 0`` otherwise.

    ``scaled=True`` returns ``jost_1d * exp(-4i lam R)``, which has the same
    zeros but stays O(1) deep in the lower half plane where the unscaled
    value overflows.
    """
    if pot.d != 1:
        raise ValueError("jost_1d needs a d = 1 potential")
    lam = _as_array(lam)
    steps = pot.steps
    R = pot.support_radius
    layers = []
    prev = 0.0
    for r, h in steps:
        layers.append((h, r - prev))
        prev = r
    # left half outward-in, then the central layer spanning both sides, then right half
    seq = [(h, w) for h, w in reversed(layers[1:])] + [(layers[0][0], 2 * layers[0][1])] + \
        [(h, w) for h, w in layers[1:]]
    u = np.ones_like(lam)
    up = -1j * lam
    for h, w in seq:
        a, b, c, dd = _layer_matrix(lam, h, w)
        u, up = a * u + b * up, c * u + dd * up
    phase = -2j if scaled else 2j
    out = (1j * lam * u - up) * np.exp(phase * lam * R) / (2j * lam)
    return _ret(out)


def jost_1d_upper(lam, pot: RadialPotential, scaled: bool = False):
    """``jost_1d(-lam)``: resonances mapped into the upper half plane."""
    return jost_1d(-np.asarray(lam, dtype=complex), pot, scaled=scaled)


class JostFunction:
    """Picklable upper-half-plane form of :func:`jost_1d` (scaled by default)."""

    def __init__(self, pot: RadialPotential, scaled: bool = True):
        self.pot = pot
        self.scaled = scaled

    def __call__(self, lam):
        return jost_1d_upper(lam, self.pot, scaled=self.scaled)


def resonance_sheet(d: int, m: int) -> int:
    """Sheet index actually scanned for dimension ``d`` (odd ``d`` collapses to -1)."""
    eff = effective_sheet(d, m)
    if eff == 0:
        raise SheetError(f"sheet {m} is identified with the physical sheet in d={d}")
    return eff
