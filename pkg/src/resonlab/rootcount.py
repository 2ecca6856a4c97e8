"""
Argument-principle zero counting on rectangles, subdivision and Newton polish.

Functions passed in here must accept a numpy array of complex points and
return an array of values of the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

N_EDGE_INITIAL = 64
N_EDGE_MAX = 2 ** 16
BOUNDARY_RTOL = 1e-12
MAX_PHASE_STEP = math.pi / 2
WINDING_INT_TOL = 1e-6


class RootCountError(RuntimeError):
    pass


class BoundaryZero(RootCountError):
    """The function (nearly) vanishes on the contour; the caller must move the box."""


class NonConvergence(RootCountError):
    """Sampling or iteration budget exhausted."""


@dataclass(frozen=True)
class ContourBox:
    re_lo: float
    re_hi: float
    im_lo: float
    im_hi: float

    def __post_init__(self):
        if not (self.re_lo < self.re_hi and self.im_lo < self.im_hi):
            raise ValueError(f"degenerate box {self}")

    @property
    def width(self) -> float:
        return self.re_hi - self.re_lo

    @property
    def height(self) -> float:
        return self.im_hi - self.im_lo

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_lo + self.re_hi), 0.5 * (self.im_lo + self.im_hi))

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return (self.re_lo - slack <= z.real <= self.re_hi + slack
                and self.im_lo - slack <= z.imag <= self.im_hi + slack)

    def split(self, fx: float = 0.5, fy: float = 0.5):
        """Four children meeting at the point at fractions ``(fx, fy)`` of the box."""
        xm = self.re_lo + fx * self.width
        ym = self.im_lo + fy * self.height
        return [
            ContourBox(self.re_lo, xm, self.im_lo, ym),
            ContourBox(xm, self.re_hi, self.im_lo, ym),
            ContourBox(self.re_lo, xm, ym, self.im_hi),
            ContourBox(xm, self.re_hi, ym, self.im_hi),
        ]

    @classmethod
    def square(cls, center: complex, half: float) -> "ContourBox":
        return cls(center.real - half, center.real + half, center.imag - half, center.imag + half)


@dataclass(frozen=True)
class Zero:
    location: complex
    multiplicity: int
    residual: float
    newton_iters: int


def _edge_points(box: ContourBox, s):
    """Counterclockwise boundary parametrized by ``s`` in [0, 4]."""
    s = np.asarray(s, dtype=float)
    edge = np.minimum(np.floor(s), 3).astype(int)
    t = s - edge
    x0, x1, y0, y1 = box.re_lo, box.re_hi, box.im_lo, box.im_hi
    re = np.select([edge == 0, edge == 1, edge == 2, edge == 3],
                   [x0 + t * (x1 - x0), np.full_like(t, x1), x1 - t * (x1 - x0), np.full_like(t, x0)])
    im = np.select([edge == 0, edge == 1, edge == 2, edge == 3],
                   [np.full_like(t, y0), y0 + t * (y1 - y0), np.full_like(t, y1), y1 - t * (y1 - y0)])
    return re + 1j * im


def _valley_segments(mags):
    """Segments next to a local minimum of ``|f|`` along the closed sample loop."""
    m = mags[:-1]
    prev = np.roll(m, 1)
    nxt = np.roll(m, -1)
    low = np.nonzero((m <= prev) & (m <= nxt))[0]
    n = len(m)
    return np.unique(np.concatenate([low, (low - 1) % n]))


def _boundary_phase(f, box: ContourBox, n_initial: int, max_per_edge: int):
    """
    Total phase change of ``f`` around ``box``.

    A segment is bisected while its phase step exceeds pi/2 or ``|f|`` jumps
    by more than twice its smaller endpoint value. Once neither holds, the
    midpoint of every segment beside a local minimum of ``|f|`` is probed and
    kept if it dips below half the endpoint values: a multiple zero just off
    the contour can turn the phase by a full 2 pi between two samples, which
    neither step test sees.
    """
    s = np.linspace(0.0, 4.0, 4 * n_initial + 1)
    vals = np.asarray(f(_edge_points(box, s)), dtype=complex)
    vals[-1] = vals[0]
    cap = 4 * max_per_edge
    checked: set = set()
    while True:
        finite = np.isfinite(vals)
        if not finite.all():
            raise NonConvergence(f"non-finite function values on the boundary of {box}")
        mags = np.abs(vals)
        scale = float(np.median(mags))
        if scale == 0 or mags.min() < BOUNDARY_RTOL * scale:
            raise BoundaryZero(f"|f| vanishes on the boundary of {box}")
        with np.errstate(invalid="ignore", divide="ignore"):
            dphi = np.angle(vals[1:] / vals[:-1])
        jump = np.abs(vals[1:] - vals[:-1]) > 2 * np.minimum(mags[1:], mags[:-1])
        bad = (np.abs(dphi) > MAX_PHASE_STEP) | jump
        if bad.any():
            idx = np.nonzero(bad)[0]
            mids = 0.5 * (s[idx] + s[idx + 1])
            new_vals = np.asarray(f(_edge_points(box, mids)), dtype=complex)
        else:
            idx = np.array([i for i in _valley_segments(mags) if (s[i], s[i + 1]) not in checked], dtype=int)
            if not len(idx):
                return float(dphi.sum())
            mids = 0.5 * (s[idx] + s[idx + 1])
            probe = np.asarray(f(_edge_points(box, mids)), dtype=complex)
            dip = np.abs(probe) < 0.5 * np.minimum(mags[idx], mags[idx + 1])
            checked.update((s[i], s[i + 1]) for i in idx[~dip])
            if not dip.any():
                return float(dphi.sum())
            idx, mids, new_vals = idx[dip], mids[dip], probe[dip]
        if len(s) + len(idx) > cap:
            raise NonConvergence(f"phase not resolved on the boundary of {box} within {max_per_edge} samples per edge")
        if np.min(s[idx + 1] - s[idx]) < 1e-13:
            raise BoundaryZero(f"phase jump cannot be resolved on the boundary of {box}")
        s = np.insert(s, idx + 1, mids)
        vals = np.insert(vals, idx + 1, new_vals)


def winding_count(f, box: ContourBox, n_initial: int = N_EDGE_INITIAL,
                  max_per_edge: int = N_EDGE_MAX, int_tol: float = WINDING_INT_TOL) -> int:
    """
    Number of zeros of ``f`` inside ``box`` counted with multiplicity.

    The boundary is sampled at ``n_initial`` points per edge and bisected
    locally until every consecutive phase step is below pi/2 (see
    :func:`_boundary_phase` for the extra checks near small ``|f|``).

    Raises
    ------
    BoundaryZero
        ``|f|`` on the contour drops below ``1e-12`` times its median.
    NonConvergence
        The phase cannot be resolved within ``max_per_edge`` samples per edge,
        or the winding misses an integer by more than ``int_tol``.
    """
    total = _boundary_phase(f, box, n_initial, max_per_edge)
    turns = total / (2 * math.pi)
    n = round(turns)
    if abs(turns - n) > int_tol:
        raise NonConvergence(f"non-integer winding {turns} on {box}")
    return int(n)


def _fd_derivative(f, z: complex, h: float) -> complex:
    pts = np.array([z + h, z - h, z + 1j * h, z - 1j * h])
    v = np.asarray(f(pts), dtype=complex)
    # average of the real- and imaginary-direction central differences
    return complex(0.5 * ((v[0] - v[1]) / (2 * h) + (v[2] - v[3]) / (2j * h)))


def _f1(f, z: complex) -> complex:
    return complex(np.asarray(f(np.array([z])), dtype=complex)[0])


def newton_refine(f, seed: complex, tol: float = 1e-10, df=None, max_iter: int = 40,
                  multiplicity: int = 1, ftol: float | None = None) -> Zero:
    """
    Damped Newton iteration from ``seed``.

    Converged when ``|f| <= ftol`` (default ``tol``) and the last step is at
    most ``tol * (1 + |z|)``. The derivative is a central difference with
    step ``1e-6 * (1 + |z|)`` unless ``df`` is given. ``multiplicity`` scales
    the step for a known multiple zero.
    """
    ftol = tol if ftol is None else ftol
    z = complex(seed)
    fz = _f1(f, z)
    limit = max(2 * abs(z), abs(z) + 1.0)
    for it in range(1, max_iter + 1):
        if not np.isfinite(fz):
            raise NonConvergence(f"non-finite value at {z}")
        d = complex(df(z)) if df is not None else _fd_derivative(f, z, 1e-6 * (1 + abs(z)))
        if d == 0 or not np.isfinite(d):
            raise NonConvergence(f"vanishing derivative at {z}")
        step = multiplicity * fz / d
        z_new = z - step
        if abs(z_new) > limit:
            raise NonConvergence(f"Newton diverged from seed {seed}")
        f_new = _f1(f, z_new)
        damp = 0
        while not (abs(f_new) <= abs(fz)) and damp < 8 and abs(fz) > ftol:
            step *= 0.5
            z_new = z - step
            f_new = _f1(f, z_new)
            damp += 1
        z, fz = z_new, f_new
        if abs(fz) <= ftol and abs(step) <= tol * (1 + abs(z)):
            return Zero(z, multiplicity, abs(fz), it)
    raise NonConvergence(f"Newton did not converge from {seed} in {max_iter} iterations (|f|={abs(fz):.3g})")


def isolate_zeros(f, box: ContourBox, target_radius: float, tol: float = 1e-10,
                  seed: int = 0, max_retries: int = 5, count: int | None = None,
                  ftol: float | None = None, int_tol: float = WINDING_INT_TOL) -> list[Zero]:
    """
    All zeros of ``f`` inside ``box``.

    Boxes are quadrisected until they hold at most one zero or are smaller
    than ``target_radius``; a one-zero box is polished by Newton from its
    center and kept when the result stays inside it. Multiplicity comes from
    the box count. A split that lands on a zero is retried at a random
    offset of at most ``1e-3`` times the diameter (``seed`` fixes these), up
    to ``max_retries`` times.

    ``count`` may pass in a winding number already known for ``box``.
    """
    rng = np.random.default_rng(seed)
    n = winding_count(f, box, int_tol=int_tol) if count is None else count
    found: list[Zero] = []
    _isolate(f, box, n, target_radius, tol, ftol, rng, max_retries, found, int_tol)
    found.sort(key=lambda z: (z.location.real, z.location.imag))
    return found


def _isolate(f, box, n, target_radius, tol, ftol, rng, max_retries, out, int_tol=WINDING_INT_TOL):
    if n <= 0:
        return
    if n == 1:
        try:
            z = newton_refine(f, box.center, tol=tol, ftol=ftol)
        except NonConvergence:
            z = None
        if z is not None and box.contains(z.location):
            out.append(z)
            return
    if box.diameter <= target_radius:
        if n == 1:
            try:
                out.append(newton_refine(f, box.center, tol=tol, ftol=ftol))
            except NonConvergence:
                # located to within the box; the residual records the shortfall
                out.append(Zero(box.center, 1, abs(_f1(f, box.center)), 0))
        else:
            out.append(_cluster(f, box, n, tol, ftol))
        return
    last_err: Exception | None = None
    for attempt in range(max_retries + 1):
        if attempt == 0:
            fx = fy = 0.5
        else:
            off = 1e-3 * box.diameter
            fx = 0.5 + rng.uniform(-off, off) / box.width
            fy = 0.5 + rng.uniform(-off, off) / box.height
        children = box.split(fx, fy)
        try:
            counts = [winding_count(f, c, int_tol=int_tol) for c in children]
        except (BoundaryZero, NonConvergence) as exc:
            last_err = exc
            continue
        if sum(counts) != n:
            last_err = NonConvergence(f"subdivision of {box} is not conservative: {n} -> {counts}")
            continue
        for c, k in zip(children, counts):
            _isolate(f, c, k, target_radius, tol, ftol, rng, max_retries, out, int_tol)
        return
    if isinstance(last_err, BoundaryZero):
        raise last_err
    raise BoundaryZero(f"could not split {box} cleanly: {last_err}")


def _cluster(f, box, n, tol, ftol) -> Zero:
    """A box below the target radius that still holds ``n > 1`` zeros: one multiple zero."""
    try:
        z = newton_refine(f, box.center, tol=tol, multiplicity=n, ftol=ftol)
        if box.contains(z.location, slack=box.diameter):
            return z
    except NonConvergence:
        pass
    loc = box.center
    return Zero(loc, n, abs(_f1(f, loc)), 0)
