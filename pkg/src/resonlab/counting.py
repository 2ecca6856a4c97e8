"""
Resonance sets per sheet, counting functions and the quantitative checks
run on them (order of growth, lower bound, 1D asymptotics, symmetry,
Jensen integrals).

Scans work channel by channel in the rescaled variable ``lambda * R``. For
each channel the upper half disk of radius ``r_max * R`` is tiled with
rectangles, the zeros of the sheet function are isolated by the argument
principle and the results are mapped back to physical ``lambda``.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import linear_sum_assignment

from .asymptotic import eye_region, seed_lambdas
from .complexfn import NU_MAX
from .radial import (ChannelFunction, JostFunction, RadialPotential, resonance_sheet,
                     sheet_coefficient, sph_harm_dim)
from .rootcount import (WINDING_INT_TOL, BoundaryZero, ContourBox, NonConvergence, isolate_zeros,
                        newton_refine, winding_count)
from .surface import SheetPoint

BOTTOM_EDGE = 1e-3
TILE_SIZE = 8.0
TARGET_RADIUS = 1e-4
MAX_RETRIES = 5
EXTRA_CHANNELS = 2
DYADIC_STEPS = 7
PASS, FAIL = "PASS", "FAIL"


@dataclass(frozen=True)
class ResonanceEntry:
    """One zero of one channel; ``principal`` is the physical upper-half-plane representative."""
    principal: complex
    sheet: int
    l: int
    nu: float
    multiplicity: int
    residual: float

    @property
    def point(self) -> SheetPoint:
        return SheetPoint.from_principal(self.principal, self.sheet)

    @property
    def modulus(self) -> float:
        return abs(self.principal)

    @property
    def projected(self) -> complex:
        """``e^{i m pi} lambda0`` as a plane value; the sign flip is exact in floating point."""
        return self.principal if self.sheet % 2 == 0 else -self.principal


@dataclass
class ChannelScan:
    l: int
    nu: float
    zeros: list
    winding_total: int = 0
    isolated_total: int = 0
    failures: list = field(default_factory=list)
    attempts: int = 1

    @property
    def complete(self) -> bool:
        return not self.failures and self.winding_total == self.isolated_total


@dataclass
class ResonanceSet:
    potential: RadialPotential
    sheet: int
    entries: list
    r_max: float = math.inf
    exclusion_radius: float = 0.0
    channels: list = field(default_factory=list)
    validation: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def incomplete(self) -> bool:
        return any(not c.complete for c in self.channels) or any(not c.complete or c.zeros for c in self.validation)

    @property
    def total_multiplicity(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    def summary(self) -> dict:
        return {
            "dimension": self.potential.d,
            "sheet": self.sheet,
            "r_max": self.r_max,
            "exclusion_radius": self.exclusion_radius,
            "n_entries": len(self.entries),
            "total_multiplicity": self.total_multiplicity,
            "channels_scanned": len(self.channels),
            "winding_total": sum(c.winding_total for c in self.channels),
            "isolated_total": sum(c.isolated_total for c in self.channels),
            "validation_channels": [{"l": c.l, "nu": c.nu, "zeros": len(c.zeros), "complete": c.complete}
                                    for c in self.validation],
            "failures": [f"l={c.l}: {msg}" for c in self.channels + self.validation for msg in c.failures],
            "incomplete": self.incomplete,
            "notes": list(self.notes),
        }


@dataclass
class CountingCurve:
    radii: np.ndarray
    counts: np.ndarray
    fitted_order: float | None = None

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float)
        self.counts = np.asarray(self.counts)
        if self.radii.shape != self.counts.shape:
            raise ValueError("radii and counts differ in length")
        if np.any(np.diff(self.radii) <= 0):
            raise ValueError("radii must be strictly increasing")
        if np.any(self.counts < 0) or np.any(np.diff(self.counts) < 0):
            raise ValueError("counts must be nonnegative and nondecreasing")

    def to_json(self, checks: dict | None = None) -> dict:
        return {
            "radii": [float(r) for r in self.radii],
            "counts": [int(c) if float(c).is_integer() else float(c) for c in self.counts],
            "fitted_order": self.fitted_order,
            "checks": checks or {},
        }


@dataclass
class CheckReport:
    name: str
    status: str
    measured: dict
    threshold: dict
    notes: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        out = {"name": self.name, "status": self.status, "measured": self.measured, "threshold": self.threshold}
        if self.notes:
            out["notes"] = self.notes
        return out


def default_exclusion(d: int, v0: float) -> float:
    if d == 2:
        return 0.5 * (1 + math.sqrt(max(v0, 0.0)))
    return 1e-2


def channel_cutoff(radius: float) -> float:
    """Largest order whose zeros can reach ``|lambda| <= radius``: the disk ``|z| < z0`` lies inside K."""
    return radius / eye_region().z0


def dyadic_radii(r_max: float, steps: int = DYADIC_STEPS) -> np.ndarray:
    return np.array([r_max * 2.0 ** (-j) for j in range(steps - 1, -1, -1)])


def _grid_lines(lo: float, hi: float, tile: float, fixed, jitter, rng, grow_lo: bool):
    n = max(1, math.ceil((hi - lo) / tile - 1e-9))
    step = (hi - lo) / n
    inner = list(np.linspace(lo, hi, n + 1)[1:-1])
    if jitter:
        inner = [p + rng.uniform(-0.05, 0.05) * step for p in inner]
        if grow_lo:
            lo -= rng.uniform(0, 0.05) * step
        hi += rng.uniform(0, 0.05) * step
    inner = [p for p in inner if all(abs(p - f) > 0.1 * step for f in fixed)]
    return sorted({lo, hi, *[p for p in inner + list(fixed) if lo < p < hi]})


def tile_half_disk(radius: float, exclusion: float, tile: float = TILE_SIZE,
                   bottom: float = BOTTOM_EDGE, jitter: bool = False, rng=None) -> list[ContourBox]:
    """
    Rectangles covering ``{|lambda| <= radius, Im lambda >= bottom}`` minus the square ``[-delta, delta] x [bottom, delta]``.

    Rectangles wholly outside the disk are dropped. ``jitter`` moves every
    grid line by a few percent of a tile (used after a boundary hit).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    delta = exclusion
    y0 = bottom
    if jitter:
        delta *= 1 + rng.uniform(0.0, 0.02)
        y0 *= 1 + rng.uniform(0.0, 0.5)
    xs = _grid_lines(-radius, radius, tile, [-delta, delta] if delta > 0 else [], jitter, rng, True)
    ys = _grid_lines(y0, radius, tile, [delta] if delta > y0 else [], jitter, rng, False)
    boxes = []
    for x_lo, x_hi in zip(xs[:-1], xs[1:]):
        for y_lo, y_hi in zip(ys[:-1], ys[1:]):
            if delta > 0 and x_lo >= -delta - 1e-12 and x_hi <= delta + 1e-12 and y_hi <= delta + 1e-12:
                continue
            dx = 0.0 if x_lo <= 0 <= x_hi else min(abs(x_lo), abs(x_hi))
            if math.hypot(dx, y_lo) > radius:
                continue
            boxes.append(ContourBox(x_lo, x_hi, y_lo, y_hi))
    return boxes


def _scan_boxes(func, boxes, radius, target_radius, tol, ftol, seed, int_tol):
    zeros, failures = [], []
    wind = iso = 0
    for i, box in enumerate(boxes):
        try:
            n = winding_count(func, box, int_tol=int_tol)
            found = isolate_zeros(func, box, target_radius, tol=tol, seed=seed + i, count=n, ftol=ftol,
                                  int_tol=int_tol)
        except (BoundaryZero, NonConvergence) as exc:
            failures.append(f"{type(exc).__name__} on {box}: {exc}")
            continue
        wind += n
        iso += sum(z.multiplicity for z in found)
        zeros.extend(z for z in found if abs(z.location) <= radius)
    return zeros, wind, iso, failures


def scan_function(func, radius: float, exclusion: float, *, tile: float = TILE_SIZE,
                  target_radius: float = TARGET_RADIUS, tol: float = 1e-10, ftol: float | None = None,
                  seed: int = 0, max_retries: int = MAX_RETRIES, l: int = 0, nu: float = 0.0,
                  winding_tol: float = WINDING_INT_TOL) -> ChannelScan:
    """
    Zeros of ``func`` in the tiled upper half disk.

    When a tile boundary lands on a zero, or a tile count is not conserved by
    its isolated zeros, the whole tiling is redrawn with seeded jitter. After
    ``max_retries`` redraws the last attempt is returned with its failures.
    """
    rng = np.random.default_rng(seed)
    result = None
    for attempt in range(max_retries + 1):
        boxes = tile_half_disk(radius, exclusion, tile, jitter=attempt > 0, rng=rng)
        zeros, wind, iso, failures = _scan_boxes(func, boxes, radius, target_radius, tol, ftol, seed, winding_tol)
        zeros.sort(key=lambda z: (z.location.real, z.location.imag))
        result = ChannelScan(l=l, nu=nu, zeros=zeros, winding_total=wind, isolated_total=iso,
                             failures=failures, attempts=attempt + 1)
        if result.complete:
            return result
    return result


def _channel_task(args):
    nu, l, pot, m, radius, exclusion, opts = args
    func = ChannelFunction(nu, pot, m, regularize=True)
    return scan_function(func, radius, exclusion, l=l, nu=nu, **opts)


def available_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def scan_sheet(pot: RadialPotential, m: int, r_max: float, nu_max: float = NU_MAX, *,
               exclusion_radius: float | None = None, tile: float = TILE_SIZE,
               target_radius: float = TARGET_RADIUS, tol: float = 1e-10, ftol: float | None = None,
               seed: int = 0, workers: int | None = None, validate: bool = True,
               winding_tol: float = WINDING_INT_TOL) -> ResonanceSet:
    """
    All resonances of ``pot`` on sheet ``m`` with modulus at most ``r_max``.

    For ``d >= 2`` every channel with ``nu <= min(nu_max, r_max R / z0)`` is
    scanned. When the ``r_max R / z0`` cutoff is the binding one, two further
    channels are scanned as a check that it loses nothing (a nonempty check
    channel marks the set incomplete).
    ``exclusion_radius`` is in physical units. Wells (negative heights) are
    not supported because the interior momentum then branches inside the
    scanned half plane.
    """
    if m == 0:
        raise ValueError("m must be nonzero: sheet 0 carries no resonances")
    if nu_max > NU_MAX:
        raise ValueError(f"nu_max must be at most {NU_MAX}")
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    if any(h < 0 for _, h in pot.steps):
        raise ValueError("scan_sheet supports nonnegative step heights only")
    d = pot.d
    sheet = resonance_sheet(d, m)
    R = pot.support_radius
    delta = default_exclusion(d, pot.v0 * R * R) / R if exclusion_radius is None else float(exclusion_radius)
    opts = dict(tile=tile, target_radius=target_radius, tol=tol, ftol=ftol, seed=seed, winding_tol=winding_tol)
    out = ResonanceSet(potential=pot, sheet=sheet, entries=[], r_max=float(r_max), exclusion_radius=delta)
    out.notes.append(f"unscanned: Im lambda < {BOTTOM_EDGE / R:g} and the square |Re lambda|, Im lambda <= {delta:g}")
    if pot.is_free:
        out.notes.append("free potential: no resonances")
        return out

    if d == 1:
        scan = scan_function(JostFunction(pot), r_max, delta, l=0, nu=-0.5, **opts)
        out.channels.append(scan)
        out.entries = [ResonanceEntry(z.location, sheet, 0, -0.5, z.multiplicity, z.residual) for z in scan.zeros]
        out.entries.sort(key=_entry_key)
        return out

    radius = r_max * R
    cut = min(float(nu_max), channel_cutoff(radius))
    alpha = (d - 2) / 2
    orders = []
    l = 0
    while l + alpha <= cut:
        orders.append((l, l + alpha))
        l += 1
    extra = []
    if float(nu_max) < channel_cutoff(radius):
        out.notes.append(f"channels truncated by nu_max={nu_max:g} below the cutoff {channel_cutoff(radius):.3f}")
    elif validate:
        while len(extra) < EXTRA_CHANNELS and l + alpha <= NU_MAX:
            extra.append((l, l + alpha))
            l += 1
        if len(extra) < EXTRA_CHANNELS:
            out.notes.append("cutoff check limited by the largest supported order")
    tasks = [(nu, ll, pot, m, radius, delta * R, opts) for ll, nu in orders + extra]
    workers = available_workers() if workers is None else workers
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            scans = list(pool.map(_channel_task, tasks))
    else:
        scans = [_channel_task(t) for t in tasks]
    out.channels = scans[:len(orders)]
    out.validation = scans[len(orders):]

    entries = []
    for scan in out.channels:
        mult = sph_harm_dim(scan.l, d)
        for z in scan.zeros:
            entries.append(ResonanceEntry(z.location / R, sheet, scan.l, scan.nu, z.multiplicity * mult, z.residual))
    entries.sort(key=_entry_key)
    out.entries = entries
    return out


def _entry_key(e: ResonanceEntry):
    return (e.modulus, e.l, e.principal.real, e.principal.imag)


def counting_function(res: ResonanceSet, radii) -> CountingCurve:
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be strictly increasing")
    mods = np.array([e.modulus for e in res.entries])
    mults = np.array([e.multiplicity for e in res.entries], dtype=np.int64)
    counts = np.array([int(mults[mods <= r].sum()) if len(mods) else 0 for r in radii], dtype=np.int64)
    return CountingCurve(radii, counts)


def upper_half_slope(radii, values) -> float:
    """Least-squares slope of ``log values`` against ``log radii`` over the upper half of the radii (positive values only)."""
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    upper = slice(len(radii) // 2, None)
    r, v = radii[upper], values[upper]
    keep = v > 0
    if keep.sum() < 2:
        raise ValueError("fewer than two positive values in the upper half of the radius range")
    return float(np.polyfit(np.log(r[keep]), np.log(v[keep]), 1)[0])


def order_of_growth(curve: CountingCurve) -> float:
    """Least-squares slope of ``log n`` against ``log r`` over the upper half of the radii; stored on the curve."""
    if np.count_nonzero(np.asarray(curve.counts) > 0) < 4:
        raise ValueError("order_of_growth needs at least 4 radii with nonzero counts")
    slope = upper_half_slope(curve.radii, curve.counts)
    curve.fitted_order = slope
    return slope


def jensen_integral(f, r: float, rtol: float = 1e-6, floor_rtol: float = 1e-10,
                    n_ref: int = 1024) -> float:
    """
    ``int_0^pi log|f(r e^{i theta})| d theta`` by adaptive quadrature.

    ``f`` takes an array of complex points. ``|f|`` may vary exponentially
    along the arc, so near-zeros are judged against a local scale: the
    largest ``|f|`` over nearby reference samples. Values are floored at
    ``floor_rtol`` times that scale; hitting the floor raises ``ValueError``,
    as does an error estimate above ``rtol * (1 + |I|)``.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    # interior samples only: the arc ends sit on the real axis, where Sigma may have its cut
    theta = (np.arange(n_ref) + 0.5) * (math.pi / n_ref)
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(np.asarray(f(r * np.exp(1j * theta)), dtype=complex)))
    if not np.all(np.isfinite(logs)):
        raise ValueError(f"f vanishes or is not finite on the arc of radius {r}")
    w = 4
    padded = np.pad(logs, w, mode="edge")
    local = np.max(np.lib.stride_tricks.sliding_window_view(padded, 2 * w + 1), axis=1)
    log_floor = math.log(floor_rtol)
    hit = [bool(np.any(logs < local + log_floor))]

    def integrand(t):
        v = abs(complex(np.asarray(f(np.array([r * complex(math.cos(t), math.sin(t))])))[0]))
        i = min(int(t / math.pi * n_ref), n_ref - 1)
        lo = local[i] + log_floor
        lv = math.log(v) if v > 0 else -math.inf
        if lv < lo:
            hit[0] = True
            return lo
        return lv

    value, err = quad(integrand, 0.0, math.pi, limit=400, epsabs=0.1 * rtol, epsrel=0.1 * rtol)
    if hit[0]:
        raise ValueError(f"the arc of radius {r} passes within {floor_rtol:g} x local scale of a zero")
    if err > rtol * (1 + abs(value)):
        raise ValueError(f"quadrature error {err:.3g} above tolerance at r={r}")
    return float(value)


def half_dyadic_radii(r_lo: float, r_hi: float) -> np.ndarray:
    """Radii ``r_hi * 2^{-j/2}`` down to ``r_lo`` (inclusive when it lies on the grid)."""
    n = int(math.floor(2 * math.log2(r_hi / r_lo) + 1e-9))
    return np.array([r_hi * 2.0 ** (-j / 2) for j in range(n, -1, -1)])


def jensen_exponent(f, radii) -> tuple[float, np.ndarray]:
    """
    Growth exponent of ``r -> int_0^pi log|f|``, fitted exactly like
    :func:`order_of_growth` so the two can be compared on one radius grid.
    """
    values = np.array([jensen_integral(f, r) for r in radii])
    if np.any(values[len(values) // 2:] <= 0):
        raise ValueError("Jensen integral not positive on the upper half of the range; exponent undefined")
    return upper_half_slope(radii, values), values


def verify_lower_bound(curve: CountingCurve, d: int, tol: float = 0.15) -> CheckReport:
    """
    PASS when the fitted order is at least ``d - tol`` and, on the upper half
    of the radii, ``n(r) >= 0.5 c r^d`` for the least-squares ``c`` of ``n ~ c r^d``.
    """
    if curve.fitted_order is None:
        raise ValueError("curve has no fitted_order; call order_of_growth first")
    upper = slice(len(curve.radii) // 2, None)
    r = curve.radii[upper]
    n = np.asarray(curve.counts[upper], dtype=float)
    rd = r ** d
    c = float(np.dot(n, rd) / np.dot(rd, rd))
    ratios = n / (c * rd) if c > 0 else np.zeros_like(n)
    ok = curve.fitted_order >= d - tol and c > 0 and bool(np.all(ratios >= 0.5))
    return CheckReport(
        name=f"lower_bound_d{d}",
        status=PASS if ok else FAIL,
        measured={"fitted_order": curve.fitted_order, "c_fit": c,
                  "min_pointwise_ratio": float(ratios.min()) if len(ratios) else 0.0},
        threshold={"fitted_order_min": d - tol, "pointwise_ratio_min": 0.5},
    )


def zworski_1d_check(curve: CountingCurve, supp_len: float, rel_tol: float = 0.05) -> CheckReport:
    """Ratio ``n(r) pi / (2 |supp V| r)`` at the largest radius; PASS within ``rel_tol`` of 1."""
    r = float(curve.radii[-1])
    n = float(curve.counts[-1])
    ratio = n * math.pi / (2 * supp_len * r)
    notes = "empty resonance set" if n == 0 else ""
    ok = n > 0 and abs(ratio - 1) <= rel_tol
    return CheckReport(
        name="zworski_1d",
        status=PASS if ok else FAIL,
        measured={"ratio": ratio, "count": n, "radius": r},
        threshold={"ratio_min": 1 - rel_tol, "ratio_max": 1 + rel_tol},
        notes=notes,
    )


def symmetry_check(set_m: ResonanceSet, set_negm: ResonanceSet, rtol: float = 1e-6) -> CheckReport:
    """
    Perfect matching of principal points ``lambda0 <-> -conj(lambda0)``.

    Pairs must agree in channel and multiplicity and lie within
    ``rtol * (1 + |lambda|)``. For odd dimension pass the sheet -1 set twice.
    """
    a = [e for e in set_m.entries]
    b = [e for e in set_negm.entries]
    measured = {"n_m": len(a), "n_neg_m": len(b)}
    threshold = {"distance_rtol": rtol}
    if len(a) != len(b):
        return CheckReport("symmetry", FAIL, {**measured, "matched": 0}, threshold, "entry counts differ")
    if not a:
        return CheckReport("symmetry", PASS, {**measured, "matched": 0, "max_distance": 0.0}, threshold)
    pa = np.array([e.principal for e in a])
    pb = np.array([-np.conj(e.principal) for e in b])
    dist = np.abs(pa[:, None] - pb[None, :])
    allowed = dist <= rtol * (1 + np.abs(pa))[:, None]
    same = np.array([[ea.l == eb.l and ea.multiplicity == eb.multiplicity for eb in b] for ea in a])
    ok_pairs = allowed & same
    cost = np.where(ok_pairs, dist, 1e6 + dist)
    rows, cols = linear_sum_assignment(cost)
    good = ok_pairs[rows, cols]
    matched = int(good.sum())
    status = PASS if matched == len(a) else FAIL
    return CheckReport("symmetry", status,
                       {**measured, "matched": matched, "max_distance": float(dist[rows, cols][good].max(initial=0.0))},
                       threshold)


def channel_entries(res: ResonanceSet, l: int) -> list[ResonanceEntry]:
    return [e for e in res.entries if e.l == l]


def channel_zero_count_check(pot: RadialPotential, nu: float, m: int, radius_factor: float = 1.25,
                             epsilon: float = 0.1, exclusion: float | None = None, **opts) -> CheckReport:
    """
    At least ``(1 - epsilon) nu`` zeros of the sheet function of one channel
    in the half disk of (rescaled) radius ``radius_factor * nu``.
    """
    rp = pot.rescaled()
    delta = default_exclusion(pot.d, rp.v0) if exclusion is None else exclusion
    scan = scan_function(ChannelFunction(nu, pot, m, regularize=True), radius_factor * nu, delta,
                         nu=nu, **opts)
    n = sum(z.multiplicity for z in scan.zeros)
    ok = scan.complete and n >= (1 - epsilon) * nu
    return CheckReport(f"channel_zero_count_nu{nu:g}_m{m}", PASS if ok else FAIL,
                       {"zeros": n, "radius": radius_factor * nu, "complete": scan.complete},
                       {"zeros_min": (1 - epsilon) * nu})


def seed_fidelity_check(pot: RadialPotential, nu: float, m: int, h_margin: float = 0.15,
                        max_iter: int = 8, residual: float = 1e-10, min_fraction: float = 0.9,
                        tol: float = 1e-10) -> CheckReport:
    """
    Newton from the large-order seeds: the fraction that converges within
    ``max_iter`` iterations with ``|D| <= residual``, and pairwise distinctness of the limits.
    """
    rp = pot.rescaled()
    if not rp.single_step:
        raise ValueError("seeds are defined for a single step")
    func = ChannelFunction(nu, pot, m)
    seeds = seed_lambdas(nu, sheet_coefficient(nu, m), rp.v0, h_margin)
    found, iters = [], []
    for s0 in seeds:
        try:
            z = newton_refine(func, s0, tol=tol, max_iter=max_iter, ftol=residual)
        except NonConvergence:
            continue
        found.append(z.location)
        iters.append(z.newton_iters)
    locs = np.array(found)
    if len(locs) > 1:
        dist = np.abs(locs[:, None] - locs[None, :])
        np.fill_diagonal(dist, np.inf)
        min_sep = float(dist.min())
        distinct = bool(np.all(dist > 1e-6 * (1 + np.abs(locs))[:, None]))
    else:
        min_sep, distinct = math.inf, True
    frac = len(found) / len(seeds) if len(seeds) else 0.0
    ok = len(seeds) > 0 and frac >= min_fraction and distinct
    return CheckReport(f"seed_fidelity_nu{nu:g}_m{m}", PASS if ok else FAIL,
                       {"seeds": len(seeds), "converged": len(found), "converged_fraction": frac,
                        "max_iterations": max(iters, default=0), "min_separation": min_sep,
                        "distinct": distinct},
                       {"converged_fraction_min": min_fraction, "max_iterations": max_iter,
                        "residual_max": residual})


def jensen_check(pot: RadialPotential, nu: float, m: int, r_lo: float = 20.0, r_hi: float = 160.0,
                 max_gap: float = 0.3, **opts) -> CheckReport:
    """
    Compare the growth exponent of the Jensen integral of one channel's sheet
    function with the order of its zero count, both fitted by
    :func:`upper_half_slope` on the half-dyadic radii from ``r_lo`` to ``r_hi`` (rescaled).

    A consistency check only: the underlying equivalence assumes control of
    ``|h'/h|`` on the real axis, which is not tested here.
    """
    rp = pot.rescaled()
    radii = half_dyadic_radii(r_lo, r_hi)
    scan = scan_function(ChannelFunction(nu, pot, m, regularize=True), r_hi,
                         default_exclusion(pot.d, rp.v0), nu=nu, **opts)
    mods = np.array([abs(z.location) for z in scan.zeros])
    counts = np.array([int(sum(z.multiplicity for z, r0 in zip(scan.zeros, mods) if r0 <= r)) for r in radii])
    curve = CountingCurve(radii, counts)
    count_order = order_of_growth(curve)
    exponent, values = jensen_exponent(ChannelFunction(nu, pot, m), radii)
    gap = abs(exponent - count_order)
    ok = scan.complete and gap <= max_gap
    return CheckReport(f"jensen_nu{nu:g}_m{m}", PASS if ok else FAIL,
                       {"count_order": count_order, "jensen_exponent": exponent, "gap": gap,
                        "radii": [float(r) for r in radii], "counts": [int(c) for c in counts],
                        "jensen_values": [float(v) for v in values]},
                       {"gap_max": max_gap})


def merge_curves(curves) -> CountingCurve:
    curves = list(curves)
    radii = curves[0].radii
    for c in curves[1:]:
        if not np.array_equal(c.radii, radii):
            raise ValueError("curves must share radii")
    return CountingCurve(radii, np.sum([c.counts for c in curves], axis=0))


CSV_HEADER = "sheet_m,l,nu,re_lambda,im_lambda,multiplicity,residual"


class ResonanceFormatError(ValueError):
    def __init__(self, path, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.lineno = lineno


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def format_resonances(entries) -> str:
    """CSV text; ``re_lambda, im_lambda`` are the plane value ``e^{i m pi} lambda0`` of each entry."""
    lines = [CSV_HEADER]
    for e in entries:
        v = e.projected
        lines.append(",".join([str(e.sheet), str(e.l), _g17(e.nu), _g17(v.real), _g17(v.imag),
                               str(e.multiplicity), _g17(e.residual)]))
    return "\n".join(lines) + "\n"


def write_resonances(entries, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_resonances(entries))


def read_resonances(path) -> list[ResonanceEntry]:
    """Parse a resonance CSV back into entries (bit-exact for files written by :func:`write_resonances`)."""
    out = []
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or ",".join(rows[0]) != CSV_HEADER:
        raise ResonanceFormatError(path, 1, f"expected header {CSV_HEADER!r}")
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 7:
            raise ResonanceFormatError(path, lineno, f"expected 7 fields, got {len(row)}")
        try:
            sheet, l = int(row[0]), int(row[1])
            nu, re, im = float(row[2]), float(row[3]), float(row[4])
            mult, resid = int(row[5]), float(row[6])
        except ValueError as exc:
            raise ResonanceFormatError(path, lineno, str(exc)) from None
        v = complex(re, im)
        out.append(ResonanceEntry(v if sheet % 2 == 0 else -v, sheet, l, nu, mult, resid))
    return out


def write_curve(curve: CountingCurve, path, checks: dict | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(curve.to_json(checks), fh, indent=2)
        fh.write("\n")
