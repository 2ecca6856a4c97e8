"""
Golden-value fixtures for the Bessel routines.

Two text files live in ``resonlab/data``:

``bessel_grid.txt``
    the evaluation grid, one ``nu re_z im_z kind`` record per line;
``bessel_golden.txt``
    reference values, one ``nu re_z im_z re_f im_f kind`` record per line,
    computed offline by ``tools/make_bessel_fixtures.py`` with mpmath at 50+
    significant digits.

Only the grid is regenerated here. Reference values never are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import complexfn

KINDS = ("J", "Y", "H1")

GRID_ORDERS = (0, 0.5, 1, 1.5, 2, 2.5, 3, 4.5, 5, 7, 9.5, 10, 12.5, 15, 20,
               25.5, 30, 35, 40, 45.5, 50, 55, 59.5, 60)
GRID_MODULI = (0.1, 0.7, 3.0, 12.0, 45.0, 130.0, 200.0)
GRID_ARGS = (-3 * math.pi / 4, -math.pi / 3, 0.0, math.pi / 5, math.pi / 2, 5 * math.pi / 6)


def data_path(name: str) -> Path:
    return Path(str(resources.files("resonlab").joinpath("data", name)))


GRID_PATH = data_path("bessel_grid.txt")
GOLDEN_PATH = data_path("bessel_golden.txt")


class FixtureFormatError(ValueError):
    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class GoldenRecord:
    nu: float
    z: complex
    value: complex
    kind: str
    lineno: int = 0


@dataclass
class FixtureReport:
    n_checked: int
    rtol: float
    failures: list = field(default_factory=list)   # (relerr, record, computed)
    worst: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.n_checked > 0 and not self.failures


def make_grid(nu_max: float = 60.0):
    """Deterministic evaluation grid: (nu, z, kind) for every order <= nu_max."""
    out = []
    for nu in GRID_ORDERS:
        if nu > nu_max:
            continue
        for r in GRID_MODULI:
            for a in GRID_ARGS:
                z = complex(r * math.cos(a), r * math.sin(a))
                for kind in KINDS:
                    out.append((float(nu), z, kind))
    return out


def format_float(x: float) -> str:
    return f"{x:.17g}" if x != 0 else "0"


def write_grid(path, grid) -> None:
    path = Path(path)
    lines = ["# nu re_z im_z kind"]
    for nu, z, kind in grid:
        lines.append(f"{format_float(nu)} {format_float(z.real)} {format_float(z.imag)} {kind}")
    path.write_text("\n".join(lines) + "\n")


def read_grid(path=GRID_PATH):
    out = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4 or parts[3] not in KINDS:
            raise FixtureFormatError(path, lineno, f"expected 'nu re_z im_z kind', got {line!r}")
        try:
            out.append((float(parts[0]), complex(float(parts[1]), float(parts[2])), parts[3]))
        except ValueError as exc:
            raise FixtureFormatError(path, lineno, str(exc)) from None
    return out


def read_golden(path=GOLDEN_PATH):
    records = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 6 or parts[5] not in KINDS:
            raise FixtureFormatError(path, lineno, f"expected 'nu re_z im_z re_f im_f kind', got {line!r}")
        try:
            nu, zr, zi, fr, fi = (float(p) for p in parts[:5])
        except ValueError as exc:
            raise FixtureFormatError(path, lineno, str(exc)) from None
        if not all(map(math.isfinite, (nu, zr, zi, fr, fi))):
            raise FixtureFormatError(path, lineno, "non-finite field")
        records.append(GoldenRecord(nu, complex(zr, zi), complex(fr, fi), parts[5], lineno))
    return records


def evaluate(kind: str, nu: float, z):
    if kind == "J":
        return complexfn.bessel_j(nu, z)
    if kind == "Y":
        return complexfn.bessel_y(nu, z)
    if kind == "H1":
        return complexfn.hankel1(nu, z)
    raise ValueError(f"unknown kind {kind!r}")


def check_golden(path=GOLDEN_PATH, rtol: float = 1e-10, n_worst: int = 5) -> FixtureReport:
    """Compare the Bessel routines against every golden record at relative tolerance ``rtol``."""
    records = read_golden(path)
    errs = []
    # group by (kind, nu) so each scipy call is vectorized
    groups: dict = {}
    for rec in records:
        groups.setdefault((rec.kind, rec.nu), []).append(rec)
    for (kind, nu), recs in groups.items():
        z = np.array([r.z for r in recs])
        got = np.atleast_1d(evaluate(kind, nu, z))
        for rec, g in zip(recs, got):
            rel = abs(g - rec.value) / abs(rec.value)
            errs.append((float(rel), rec, complex(g)))
    errs.sort(key=lambda e: (-e[0], e[1].lineno))
    report = FixtureReport(n_checked=len(records), rtol=rtol)
    report.failures = [e for e in errs if not e[0] <= rtol]
    report.worst = errs[:n_worst]
    return report
