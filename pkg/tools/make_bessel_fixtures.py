#!/usr/bin/env python3
"""
Offline oracle for the Bessel golden file.

Reads the grid, evaluates every point with mpmath at two working precisions
(60 and 90 digits) and keeps a record only when both agree to 1e-30 relative.
For arg z > -pi/2, H1 is formed from K_nu
(``H1_nu(z) = 2/(pi i) e^{-i nu pi/2} K_nu(-i z)``) because J + iY cancels
catastrophically when Im z is large.

Points whose relative condition number |z f'(z) / f(z)| exceeds 1e3 are
dropped: a relative check at 1e-10 is meaningless that close to a zero.
Values outside the normal double range are dropped as well.

Usage::

    python tools/make_bessel_fixtures.py [grid] [out]
"""

import sys
from pathlib import Path

import mpmath

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
from resonlab import fixtures  # noqa: E402


def value(kind, nu, z):
    nu = mpmath.mpf(nu)
    if kind == "J":
        return mpmath.besselj(nu, z)
    if kind == "Y":
        return mpmath.bessely(nu, z)
    if mpmath.arg(z) <= -mpmath.pi / 2:
        # lower half plane: H1 is exponentially large, J + iY does not cancel
        return mpmath.besselj(nu, z) + 1j * mpmath.bessely(nu, z)
    k = mpmath.besselk(nu, -1j * z)
    return 2 / (mpmath.pi * 1j) * mpmath.exp(-1j * nu * mpmath.pi / 2) * k


def derivative(kind, nu, z):
    # C_nu' = (C_{nu-1} - C_{nu+1}) / 2 holds for J, Y and H1 alike
    return (value(kind, nu - 1, z) - value(kind, nu + 1, z)) / 2


def oracle(kind, nu, zr, zi):
    results = []
    for dps in (60, 90):
        with mpmath.workdps(dps):
            z = mpmath.mpc(mpmath.mpf(zr), mpmath.mpf(zi))
            results.append((value(kind, nu, z), derivative(kind, nu, z), z))
    (f60, _, _), (f90, d90, z90) = results
    with mpmath.workdps(90):
        if f90 == 0 or abs(f60 - f90) > mpmath.mpf(10) ** -30 * abs(f90):
            return None, "precision disagreement"
        cond = abs(z90 * d90 / f90)
    if cond > 1e3:
        return None, f"ill-conditioned (kappa={float(cond):.3g})"
    mag = abs(f90)
    if not (mpmath.mpf("1e-290") < mag < mpmath.mpf("1e290")):
        return None, "outside double range"
    return complex(f90), None


def main():
    grid_path = Path(sys.argv[1]) if len(sys.argv) > 1 else fixtures.GRID_PATH
    out_path = Path(sys.argv[2]) if len(sys.argv) > 2 else fixtures.GOLDEN_PATH
    grid = fixtures.read_grid(grid_path)
    lines = [
        "# nu re_z im_z re_f im_f kind",
        "# reference values: mpmath, 60 vs 90 digit agreement to 1e-30, kappa <= 1e3",
    ]
    dropped = 0
    for nu, z, kind in grid:
        f, why = oracle(kind, nu, z.real, z.imag)
        if f is None:
            dropped += 1
            continue
        ff = fixtures.format_float
        lines.append(f"{ff(nu)} {ff(z.real)} {ff(z.imag)} {ff(f.real)} {ff(f.imag)} {kind}")
    out_path.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 2} records to {out_path} ({dropped} grid points dropped)")


if __name__ == "__main__":
    main()
