import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from resonlab import radial as rd
from resonlab.rootcount import (
    BoundaryZero,
    ContourBox,
    NonConvergence,
    isolate_zeros,
    newton_refine,
    winding_count,
)

UNIT = ContourBox(0, 2, 0, 2)


def match_roots(found, roots, radius):
    """Every expected root has a found zero within ``radius`` carrying its multiplicity."""
    if sum(z.multiplicity for z in found) != sum(k for _, k in roots):
        return False
    used = set()
    for r, k in roots:
        hits = [i for i, z in enumerate(found) if i not in used and abs(z.location - r) <= radius]
        if not hits:
            return False
        i = min(hits, key=lambda i: abs(found[i].location - r))
        if found[i].multiplicity != k:
            return False
        used.add(i)
    return True


def test_simple_zero():
    assert winding_count(lambda z: z - (1 + 1j), UNIT) == 1


def test_double_zero():
    assert winding_count(lambda z: (z - (1 + 1j)) ** 2, UNIT) == 2


def test_sine_zero_at_pi():
    assert winding_count(np.sin, ContourBox(2.5, 3.5, -0.5, 0.5)) == 1


def test_no_zero_outside():
    assert winding_count(lambda z: z - 5, UNIT) == 0


def test_boundary_zero_detected():
    with pytest.raises(BoundaryZero):
        winding_count(lambda z: z - 1.0, UNIT)


def test_isolate_square_roots_of_2i():
    found = isolate_zeros(lambda z: z * z - 2j, ContourBox(-2, 2, -2, 2), 1e-6)
    locs = sorted((z.location for z in found), key=lambda z: z.real)
    assert [z.multiplicity for z in found] == [1, 1]
    assert abs(locs[0] + 1 + 1j) < 1e-10 and abs(locs[1] - 1 - 1j) < 1e-10


def test_isolate_double_zero_multiplicity():
    found = isolate_zeros(lambda z: (z - 0.3 - 0.4j) ** 2 * (z + 1), ContourBox(-2, 2, -2, 2), 1e-4)
    assert sorted(z.multiplicity for z in found) == [1, 2]


def test_free_sheet_function_has_no_zeros():
    f = rd.ChannelFunction(3, rd.RadialPotential.step(2, 0.0), 1)
    assert isolate_zeros(f, ContourBox(-20, 20, 0.1, 20), 1e-4) == []


def test_grid_roots_recovered():
    roots = [complex(x, y) for x in (-1.5, -0.5, 0.5, 1.5) for y in (0.25, 1.25)]

    def f(z):
        z = np.asarray(z, dtype=complex)
        return np.prod(z[..., None] - np.array(roots), axis=-1)

    found = isolate_zeros(f, ContourBox(-2.1, 2.05, -0.1, 2.07), 1e-4)
    assert match_roots(found, [(r, 1) for r in roots], 1e-4)


def test_newton_sqrt2():
    z = newton_refine(lambda x: x * x - 2, 1.4)
    assert abs(z.location - math.sqrt(2)) < 1e-10
    assert z.newton_iters <= 6


def test_newton_sine():
    z = newton_refine(np.sin, 3.1)
    assert abs(z.location - math.pi) < 1e-12


def test_newton_divergence_reported():
    with pytest.raises(NonConvergence):
        newton_refine(lambda z: np.exp(z) , 0.0, max_iter=40)


def test_newton_analytic_derivative():
    z = newton_refine(lambda x: x**3 - 1j, 0.5 + 0.5j, df=lambda x: 3 * x**2)
    assert abs(z.location**3 - 1j) < 1e-10


def test_determinism():
    rng = np.random.default_rng(7)
    f, _ = oracles.random_polynomial(rng, ContourBox(-2, 2, -2, 2))
    box = ContourBox(-2, 2, -2, 2)
    assert isolate_zeros(f, box, 1e-4, seed=3) == isolate_zeros(f, box, 1e-4, seed=3)


def test_random_polynomials_recovered():
    rng = np.random.default_rng(20240611)
    box = ContourBox(-2, 2, -2, 2)
    for _ in range(200):
        f, roots = oracles.random_polynomial(rng, box)
        assert winding_count(f, box) == sum(k for _, k in roots)
        found = isolate_zeros(f, box, 1e-4)
        assert match_roots(found, roots, 1e-4)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), fx=st.floats(0.2, 0.8), fy=st.floats(0.2, 0.8))
def test_subdivision_conserves_count(seed, fx, fy):
    box = ContourBox(-2, 2, -2, 2)
    f, _ = oracles.random_polynomial(np.random.default_rng(seed), box)
    try:
        parent = winding_count(f, box)
        children = [winding_count(f, c) for c in box.split(fx, fy)]
    except BoundaryZero:
        return  # a split line through a root; isolate_zeros retries elsewhere
    assert sum(children) == parent


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_refined_zero_encloses_a_zero(seed):
    box = ContourBox(-2, 2, -2, 2)
    f, _ = oracles.random_polynomial(np.random.default_rng(seed), box, double_prob=0.0)
    tol = 1e-10
    for z in isolate_zeros(f, box, 1e-4, tol=tol):
        assert winding_count(f, ContourBox.square(z.location, 10 * tol * (1 + abs(z.location)))) >= 1


def test_box_validation():
    with pytest.raises(ValueError):
        ContourBox(1, 1, 0, 1)
