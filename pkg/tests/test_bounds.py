import math

import mpmath
import numpy as np
import pytest

from bvpdn import bounds
from bvpdn.bounds import BoundParams

UNIT = BoundParams(1.0, 1.0, 1.0, 0.0)


def mp_constants():
    mpmath.mp.dps = 40
    pi2, log4, s = mpmath.pi**2, mpmath.log(4), mpmath.sqrt
    return {
        "n1_0": 2 * log4 + s(2 * pi2 / 3 - 2) / 2 + 4 * s(pi2 / 6),
        "n1_1": 2 * log4 + 4 * s(pi2 / 6),
        "n2_0": 4 * log4 + s(2 * pi2 / 3 - 2) + mpmath.mpf(16) / 3 * s(pi2 / 6),
        "n2_1": 4 * log4 + mpmath.mpf(16) / 3 * s(pi2 / 6),
        "n3_0": 2 * s(pi2 / 3 + 1) + s(pi2 / 6 - 1) + s(pi2 / 3 - mpmath.mpf(1) / 2),
        "n3_1": 2 * s(pi2 / 3 + 1) + s(2 * pi2 / 3 - 2) + s(pi2 / 3 - mpmath.mpf(1) / 2),
        "n4_0": 2 * (log4 + 1) + mpmath.mpf(2) / 3 * (s(pi2 / 6 - 1) + s(pi2 / 3 - mpmath.mpf(1) / 2)),
        "n4_1": 2 * (log4 + 1) + s(2 * pi2 / 3 - 2) + mpmath.mpf(2) / 3 * s(pi2 / 3 - mpmath.mpf(1) / 2),
        "m1": (2 * mpmath.pi / s(3) + 1 + s(2 * pi2 / 3 - 2) + s(pi2 / 6 - mpmath.mpf(5) / 4) + s(pi2 / 6 - 1)
               + s(pi2 / 3 - mpmath.mpf(11) / 4)) / 2,
        "m2": log4 + 1 + s(2 * pi2 / 3 - 2)
        + mpmath.mpf(2) / 3 * (s(pi2 / 6 - mpmath.mpf(5) / 4) + s(pi2 / 6 - 1) + s(pi2 / 3 - mpmath.mpf(11) / 4)),
    }


@pytest.mark.parametrize(
    "name,fn",
    [
        ("n1_0", lambda: bounds.n1(0)),
        ("n1_1", lambda: bounds.n1(1)),
        ("n2_0", lambda: bounds.n2(0)),
        ("n2_1", lambda: bounds.n2(1)),
        ("n3_0", lambda: bounds.n3(0)),
        ("n3_1", lambda: bounds.n3(1)),
        ("n4_0", lambda: bounds.n4(0)),
        ("n4_1", lambda: bounds.n4(1)),
        ("m1", bounds.m1),
        ("m2", bounds.m2),
    ],
)
def test_constants_match_high_precision(name, fn):
    assert abs(fn() - float(mp_constants()[name])) <= 1e-12


def test_frozen_constant_values():
    assert bounds.n1(0) == pytest.approx(8.9728039, abs=1e-6)
    assert bounds.n1(1) == pytest.approx(7.9027880, abs=1e-6)
    assert bounds.n2(0) == pytest.approx(14.5254750, abs=1e-6)
    assert bounds.n3(0) == pytest.approx(6.6157671, abs=1e-6)
    assert bounds.n4(0) == pytest.approx(6.4215005, abs=1e-6)
    assert bounds.n4(1) == pytest.approx(8.0261471, abs=1e-6)
    assert bounds.m1() == pytest.approx(4.4669517, abs=1e-6)
    assert bounds.m2() == pytest.approx(5.9705081, abs=1e-6)
    assert bounds.m1() > bounds.m2() / 2 > 0


def test_positivity_and_monotonicity_in_t():
    ts = np.linspace(0, 1, 201)
    for fn in (bounds.n1, bounds.n2, bounds.n3, bounds.n4):
        assert all(fn(t) > 0 for t in ts)
    for fn in (bounds.n1, bounds.n2):
        vals = [fn(t) for t in ts]
        assert all(b <= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("t", [-0.1, 1.1, float("nan")])
def test_t_domain(t):
    with pytest.raises(ValueError):
        bounds.n1(t)


@pytest.mark.parametrize("kwargs", [{"L1": -1.0}, {"L2": float("inf")}, {"c_abs": float("nan")}, {"L3": "1"}])
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        BoundParams(**kwargs)


def test_l4_l5_examples():
    assert bounds.l4(UNIT) == pytest.approx(4 / math.pi + bounds.n3(0) + bounds.n4(0), abs=1e-15)
    assert bounds.l4(UNIT) == pytest.approx(14.3105071, abs=1e-6)
    assert bounds.l5(UNIT) == pytest.approx(10.4374599, abs=1e-6)
    assert bounds.l4(BoundParams(c_abs=1.0)) == 2.0
    assert bounds.l5(BoundParams(c_abs=1.0)) == 1.0
    with pytest.raises(ValueError):
        bounds.l4(BoundParams())


def test_schwarz_bound_examples():
    assert bounds.schwarz_bound(BoundParams(), 0.0, 0.5) == 0.0
    assert bounds.schwarz_bound(BoundParams(), 1.0, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert bounds.schwarz_bound(BoundParams(L2=1.0), 0.0, 0.0) == bounds.n1(0)


def test_pick_bound_examples():
    assert bounds.pick_bound(BoundParams(), 0.0, 0.3) == 0.0
    assert bounds.pick_bound(BoundParams(), 1.0, 0.0) == pytest.approx(4 / math.pi)
    for t in (0.0, 0.5, 0.99):
        assert bounds.pick_bound(BoundParams(c_abs=1.0), 0.0, t) == 2.0
    with pytest.raises(ValueError):
        bounds.pick_bound(UNIT, 1.0, 1.0)


def test_degeneration_to_classical_bounds():
    # harmonic data: the bounds collapse to 4/pi arctan t and 4/pi / (1 - t^2)
    for t in (0.1, 0.5, 0.9):
        assert bounds.schwarz_bound(BoundParams(), 2.0, t) == pytest.approx(8 / math.pi * math.atan(t))
        assert bounds.pick_bound(BoundParams(), 2.0, t) == pytest.approx(8 / math.pi / (1 - t * t))


def test_phi_examples():
    assert bounds.phi(0.0, UNIT) == 1 / bounds.l4(UNIT)
    assert bounds.phi(0.0015, UNIT) > 0
    assert bounds.phi(0.002, UNIT) < 0
    for r in (-0.1, 1.0):
        with pytest.raises(ValueError):
            bounds.phi(r, UNIT)


def test_phi_strictly_decreasing_random_params():
    rng = np.random.default_rng(33)
    grid = np.linspace(0.0, 0.99, 100)
    for _ in range(1000):
        L1, L2, L3, c = rng.uniform(0, 5, size=4)
        p = BoundParams(float(L1), float(L2), float(L3), float(c))
        vals = [bounds.phi(r, p) for r in grid]
        assert all(b < a for a, b in zip(vals, vals[1:]))


def test_landau_radius_unit_params():
    res = bounds.landau_radius(UNIT, 1e-12)
    assert 0.0015 < res.r0 < 0.002
    assert abs(bounds.phi(res.r0, UNIT)) <= 1e-12
    lo, hi = res.bracket
    assert bounds.phi(lo, UNIT) > 0 > bounds.phi(hi, UNIT)
    assert res.r0 == pytest.approx(0.0016645465698, abs=1e-12)
    assert res.R0_lower == pytest.approx(1.02495819e-4, rel=1e-7)
    assert res.R0_lower == bounds.covered_radius(UNIT, res.r0)


def test_tolerance_shrink_moves_root_little():
    rng = np.random.default_rng(4)
    for _ in range(50):
        p = BoundParams(*map(float, rng.uniform(0, 3, size=4)))
        for tol in (1e-8, 1e-10, 1e-12):
            a = bounds.landau_radius(p, tol).r0
            b = bounds.landau_radius(p, tol / 10).r0
            assert abs(a - b) <= 10 * tol


def test_landau_radius_only_l3():
    p = BoundParams(L3=1.0)
    res = bounds.landau_radius(p)
    assert abs(bounds.phi(res.r0, p)) <= 1e-12
    lo, hi = res.bracket
    assert bounds.phi(lo, p) > 0 > bounds.phi(hi, p)
    direct = 1 / bounds.n4(0) - 2 * res.r0 * bounds.m2() - 8 * math.log((1 + res.r0) / (1 - res.r0))
    assert abs(direct) <= 1e-12


def test_landau_identity_case():
    # L1 = 1 only: 1/L4 = 2 r (4/pi)(2 - r)/(1 - r)^2 with L4 = 4/pi
    res = bounds.landau_radius(BoundParams(L1=1.0))
    r = res.r0
    assert abs(math.pi / 4 - 2 * r * (4 / math.pi) * (2 - r) / (1 - r) ** 2) <= 1e-12
    assert r == pytest.approx(0.1257702923496382, abs=1e-11)


def test_landau_radius_errors():
    with pytest.raises(ValueError):
        bounds.landau_radius(BoundParams())
    with pytest.raises(ValueError):
        bounds.landau_radius(UNIT, 0.0)
    # only c or only L2 still has a root through L5
    assert bounds.landau_radius(BoundParams(c_abs=1.0)).r0 > 0


def test_landau_result_dict():
    d = bounds.landau_radius(UNIT).as_dict()
    assert set(d) == {"r0", "R0_lower", "L4", "L5", "bracket", "iterations"}
