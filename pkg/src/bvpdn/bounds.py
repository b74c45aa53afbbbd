"""Closed-form constants, pointwise derivative bounds and the Landau radius."""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

LOG4 = math.log(4.0)
PI2 = math.pi**2

# square roots shared by the closed forms
_S_2PI2_3_M2 = math.sqrt(2.0 * PI2 / 3.0 - 2.0)
_S_PI2_6 = math.sqrt(PI2 / 6.0)
_S_PI2_3_P1 = math.sqrt(PI2 / 3.0 + 1.0)
_S_PI2_6_M1 = math.sqrt(PI2 / 6.0 - 1.0)
_S_PI2_3_MHALF = math.sqrt(PI2 / 3.0 - 0.5)
_S_PI2_6_M5_4 = math.sqrt(PI2 / 6.0 - 1.25)
_S_PI2_3_M11_4 = math.sqrt(PI2 / 3.0 - 2.75)

MAX_BISECTION_STEPS = 200
RIGHT_END_GAP = 1e-9


def _check_t(t: float, *, closed: bool = True) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0.0 or t > 1.0 or (not closed and t == 1.0):
        interval = "[0, 1]" if closed else "[0, 1)"
        raise ValueError(f"t must lie in {interval}, got {t}")
    return t


def n1(t: float) -> float:
    t = _check_t(t)
    return 2.0 * LOG4 + 0.5 * (1.0 - t * t) * _S_2PI2_3_M2 + 4.0 * _S_PI2_6


def n2(t: float) -> float:
    t = _check_t(t)
    return 4.0 * LOG4 + (1.0 - t * t) * _S_2PI2_3_M2 + (16.0 / 3.0) * _S_PI2_6


def n3(t: float) -> float:
    t = _check_t(t)
    return 2.0 * _S_PI2_3_P1 + t * _S_2PI2_3_M2 + (1.0 - t * t) * _S_PI2_6_M1 + _S_PI2_3_MHALF


def n4(t: float) -> float:
    t = _check_t(t)
    return (
        2.0 * (LOG4 + 1.0)
        + t * _S_2PI2_3_M2
        + (2.0 / 3.0) * (1.0 - t * t) * _S_PI2_6_M1
        + (2.0 / 3.0) * _S_PI2_3_MHALF
    )


def m1() -> float:
    return 0.5 * (
        2.0 * math.pi / math.sqrt(3.0) + 1.0 + _S_2PI2_3_M2 + _S_PI2_6_M5_4 + _S_PI2_6_M1 + _S_PI2_3_M11_4
    )


def m2() -> float:
    return LOG4 + 1.0 + _S_2PI2_3_M2 + (2.0 / 3.0) * (_S_PI2_6_M5_4 + _S_PI2_6_M1 + _S_PI2_3_M11_4)


@dataclass(frozen=True)
class BoundParams:
    """Majorants of the data: ``L1 >= sup|gamma0|``, ``L2 >= sup|gamma|``, ``L3 >= sup|g|``."""

    L1: float = 0.0
    L2: float = 0.0
    L3: float = 0.0
    c_abs: float = 0.0

    def __post_init__(self):
        for name in ("L1", "L2", "L3", "c_abs"):
            v = getattr(self, name)
            if not (isinstance(v, numbers.Real) and math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be a finite nonnegative number, got {v!r}")

    def as_dict(self) -> dict:
        return {"L1": self.L1, "L2": self.L2, "L3": self.L3, "c_abs": self.c_abs}


def l4(p: BoundParams) -> float:
    value = 2.0 * p.c_abs + (4.0 / math.pi) * p.L1 + p.L2 * n3(0.0) + p.L3 * n4(0.0)
    if value <= 0.0:
        raise ValueError("L4 vanishes when all parameters are zero; the Landau radius is undefined")
    return value


def l5(p: BoundParams) -> float:
    return p.c_abs + p.L2 * m1() + p.L3 * m2()


def schwarz_bound(p: BoundParams, P0_abs: float, t: float) -> float:
    """Bound on ``|w(z)|`` at ``|z| = t``.

    ``P0_abs`` is the sup of the harmonic part, either sampled or replaced
    by its majorant ``L1``.
    """
    t = _check_t(t)
    return (4.0 / math.pi) * P0_abs * math.atan(t) + p.c_abs + p.L2 * n1(t) + p.L3 * n2(t)


def pick_bound(p: BoundParams, P0_abs: float, t: float) -> float:
    """Bound on ``|w_z| + |w_zbar|`` at ``|z| = t < 1``."""
    t = _check_t(t, closed=False)
    return (4.0 / math.pi) * P0_abs / (1.0 - t * t) + 2.0 * p.c_abs + p.L2 * n3(t) + p.L3 * n4(t)


def phi(r: float, p: BoundParams) -> float:
    """Strictly decreasing function whose root is the Landau radius."""
    r = float(r)
    if not (0.0 <= r < 1.0):
        raise ValueError(f"r must lie in [0, 1), got {r}")
    return (
        1.0 / l4(p)
        - 2.0 * r * ((4.0 * p.L1 / math.pi) * (2.0 - r) / (1.0 - r) ** 2 + l5(p))
        - 8.0 * p.L3 * math.log((1.0 + r) / (1.0 - r))
    )


def covered_radius(p: BoundParams, r0: float) -> float:
    """Lower bound for the radius of the disk covered by ``w(D_r0)``."""
    q = r0 / (1.0 - r0)
    s = r0 * r0
    return (8.0 * p.L1 / math.pi) * q * q + l5(p) * s + 8.0 * p.L3 * s * (3.0 - s) / (1.0 - s) ** 2


@dataclass(frozen=True)
class LandauResult:
    r0: float
    R0_lower: float
    L4: float
    L5: float
    bracket: tuple[float, float]
    iterations: int

    def as_dict(self) -> dict:
        return {
            "r0": self.r0,
            "R0_lower": self.R0_lower,
            "L4": self.L4,
            "L5": self.L5,
            "bracket": list(self.bracket),
            "iterations": self.iterations,
        }


def landau_radius(p: BoundParams, tol: float = 1e-12) -> LandauResult:
    """Root of ``phi`` by bisection on ``[0, 1 - RIGHT_END_GAP]``.

    Bisection relies only on monotonicity, so the steep growth of ``phi``
    near 1 does no harm.
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    L4, L5 = l4(p), l5(p)
    lo, hi = 0.0, 1.0 - RIGHT_END_GAP
    f_hi = phi(hi, p)
    if not f_hi < 0.0:
        raise ValueError(
            f"phi does not change sign on [0, {hi}] (phi(hi) = {f_hi:.6g}); parameters are degenerate"
        )
    # invariant: phi(lo) > 0 > phi(hi)
    for it in range(1, MAX_BISECTION_STEPS + 1):
        mid = 0.5 * (lo + hi)
        f_mid = phi(mid, p)
        if abs(f_mid) <= tol:
            return LandauResult(mid, covered_radius(p, mid), L4, L5, (lo, hi), it)
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
    raise ArithmeticError(f"bisection did not reach |phi| <= {tol} in {MAX_BISECTION_STEPS} steps")
