"""Poisson kernel, the biharmonic kernel H2 and their z-derivatives.

All functions broadcast over numpy arrays of complex points. The kernel

    H2(z, zeta) = -|zeta - z|^2 log|zeta - z|^2
                  - (1 - |z|^2) [4 + A(z conj(zeta)) + A(conj(z) zeta)]
                  - (zeta - z) conj(zeta) A(z conj(zeta)) - conj(...)

is written through the family A(u) = ((1 - u)/u) log(1 - u), which hides the
removable 1/z singularities. A, B and C are evaluated by power series for
small |u| and in closed form elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

ArrayLike = complex | float | np.ndarray


@dataclass(frozen=True)
class SeriesPolicy:
    """Switch between power series and closed forms of the log family."""

    switch_radius: float = 0.5
    max_terms: int = 64
    term_tol: float = 1e-17

    def __post_init__(self):
        if not 0.0 < self.switch_radius < 1.0:
            raise ValueError(f"switch_radius must lie in (0, 1), got {self.switch_radius}")
        if self.max_terms < 1:
            raise ValueError("max_terms must be positive")
        # term_tol is compared to terms relative to O(1) leading coefficients
        if not self.term_tol > 0.0:
            raise ValueError("term_tol must be positive")

    def n_terms(self, radius: float) -> int:
        """Number of series terms needed for |u| <= radius."""
        if radius <= 0.0:
            return 1
        n = int(np.ceil(np.log(self.term_tol) / np.log(radius))) + 1
        return max(1, min(n, self.max_terms))


DEFAULT_POLICY = SeriesPolicy()


def _as_complex(x: ArrayLike, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def _series_coefficients(which: str, n: int) -> tuple[float, np.ndarray]:
    """Constant term and coefficients of u^1..u^n for A, C, or of u^0..u^(n-1) for B."""
    k = np.arange(1, n + 1, dtype=float)
    if which == "A":
        return -1.0, 1.0 / (k * (k + 1.0))
    if which == "B":
        # -sum_{m>=0} u^m / (m + 2); constant folded into coefficient array
        return 0.0, -1.0 / (k + 1.0)
    if which == "C":
        return -1.5, 2.0 / (k * (k + 2.0))
    raise ValueError(f"unknown log family member {which!r}")


def _horner(coeffs: np.ndarray, u: np.ndarray) -> np.ndarray:
    acc = np.full_like(u, coeffs[-1])
    for c in coeffs[-2::-1]:
        acc *= u
        acc += c
    return acc


def _series_band(which: str, u: np.ndarray, n: int) -> np.ndarray:
    const, coeffs = _series_coefficients(which, n)
    if which == "B":
        return _horner(coeffs, u)
    return const + u * _horner(coeffs, u)


def _series(which: str, u: np.ndarray, policy: SeriesPolicy) -> np.ndarray:
    # truncate per modulus band: small |u| needs far fewer terms
    mod = np.abs(u)
    out = np.empty_like(u)
    lo = 0.0
    for hi in (policy.switch_radius / 8, policy.switch_radius / 4, policy.switch_radius / 2, np.inf):
        band = (mod >= lo) & (mod < hi)
        if np.any(band):
            out[band] = _series_band(which, u[band], policy.n_terms(float(mod[band].max())))
        lo = hi
    return out


def log1m(u: ArrayLike) -> np.ndarray:
    """Accurate complex ``log(1 - u)``; numpy's complex log1p loses digits near 0."""
    u = np.asarray(u, dtype=complex)
    x, y = u.real, u.imag
    with np.errstate(divide="ignore"):
        modulus = 0.5 * np.log1p(x * x + y * y - 2.0 * x)
    return modulus + 1j * np.arctan2(-y, 1.0 - x)


def _closed(which: str, u: np.ndarray) -> np.ndarray:
    log1mu = log1m(u)
    if which == "A":
        out = (1.0 - u) / u * log1mu
        # (1 - u) log(1 - u) -> 0 as u -> 1
        return np.where(u == 1.0, 0.0, out)
    if which == "B":
        return log1mu / u**2 + 1.0 / u
    if which == "C":
        return (1.0 - u**2) / u**2 * log1mu + 1.0 / u - 1.0
    raise ValueError(f"unknown log family member {which!r}")


def _log_family(u: np.ndarray, which: str, policy: SeriesPolicy) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    out = np.empty_like(u)
    small = np.abs(u) < policy.switch_radius
    if np.any(small):
        out[small] = _series(which, u[small], policy)
    if np.any(~small):
        with np.errstate(divide="ignore", invalid="ignore"):
            out[~small] = _closed(which, u[~small])
    return out


def stable_log_family(
    u: ArrayLike,
    which: Literal["A", "B", "C"],
    policy: SeriesPolicy = DEFAULT_POLICY,
) -> np.ndarray:
    """Evaluate one of the removable-singularity log expressions.

    ``A(u) = ((1-u)/u) log(1-u)``, ``B(u) = log(1-u)/u**2 + 1/u`` and
    ``C(u) = ((1-u**2)/u**2) log(1-u) + 1/u - 1``, with limits -1, -1/2 and
    -3/2 at ``u = 0``. Requires ``|u| < 1``.
    """
    if which not in ("A", "B", "C"):
        raise ValueError(f"unknown log family member {which!r}")
    u = _as_complex(u, "u")
    if np.any(np.abs(u) >= 1.0):
        raise ValueError("stable_log_family requires |u| < 1")
    return _log_family(u, which, policy)


def poisson(z: ArrayLike, t: ArrayLike) -> np.ndarray:
    """Poisson kernel ``(1 - |z|^2) / |1 - z e^{-it}|^2`` for ``|z| < 1``."""
    z = _as_complex(z, "z")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("poisson requires |z| < 1")
    return (1.0 - np.abs(z) ** 2) / np.abs(1.0 - z * np.exp(-1j * t)) ** 2


def poisson_dz(z: ArrayLike, t: ArrayLike) -> np.ndarray:
    """Analytic d/dz of the Poisson kernel.

    d/dz-bar is the complex conjugate, since the kernel is real.
    """
    z = _as_complex(z, "z")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("poisson_dz requires |z| < 1")
    e = np.exp(-1j * t)
    a = 1.0 - z * e
    return (e - np.conj(z)) / (a * a * np.conj(a))


def _check_closed_disk(z: np.ndarray, zeta: np.ndarray, slack: float = 1e-12):
    if np.any(np.abs(z) > 1.0 + slack):
        raise ValueError("kernel requires |z| <= 1")
    if np.any(np.abs(zeta) > 1.0 + slack):
        raise ValueError("kernel requires |zeta| <= 1")


def h2_terms(
    z: ArrayLike, zeta: ArrayLike, policy: SeriesPolicy = DEFAULT_POLICY
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """The four complex summands of H2, without taking real parts.

    Their sum is real up to rounding; the diagonal term is extended by 0.
    """
    z = _as_complex(z, "z")
    zeta = _as_complex(zeta, "zeta")
    _check_closed_disk(z, zeta)
    z, zeta = np.broadcast_arrays(z, zeta)
    d2 = np.abs(zeta - z) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(d2 > 0.0, -d2 * np.log(np.where(d2 > 0.0, d2, 1.0)), 0.0)
    u = z * np.conj(zeta)
    a_u = _log_family(u, "A", policy)
    a_ubar = _log_family(np.conj(u), "A", policy)
    t2 = -(1.0 - np.abs(z) ** 2) * (4.0 + a_u + a_ubar)
    t3 = -(zeta - z) * np.conj(zeta) * a_u
    t4 = -np.conj(zeta - z) * zeta * a_ubar
    return t1.astype(complex), t2, t3, t4


def h2(z: ArrayLike, zeta: ArrayLike, policy: SeriesPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Real value of the biharmonic kernel H2(z, zeta) on the closed disk."""
    z = _as_complex(z, "z")
    zeta = _as_complex(zeta, "zeta")
    _check_closed_disk(z, zeta)
    z, zeta = np.broadcast_arrays(z, zeta)
    d2 = np.abs(zeta - z) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(d2 > 0.0, -d2 * np.log(np.where(d2 > 0.0, d2, 1.0)), 0.0)
    u = z * np.conj(zeta)
    a_u = _log_family(u, "A", policy)
    # terms 2-4 pair up as w + conj(w)
    rest = (1.0 - np.abs(z) ** 2) * (4.0 + 2.0 * a_u.real)
    rest += 2.0 * ((zeta - z) * np.conj(zeta) * a_u).real
    return t1 - rest


def h2_dz_components(
    z: ArrayLike, zeta: ArrayLike, policy: SeriesPolicy = DEFAULT_POLICY
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """The four summands K5..K8 whose sum is d/dz H2(z, zeta).

    K5 = (conj(zeta) - conj(z)) (log|zeta - z|^2 + 1)
    K6 = conj(z) [4 + A(u) + A(conj u)]
    K7 = (1 - |z|^2) conj(zeta) B(u)
    K8 = conj(zeta) [|zeta|^2 B(u) - log(1 - u) - 1],   u = z conj(zeta)

    On the unit circle K8 reduces to conj(zeta) C(u).
    """
    z = _as_complex(z, "z")
    zeta = _as_complex(zeta, "zeta")
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("h2_dz requires |z| < 1")
    if np.any(np.abs(zeta) > 1.0 + 1e-12):
        raise ValueError("h2_dz requires |zeta| <= 1")
    z, zeta = np.broadcast_arrays(z, zeta)
    diff = zeta - z
    if np.any(diff == 0.0):
        raise ValueError("h2_dz is undefined on the diagonal zeta == z")
    u = z * np.conj(zeta)
    a_u = _log_family(u, "A", policy)
    b_u = _log_family(u, "B", policy)
    zeta_bar = np.conj(zeta)
    k5 = np.conj(diff) * (np.log(np.abs(diff) ** 2) + 1.0)
    k6 = np.conj(z) * (4.0 + a_u + np.conj(a_u))
    k7 = (1.0 - np.abs(z) ** 2) * zeta_bar * b_u
    k8 = zeta_bar * (np.abs(zeta) ** 2 * b_u - log1m(u) - 1.0)
    return k5, k6, k7, k8


def h2_with_dz(
    z: complex, zeta: np.ndarray, policy: SeriesPolicy = DEFAULT_POLICY
) -> tuple[np.ndarray, np.ndarray]:
    """``(h2(z, zeta), h2_dz(z, zeta))`` sharing the log-family evaluations.

    Scalar ``z`` with ``|z| < 1``; ``zeta`` must avoid ``z``.
    """
    z = complex(z)
    zeta = _as_complex(zeta, "zeta")
    if not abs(z) < 1.0:
        raise ValueError("h2_with_dz requires |z| < 1")
    if np.any(np.abs(zeta) > 1.0 + 1e-12):
        raise ValueError("h2_with_dz requires |zeta| <= 1")
    diff = zeta - z
    d2 = diff.real**2 + diff.imag**2
    if np.any(d2 == 0.0):
        raise ValueError("h2_with_dz is undefined on the diagonal zeta == z")
    log_d2 = np.log(d2)
    zeta_bar = np.conj(zeta)
    u = z * zeta_bar
    b_u = _log_family(u, "B", policy)
    # A(u) = (1 - u)(u B(u) - 1) exactly; no cancellation near u = 0
    a_u = (1.0 - u) * (u * b_u - 1.0)
    s = 1.0 - abs(z) ** 2
    value = -d2 * log_d2 - s * (4.0 + 2.0 * a_u.real) - 2.0 * (diff * zeta_bar * a_u).real
    dz = (
        np.conj(diff) * (log_d2 + 1.0)
        + np.conj(z) * (4.0 + 2.0 * a_u.real)
        + s * zeta_bar * b_u
        + zeta_bar * ((zeta.real**2 + zeta.imag**2) * b_u - log1m(u) - 1.0)
    )
    return value, dz


def h2_dz(z: ArrayLike, zeta: ArrayLike, policy: SeriesPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Analytic d/dz of H2 for ``|z| < 1``, ``zeta != z``.

    The d/dz-bar derivative is ``conj(h2_dz(z, zeta))``.
    """
    k5, k6, k7, k8 = h2_dz_components(z, zeta, policy)
    return k5 + k6 + k7 + k8
