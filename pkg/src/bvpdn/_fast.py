"""Compiled weighted sums of H2 and its z-derivative over a node set.

These loops fuse the kernel with the quadrature reduction so no temporary
arrays are created. They evaluate the same formulas as
``kernel.h2_with_dz`` (B by series below the switch radius, closed form
above, ``A = (1 - u)(u B - 1)``) and are tested against it.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _log1m(x, y):
    return complex(0.5 * math.log1p(x * x + y * y - 2.0 * x), math.atan2(-y, 1.0 - x))


@njit(cache=True, nogil=True)
def _b_value(u, coeffs, switch, log_tol, max_terms):
    mod = abs(u)
    if mod < switch:
        if mod > 0.0:
            n = int(math.ceil(log_tol / math.log(mod))) + 1
            if n > max_terms:
                n = max_terms
            if n < 1:
                n = 1
        else:
            n = 1
        acc = complex(coeffs[n - 1], 0.0)
        for j in range(n - 2, -1, -1):
            acc = acc * u + coeffs[j]
        return acc
    return _log1m(u.real, u.imag) / (u * u) + 1.0 / u


@njit(cache=True, nogil=True)
def kernel_sums(z, nodes, weights, gvals, derivatives, coeffs, switch, log_tol, max_terms):
    """Return sums of w*g*H2, w*g*dH2/dz and w*g*conj(dH2/dz) over the nodes."""
    zbar = z.conjugate()
    s = 1.0 - (z.real * z.real + z.imag * z.imag)
    acc_h = 0j
    acc_k = 0j
    acc_kc = 0j
    for i in range(nodes.size):
        zeta = nodes[i]
        wg = weights[i] * gvals[i]
        dx = zeta.real - z.real
        dy = zeta.imag - z.imag
        d2 = dx * dx + dy * dy
        log_d2 = math.log(d2)
        zeta_bar = zeta.conjugate()
        u = z * zeta_bar
        b = _b_value(u, coeffs, switch, log_tol, max_terms)
        a = (1.0 - u) * (u * b - 1.0)
        diff = complex(dx, dy)
        h = -d2 * log_d2 - s * (4.0 + 2.0 * a.real) - 2.0 * (diff * zeta_bar * a).real
        acc_h += h * wg
        if derivatives:
            k = (
                diff.conjugate() * (log_d2 + 1.0)
                + zbar * (4.0 + 2.0 * a.real)
                + s * zeta_bar * b
                + zeta_bar * ((zeta.real * zeta.real + zeta.imag * zeta.imag) * b - _log1m(u.real, u.imag) - 1.0)
            )
            acc_k += k * wg
            acc_kc += k.conjugate() * wg
    return acc_h, acc_k, acc_kc


def weighted_kernel_sums(z, nodes, weights, gvals, derivatives, policy):
    """Dispatch to the compiled loop; returns a length-3 complex array."""
    out = kernel_sums(
        complex(z),
        np.ascontiguousarray(nodes, dtype=complex).ravel(),
        np.ascontiguousarray(weights, dtype=float).ravel(),
        np.ascontiguousarray(gvals, dtype=complex).ravel(),
        bool(derivatives),
        *_policy_args(policy),
    )
    return np.array(out, dtype=complex)


@njit(cache=True, nogil=True)
def centered_poly_sums(
    z, x, wx, n_theta, pw_p, pw_q, pw_c, derivatives, coeffs, switch, log_tol, max_terms
):
    """``kernel_sums`` over the centred polar rule with a polynomial source.

    Nodes are generated ray by ray exactly as ``quadrature.centered_polar_rule``
    builds them; the source ``sum c z^p zbar^q`` is evaluated in place.
    """
    zbar = z.conjugate()
    s = 1.0 - (z.real * z.real + z.imag * z.imag)
    max_p = 0
    max_q = 0
    for j in range(pw_p.size):
        max_p = max(max_p, pw_p[j])
        max_q = max(max_q, pw_q[j])
    zp = np.empty(max_p + 1, dtype=np.complex128)
    zq = np.empty(max_q + 1, dtype=np.complex128)
    dtheta = 2.0 * math.pi / n_theta
    acc_h = 0j
    acc_k = 0j
    acc_kc = 0j
    for j in range(n_theta):
        phi = dtheta * j
        e = complex(math.cos(phi), math.sin(phi))
        a = (zbar * e).real
        ray = -a + math.sqrt(a * a + s)
        for i in range(x.size):
            rho = x[i] * ray
            zeta = z + rho * e
            weight = wx[i] * ray * rho * dtheta
            zeta_bar = zeta.conjugate()
            zp[0] = 1.0
            for m in range(1, max_p + 1):
                zp[m] = zp[m - 1] * zeta
            zq[0] = 1.0
            for m in range(1, max_q + 1):
                zq[m] = zq[m - 1] * zeta_bar
            gv = 0j
            for m in range(pw_p.size):
                gv += pw_c[m] * zp[pw_p[m]] * zq[pw_q[m]]
            wg = weight * gv
            dx = zeta.real - z.real
            dy = zeta.imag - z.imag
            d2 = dx * dx + dy * dy
            log_d2 = math.log(d2)
            u = z * zeta_bar
            b = _b_value(u, coeffs, switch, log_tol, max_terms)
            av = (1.0 - u) * (u * b - 1.0)
            diff = complex(dx, dy)
            h = -d2 * log_d2 - s * (4.0 + 2.0 * av.real) - 2.0 * (diff * zeta_bar * av).real
            acc_h += h * wg
            if derivatives:
                k = (
                    diff.conjugate() * (log_d2 + 1.0)
                    + zbar * (4.0 + 2.0 * av.real)
                    + s * zeta_bar * b
                    + zeta_bar * ((zeta.real * zeta.real + zeta.imag * zeta.imag) * b - _log1m(u.real, u.imag) - 1.0)
                )
                acc_k += k * wg
                acc_kc += k.conjugate() * wg
    return acc_h, acc_k, acc_kc


def _policy_args(policy):
    coeffs = -1.0 / np.arange(2, policy.max_terms + 2, dtype=float)
    return coeffs, float(policy.switch_radius), float(np.log(policy.term_tol)), int(policy.max_terms)


def centered_polynomial_sums(z, x, wx, n_theta, terms, derivatives, policy):
    """Length-3 array of fused sums for a polynomial source given as (p, q, c) terms."""
    p = np.array([t[0] for t in terms], dtype=np.int64)
    q = np.array([t[1] for t in terms], dtype=np.int64)
    c = np.array([t[2] for t in terms], dtype=np.complex128)
    out = centered_poly_sums(
        complex(z),
        np.ascontiguousarray(x, dtype=float),
        np.ascontiguousarray(wx, dtype=float),
        int(n_theta),
        p,
        q,
        c,
        bool(derivatives),
        *_policy_args(policy),
    )
    return np.array(out, dtype=complex)
