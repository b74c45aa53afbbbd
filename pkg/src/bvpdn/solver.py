"""Explicit solution formula and its first Wirtinger derivatives.

    w = -c (1 - |z|^2) + P[gamma0] + G1[gamma] - G2[g]

with ``G1 = (1/4 pi) int_0^{2 pi} H2(z, e^{it}) gamma dt`` and
``G2 = (1/pi) int_D H2(z, zeta) g dx dy``. Derivatives differentiate under
the integral; the disk part runs through the compiled loop in ``_fast``.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import kernel
from ._fast import centered_polynomial_sums, weighted_kernel_sums
from .problems import MEASURE_CONVENTION, BihPolynomial, FourierTrace, ProblemData, TabulatedTrace
from .quadrature import (
    QuadConfig,
    graded_radial_rule,
    integrate_circle,
    integrate_disk_weighted,
    refine_centered,
    uniform_angles,
)

CSV_COLUMNS = ("re_z", "im_z", "re_w", "im_w", "abs_w", "re_wz", "im_wz", "re_wzbar", "im_wzbar")


@dataclass(frozen=True)
class JacobianSummary:
    wz: complex
    wzbar: complex
    norm: float
    lam: float
    det: float

    @classmethod
    def from_derivatives(cls, wz: complex, wzbar: complex) -> "JacobianSummary":
        a, b = abs(wz), abs(wzbar)
        return cls(complex(wz), complex(wzbar), a + b, abs(a - b), a * a - b * b)


@dataclass(frozen=True)
class SolutionSample:
    """All pieces of the solution formula at one point."""

    z: complex
    c_part: complex
    poisson: complex
    g1: complex
    g2: complex
    poisson_dz: complex = 0j
    poisson_dzbar: complex = 0j
    g1_dz: complex = 0j
    g1_dzbar: complex = 0j
    g2_dz: complex = 0j
    g2_dzbar: complex = 0j
    c: complex = 0j
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def w(self) -> complex:
        return self.c_part + self.poisson + self.g1 - self.g2

    @property
    def wz(self) -> complex:
        return self.c * np.conj(self.z) + self.poisson_dz + self.g1_dz - self.g2_dz

    @property
    def wzbar(self) -> complex:
        return self.c * self.z + self.poisson_dzbar + self.g1_dzbar - self.g2_dzbar

    def jacobian(self) -> JacobianSummary:
        return JacobianSummary.from_derivatives(self.wz, self.wzbar)


def _check_point(z) -> complex:
    z = complex(z)
    if not np.isfinite(z):
        raise ValueError("z must be finite")
    if abs(z) >= 1.0:
        raise ValueError(f"solution is evaluated in the open disk, got |z| = {abs(z)}")
    return z


def _trace_samples(trace, n: int) -> np.ndarray:
    return np.asarray(trace(uniform_angles(n)), dtype=complex)


def _poisson_terms(prob: ProblemData, z: complex, config: QuadConfig, derivatives: bool):
    g0 = prob.gamma0
    if isinstance(g0, FourierTrace):
        vals = (
            complex(g0.harmonic_extension(z)),
            complex(g0.extension_dz(z)) if derivatives else 0j,
            complex(g0.extension_dzbar(z)) if derivatives else 0j,
        )
        return vals, "exact-harmonic-extension"
    n = max(config.n_theta, g0.samples.size if isinstance(g0, TabulatedTrace) else 0)
    samples = _trace_samples(g0, n)

    def f(t):
        cols = [kernel.poisson(z, t) * samples]
        if derivatives:
            pz = kernel.poisson_dz(z, t)
            cols += [pz * samples, np.conj(pz) * samples]
        return np.stack(cols, axis=-1)

    out = integrate_circle(f, n)
    vals = (complex(out[0]), complex(out[1]) if derivatives else 0j, complex(out[2]) if derivatives else 0j)
    return vals, f"trapezoid-{n}"


def _g1_terms(prob: ProblemData, z: complex, config: QuadConfig, derivatives: bool):
    if prob.gamma.is_zero():
        return (0j, 0j, 0j)
    n = config.n_theta
    if isinstance(prob.gamma, TabulatedTrace):
        n = max(n, prob.gamma.samples.size)
    samples = _trace_samples(prob.gamma, n)

    def f(t):
        e = np.exp(1j * t)
        if not derivatives:
            return kernel.h2(z, e) * samples
        h, k = kernel.h2_with_dz(z, e)
        return np.stack([h * samples, k * samples, np.conj(k) * samples], axis=-1)

    # 1/(4 pi) int dt = (1/2) * mean
    out = 0.5 * np.atleast_1d(np.asarray(integrate_circle(f, n)))
    return (complex(out[0]), complex(out[1]) if derivatives else 0j, complex(out[2]) if derivatives else 0j)


def _g2_terms(prob: ProblemData, z: complex, config: QuadConfig, derivatives: bool):
    if prob.g.is_zero():
        return (0j, 0j, 0j), None
    g = prob.g
    policy = kernel.DEFAULT_POLICY
    if isinstance(g, BihPolynomial):
        terms = [t for t in g.terms if t[2] != 0]

        def level(n_r, n_t):
            x, wx = graded_radial_rule(n_r, config.exclusion_radius)
            return centered_polynomial_sums(z, x, wx, n_t, terms, derivatives, policy)

        res = refine_centered(level, config)
        out = np.asarray(res.value) / np.pi
        return (complex(out[0]), complex(out[1]), complex(out[2])), res

    def reduce(nodes, weights):
        gv = np.asarray(g(nodes), dtype=complex)
        if not np.all(np.isfinite(gv)):
            raise FloatingPointError("source g is not finite at a quadrature node")
        return weighted_kernel_sums(z, nodes, weights, gv, derivatives, policy)

    res = integrate_disk_weighted(reduce, config, singular_at=z)
    out = np.asarray(res.value) / np.pi
    vals = (complex(out[0]), complex(out[1]) if derivatives else 0j, complex(out[2]) if derivatives else 0j)
    return vals, res


def evaluate(prob: ProblemData, z, config: QuadConfig = QuadConfig(), derivatives: bool = True) -> SolutionSample:
    """Evaluate every term of the solution formula at ``z``."""
    z = _check_point(z)
    (p, pz, pzb), p_path = _poisson_terms(prob, z, config, derivatives)
    g1, g1z, g1zb = _g1_terms(prob, z, config, derivatives)
    (g2, g2z, g2zb), g2_res = _g2_terms(prob, z, config, derivatives)
    meta = {
        "poisson_path": p_path,
        "g1_path": f"trapezoid-{config.n_theta}",
        "measure": MEASURE_CONVENTION,
    }
    if g2_res is not None:
        meta["g2"] = g2_res.metadata
    return SolutionSample(
        z=z,
        c_part=-prob.c * (1.0 - abs(z) ** 2),
        poisson=p,
        g1=g1,
        g2=g2,
        poisson_dz=pz,
        poisson_dzbar=pzb,
        g1_dz=g1z,
        g1_dzbar=g1zb,
        g2_dz=g2z,
        g2_dzbar=g2zb,
        c=prob.c,
        metadata=meta,
    )


def worker_count() -> int:
    env = os.environ.get("BVPDN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(8, os.cpu_count() or 1))


def evaluate_many(
    prob: ProblemData,
    zs: Iterable[complex],
    config: QuadConfig = QuadConfig(),
    derivatives: bool = True,
) -> list[SolutionSample]:
    """``evaluate`` over many points; results keep the input order."""
    zs = [complex(z) for z in np.ravel(np.asarray(list(zs), dtype=complex))]
    workers = min(worker_count(), len(zs))
    if workers <= 1:
        return [evaluate(prob, z, config, derivatives) for z in zs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda z: evaluate(prob, z, config, derivatives), zs))


def eval_poisson_part(prob: ProblemData, z, config: QuadConfig = QuadConfig()) -> complex:
    return _poisson_terms(prob, _check_point(z), config, False)[0][0]


def eval_g1(prob: ProblemData, z, config: QuadConfig = QuadConfig()) -> complex:
    return _g1_terms(prob, _check_point(z), config, False)[0]


def eval_g2(prob: ProblemData, z, config: QuadConfig = QuadConfig()) -> complex:
    return _g2_terms(prob, _check_point(z), config, False)[0][0]


def eval_w(prob: ProblemData, z, config: QuadConfig = QuadConfig()) -> complex:
    return evaluate(prob, z, config, derivatives=False).w


def eval_w_dz(prob: ProblemData, z, config: QuadConfig = QuadConfig()) -> complex:
    return evaluate(prob, z, config).wz


def eval_w_dzbar(prob: ProblemData, z, config: QuadConfig = QuadConfig()) -> complex:
    return evaluate(prob, z, config).wzbar


def jacobian(prob: ProblemData, z, config: QuadConfig = QuadConfig()) -> JacobianSummary:
    return evaluate(prob, z, config).jacobian()


def polar_eval_grid(n_r: int, n_theta: int, rmax: float) -> np.ndarray:
    """Radii ``rmax * i / n_r`` (i = 1..n_r) times ``n_theta`` uniform angles, radius-major."""
    if not 0.0 < rmax < 1.0:
        raise ValueError("rmax must lie in (0, 1)")
    r = rmax * np.arange(1, n_r + 1) / n_r
    return (r[:, None] * np.exp(1j * uniform_angles(n_theta))[None, :]).ravel()


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(samples: Sequence[SolutionSample], out: TextIO | str | Path | None = None) -> str:
    """Grid results as CSV with 17 significant digits; returns the text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for s in samples:
        w, wz, wzb = s.w, s.wz, s.wzbar
        writer.writerow(
            [_fmt(v) for v in (s.z.real, s.z.imag, w.real, w.imag, abs(w), wz.real, wz.imag, wzb.real, wzb.imag)]
        )
    text = buf.getvalue()
    if isinstance(out, (str, Path)):
        Path(out).write_text(text)
    elif out is not None:
        out.write(text)
    return text


def read_csv(path: str | Path) -> list[dict[str, float]]:
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]
