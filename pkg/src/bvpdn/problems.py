"""Manufactured and tabulated data for the Dirichlet-Neumann problem.

A manufactured problem starts from an exact polynomial

    w(z) = sum c_pq z^p conj(z)^q

and derives everything else term by term:

    g      = (d_z d_zbar)^2 w           -> pq(p-1)(q-1) c_pq z^(p-2) zbar^(q-2)
    gamma0 = w on the circle            -> c_pq e^{i(p-q)t}
    gamma  = d_r (d_z d_zbar w) at r=1  -> pq(p+q-2) c_pq e^{i(p-q)t}
    c      = mean of w_zzbar on circle  -> sum_p p^2 c_pp

The compatibility residual integrates g against plain dx dy (see
``compatibility_residual``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Union

import numpy as np
from scipy.interpolate import RectBivariateSpline
from scipy.optimize import minimize, minimize_scalar

from .quadrature import PolarGrid, QuadConfig, gauss_legendre_unit, integrate_circle, integrate_disk

MAX_DEGREE = 12
MEASURE_CONVENTION = "compatibility: (1/2pi) int gamma dt = (2/pi) int g dxdy; G2: (1/pi) dxdy"


class ProblemFormatError(ValueError):
    """Raised when a problem specification cannot be parsed."""


# --------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class BihPolynomial:
    """Finite sum of monomials ``coeff * z**p * conj(z)**q``."""

    terms: tuple[tuple[int, int, complex], ...] = ()
    max_degree: int = MAX_DEGREE

    def __post_init__(self):
        seen = set()
        clean = []
        for p, q, c in self.terms:
            p, q = int(p), int(q)
            if p < 0 or q < 0:
                raise ValueError(f"negative exponent in term ({p}, {q})")
            if (p, q) in seen:
                raise ValueError(f"duplicate term ({p}, {q})")
            if p + q > self.max_degree:
                raise ValueError(f"term ({p}, {q}) exceeds max degree {self.max_degree}")
            seen.add((p, q))
            clean.append((p, q, complex(c)))
        object.__setattr__(self, "terms", tuple(sorted(clean)))

    @classmethod
    def from_dict(cls, coeffs: Mapping[tuple[int, int], complex], max_degree: int = MAX_DEGREE) -> "BihPolynomial":
        return cls(tuple((p, q, c) for (p, q), c in coeffs.items() if c != 0), max_degree)

    def as_dict(self) -> dict[tuple[int, int], complex]:
        return {(p, q): c for p, q, c in self.terms}

    @property
    def degree(self) -> int:
        return max((p + q for p, q, _ in self.terms), default=0)

    def is_zero(self) -> bool:
        return all(c == 0 for _, _, c in self.terms)

    def __call__(self, z):
        return poly_eval(self, z)

    def scaled(self, s: complex) -> "BihPolynomial":
        return BihPolynomial(tuple((p, q, s * c) for p, q, c in self.terms), self.max_degree)

    def to_json(self) -> dict:
        return {
            "type": "poly",
            "terms": [{"p": p, "q": q, "re": c.real, "im": c.imag} for p, q, c in self.terms],
        }


def _powers(x: np.ndarray, n: int) -> list[np.ndarray]:
    out = [np.ones_like(x)]
    for _ in range(n):
        out.append(out[-1] * x)
    return out


def _monomials(w: BihPolynomial, z, dp: int = 0, dq: int = 0):
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    live = [(p, q, c) for p, q, c in w.terms if p >= dp and q >= dq and c != 0]
    if not live:
        return out
    zp = _powers(z, max(p for p, _, _ in live) - dp)
    zq = _powers(np.conj(z), max(q for _, q, _ in live) - dq)
    for p, q, c in live:
        factor = c
        for k in range(dp):
            factor *= p - k
        for k in range(dq):
            factor *= q - k
        out += factor * zp[p - dp] * zq[q - dq]
    return out


def poly_eval(w: BihPolynomial, z):
    """``sum c z^p zbar^q``."""
    return _monomials(w, z)


def poly_dz(w: BihPolynomial, z):
    return _monomials(w, z, dp=1)


def poly_dzbar(w: BihPolynomial, z):
    return _monomials(w, z, dq=1)


def derive_source(w: BihPolynomial) -> BihPolynomial:
    """``(d_z d_zbar)^2 w`` by coefficient shift."""
    terms = [
        (p - 2, q - 2, p * q * (p - 1) * (q - 1) * c)
        for p, q, c in w.terms
        if p >= 2 and q >= 2 and c != 0
    ]
    return BihPolynomial(tuple(terms), w.max_degree)


def antiderive_source(g: BihPolynomial, max_degree: int = MAX_DEGREE) -> BihPolynomial:
    """A particular w with ``derive_source(w) == g`` (inverse coefficient shift)."""
    terms = [
        (p + 2, q + 2, c / ((p + 2) * (q + 2) * (p + 1) * (q + 1)))
        for p, q, c in g.terms
    ]
    return BihPolynomial(tuple(terms), max_degree)


# --------------------------------------------------------------------------
# boundary traces


@dataclass(frozen=True, eq=False)
class FourierTrace:
    """Boundary function ``sum_k coeffs[k] e^{i freqs[k] t}``."""

    freqs: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.freqs, dtype=int).ravel()
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if f.shape != c.shape:
            raise ValueError("freqs and coeffs must have equal length")
        if np.unique(f).size != f.size:
            raise ValueError("duplicate frequencies")
        order = np.argsort(f)
        object.__setattr__(self, "freqs", f[order])
        object.__setattr__(self, "coeffs", c[order])

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, complex]) -> "FourierTrace":
        items = [(k, c) for k, c in coeffs.items() if c != 0]
        return cls(np.array([k for k, _ in items], dtype=int), np.array([c for _, c in items], dtype=complex))

    @classmethod
    def zero(cls) -> "FourierTrace":
        return cls(np.zeros(0, dtype=int), np.zeros(0, dtype=complex))

    def as_dict(self) -> dict[int, complex]:
        return {int(k): complex(c) for k, c in zip(self.freqs, self.coeffs)}

    def coefficient(self, k: int) -> complex:
        hit = np.flatnonzero(self.freqs == k)
        return complex(self.coeffs[hit[0]]) if hit.size else 0.0j

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.freqs.size == 0:
            return np.zeros(t.shape, dtype=complex)
        return np.exp(1j * t[..., None] * self.freqs) @ self.coeffs

    def harmonic_extension(self, z):
        """Poisson integral in closed form: ``sum c_k z^k + sum c_{-k} zbar^k``."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for k, c in zip(self.freqs, self.coeffs):
            out = out + (c * z**k if k >= 0 else c * np.conj(z) ** (-k))
        return out

    def extension_dz(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for k, c in zip(self.freqs, self.coeffs):
            if k > 0:
                out = out + k * c * z ** (k - 1)
        return out

    def extension_dzbar(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for k, c in zip(self.freqs, self.coeffs):
            if k < 0:
                out = out + (-k) * c * np.conj(z) ** (-k - 1)
        return out


@dataclass(frozen=True, eq=False)
class TabulatedTrace:
    """Samples at ``t_k = 2 pi k / n``, trigonometrically interpolated."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex).ravel()
        if s.size == 0:
            raise ValueError("tabulated trace needs at least one sample")
        if not np.all(np.isfinite(s)):
            raise ValueError("tabulated trace contains non-finite samples")
        object.__setattr__(self, "samples", s)

    def to_fourier(self) -> FourierTrace:
        return self._fourier

    @cached_property
    def _fourier(self) -> FourierTrace:
        n = self.samples.size
        c = np.fft.fft(self.samples) / n
        k = np.fft.fftfreq(n, d=1.0 / n).astype(int)
        coeffs = dict(zip(k.tolist(), c.tolist()))
        if n % 2 == 0:
            # split the Nyquist mode symmetrically so real data interpolate to real values
            nyq = coeffs.pop(-n // 2)
            coeffs[n // 2] = nyq / 2
            coeffs[-n // 2] = nyq / 2
        return FourierTrace(np.array(list(coeffs), dtype=int), np.array(list(coeffs.values()), dtype=complex))

    def __call__(self, t):
        return self.to_fourier()(t)

    def is_zero(self) -> bool:
        return not np.any(self.samples)


Trace = Union[FourierTrace, TabulatedTrace]


def derive_gamma0(w: BihPolynomial) -> FourierTrace:
    coeffs: dict[int, complex] = {}
    for p, q, c in w.terms:
        coeffs[p - q] = coeffs.get(p - q, 0) + c
    return FourierTrace.from_dict(coeffs)


def derive_gamma(w: BihPolynomial) -> FourierTrace:
    coeffs: dict[int, complex] = {}
    for p, q, c in w.terms:
        coeffs[p - q] = coeffs.get(p - q, 0) + p * q * (p + q - 2) * c
    return FourierTrace.from_dict(coeffs)


def derive_c(w: BihPolynomial) -> complex:
    return complex(sum(p * p * c for p, q, c in w.terms if p == q))


# --------------------------------------------------------------------------
# sources


@dataclass(frozen=True, eq=False)
class TabulatedSource:
    """Source samples on the ``PolarGrid`` of shape (n_r, n_theta).

    Off-node values come from a bicubic spline in (r, theta) with periodic
    padding in theta.
    """

    values: np.ndarray
    _spline: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 2 or min(v.shape) < 4:
            raise ValueError("tabulated source must be a 2-d array with at least 4 nodes per axis")
        if not np.all(np.isfinite(v)):
            raise ValueError("tabulated source contains non-finite samples")
        object.__setattr__(self, "values", v)
        n_r, n_t = v.shape
        r, _ = gauss_legendre_unit(n_r)
        t = 2.0 * np.pi * np.arange(-3, n_t + 3) / n_t
        padded = np.concatenate([v[:, -3:], v, v[:, :3]], axis=1)
        bbox = [0.0, 1.0, t[0], t[-1]]
        spl = (
            RectBivariateSpline(r, t, padded.real, bbox=bbox),
            RectBivariateSpline(r, t, padded.imag, bbox=bbox),
        )
        object.__setattr__(self, "_spline", spl)

    @property
    def grid(self) -> PolarGrid:
        return PolarGrid.build(*self.values.shape)

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        r = np.abs(zeta).ravel()
        t = np.mod(np.angle(zeta), 2.0 * np.pi).ravel()
        re, im = self._spline
        out = re.ev(r, t) + 1j * im.ev(r, t)
        return out.reshape(zeta.shape)

    def integral(self) -> complex:
        """Integral over the disk against dx dy on the table's own grid."""
        return complex(np.sum(self.values * self.grid.weights))

    def is_zero(self) -> bool:
        return not np.any(self.values)


Source = Union[BihPolynomial, TabulatedSource]


# --------------------------------------------------------------------------
# problem data


@dataclass(frozen=True, eq=False)
class ProblemData:
    gamma0: Trace
    gamma: Trace
    g: Source
    c: complex = 0.0j
    provenance: str = "tabulated"
    exact: BihPolynomial | None = None

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        if self.provenance not in ("manufactured", "tabulated"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.provenance == "manufactured" and self.exact is None:
            raise ValueError("manufactured problems carry their exact polynomial")

    def source(self, zeta):
        return self.g(zeta)

    def to_json(self) -> dict:
        if self.exact is not None:
            return self.exact.to_json()
        return {
            "type": "tabulated",
            "gamma0": _trace_samples_json(self.gamma0),
            "gamma": _trace_samples_json(self.gamma),
            "g": _source_json(self.g),
            "c": {"re": self.c.real, "im": self.c.imag},
        }


def manufactured_problem(w: BihPolynomial) -> ProblemData:
    """ProblemData whose exact solution is ``w``."""
    return ProblemData(
        gamma0=derive_gamma0(w),
        gamma=derive_gamma(w),
        g=derive_source(w),
        c=derive_c(w),
        provenance="manufactured",
        exact=w,
    )


def zero_problem() -> ProblemData:
    return manufactured_problem(BihPolynomial())


def trace_mean(trace: Trace, n: int) -> complex:
    if isinstance(trace, FourierTrace):
        return trace.coefficient(0)
    return complex(integrate_circle(lambda t: trace(t), max(n, trace.samples.size)))


def source_integral(g: Source, config: QuadConfig = QuadConfig()) -> complex:
    """Integral of the source against dx dy."""
    if isinstance(g, TabulatedSource):
        return g.integral()
    if g.is_zero():
        return 0.0j
    return complex(integrate_disk(lambda z: poly_eval(g, z), config).value)


def compatibility_residual(prob: ProblemData, config: QuadConfig = QuadConfig()) -> float:
    """``|mean(gamma) - (2/pi) int g dxdy|``.

    The area integral uses plain dx dy: with w = |z|^4 both sides equal 8,
    as Green's identity requires. The normalized measure would give 8/pi.
    """
    lhs = trace_mean(prob.gamma, config.n_theta)
    rhs = 2.0 / np.pi * source_integral(prob.g, config)
    return float(abs(lhs - rhs))


# --------------------------------------------------------------------------
# sup norms by dense sampling with local refinement


def boundary_sup(f, n: int = 4096) -> float:
    """``max |f(t)|`` over [0, 2 pi): dense samples then a bounded 1-d polish."""
    t = 2.0 * np.pi * np.arange(n) / n
    vals = np.abs(np.asarray(f(t)))
    k = int(np.argmax(vals))
    best = float(vals[k])
    h = 2.0 * np.pi / n
    res = minimize_scalar(
        lambda s: -float(np.abs(f(np.array([s])))[0]),
        bounds=(t[k] - h, t[k] + h),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return max(best, -float(res.fun))


def disk_sup(f, n_r: int = 256, n_theta: int = 256) -> float:
    """``max |f|`` over the closed disk: polar samples then a Nelder-Mead polish."""
    r = np.linspace(0.0, 1.0, n_r)
    t = 2.0 * np.pi * np.arange(n_theta) / n_theta
    pts = r[:, None] * np.exp(1j * t)[None, :]
    vals = np.abs(np.asarray(f(pts)))
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    best = float(vals[i, j])

    def neg(x):
        rr = min(max(x[0], 0.0), 1.0)
        return -float(np.abs(f(np.array([rr * np.exp(1j * x[1])])))[0])

    res = minimize(neg, x0=[r[i], t[j]], method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15})
    return max(best, -float(res.fun))


def trace_sup(trace: Trace, n: int = 4096) -> float:
    if trace.is_zero():
        return 0.0
    if isinstance(trace, TabulatedTrace):
        trace = trace.to_fourier()
    return boundary_sup(trace, n)


def source_sup(g: Source, n_r: int = 256, n_theta: int = 256) -> float:
    if g.is_zero():
        return 0.0
    if isinstance(g, TabulatedSource):
        return float(np.max(np.abs(g.values)))
    return disk_sup(g, n_r, n_theta)


# --------------------------------------------------------------------------
# random manufactured polynomials


def random_bih_polynomial(rng: np.random.Generator, max_degree: int = 6, density: float = 0.5) -> BihPolynomial:
    """Random polynomial with coefficients uniform in the unit box [-1, 1]^2."""
    terms = []
    for d in range(max_degree + 1):
        for p in range(d + 1):
            if rng.random() < density:
                c = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
                terms.append((p, d - p, c))
    return BihPolynomial(tuple(terms))


def landau_normalized(w: BihPolynomial) -> BihPolynomial:
    """Rescale ``w`` so that ``w(0) = 0`` and ``J_w(0) = |a_10|^2 - |a_01|^2 = 1``.

    The coefficient of ``z`` is shifted by 3 when needed to make the Jacobian
    positive; unit-box coefficients never exceed modulus sqrt(2).
    """
    coeffs = w.as_dict()
    coeffs.pop((0, 0), None)
    a = coeffs.get((1, 0), 0j)
    b = coeffs.get((0, 1), 0j)
    if abs(a) <= abs(b):
        a = a + 3.0 if a.real >= 0 else a - 3.0
        coeffs[(1, 0)] = a
    jac = abs(a) ** 2 - abs(b) ** 2
    scale = 1.0 / np.sqrt(jac)
    return BihPolynomial.from_dict({k: v * scale for k, v in coeffs.items()}, w.max_degree)


# --------------------------------------------------------------------------
# JSON problem files


def _complex_of(obj, what: str) -> complex:
    try:
        return complex(float(obj["re"]), float(obj.get("im", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ProblemFormatError(f"{what} must be an object with numeric 're' and 'im'") from exc


def _samples_of(obj, what: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ProblemFormatError(f"{what} must be a non-empty list")
    out = []
    for v in obj:
        if isinstance(v, (int, float)):
            out.append(complex(v))
        elif isinstance(v, dict):
            out.append(_complex_of(v, what))
        elif isinstance(v, list) and len(v) == 2:
            out.append(complex(float(v[0]), float(v[1])))
        else:
            raise ProblemFormatError(f"bad sample {v!r} in {what}")
    return np.array(out, dtype=complex)


def _trace_samples_json(trace: Trace) -> list:
    if isinstance(trace, FourierTrace):
        n = max(8, 2 * int(np.max(np.abs(trace.freqs), initial=0)) + 2)
        s = trace(2.0 * np.pi * np.arange(n) / n)
    else:
        s = trace.samples
    return [{"re": v.real, "im": v.imag} for v in s]


def _source_json(g: Source) -> dict:
    if isinstance(g, TabulatedSource):
        vals = g.values
    else:
        grid = PolarGrid.build(16, 32)
        vals = np.asarray(poly_eval(g, grid.points))
    n_r, n_t = vals.shape
    return {
        "n_r": n_r,
        "n_theta": n_t,
        "values": [{"re": v.real, "im": v.imag} for v in vals.ravel()],
    }


def problem_from_json(spec: Mapping) -> ProblemData:
    """Build ProblemData from a parsed problem-spec document."""
    if not isinstance(spec, Mapping):
        raise ProblemFormatError("problem spec must be a JSON object")
    kind = spec.get("type")
    if kind == "poly":
        terms = spec.get("terms")
        if not isinstance(terms, list):
            raise ProblemFormatError("'terms' must be a list")
        parsed = []
        for t in terms:
            try:
                parsed.append((int(t["p"]), int(t["q"]), complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))))
            except (KeyError, TypeError, ValueError) as exc:
                raise ProblemFormatError(f"bad term {t!r}") from exc
        try:
            w = BihPolynomial(tuple(parsed))
        except ValueError as exc:
            raise ProblemFormatError(str(exc)) from exc
        return manufactured_problem(w)
    if kind == "tabulated":
        try:
            gamma0 = TabulatedTrace(_samples_of(spec["gamma0"], "gamma0"))
            gamma = TabulatedTrace(_samples_of(spec["gamma"], "gamma"))
            gspec = spec["g"]
            n_r, n_t = int(gspec["n_r"]), int(gspec["n_theta"])
            vals = _samples_of(gspec["values"], "g.values")
            if vals.size != n_r * n_t:
                raise ProblemFormatError(f"g.values has {vals.size} entries, expected {n_r}*{n_t}")
            g = TabulatedSource(vals.reshape(n_r, n_t))
            c = _complex_of(spec.get("c", {"re": 0.0, "im": 0.0}), "c")
        except KeyError as exc:
            raise ProblemFormatError(f"missing field {exc}") from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ProblemFormatError):
                raise
            raise ProblemFormatError(str(exc)) from exc
        return ProblemData(gamma0=gamma0, gamma=gamma, g=g, c=c, provenance="tabulated")
    raise ProblemFormatError(f"unknown problem type {kind!r}; expected 'poly' or 'tabulated'")


def load_problem(path: str | Path) -> ProblemData:
    try:
        spec = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"malformed JSON in {path}: {exc}") from exc
    return problem_from_json(spec)


def dump_problem(prob: ProblemData, path: str | Path) -> None:
    Path(path).write_text(json.dumps(prob.to_json(), indent=2))


def polynomial(terms: Iterable[tuple[int, int, complex]]) -> BihPolynomial:
    """Shorthand: ``polynomial([(2, 2, 1)])`` is ``z^2 zbar^2``."""
    return BihPolynomial(tuple(terms))
