"""Shared numeric kernel.

Univariate adaptive quadrature, the Debye-1 integral, standard/bivariate
normal distribution functions, bracketed root finding, bounded 1-D
maximization, central finite differences, and splittable deterministic
RNG streams. Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _integrate
from scipy import optimize as _optimize
from scipy import special as _special

_EPS = np.finfo(float).eps
LOG_TINY = math.log(1e-300)


class NumericsError(Exception):
    """Base class for numeric-kernel failures."""


class QuadratureError(NumericsError):
    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(f"{message} (best estimate {estimate!r}, bound {error_bound!r})")
        self.estimate = estimate
        self.error_bound = error_bound


class BracketError(NumericsError):
    pass


class OptimizationError(NumericsError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


def integrate(f, a: float, b: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Adaptive quadrature of ``f`` on (a, b); endpoints may be infinite."""
    if not (a <= b):
        raise ValueError(f"integration bounds out of order: {a} > {b}")
    result = _integrate.quad(
        f, a, b,
        epsabs=spec.abs_tol, epsrel=spec.rel_tol,
        limit=spec.max_subdivisions, full_output=1,
    )
    if len(result) > 3:
        raise QuadratureError(str(result[3]), estimate=result[0], error_bound=result[1])
    return result[0]


def debye1(theta: float) -> float:
    """Debye function of order one, (1/theta) * int_0^theta t/(e^t - 1) dt."""
    if theta <= 0:
        raise ValueError(f"debye1 requires theta > 0, got {theta}")

    def integrand(t):
        # t/(e^t - 1) -> 1 as t -> 0; expm1 keeps the small-t branch exact
        return t / math.expm1(t) if t > 0 else 1.0

    return integrate(integrand, 0.0, theta) / theta


def norm_pdf(z):
    return np.exp(-0.5 * np.square(z)) / math.sqrt(2.0 * math.pi)


def norm_cdf(z):
    return _special.ndtr(z)


def norm_logcdf(z):
    return _special.log_ndtr(z)


def norm_quantile(u):
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr <= 0.0) or np.any(u_arr >= 1.0):
        raise ValueError("norm_quantile requires u in (0, 1)")
    out = _special.ndtri(u_arr)
    return float(out) if np.isscalar(u) or out.ndim == 0 else out


def binorm_pdf(z1, z2, rho: float):
    """Standard bivariate normal density with correlation rho."""
    if not abs(rho) < 1:
        raise ValueError(f"binorm_pdf requires |rho| < 1, got {rho}")
    s2 = 1.0 - rho * rho
    q = (np.square(z1) + np.square(z2) - 2.0 * rho * np.asarray(z1) * np.asarray(z2)) / (2.0 * s2)
    return np.exp(-q) / (2.0 * math.pi * math.sqrt(s2))


_BINORM_SPEC = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-12, max_subdivisions=200)


def binorm_cdf(z1: float, z2: float, rho: float) -> float:
    """P(Z1 <= z1, Z2 <= z2) for standard bivariate normal via 1-D reduction.

    Computed as the integral of phi(t) * Phi((z2 - rho t)/sqrt(1-rho^2))
    over t in (-inf, z1). Relative accuracy near quadrature tolerance, so
    small corner probabilities keep their leading digits.
    """
    if not abs(rho) < 1:
        raise ValueError(f"binorm_cdf requires |rho| < 1, got {rho}")
    if math.isinf(z1) and z1 > 0 and math.isinf(z2) and z2 > 0:
        return 1.0
    if math.isinf(z1):
        return float(norm_cdf(z2)) if z1 > 0 else 0.0
    if math.isinf(z2):
        return float(norm_cdf(z1)) if z2 > 0 else 0.0
    s = math.sqrt(1.0 - rho * rho)

    def integrand(t):
        return float(norm_pdf(t)) * float(norm_cdf((z2 - rho * t) / s))

    return integrate(integrand, -np.inf, z1, _BINORM_SPEC)


def find_root(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Brent-style bracketed root finding; requires a sign change on [lo, hi]."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")
    return float(_optimize.brentq(f, lo, hi, xtol=tol))


def maximize_1d(f, lo: float, hi: float, tol: float = 1e-8) -> tuple[float, float]:
    """Bounded scalar maximization (golden-section/parabolic hybrid).

    Returns (argmax, max). Raises OptimizationError if more than 20% of
    the probed points evaluate non-finite.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    counts = [0, 0]  # total, non-finite

    def neg(x):
        counts[0] += 1
        v = f(x)
        if not np.isfinite(v):
            counts[1] += 1
            return 1e300
        return -v

    res = _optimize.minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                                    options={"xatol": tol})
    if counts[1] > 0.2 * counts[0]:
        raise OptimizationError(
            f"objective non-finite at {counts[1]}/{counts[0]} probes on [{lo}, {hi}]")
    x = float(res.x)
    fx = f(x)
    if not np.isfinite(fx):
        raise OptimizationError(f"objective non-finite at reported optimum {x}")
    return x, float(fx)


def fd_derivative(f, x: float, order: int) -> float:
    """Central finite difference of order 1 or 2 at x."""
    if order == 1:
        h = _EPS ** (1.0 / 3.0) * max(1.0, abs(x))
        return (f(x + h) - f(x - h)) / (2.0 * h)
    if order == 2:
        h = _EPS ** 0.25 * max(1.0, abs(x))
        return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
    raise ValueError(f"order must be 1 or 2, got {order}")


@dataclass(frozen=True)
class RngStream:
    """A deterministic, platform-independent random stream.

    Identical (master_seed, stream_index) pairs produce bit-identical
    sequences regardless of platform or thread count. Streams with
    distinct indices are statistically independent.
    """

    master_seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.PCG64(seq))

    def uniform(self, n: int) -> np.ndarray:
        return self.generator().random(n)


def derive_seed(master_seed: int, *key: int) -> int:
    """Deterministically derive a sub-seed from a master seed and a key path."""
    seq = np.random.SeedSequence(master_seed, spawn_key=tuple(key))
    return int(seq.generate_state(1, np.uint64)[0])
