"""Five bivariate copula families with censored-likelihood machinery.

Clayton, Frank, Joe, and Gaussian carry analytic first/second derivatives
of the log-likelihood in the dependence parameter; Gumbel differentiates
numerically. Each family exposes the copula function, its partial
derivatives in the arguments, the four censoring-case log pieces, the
Kendall-tau/parameter bijection, and a conditional-inverse sampler.

The censored log-likelihood of one observation (u1, u2, d1, d2) selects a
single piece: the copula density for a doubly observed pair, a partial
derivative when exactly one margin is censored, and the copula function
itself when both are censored.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _special

from . import numerics
from .numerics import LOG_TINY, RngStream

_SQRT2PI = math.sqrt(2.0 * math.pi)


class CopulaError(Exception):
    pass


class LikelihoodError(CopulaError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message if index is None else f"{message} (observation {index})")
        self.index = index


class Family(enum.Enum):
    CLAYTON = "clayton"
    FRANK = "frank"
    JOE = "joe"
    GAUSSIAN = "gaussian"
    GUMBEL = "gumbel"

    @classmethod
    def parse(cls, name: str) -> "Family":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = "|".join(f.value for f in cls)
            raise ValueError(f"unknown copula family {name!r}; expected one of {valid}") from None


# canonical ordering used for stream allocation in the bootstrap engine
FAMILY_ORDER = tuple(Family)


@dataclass(frozen=True)
class CopulaModel:
    family: Family
    theta: float

    def __post_init__(self):
        ops = _OPS[self.family]
        if not ops.in_domain(self.theta):
            lo, hi = ops.domain
            raise ValueError(
                f"theta={self.theta} outside open domain ({lo}, {hi}) of {self.family.value}")


@dataclass(frozen=True)
class PseudoObservation:
    u1: float
    u2: float
    d1: int
    d2: int

    def __post_init__(self):
        if not (0.0 < self.u1 < 1.0 and 0.0 < self.u2 < 1.0):
            raise ValueError(f"pseudo-observations must lie strictly in (0,1): {self}")
        if self.d1 not in (0, 1) or self.d2 not in (0, 1):
            raise ValueError(f"censoring indicators must be 0 or 1: {self}")


def obs_arrays(obs) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    u1 = np.array([o.u1 for o in obs], dtype=float)
    u2 = np.array([o.u2 for o in obs], dtype=float)
    d1 = np.array([o.d1 for o in obs], dtype=np.int8)
    d2 = np.array([o.d2 for o in obs], dtype=np.int8)
    return u1, u2, d1, d2


# ---------------------------------------------------------------------------
# family implementations (vectorized over u1, u2; theta scalar)
# ---------------------------------------------------------------------------


class _Clayton:
    domain = (0.0, math.inf)
    analytic = True
    tau_domain = (0.0, 1.0)

    @staticmethod
    def in_domain(theta):
        return theta > 0.0

    @staticmethod
    def _core(theta, u1, u2):
        t1 = u1 ** -theta
        t2 = u2 ** -theta
        s = t1 + t2 - 1.0
        return t1, t2, s, np.log(s)

    @classmethod
    def log_cdf(cls, theta, u1, u2):
        _, _, _, psi = cls._core(theta, u1, u2)
        return -psi / theta

    @classmethod
    def log_c1(cls, theta, u1, u2):
        _, _, _, psi = cls._core(theta, u1, u2)
        return -(1.0 + theta) * np.log(u1) - (1.0 / theta + 1.0) * psi

    @classmethod
    def log_c2(cls, theta, u1, u2):
        return cls.log_c1(theta, u2, u1)

    @classmethod
    def log_pdf(cls, theta, u1, u2):
        _, _, _, psi = cls._core(theta, u1, u2)
        return (math.log1p(theta) - (1.0 + theta) * (np.log(u1) + np.log(u2))
                - (1.0 / theta + 2.0) * psi)

    @classmethod
    def _psi_derivs(cls, theta, u1, u2):
        lu1, lu2 = np.log(u1), np.log(u2)
        t1, t2, s, psi = cls._core(theta, u1, u2)
        a = t1 * lu1 + t2 * lu2
        b = t1 * lu1 ** 2 + t2 * lu2 ** 2
        psi_t = -a / s
        psi_tt = b / s - (a / s) ** 2
        return lu1, lu2, psi, psi_t, psi_tt

    @classmethod
    def dlog_cdf(cls, theta, u1, u2):
        _, _, psi, psi_t, psi_tt = cls._psi_derivs(theta, u1, u2)
        d1 = -psi_t / theta + psi / theta ** 2
        d2 = -psi_tt / theta + 2.0 * psi_t / theta ** 2 - 2.0 * psi / theta ** 3
        return d1, d2

    @classmethod
    def dlog_c1(cls, theta, u1, u2):
        lu1, _, psi, psi_t, psi_tt = cls._psi_derivs(theta, u1, u2)
        d1 = -lu1 + psi / theta ** 2 - (1.0 / theta + 1.0) * psi_t
        d2 = (-2.0 * psi / theta ** 3 + 2.0 * psi_t / theta ** 2
              - (1.0 / theta + 1.0) * psi_tt)
        return d1, d2

    @classmethod
    def dlog_c2(cls, theta, u1, u2):
        return cls.dlog_c1(theta, u2, u1)

    @classmethod
    def dlog_pdf(cls, theta, u1, u2):
        lu1, lu2, psi, psi_t, psi_tt = cls._psi_derivs(theta, u1, u2)
        d1 = (1.0 / (1.0 + theta) - lu1 - lu2 + psi / theta ** 2
              - (1.0 / theta + 2.0) * psi_t)
        d2 = (-1.0 / (1.0 + theta) ** 2 + 2.0 * psi_t / theta ** 2
              - 2.0 * psi / theta ** 3 - (1.0 / theta + 2.0) * psi_tt)
        return d1, d2

    @staticmethod
    def theta_to_tau(theta):
        return theta / (theta + 2.0)

    @staticmethod
    def tau_to_theta(tau):
        return 2.0 * tau / (1.0 - tau)

    @staticmethod
    def inv_conditional(theta, u1, w):
        # closed-form inverse of c1(u1, .) at level w
        t1 = u1 ** -theta
        return (1.0 + t1 * (w ** (-theta / (1.0 + theta)) - 1.0)) ** (-1.0 / theta)


class _Frank:
    # positive-dependence branch only
    domain = (0.0, math.inf)
    analytic = True
    tau_domain = (0.0, 1.0)

    @staticmethod
    def in_domain(theta):
        return theta > 0.0

    @staticmethod
    def _core(theta, u1, u2):
        g = -math.expm1(-theta)          # 1 - e^{-theta}
        g1 = -np.expm1(-theta * u1)
        g2 = -np.expm1(-theta * u2)
        zeta = g1 * g2 / g
        return g, g1, g2, zeta, 1.0 - zeta

    @classmethod
    def log_cdf(cls, theta, u1, u2):
        _, _, _, zeta, omz = cls._core(theta, u1, u2)
        return np.log(-np.log(omz) / theta)

    @classmethod
    def log_c1(cls, theta, u1, u2):
        g, _, g2, _, omz = cls._core(theta, u1, u2)
        return -theta * u1 + np.log(g2) - math.log(g) - np.log(omz)

    @classmethod
    def log_c2(cls, theta, u1, u2):
        return cls.log_c1(theta, u2, u1)

    @classmethod
    def log_pdf(cls, theta, u1, u2):
        g, _, _, _, omz = cls._core(theta, u1, u2)
        return math.log(theta) - theta * (u1 + u2) - math.log(g) - 2.0 * np.log(omz)

    @classmethod
    def _zeta_derivs(cls, theta, u1, u2):
        g, g1, g2, zeta, omz = cls._core(theta, u1, u2)
        e1 = np.exp(-theta * u1)
        e2 = np.exp(-theta * u2)
        em = math.exp(-theta)
        lz_t = u1 * e1 / g1 + u2 * e2 / g2 - em / g
        lz_tt = -(u1 ** 2) * e1 / g1 ** 2 - (u2 ** 2) * e2 / g2 ** 2 + em / g ** 2
        z_t = zeta * lz_t
        z_tt = zeta * (lz_tt + lz_t ** 2)
        return g, e1, e2, em, zeta, omz, z_t, z_tt

    @classmethod
    def dlog_cdf(cls, theta, u1, u2):
        g, _, _, _, zeta, omz, z_t, z_tt = cls._zeta_derivs(theta, u1, u2)
        logomz = np.log(omz)
        c = -logomz / theta
        c_t = logomz / theta ** 2 + z_t / (theta * omz)
        c_tt = (-2.0 * logomz / theta ** 3 - 2.0 * z_t / (theta ** 2 * omz)
                + z_tt / (theta * omz) + z_t ** 2 / (theta * omz ** 2))
        return c_t / c, c_tt / c - (c_t / c) ** 2

    @classmethod
    def dlog_c1(cls, theta, u1, u2):
        g, _, e2, em, _, omz, z_t, z_tt = cls._zeta_derivs(theta, u1, u2)
        g2 = -np.expm1(-theta * u2)
        d1 = z_t / omz - u1 + u2 * e2 / g2 - em / g
        d2 = z_tt / omz + z_t ** 2 / omz ** 2 - (u2 ** 2) * e2 / g2 ** 2 + em / g ** 2
        return d1, d2

    @classmethod
    def dlog_c2(cls, theta, u1, u2):
        return cls.dlog_c1(theta, u2, u1)

    @classmethod
    def dlog_pdf(cls, theta, u1, u2):
        g, _, _, em, _, omz, z_t, z_tt = cls._zeta_derivs(theta, u1, u2)
        d1 = 2.0 * z_t / omz + 1.0 / theta - u1 - u2 - em / g
        d2 = 2.0 * z_tt / omz + 2.0 * z_t ** 2 / omz ** 2 - 1.0 / theta ** 2 + em / g ** 2
        return d1, d2

    @staticmethod
    def theta_to_tau(theta):
        return 1.0 - 4.0 * (1.0 - numerics.debye1(theta)) / theta

    @classmethod
    def tau_to_theta(cls, tau):
        return numerics.find_root(lambda t: cls.theta_to_tau(t) - tau, 1e-8, 700.0, tol=1e-12)

    @staticmethod
    def inv_conditional(theta, u1, w):
        g = -math.expm1(-theta)
        g1 = -np.expm1(-theta * u1)
        e1 = np.exp(-theta * u1)
        g2 = w * g / (e1 + w * g1)
        return -np.log1p(-g2) / theta


class _Joe:
    domain = (1.0, math.inf)
    analytic = True
    tau_domain = (0.0, 1.0)

    @staticmethod
    def in_domain(theta):
        return theta > 1.0

    @staticmethod
    def _core(theta, u1, u2):
        v1 = 1.0 - u1
        v2 = 1.0 - u2
        a1 = v1 ** theta
        a2 = v2 ** theta
        gamma = a1 + a2 - a1 * a2
        return v1, v2, a1, a2, gamma

    @classmethod
    def log_cdf(cls, theta, u1, u2):
        _, _, _, _, gamma = cls._core(theta, u1, u2)
        return np.log1p(-np.exp(np.log(gamma) / theta))

    @classmethod
    def log_c1(cls, theta, u1, u2):
        v1, _, _, a2, gamma = cls._core(theta, u1, u2)
        return ((1.0 / theta - 1.0) * np.log(gamma) + np.log1p(-a2)
                + (theta - 1.0) * np.log(v1))

    @classmethod
    def log_c2(cls, theta, u1, u2):
        return cls.log_c1(theta, u2, u1)

    @classmethod
    def log_pdf(cls, theta, u1, u2):
        v1, v2, a1, a2, gamma = cls._core(theta, u1, u2)
        k = theta * gamma + (theta - 1.0) * (1.0 - a1) * (1.0 - a2)
        return ((1.0 / theta - 2.0) * np.log(gamma)
                + (theta - 1.0) * (np.log(v1) + np.log(v2)) + np.log(k))

    @classmethod
    def _gamma_derivs(cls, theta, u1, u2):
        v1, v2, a1, a2, gamma = cls._core(theta, u1, u2)
        l1, l2 = np.log(v1), np.log(v2)
        g_t = a1 * l1 + a2 * l2 - a1 * a2 * (l1 + l2)
        g_tt = a1 * l1 ** 2 + a2 * l2 ** 2 - a1 * a2 * (l1 + l2) ** 2
        return v1, v2, a1, a2, l1, l2, gamma, g_t, g_tt

    @classmethod
    def dlog_cdf(cls, theta, u1, u2):
        _, _, _, _, _, _, gamma, g_t, g_tt = cls._gamma_derivs(theta, u1, u2)
        lg = np.log(gamma)
        g1 = np.exp(lg / theta)                       # Gamma^{1/theta}
        g1_t = g1 * (-lg / theta ** 2 + g_t / (theta * gamma))
        g1_tt = (2.0 * g1 * lg / theta ** 3
                 - (g1_t * lg + 2.0 * g1 / gamma * g_t) / theta ** 2
                 + (g_tt * g1 / gamma + g_t * g1_t / gamma
                    - g_t ** 2 * g1 / gamma ** 2) / theta)
        omg = 1.0 - g1
        return -g1_t / omg, -g1_tt / omg - (g1_t / omg) ** 2

    @classmethod
    def dlog_c1(cls, theta, u1, u2):
        _, _, _, a2, l1, l2, gamma, g_t, g_tt = cls._gamma_derivs(theta, u1, u2)
        lg = np.log(gamma)
        d1 = -lg / theta ** 2 + (1.0 / theta - 1.0) * g_t / gamma - a2 * l2 / (1.0 - a2) + l1
        d2 = (2.0 * lg / theta ** 3 - 2.0 * g_t / (gamma * theta ** 2)
              + (1.0 / theta - 1.0) * (g_tt / gamma - (g_t / gamma) ** 2)
              - a2 * l2 ** 2 / (1.0 - a2) ** 2)
        return d1, d2

    @classmethod
    def dlog_c2(cls, theta, u1, u2):
        return cls.dlog_c1(theta, u2, u1)

    @classmethod
    def dlog_pdf(cls, theta, u1, u2):
        _, _, a1, a2, l1, l2, gamma, g_t, g_tt = cls._gamma_derivs(theta, u1, u2)
        lg = np.log(gamma)
        p = (1.0 - a1) * (1.0 - a2)
        p_t = -a1 * l1 * (1.0 - a2) - a2 * l2 * (1.0 - a1)
        p_tt = (-a1 * l1 ** 2 * (1.0 - a2) - a2 * l2 ** 2 * (1.0 - a1)
                + 2.0 * a1 * a2 * l1 * l2)
        k = theta * gamma + (theta - 1.0) * p
        k_t = gamma + theta * g_t + p + (theta - 1.0) * p_t
        k_tt = 2.0 * g_t + theta * g_tt + 2.0 * p_t + (theta - 1.0) * p_tt
        d1 = -lg / theta ** 2 + (1.0 / theta - 2.0) * g_t / gamma + l1 + l2 + k_t / k
        d2 = (2.0 * lg / theta ** 3 - 2.0 * g_t / (gamma * theta ** 2)
              + (1.0 / theta - 2.0) * (g_tt / gamma - (g_t / gamma) ** 2)
              + k_tt / k - (k_t / k) ** 2)
        return d1, d2

    @staticmethod
    def theta_to_tau(theta):
        # series form of the tau integral; terms decay like 1/(theta^2 k^3)
        total = 0.0
        k = np.arange(1.0, 1e5 + 1.0)
        terms = 1.0 / (k * (theta * k + 2.0) * (theta * (k - 1.0) + 2.0))
        total = float(terms.sum())
        # tail estimate from the 1/(theta^2 k^3) asymptote
        kmax = k[-1]
        total += 1.0 / (2.0 * theta ** 2 * kmax ** 2)
        return 1.0 - 4.0 * total

    @classmethod
    def tau_to_theta(cls, tau):
        return numerics.find_root(lambda t: cls.theta_to_tau(t) - tau,
                                  1.0 + 1e-8, 500.0, tol=1e-12)

    @classmethod
    def inv_conditional(cls, theta, u1, w):
        return _bisect_conditional(cls, theta, u1, w)


class _Gaussian:
    domain = (-1.0, 1.0)
    analytic = True
    tau_domain = (-1.0, 1.0)

    @staticmethod
    def in_domain(theta):
        return -1.0 < theta < 1.0

    @staticmethod
    def _z(u1, u2):
        return _special.ndtri(u1), _special.ndtri(u2)

    @classmethod
    def log_cdf(cls, theta, u1, u2):
        z1, z2 = cls._z(u1, u2)
        shape = np.shape(z1)
        z1f = np.atleast_1d(z1).ravel()
        z2f = np.atleast_1d(z2).ravel()
        vals = np.array([numerics.binorm_cdf(float(a), float(b), theta)
                         for a, b in zip(z1f, z2f)])
        with np.errstate(divide="ignore"):
            out = np.log(vals)
        return out.reshape(shape)

    @classmethod
    def log_c1(cls, theta, u1, u2):
        z1, z2 = cls._z(u1, u2)
        s = math.sqrt(1.0 - theta * theta)
        return _special.log_ndtr((z2 - theta * z1) / s)

    @classmethod
    def log_c2(cls, theta, u1, u2):
        return cls.log_c1(theta, u2, u1)

    @classmethod
    def log_pdf(cls, theta, u1, u2):
        z1, z2 = cls._z(u1, u2)
        s2 = 1.0 - theta * theta
        return (-0.5 * math.log(s2)
                - (np.square(z1) + np.square(z2) - 2.0 * theta * z1 * z2) / (2.0 * s2)
                + 0.5 * (np.square(z1) + np.square(z2)))

    @classmethod
    def _phi2_tilde(cls, theta, z1, z2):
        s2 = 1.0 - theta * theta
        zz = z1 * z2
        zsq = np.square(z1) + np.square(z2)
        d1 = (theta * s2 - theta * zsq + (1.0 + theta ** 2) * zz) / s2 ** 2
        d2 = ((1.0 + theta ** 2) / s2 ** 2
              + ((6.0 * theta + 2.0 * theta ** 3) * zz - (1.0 + 3.0 * theta ** 2) * zsq)
              / s2 ** 3)
        return d1, d2

    @classmethod
    def dlog_cdf(cls, theta, u1, u2):
        z1, z2 = cls._z(u1, u2)
        z1a = np.atleast_1d(z1).ravel()
        z2a = np.atleast_1d(z2).ravel()
        cvals = np.array([numerics.binorm_cdf(float(a), float(b), theta)
                          for a, b in zip(z1a, z2a)])
        pdf2 = numerics.binorm_pdf(z1a, z2a, theta)
        lt, ltt = cls._phi2_tilde(theta, z1a, z2a)
        ratio = pdf2 / cvals                      # Plackett: dC/dtheta = phi2
        d1 = ratio
        d2 = pdf2 * lt / cvals - ratio ** 2
        shape = np.shape(z1)
        return d1.reshape(shape), d2.reshape(shape)

    @classmethod
    def dlog_c1(cls, theta, u1, u2):
        z1, z2 = cls._z(u1, u2)
        s2 = 1.0 - theta * theta
        s = math.sqrt(s2)
        a = (z2 - theta * z1) / s
        a_t = (theta * z2 - z1) / s2 ** 1.5
        a_tt = z2 / s2 ** 1.5 + (theta * z2 - z1) * 3.0 * theta / s2 ** 2.5
        # phi(a)/Phi(a), computed in log space for deep-tail stability
        r = np.exp(-0.5 * np.square(a) - math.log(_SQRT2PI) - _special.log_ndtr(a))
        d1 = r * a_t
        d2 = r * (a_tt - a * a_t ** 2) - d1 ** 2
        return d1, d2

    @classmethod
    def dlog_c2(cls, theta, u1, u2):
        return cls.dlog_c1(theta, u2, u1)

    @classmethod
    def dlog_pdf(cls, theta, u1, u2):
        z1, z2 = cls._z(u1, u2)
        return cls._phi2_tilde(theta, z1, z2)

    @staticmethod
    def theta_to_tau(theta):
        return 2.0 / math.pi * math.asin(theta)

    @staticmethod
    def tau_to_theta(tau):
        return math.sin(math.pi * tau / 2.0)

    @staticmethod
    def inv_conditional(theta, u1, w):
        z1 = _special.ndtri(u1)
        s = math.sqrt(1.0 - theta * theta)
        return _special.ndtr(theta * z1 + s * _special.ndtri(w))


class _Gumbel:
    domain = (1.0, math.inf)
    analytic = False
    tau_domain = (0.0, 1.0)

    @staticmethod
    def in_domain(theta):
        return theta > 1.0

    @staticmethod
    def _core(theta, u1, u2):
        x1 = -np.log(u1)
        x2 = -np.log(u2)
        a = x1 ** theta + x2 ** theta
        a1 = a ** (1.0 / theta)
        return x1, x2, a, a1

    @classmethod
    def log_cdf(cls, theta, u1, u2):
        return -cls._core(theta, u1, u2)[3]

    @classmethod
    def log_c1(cls, theta, u1, u2):
        x1, _, a, a1 = cls._core(theta, u1, u2)
        return -a1 + (1.0 / theta - 1.0) * np.log(a) + (theta - 1.0) * np.log(x1) + x1

    @classmethod
    def log_c2(cls, theta, u1, u2):
        return cls.log_c1(theta, u2, u1)

    @classmethod
    def log_pdf(cls, theta, u1, u2):
        x1, x2, a, a1 = cls._core(theta, u1, u2)
        return (-a1 + (theta - 1.0) * (np.log(x1) + np.log(x2)) + x1 + x2
                + (1.0 / theta - 2.0) * np.log(a) + np.log(a1 + theta - 1.0))

    @staticmethod
    def theta_to_tau(theta):
        return 1.0 - 1.0 / theta

    @staticmethod
    def tau_to_theta(tau):
        return 1.0 / (1.0 - tau)

    @classmethod
    def inv_conditional(cls, theta, u1, w):
        return _bisect_conditional(cls, theta, u1, w)


def _bisect_conditional(ops, theta, u1, w, iters: int = 60):
    """Vectorized bisection inverse of u2 -> c1(u1, u2) at level w."""
    u1 = np.asarray(u1, dtype=float)
    w = np.asarray(w, dtype=float)
    lo = np.full_like(w, 1e-12)
    hi = np.full_like(w, 1.0 - 1e-12)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        f = np.exp(ops.log_c1(theta, u1, mid))
        above = f >= w
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return 0.5 * (lo + hi)


_OPS = {
    Family.CLAYTON: _Clayton,
    Family.FRANK: _Frank,
    Family.JOE: _Joe,
    Family.GAUSSIAN: _Gaussian,
    Family.GUMBEL: _Gumbel,
}


def family_ops(family: Family):
    return _OPS[family]


# ---------------------------------------------------------------------------
# public pointwise surface
# ---------------------------------------------------------------------------


def cdf(m: CopulaModel, u1, u2):
    out = np.exp(_OPS[m.family].log_cdf(m.theta, np.asarray(u1, float), np.asarray(u2, float)))
    return float(out) if np.isscalar(u1) else out


def partial_u1(m: CopulaModel, u1, u2):
    out = np.exp(_OPS[m.family].log_c1(m.theta, np.asarray(u1, float), np.asarray(u2, float)))
    return float(out) if np.isscalar(u1) else out


def partial_u2(m: CopulaModel, u1, u2):
    out = np.exp(_OPS[m.family].log_c2(m.theta, np.asarray(u1, float), np.asarray(u2, float)))
    return float(out) if np.isscalar(u1) else out


def density(m: CopulaModel, u1, u2):
    out = np.exp(_OPS[m.family].log_pdf(m.theta, np.asarray(u1, float), np.asarray(u2, float)))
    return float(out) if np.isscalar(u1) else out


_PIECES = ("log_pdf", "log_c1", "log_c2", "log_cdf")
_DPIECES = ("dlog_pdf", "dlog_c1", "dlog_c2", "dlog_cdf")


def _case_masks(d1, d2):
    d1 = np.asarray(d1).astype(bool)
    d2 = np.asarray(d2).astype(bool)
    return (d1 & d2, d1 & ~d2, ~d1 & d2, ~d1 & ~d2)


def loglik_vec(family: Family, theta: float, u1, u2, d1, d2, strict: bool = True):
    """Per-observation censored log-likelihood, vectorized.

    Log pieces below log(1e-300) are clamped there so optimization near
    parameter boundaries stays finite. NaNs raise LikelihoodError when
    strict, otherwise map to -inf (optimizers treat the point as invalid).
    """
    ops = _OPS[family]
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    out = np.empty(u1.shape, dtype=float)
    with np.errstate(all="ignore"):
        for mask, piece in zip(_case_masks(d1, d2), _PIECES):
            if mask.any():
                out[mask] = getattr(ops, piece)(theta, u1[mask], u2[mask])
    bad = ~np.isfinite(out)
    if bad.any():
        neginf = np.isneginf(out)
        out[neginf] = LOG_TINY
        still_bad = ~np.isfinite(out)
        if still_bad.any():
            if strict:
                idx = int(np.argmax(still_bad))
                raise LikelihoodError(
                    f"non-finite log-likelihood for {family.value} at theta={theta}",
                    index=idx)
            out[still_bad] = -np.inf
    return np.maximum(out, LOG_TINY)


def _fd_steps(theta: float, order: int) -> float:
    eps = np.finfo(float).eps
    scale = max(1.0, abs(theta))
    return (eps ** (1.0 / 3.0) if order == 1 else eps ** 0.25) * scale


def score_vec(family: Family, theta: float, u1, u2, d1, d2):
    ops = _OPS[family]
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    if ops.analytic:
        out = np.empty(u1.shape, dtype=float)
        with np.errstate(all="ignore"):
            for mask, dpiece in zip(_case_masks(d1, d2), _DPIECES):
                if mask.any():
                    out[mask] = getattr(ops, dpiece)(theta, u1[mask], u2[mask])[0]
        if not np.isfinite(out).all():
            idx = int(np.argmax(~np.isfinite(out)))
            raise LikelihoodError(
                f"non-finite score for {family.value} at theta={theta}", index=idx)
        return out
    h = _fd_steps(theta, 1)
    hi = loglik_vec(family, theta + h, u1, u2, d1, d2)
    lo = loglik_vec(family, theta - h, u1, u2, d1, d2)
    return (hi - lo) / (2.0 * h)


def hessian_vec(family: Family, theta: float, u1, u2, d1, d2):
    ops = _OPS[family]
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    if ops.analytic:
        out = np.empty(u1.shape, dtype=float)
        with np.errstate(all="ignore"):
            for mask, dpiece in zip(_case_masks(d1, d2), _DPIECES):
                if mask.any():
                    out[mask] = getattr(ops, dpiece)(theta, u1[mask], u2[mask])[1]
        if not np.isfinite(out).all():
            idx = int(np.argmax(~np.isfinite(out)))
            raise LikelihoodError(
                f"non-finite hessian for {family.value} at theta={theta}", index=idx)
        return out
    h = _fd_steps(theta, 2)
    mid = loglik_vec(family, theta, u1, u2, d1, d2)
    hi = loglik_vec(family, theta + h, u1, u2, d1, d2)
    lo = loglik_vec(family, theta - h, u1, u2, d1, d2)
    return (hi - 2.0 * mid + lo) / (h * h)


def loglik(m: CopulaModel, p: PseudoObservation) -> float:
    return float(loglik_vec(m.family, m.theta,
                            np.array([p.u1]), np.array([p.u2]),
                            np.array([p.d1]), np.array([p.d2]))[0])


def score(m: CopulaModel, p: PseudoObservation) -> float:
    return float(score_vec(m.family, m.theta,
                           np.array([p.u1]), np.array([p.u2]),
                           np.array([p.d1]), np.array([p.d2]))[0])


def hessian(m: CopulaModel, p: PseudoObservation) -> float:
    return float(hessian_vec(m.family, m.theta,
                             np.array([p.u1]), np.array([p.u2]),
                             np.array([p.d1]), np.array([p.d2]))[0])


def theta_to_tau(family: Family, theta: float) -> float:
    ops = _OPS[family]
    if not ops.in_domain(theta):
        raise ValueError(f"theta={theta} outside the {family.value} domain")
    return float(ops.theta_to_tau(theta))


def tau_to_theta(family: Family, tau: float) -> float:
    ops = _OPS[family]
    lo, hi = ops.tau_domain
    if not (lo < tau < hi) or (family is Family.GAUSSIAN and tau == 0.0):
        raise ValueError(f"tau={tau} outside the admissible range for {family.value}")
    return float(ops.tau_to_theta(tau))


def sample_pairs(m: CopulaModel, rng, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw n pairs by the conditional-distribution method.

    ``rng`` is an RngStream or a numpy Generator. Consumes exactly two
    uniform blocks of length n, so the draw sequence is reproducible.
    """
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    u1 = gen.random(n)
    w = gen.random(n)
    # keep conditioning values away from exact 0/1
    u1 = np.clip(u1, 1e-12, 1.0 - 1e-12)
    w = np.clip(w, 1e-12, 1.0 - 1e-12)
    u2 = _OPS[m.family].inv_conditional(m.theta, u1, w)
    return u1, np.clip(u2, 1e-12, 1.0 - 1e-12)


def sample_pair(m: CopulaModel, rng: RngStream) -> tuple[float, float]:
    u1, u2 = sample_pairs(m, rng, 1)
    return float(u1[0]), float(u2[0])


# parameter transforms used by the fitting routines: each family's open
# domain maps to the whole real line so 1-D search needs no constraints
def to_unconstrained(family: Family, theta: float) -> float:
    if family in (Family.CLAYTON, Family.FRANK):
        return math.log(theta)
    if family in (Family.JOE, Family.GUMBEL):
        return math.log(theta - 1.0)
    return math.atanh(theta)


def from_unconstrained(family: Family, x: float) -> float:
    if family in (Family.CLAYTON, Family.FRANK):
        return math.exp(x)
    if family in (Family.JOE, Family.GUMBEL):
        return 1.0 + math.exp(x)
    return math.tanh(x)
