"""Complex-argument special functions used by the closed-form amplitudes.

All functions work on the principal branch.  Arguments lying exactly on the
negative real axis need an explicit ``side`` (+1 for ``arg z = +pi``, -1 for
``arg z = -pi``); the amplitude code always passes +1.

Evaluation strategy
-------------------
``tricomi_u`` and ``bessel_k`` dispatch between

* terminating series (``U(-m, b, z)`` polynomials, half-integer ``K``),
* the large-``|z|`` asymptotic expansion when its smallest term is below the
  requested tolerance,
* double-exponential (exp-sinh) quadrature of a Laplace-type integral along a
  ray rotated towards steepest descent, with downward recurrence in ``a``
  when ``Re a < 1``.

The K quadrature uses the Basset-type integral over ``(1, inf)`` rather than
the Tricomi integral, so the two functions share no code path beyond the
quadrature rule itself.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import loggamma as _loggamma

from .errors import BranchError, ConvergenceError, PoleError

EPS = np.finfo(float).eps
DEFAULT_TOL = 1e-14

# ray rotation is capped so the contour keeps away from the singular point at -1
_MAX_ROTATION = 2.0 * math.pi / 3.0
_ASYMPTOTIC_MIN_ABS_Z = 8.0


class Method(str, Enum):
    SERIES = "series"
    ASYMPTOTIC = "asymptotic"
    RECURRENCE = "recurrence"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class AccuracyReport:
    value: complex
    est_abs_err: float
    method: Method

    def __complex__(self):
        return self.value


def polar_arg(z: complex, side: int | None = None) -> tuple[float, float]:
    """Return ``(log|z|, arg z)`` with the side-of-cut rule applied."""
    z = complex(z)
    if z == 0:
        raise BranchError("z = 0 is a branch point")
    if z.imag == 0.0 and z.real < 0.0:
        if side is None:
            raise BranchError("z lies on the negative real axis; pass side=+1 or side=-1")
        return math.log(-z.real), math.copysign(math.pi, side)
    return math.log(abs(z)), math.atan2(z.imag, z.real)


def _is_nonpositive_integer(x: complex) -> bool:
    return x.imag == 0.0 and x.real <= 0.0 and float(x.real).is_integer()


def log_gamma(z) -> AccuracyReport:
    """Principal branch of ``log Gamma(z)``."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at z = {z.real:g}")
    value = complex(_loggamma(z))
    return AccuracyReport(value, 8 * EPS * max(1.0, abs(value)), Method.ASYMPTOTIC)


def gamma_ratio_conjugate(z: complex) -> complex:
    """``Gamma(z) / Gamma(conj z)`` including the limit at the poles.

    At ``z = -m`` the ratio tends to -1 from every direction off the axis.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        return -1.0 + 0j
    if z.real > 0.0 or z.imag != 0.0:
        return cmath.exp(complex(_loggamma(z)) - complex(_loggamma(z.conjugate())))
    return 1.0 + 0j


# ---------------------------------------------------------------- quadrature

def exp_sinh(log_integrand, tol=DEFAULT_TOL, u_max=5.0, h_min=1.0 / 512):
    """Integrate ``exp(log_integrand(s))`` over ``s`` in ``(0, inf)``.

    Trapezoidal rule on ``s = exp(pi/2 sinh u)``; the step is halved until two
    successive levels agree.  Returns ``(value, abs_error_estimate)``.
    """
    h = 0.25
    n = int(math.ceil(u_max / h))
    u = np.arange(-n, n + 1) * h
    total, mags = _es_sum(log_integrand, u)
    estimate = total * h
    while True:
        h_new = h / 2
        u_mid = (np.arange(-n, n) + 0.5) * h
        t_mid, m_mid = _es_sum(log_integrand, u_mid)
        total, mags = total + t_mid, mags + m_mid
        refined = total * h_new
        err = abs(refined - estimate)
        # summation round-off floor; cancellation makes tol unreachable below it
        floor = 32 * EPS * mags * h_new
        if err <= max(tol * abs(refined), floor):
            return refined, max(err, floor, EPS * abs(refined))
        if h_new <= h_min:
            raise ConvergenceError(
                f"exp-sinh quadrature stalled (rel. change {err / max(abs(refined), 1e-300):.2e})"
            )
        h, n, estimate = h_new, 2 * n, refined


def _es_sum(log_integrand, u):
    sh = 0.5 * math.pi * np.sinh(u)
    log_s = sh
    log_jac = np.log(0.5 * math.pi * np.cosh(u)) + sh
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        vals = np.exp(log_integrand(log_s) + log_jac)
    vals = vals[np.isfinite(vals)]
    return complex(np.sum(vals)), float(np.sum(np.abs(vals)))


def _ray_rotation(arg_z: float) -> float:
    return -math.copysign(min(abs(arg_z), _MAX_ROTATION), arg_z) if arg_z else 0.0


# ---------------------------------------------------------------- Tricomi U

def tricomi_u(a, b, z, side: int | None = None, tol: float = DEFAULT_TOL) -> AccuracyReport:
    """Confluent hypergeometric function of the second kind ``U(a, b, z)``."""
    lz, th = polar_arg(z, side)
    return _u(complex(a), complex(b), lz, th, tol)


def _u(a, b, lz, th, tol):
    z = cmath.exp(complex(lz, th))
    if _is_nonpositive_integer(a):
        val = _u_polynomial(int(round(-a.real)), b, z)
        return AccuracyReport(val, 16 * EPS * abs(val), Method.SERIES)
    a2 = a - b + 1
    if _is_nonpositive_integer(a2):
        # Kummer transformation onto a terminating case
        val = cmath.exp((1 - b) * complex(lz, th)) * _u_polynomial(int(round(-a2.real)), 2 - b, z)
        return AccuracyReport(val, 16 * EPS * abs(val), Method.SERIES)
    if math.exp(lz) >= _ASYMPTOTIC_MIN_ABS_Z:
        res = _u_asymptotic(a, b, lz, th, tol)
        if res is not None:
            return res
    if a.real >= 1.0:
        val, err = _u_quad(a, b, lz, th, tol)
        return AccuracyReport(val, err, Method.QUADRATURE)
    m = int(math.ceil(1.0 - a.real))
    u_hi, e_hi = _u_quad(a + m + 1, b, lz, th, tol)
    u_k, e_k = _u_quad(a + m, b, lz, th, tol)
    rel = max(e_hi / abs(u_hi) if u_hi else 0.0, e_k / abs(u_k) if u_k else 0.0)
    k = a + m
    for _ in range(m):
        u_k, u_hi = -(b - 2 * k - z) * u_k - k * (1 + k - b) * u_hi, u_k
        k -= 1
    return AccuracyReport(u_k, (rel + 4 * m * EPS) * abs(u_k) * (m + 1), Method.RECURRENCE)


def _u_polynomial(m: int, b: complex, z: complex) -> complex:
    """``U(-m, b, z) = (-1)^m sum_s C(m, s) (b+s)_{m-s} (-z)^s``."""
    total = 0j
    for s in range(m + 1):
        poch = 1.0 + 0j
        for j in range(m - s):
            poch *= b + s + j
        total += math.comb(m, s) * poch * (-z) ** s
    return (-1) ** m * total


def _u_asymptotic(a, b, lz, th, tol):
    z = cmath.exp(complex(lz, th))
    a2 = a - b + 1
    term = 1.0 + 0j
    total = term
    best = abs(term)
    k = 0
    while True:
        nxt = term * (a + k) * (a2 + k) / ((k + 1) * (-z))
        mag = abs(nxt)
        if mag >= best or k > 200:
            return None
        term = nxt
        total += term
        best = mag
        k += 1
        limit = tol * abs(total) * (1e-2 if abs(th) > math.pi / 2 else 1.0)
        if mag <= limit:
            val = cmath.exp(-a * complex(lz, th)) * total
            return AccuracyReport(val, 2 * mag * abs(val / total), Method.ASYMPTOTIC)


def _u_quad(a, b, lz, th, tol):
    phi = _ray_rotation(th)
    zhat = cmath.exp(1j * (th + phi))
    log_omega = complex(-lz, phi)
    omega = cmath.exp(log_omega)
    c = b - a - 1

    def log_f(log_s):
        s = np.exp(log_s)
        return -zhat * s + (a - 1) * log_s + c * np.log1p(omega * s)

    integral, err = exp_sinh(log_f, tol)
    pref = cmath.exp(a * log_omega - complex(_loggamma(a)))
    return pref * integral, abs(pref) * err


# ---------------------------------------------------------------- Whittaker W

def whittaker_w(kappa, mu, z, side: int | None = None, tol: float = DEFAULT_TOL) -> AccuracyReport:
    """``W_{kappa,mu}(z) = exp(-z/2) z^(mu+1/2) U(mu-kappa+1/2, 1+2mu, z)``."""
    kappa, mu = complex(kappa), complex(mu)
    lz, th = polar_arg(z, side)
    u = _u(mu - kappa + 0.5, 1 + 2 * mu, lz, th, tol)
    logz = complex(lz, th)
    pref = cmath.exp(-0.5 * cmath.exp(logz) + (mu + 0.5) * logz)
    return AccuracyReport(pref * u.value, abs(pref) * u.est_abs_err, u.method)


# ---------------------------------------------------------------- Bessel K

def bessel_k(nu, z, side: int | None = None, tol: float = DEFAULT_TOL) -> AccuracyReport:
    """Modified Bessel function of the second kind, complex order and argument."""
    nu = complex(nu)
    if nu.real < 0 or (nu.real == 0 and nu.imag < 0):
        nu = -nu
    lz, th = polar_arg(z, side)
    half = nu - 0.5
    if half.imag == 0 and float(half.real).is_integer():
        val = _k_hankel(nu, lz, th, terms=int(round(half.real)))
        return AccuracyReport(val, 16 * EPS * abs(val) * (1 + half.real), Method.SERIES)
    if math.exp(lz) >= _ASYMPTOTIC_MIN_ABS_Z:
        res = _k_asymptotic(nu, lz, th, tol)
        if res is not None:
            return res
    val, err = _k_quad(nu, lz, th, tol)
    return AccuracyReport(val, err, Method.QUADRATURE)


def _k_prefactor(lz, th):
    logz = complex(lz, th)
    return cmath.exp(0.5 * (math.log(math.pi / 2) - logz) - cmath.exp(logz))


def _k_hankel(nu, lz, th, terms):
    z = cmath.exp(complex(lz, th))
    mu4 = 4 * nu * nu
    term = 1.0 + 0j
    total = term
    for k in range(1, terms + 1):
        term = term * (mu4 - (2 * k - 1) ** 2) / (k * 8 * z)
        total += term
    return _k_prefactor(lz, th) * total


def _k_asymptotic(nu, lz, th, tol):
    z = cmath.exp(complex(lz, th))
    mu4 = 4 * nu * nu
    term = 1.0 + 0j
    total = term
    best = 1.0
    k = 0
    while True:
        k += 1
        nxt = term * (mu4 - (2 * k - 1) ** 2) / (k * 8 * z)
        mag = abs(nxt)
        if mag >= best or k > 200:
            return None
        term, best = nxt, mag
        total += term
        limit = tol * abs(total) * (1e-2 if abs(th) > math.pi / 2 else 1.0)
        if mag <= limit:
            pref = _k_prefactor(lz, th)
            return AccuracyReport(pref * total, 2 * mag * abs(pref), Method.ASYMPTOTIC)


def _k_quad(nu, lz, th, tol):
    # K = sqrt(pi) (z/2)^nu / Gamma(nu+1/2) * int_1^inf exp(-z t) (t^2-1)^(nu-1/2) dt
    phi = _ray_rotation(th)
    zhat = cmath.exp(1j * (th + phi))
    log_omega = complex(-lz, phi)
    omega = cmath.exp(log_omega)
    c = nu - 0.5

    def log_f(log_s):
        s = np.exp(log_s)
        return -zhat * s + c * log_s + c * np.log(2.0 + omega * s)

    integral, err = exp_sinh(log_f, tol)
    logz = complex(lz, th)
    pref = cmath.exp(
        0.5 * math.log(math.pi)
        + nu * (logz - math.log(2.0))
        - complex(_loggamma(nu + 0.5))
        - cmath.exp(logz)
        + (nu + 0.5) * log_omega
    )
    return pref * integral, abs(pref) * err
