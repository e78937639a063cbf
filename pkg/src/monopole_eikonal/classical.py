"""Classical conformal scattering on a planar system of complex charges.

Convention used throughout the package::

    V(b)  = sum_k 2 Q_k log((b - b_k) exp(i theta_k))
    p*    = -V'(b) / p0                     (momentum-transfer map)
    sigma = p0^4 sum_roots |V''(b_root)|^-2  (Jacobian cross section)

With this normalization a single dyon gives ``sigma = 4 |Q|^2 / |p|^4`` and two
equal monopoles at ``+-R`` have focal points at ``p = -+n/R``.

Focal points are the zeros of ``V''``; the map is locally degenerate there and
the cross section diverges.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .chargeconf import ScatteringConfig, complex_charges
from .errors import DegenerateError, FocalSingularity, SingularPointError

LEADING_DEGENERACY = 1e-12
FOCAL_SENTINEL_RTOL = 1e-9
_NEWTON_STEPS = 8


@dataclass(frozen=True)
class PotentialEval:
    v: complex
    d1: complex
    d2: complex


@dataclass(frozen=True)
class FocalPoint:
    b_f: complex
    p_f: complex
    degenerate: bool = False
    residual: float = 0.0

    @property
    def at_infinity(self) -> bool:
        return self.degenerate and cmath.isinf(self.b_f)


def _charges(config: ScatteringConfig):
    qs = np.array([q.value for q in complex_charges(config)], dtype=complex)
    bs = np.array(config.positions, dtype=complex)
    thetas = np.array([c.string_angle for c in config.charges])
    return qs, bs, thetas


def _check_regular(bs, b):
    scale = max(1.0, float(np.max(np.abs(bs))))
    if np.any(np.abs(b - bs) <= 1e-15 * scale):
        raise SingularPointError(f"b = {b} coincides with a charge position")


def potential(config: ScatteringConfig, b: complex) -> PotentialEval:
    qs, bs, thetas = _charges(config)
    b = complex(b)
    _check_regular(bs, b)
    d = b - bs
    v = complex(np.sum(2 * qs * np.log(d * np.exp(1j * thetas))))
    d1 = complex(np.sum(2 * qs / d))
    d2 = complex(-np.sum(2 * qs / d**2))
    return PotentialEval(v, d1, d2)


def momentum_map(config: ScatteringConfig, b: complex) -> complex:
    """Momentum transfer ``p = conj(-V'(b) / p0)`` for impact parameter ``b``."""
    qs, bs, _ = _charges(config)
    b = complex(b)
    _check_regular(bs, b)
    return complex(np.conj(-np.sum(2 * qs / (b - bs)) / config.p0))


def _v2(qs, bs, b):
    return complex(-np.sum(2 * qs / (b - bs) ** 2))


def _poly_from_roots(roots):
    return P.polyfromroots(roots) if len(roots) else np.array([1.0 + 0j])


def _drop_leading(coeffs):
    """Strip numerically vanishing leading coefficients; return (coeffs, dropped)."""
    scale = np.max(np.abs(coeffs)) if len(coeffs) else 0.0
    dropped = 0
    while len(coeffs) > 1 and abs(coeffs[-1]) < LEADING_DEGENERACY * scale:
        coeffs = coeffs[:-1]
        dropped += 1
    return coeffs, dropped


def _roots(coeffs):
    if len(coeffs) <= 1:
        return np.array([], dtype=complex)
    return P.polyroots(coeffs)


def _map_polynomial(qs, bs, p0, pstar):
    """Coefficients (ascending) of ``p* prod(b-b_j) + (2/p0) sum_k Q_k prod_{j!=k}(b-b_j)``."""
    coeffs = pstar * _poly_from_roots(bs)
    for k in range(len(bs)):
        others = np.delete(bs, k)
        term = (2.0 / p0) * qs[k] * _poly_from_roots(others)
        coeffs = P.polyadd(coeffs, term)
    return coeffs


def preimages(config: ScatteringConfig, p: complex) -> list[complex]:
    """All finite impact parameters mapped onto ``p``."""
    qs, bs, _ = _charges(config)
    p0 = config.p0
    pstar = complex(p).conjugate()
    coeffs = _map_polynomial(qs, bs, p0, pstar)
    if np.all(np.abs(coeffs) == 0):
        raise DegenerateError("cleared map polynomial vanishes identically")
    coeffs, _ = _drop_leading(coeffs)
    scale_b = max(1.0, float(np.max(np.abs(bs))))
    out = []
    for root in _roots(coeffs):
        b = _polish_map(qs, bs, p0, pstar, complex(root))
        if np.min(np.abs(b - bs)) <= 1e-10 * scale_b:
            continue
        residual = abs(momentum_map(config, b) - complex(p))
        if residual > 1e-8 * max(1.0, abs(p)):
            # spurious root of the cleared polynomial (a charge with Q = 0)
            continue
        out.append(b)
    return out


def _polish_map(qs, bs, p0, pstar, b):
    for _ in range(_NEWTON_STEPS):
        d = b - bs
        if np.any(d == 0):
            return b
        f = pstar + (2.0 / p0) * complex(np.sum(qs / d))
        df = -(2.0 / p0) * complex(np.sum(qs / d**2))
        if df == 0:
            return b
        step = f / df
        b_new = b - step
        if abs(step) <= 1e-16 * max(1.0, abs(b)):
            return b_new
        b = b_new
    return b


def focal_points(config: ScatteringConfig) -> list[FocalPoint]:
    """Zeros of ``V''`` and their images; leading-coefficient collapse is
    reported as a degenerate focal point at infinity with ``p_f = 0``."""
    qs, bs, _ = _charges(config)
    n = len(bs)
    if n < 2:
        return []
    coeffs = np.zeros(1, dtype=complex)
    for k in range(n):
        others = np.delete(bs, k)
        term = qs[k] * _poly_from_roots(np.concatenate([others, others]))
        coeffs = P.polyadd(coeffs, term)
    if np.all(np.abs(coeffs) == 0):
        return []
    coeffs, _ = _drop_leading(coeffs)
    dropped = 2 * n - 2 - (len(coeffs) - 1)
    out = []
    for root in _roots(coeffs):
        b = _polish_focal(qs, bs, complex(root))
        if np.min(np.abs(b - bs)) <= 1e-10 * max(1.0, float(np.max(np.abs(bs)))):
            continue
        out.append(
            FocalPoint(b, momentum_map(config, b), False, abs(_v2(qs, bs, b)))
        )
    for _ in range(dropped):
        out.append(FocalPoint(complex(math.inf, 0.0), 0j, True, 0.0))
    return out


def _polish_focal(qs, bs, b):
    for _ in range(_NEWTON_STEPS):
        d = b - bs
        g = complex(np.sum(qs / d**2))
        dg = complex(-2 * np.sum(qs / d**3))
        if dg == 0:
            return b
        step = g / dg
        b_new = b - step
        if abs(step) <= 1e-16 * max(1.0, abs(b)):
            return b_new
        b = b_new
    return b


def jacobian_weights(config: ScatteringConfig, p: complex) -> list[tuple[complex, float]]:
    """``(root, p0^4 |V''(root)|^-2)`` for each preimage of ``p``."""
    qs, bs, _ = _charges(config)
    out = []
    for b in preimages(config, p):
        v2 = abs(_v2(qs, bs, b))
        out.append((b, config.p0**4 / v2**2 if v2 > 0 else math.inf))
    return out


def classical_cross_section(config: ScatteringConfig, p: complex) -> float:
    """Classical small-angle cross section ``sigma(p)``.

    Returns ``math.inf`` when ``p`` is within ``FOCAL_SENTINEL_RTOL`` (relative)
    of a finite focal point; test with ``math.isinf``.
    """
    p = complex(p)
    if p == 0:
        raise FocalSingularity("cross section requested at p = 0")
    for fp in focal_points(config):
        if not fp.degenerate and abs(p - fp.p_f) <= FOCAL_SENTINEL_RTOL * max(abs(fp.p_f), 1e-300):
            return math.inf
    return float(sum(w for _, w in jacobian_weights(config, p)))


# ----------------------------------------------------- printed closed forms

@dataclass(frozen=True)
class ClosedFormSigma:
    """Cross section evaluated from a printed two-centre formula.

    ``convention`` is always ``"printed"``: these formulas use their own
    normalization and focal positions, which differ from :func:`classical_cross_section`
    by constant factors.
    """

    value: float
    formula: str
    focal_momenta: tuple
    convention: str = "printed"

    def __float__(self):
        return self.value


def printed_two_dyon_focal_momenta(q1: complex, q2: complex, r: float, p0: float):
    """``p_f = -(Q1+Q2)^2 / (4 R p0 (sqrt Q1 +- i sqrt Q2)^2)`` as printed."""
    s1, s2 = cmath.sqrt(q1), cmath.sqrt(q2)
    out = []
    for sign in (1, -1):
        den = (s1 + sign * 1j * s2) ** 2
        out.append(-((q1 + q2) ** 2) / (4 * r * p0 * den) if den != 0 else complex(math.inf))
    return tuple(out)


def cross_section_two_dyons_closed(q1, q2, r: float, p0: float, p: complex) -> ClosedFormSigma:
    """Printed two-dyon cross section for charges at ``+-R``.

    Equal pure monopoles and monopole-antimonopole pairs are routed to their
    dedicated printed special cases, since the general expression is 0/0 for
    ``Q1 + Q2 = 0``.
    """
    q1, q2, p = complex(q1), complex(q2), complex(p)
    if r <= 0:
        raise ValueError("R must be positive")
    if q1.real == 0 and q2.real == 0 and q1.imag != 0:
        n = 2 * q1.imag / p0
        if q1 == q2:
            return cross_section_equal_monopoles_closed(n, r, p0, p)
        if q1 == -q2:
            return cross_section_monopole_antimonopole_closed(n, r, p0, p)
    if p == 0:
        raise FocalSingularity("p = 0")
    pf1, pf2 = printed_two_dyon_focal_momenta(q1, q2, r, p0)
    if q1 + q2 == 0:
        raise DegenerateError("general two-dyon formula is 0/0 for Q1 + Q2 = 0")
    for pf in (pf1, pf2):
        if abs(p - pf) <= FOCAL_SENTINEL_RTOL * abs(pf):
            raise FocalSingularity(f"p coincides with focal momentum {pf}")
    u1 = p / pf1 - 1
    u2 = p / pf2 - 1
    bracket = 1 + 0.25 * abs(2 + u1 / u2 + u2 / u1)
    sigma = abs(q1 + q2) ** 2 / (2 * abs(p) ** 4) * bracket
    return ClosedFormSigma(sigma, "two_dyons", (pf1, pf2))


def cross_section_equal_monopoles_closed(n, r, p0, p) -> ClosedFormSigma:
    """``sigma = n^2 p0^2 / (2|p|^4) (1 + |1/(1 - p^2 R^2/n^2)|)``, ``p_f = +-n/R``."""
    p = complex(p)
    x = 1 - p * p * r * r / (n * n)
    if p == 0 or x == 0:
        raise FocalSingularity("p at a focal momentum or zero")
    sigma = n * n * p0 * p0 / (2 * abs(p) ** 4) * (1 + abs(1 / x))
    return ClosedFormSigma(sigma, "equal_monopoles", (n / r, -n / r))


def cross_section_monopole_antimonopole_closed(n, r, p0, p) -> ClosedFormSigma:
    """``sigma = n R p0^2 / (2|p|^3) / |1 - i R p / n|``, ``p_f = 0, -i n/R``."""
    p = complex(p)
    x = 1 - 1j * r * p / n
    if p == 0 or x == 0:
        raise FocalSingularity("p at a focal momentum or zero")
    sigma = abs(n) * r * p0 * p0 / (2 * abs(p) ** 3) / abs(x)
    return ClosedFormSigma(sigma, "monopole_antimonopole", (0j, -1j * n / r))
