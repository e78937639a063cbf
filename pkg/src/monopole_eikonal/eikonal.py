"""Closed-form eikonal amplitudes for a dyon and for two monopoles.

Fractional powers are taken on the principal branch with ``arg`` in
``(-pi, pi]``; an argument that is exactly negative real gets ``arg = +pi``.
When ``tau`` is real some special-function arguments sit on the cut; ``tau``
is then read as ``tau + i0``, so ``tau`` and ``-conj(tau)`` are approached
from above and ``conj(tau)`` and ``-tau`` from below.

Two printed phase factors are replaced by the ones that make the closed forms
agree with the contour oracle (see ``phase`` arguments):

* dyon: the Gamma ratio is ``Gamma(i a/p0 + n/2) / Gamma(n/2 - i a/p0)``,
  which keeps ``|f|^2 |p|^4 = 4|Q|^2``;
* two monopoles: the second Whittaker term carries
  ``exp(i pi ((3 n1 + n2)/4 + N s))`` with ``N = n1 + n2`` and ``s = 1`` when
  ``Im tau < 0``, else ``0``.  For ``n1 = n2`` this is the printed phase.

The printed variants are still available with ``phase="printed"``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from .errors import ForwardSingularity, ValidationError
from .specfun import bessel_k, gamma_ratio_conjugate, log_gamma, whittaker_w

# sides for the arguments tau, conj(tau), -tau, -conj(tau) under tau -> tau + i0
SIDE_TAU, SIDE_TAUC, SIDE_MTAU, SIDE_MTAUC = +1, -1, -1, +1


class AmplitudeMethod(str, Enum):
    DYON_CLOSED = "dyon_closed"
    TWO_MONOPOLES_WHITTAKER = "two_monopoles_whittaker"
    IDENTICAL_MONOPOLES_BESSEL = "identical_monopoles_bessel"
    ORACLE = "oracle"


@dataclass(frozen=True)
class AmplitudeSample:
    p: complex
    f: complex
    method: AmplitudeMethod
    convention_note: str = ""
    est_rel_err: float = 0.0

    @property
    def abs2(self) -> float:
        return abs(self.f) ** 2

    @property
    def p_abs2_weighted(self) -> float:
        return abs(self.p * self.f) ** 2


@dataclass(frozen=True)
class TwoMonopoleParameters:
    kappa: complex
    mu: complex
    mu_prime: complex
    tau: complex

    @classmethod
    def build(cls, n1, n2, b1, b2, p) -> "TwoMonopoleParameters":
        mu = 0.5 - (n1 + n2) / 4.0
        tau = 0.5j * complex(p) * complex(b2 - b1).conjugate()
        return cls(complex((n2 - n1) / 4.0), complex(mu), complex(1.0 - mu), tau)


def principal_arg(z: complex) -> float:
    z = complex(z)
    if z.imag == 0.0 and z.real < 0.0:
        return math.pi
    return math.atan2(z.imag, z.real)


def cpow(z: complex, s: complex) -> complex:
    """``z**s`` with principal log, negative reals taken at ``arg = +pi``."""
    z = complex(z)
    if z == 0:
        raise ValueError("0 ** s is undefined here")
    return cmath.exp(complex(s) * complex(math.log(abs(z)), principal_arg(z)))


def _check_p(p):
    p = complex(p)
    if p == 0:
        raise ForwardSingularity("amplitude is singular at p = 0")
    return p


# -------------------------------------------------------------------- dyon

def amplitude_dyon(alpha, n, b0, theta, p0, p, phase: str = "corrected") -> AmplitudeSample:
    """Eikonal amplitude on a single dyon at ``b0``.

    ``phase="printed"`` uses ``Gamma(i a/p0 + n/2) / Gamma(i a/p0 - n/2)``;
    that variant has no finite value for ``alpha = 0`` and even ``n <= 0`` and
    does not satisfy the modulus law.
    """
    p = _check_p(p)
    if p0 <= 0:
        raise ValidationError("p0 must be positive", "p0")
    x = 1j * alpha / p0
    z = x + n / 2.0
    pstar = p.conjugate()
    pref = 2j * p0 / abs(p) ** 2
    pref *= cmath.exp(1j * (n / 2.0) * principal_arg(p))
    pref *= cmath.exp((2j * alpha / p0) * math.log(2 * p0 / abs(p)))
    pref *= z
    pref *= cmath.exp(-1j * (complex(b0) * pstar).real - 1j * math.pi * n / 2.0 + 1j * n * theta)
    if phase == "corrected":
        ratio = gamma_ratio_conjugate(z)
        note = "Gamma ratio with conjugate denominator"
    elif phase == "printed":
        ratio = cmath.exp(log_gamma(z).value - log_gamma(x - n / 2.0).value)
        note = "printed Gamma ratio"
    else:
        raise ValueError(f"unknown phase convention {phase!r}")
    return AmplitudeSample(p, pref * ratio, AmplitudeMethod.DYON_CLOSED, note, _ROUNDING)


# ------------------------------------------------------------ two monopoles

_ROUNDING = 16 * 2.0**-52


def _term_error(reports):
    """Relative error of a product of special-function values."""
    return _ROUNDING + sum(r.est_abs_err / abs(r.value) for r in reports if r.value != 0)


def _cancellation(terms, total):
    """Propagate per-term relative errors through ``sum(terms) = total``."""
    if total == 0:
        return math.inf
    return sum(abs(t) * e for t, e in terms) / abs(total)


def _common_prefactor_phase(b1, b2, p):
    return cmath.exp(-0.25j * ((complex(b1) + complex(b2)) * p.conjugate()).real)


def amplitude_two_monopoles(n1, n2, b1, b2, p0, p, phase: str = "corrected") -> AmplitudeSample:
    """Two-term Whittaker amplitude for monopoles ``n1`` at ``b1`` and ``n2`` at ``b2``."""
    p = _check_p(p)
    if complex(b1) == complex(b2):
        raise ValidationError("monopole positions coincide", "b2")
    prm = TwoMonopoleParameters.build(n1, n2, b1, b2, p)
    tau, tauc = prm.tau, prm.tau.conjugate()
    big_n = n1 + n2
    pstar = p.conjugate()
    pref = -1j * p0 / abs(p) ** 2
    pref *= cpow(-pstar / p, big_n / 2.0)
    pref *= cpow(tau / tauc, big_n / 4.0)
    pref *= _common_prefactor_phase(b1, b2, p)

    k, mu, mup = prm.kappa, prm.mu, prm.mu_prime
    w11 = whittaker_w(-k, mu, tauc, SIDE_TAUC)
    w12 = whittaker_w(k, mup, -tau, SIDE_MTAU)
    t1 = cmath.exp(1j * math.pi * (n1 / 2.0 - big_n / 4.0)) * n1 * w11.value * w12.value
    if phase == "corrected":
        ph2 = (3 * n1 + n2) / 4.0 + (big_n if tau.imag < 0 else 0)
    elif phase == "printed":
        ph2 = n2 / 2.0 + big_n / 4.0
    else:
        raise ValueError(f"unknown phase convention {phase!r}")
    w21 = whittaker_w(k, mu, -tauc, SIDE_MTAUC)
    w22 = whittaker_w(-k, mup, tau, SIDE_TAU)
    t2 = cmath.exp(1j * math.pi * ph2) * n2 * w21.value * w22.value
    err = _cancellation([(t1, _term_error([w11, w12])), (t2, _term_error([w21, w22]))], t1 + t2)
    return AmplitudeSample(
        p, pref * (t1 + t2), AmplitudeMethod.TWO_MONOPOLES_WHITTAKER,
        f"{phase} second-term phase", err,
    )


def amplitude_two_identical_monopoles(n, b1, b2, p0, p, phase: str = "corrected") -> AmplitudeSample:
    """Bessel-K amplitude for two monopoles of equal Dirac number ``n``.

    The corrected variant is the Whittaker form rewritten with
    ``W_{0,mu}(z) = sqrt(z/pi) K_mu(z/2)`` on principal branches: the
    prefactor carries ``(tau/tau*)^(n/2)`` instead of ``(tau*/tau)^(n/2)`` and
    the overall sign is ``-sign(Im tau)``; the bracket is the printed one.  It
    equals :func:`amplitude_two_monopoles` at ``n1 = n2 = n`` for every ``p``.
    Both variants have the same modulus.
    """
    p = _check_p(p)
    if complex(b1) == complex(b2):
        raise ValidationError("monopole positions coincide", "b2")
    tau = 0.5j * p * complex(b2 - b1).conjugate()
    tauc = tau.conjugate()
    pstar = p.conjugate()
    pref = n / (2 * math.pi) * p0 * abs(complex(b2 - b1)) / abs(p)
    pref *= cpow(-pstar / p, n)
    pref *= _common_prefactor_phase(b1, b2, p)
    lo, hi = (1 - n) / 2.0, (1 + n) / 2.0
    ka = (bessel_k(lo, tauc / 2, SIDE_TAUC), bessel_k(hi, -tau / 2, SIDE_MTAU))
    kb = (bessel_k(lo, -tauc / 2, SIDE_MTAUC), bessel_k(hi, tau / 2, SIDE_TAU))
    a = ka[0].value * ka[1].value
    b = kb[0].value * kb[1].value
    err = _cancellation([(a, _term_error(ka)), (b, _term_error(kb))], a - (-1) ** n * b)
    if phase == "corrected":
        sign = 1.0 if tau.imag >= 0 else -1.0
        f = -sign * pref * cpow(tau / tauc, n / 2.0) * (a - (-1) ** n * b)
    elif phase == "printed":
        f = pref * cpow(tauc / tau, n / 2.0) * (a - (-1) ** n * b)
    else:
        raise ValueError(f"unknown phase convention {phase!r}")
    return AmplitudeSample(
        p, f, AmplitudeMethod.IDENTICAL_MONOPOLES_BESSEL, f"{phase} bracket sign", err
    )
