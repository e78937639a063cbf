import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from monopole_eikonal.errors import BranchError, PoleError
from monopole_eikonal.specfun import (
    bessel_k,
    gamma_ratio_conjugate,
    log_gamma,
    tricomi_u,
    whittaker_w,
)

mp.mp.dps = 40


def rel(a, b):
    return abs(complex(a) - complex(b)) / abs(complex(b))


def test_log_gamma_values():
    assert abs(log_gamma(1).value) < 1e-15
    assert log_gamma(0.5).value == pytest.approx(0.5723649429247001, abs=1e-14)
    z = 2.5 + 1.5j
    lhs = cmath.exp(log_gamma(z + 1).value - log_gamma(z).value)
    assert rel(lhs, z) < 1e-12
    assert rel(log_gamma(z).value, complex(mp.loggamma(mp.mpc(z)))) < 1e-14


@pytest.mark.parametrize("z", [0, -1, -7])
def test_log_gamma_poles(z):
    with pytest.raises(PoleError):
        log_gamma(z)


def test_gamma_ratio_conjugate_limit():
    assert gamma_ratio_conjugate(-2) == -1
    z = -2 + 1e-9j
    ref = complex(mp.gamma(mp.mpc(z)) / mp.gamma(mp.mpc(z.conjugate())))
    assert rel(gamma_ratio_conjugate(z), ref) < 1e-6
    z = 0.7 + 2.1j
    ref = complex(mp.gamma(mp.mpc(z)) / mp.gamma(mp.mpc(z.conjugate())))
    assert rel(gamma_ratio_conjugate(z), ref) < 1e-13


def test_u_terminating_and_power():
    assert tricomi_u(0, 1.3 + 0.2j, 2.7 - 1j).value == pytest.approx(1.0)
    a = 0.5 + 0.5j
    assert rel(tricomi_u(a, a + 1, 2.0).value, 2.0 ** (-a)) < 1e-13


def _u_laplace(a, b, z):
    f = lambda t: mp.exp(-z * t) * t ** (a - 1) * (1 + t) ** (b - a - 1)
    return mp.quad(f, [0, 1, mp.inf]) / mp.gamma(a)


def test_u_against_laplace_integral():
    ref = _u_laplace(mp.mpf(0.5), mp.mpf(1.5), mp.mpf(2))
    assert rel(tricomi_u(0.5, 1.5, 2.0).value, complex(ref)) < 1e-12


@pytest.mark.parametrize("a,b,z", [
    (0.3 + 0.1j, 1.7, 0.4 + 0.3j),
    (-0.75, 0.5, 3.0 - 2.0j),
    (1.25, -0.5, 12.0 + 5.0j),
    (0.5 - 1j, 2.25, 25.0j),
    (2.0, 1.0, 0.05),
])
def test_u_against_mpmath(a, b, z):
    got = tricomi_u(a, b, z)
    ref = complex(mp.hyperu(mp.mpc(a), mp.mpc(b), mp.mpc(z)))
    assert rel(got.value, ref) < 1e-10
    assert abs(got.value - ref) <= max(got.est_abs_err, 1e-12 * abs(ref))


@settings(max_examples=40, deadline=None)
@given(
    st.floats(-2, 2), st.floats(-1, 1), st.floats(0.3, 2.5),
    st.floats(0.5, 20), st.floats(-2.3, 2.3),
)
def test_u_contiguous_relation(ar, ai, b, r, th):
    a = complex(ar, ai)
    z = cmath.rect(r, th)
    um = tricomi_u(a - 1, b, z).value
    u0 = tricomi_u(a, b, z).value
    up = tricomi_u(a + 1, b, z).value
    terms = [um, (b - 2 * a - z) * u0, a * (1 + a - b) * up]
    assert abs(sum(terms)) <= 1e-9 * max(abs(t) for t in terms)


def test_whittaker_identities():
    z = 3.0
    lhs = whittaker_w(0, 0.25, z).value
    rhs = cmath.sqrt(z / math.pi) * bessel_k(0.25, z / 2).value
    assert rel(lhs, rhs) < 1e-10
    mu = 0.3 + 0.2j
    z = 1.5 - 0.5j
    exact = cmath.exp(-z / 2) * z ** (mu + 0.5)
    assert rel(whittaker_w(mu + 0.5, mu, z).value, exact) < 1e-13


@pytest.mark.parametrize("k,m,z", [
    (0.25, 0.25, 1 + 1j),
    (-0.5, 0.75, 4 - 3j),
    (1.0, -0.25, 0.2 + 0.1j),
    (0.75, 0.25, -10 + 30j),
])
def test_whittaker_against_mpmath(k, m, z):
    ref = complex(mp.whitw(k, m, mp.mpc(z)))
    assert rel(whittaker_w(k, m, z).value, ref) < 1e-10


def test_whittaker_cut_side():
    up = whittaker_w(0.25, 0.25, -2.0, side=+1).value
    dn = whittaker_w(0.25, 0.25, -2.0, side=-1).value
    ref_up = complex(mp.whitw(0.25, 0.25, mp.mpc(-2, 1e-30)))
    ref_dn = complex(mp.whitw(0.25, 0.25, mp.mpc(-2, -1e-30)))
    assert rel(up, ref_up) < 1e-10 and rel(dn, ref_dn) < 1e-10
    with pytest.raises(BranchError):
        whittaker_w(0.25, 0.25, -2.0)


def test_bessel_examples():
    assert rel(bessel_k(0.5, 2.0).value, math.sqrt(math.pi / 4) * math.exp(-2)) < 1e-13
    nu, z = 0.3 + 0.2j, 1.5
    assert rel(bessel_k(nu, z).value, bessel_k(-nu, z).value) < 1e-12
    # integrand is below exp(-11000) past t = 10
    quad = mp.quad(lambda t: mp.exp(-mp.cosh(t)) * mp.cosh(t), [0, 2, 5, 10])
    assert rel(bessel_k(1, 1).value, complex(quad)) < 1e-13


@pytest.mark.parametrize("nu,z", [
    (0.0, 0.01), (1.5, 0.3 + 0.4j), (-0.5 + 1j, 7 - 2j), (3.5, 40j), (0.25, -3 + 0.5j),
])
def test_bessel_against_mpmath(nu, z):
    ref = complex(mp.besselk(mp.mpc(nu), mp.mpc(z)))
    assert rel(bessel_k(nu, z).value, ref) < 1e-10
