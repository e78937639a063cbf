import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from monopole_eikonal.chargeconf import make_config
from monopole_eikonal.eikonal import (
    TwoMonopoleParameters,
    amplitude_dyon,
    amplitude_two_identical_monopoles,
    amplitude_two_monopoles,
)
from monopole_eikonal.errors import ForwardSingularity
from monopole_eikonal.oracle import amplitude_oracle


def rel(a, b):
    return abs(a - b) / abs(b)


momenta = st.builds(
    lambda r, t: cmath.rect(r, t), st.floats(0.05, 20), st.floats(-math.pi, math.pi))


@settings(max_examples=100, deadline=None)
@given(st.one_of(st.just(0.0), st.floats(1e-3, 5), st.floats(-5, -1e-3)), st.integers(-6, 6), st.floats(0.1, 10), momenta,
       st.complex_numbers(max_magnitude=3), st.floats(0, 6.28))
def test_dyon_modulus_law(alpha, n, p0, p, b0, theta):
    if alpha == 0 and n == 0:
        return
    f = amplitude_dyon(alpha, n, b0, theta, p0, p).f
    target = 4 * (alpha**2 + (n * p0 / 2) ** 2)
    assert abs(abs(f) ** 2 * abs(p) ** 4 / target - 1) < 1e-10


def test_dyon_examples():
    a = amplitude_dyon(1.0, 1, 0.3j, 0.0, 2.0, 0.7 + 0.2j).f
    b = amplitude_dyon(1.0, 1, 0.3j, 1.3, 2.0, 0.7 + 0.2j).f
    assert abs(abs(a) - abs(b)) < 1e-14
    assert abs(b / a - cmath.exp(1.3j)) < 1e-14
    # Gamma(1/2)/Gamma(-1/2) = -1/2
    assert complex(mp.gamma(0.5) / mp.gamma(-0.5)) == pytest.approx(-0.5)
    for p in (0.5, 1 + 1j, 3j):
        assert abs(amplitude_dyon(0.0, 1, 0, 0, 1.5, p).f) == pytest.approx(1.5 / abs(p) ** 2, rel=1e-14)


def test_pure_even_monopole_is_finite():
    for n in (2, -4):
        f = amplitude_dyon(0.0, n, 0, 0, 1.0, 0.8).f
        assert abs(f) == pytest.approx(abs(n) / 0.8**2, rel=1e-13)


def test_printed_dyon_ratio_breaks_modulus_law():
    a = amplitude_dyon(1.0, 1, 0, 0, 1.0, 0.8, phase="printed").f
    b = amplitude_dyon(1.0, 1, 0, 0, 1.0, 0.8).f
    assert abs(abs(a) / abs(b) - 1) > 1e-3


def test_forward_singularity():
    with pytest.raises(ForwardSingularity):
        amplitude_dyon(1.0, 1, 0, 0, 1.0, 0)
    with pytest.raises(ForwardSingularity):
        amplitude_two_monopoles(1, 2, -1, 1, 1.0, 0)


def test_parameters():
    prm = TwoMonopoleParameters.build(2, 4, -1, 1, 0.7 + 0.3j)
    assert prm.mu + prm.mu_prime == 1
    assert prm.kappa == 0.5 and prm.mu == -1.0
    assert prm.tau == 0.5j * (0.7 + 0.3j) * 2


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_reduction_identity(n):
    rng = np.random.default_rng(n)
    b1, b2 = -0.7 + 0.2j, 0.9 - 0.1j
    for _ in range(20):
        p = cmath.rect(rng.uniform(0.2, 3 * n), rng.uniform(-math.pi, math.pi))
        w = amplitude_two_monopoles(n, n, b1, b2, 1.3, p).f
        k = amplitude_two_identical_monopoles(n, b1, b2, 1.3, p).f
        assert rel(k, w) < 1e-9


def test_printed_bessel_same_modulus():
    for p in (0.9, 0.5 + 0.5j, -1.2j):
        a = amplitude_two_identical_monopoles(2, -1, 1, 1.0, p, phase="printed").f
        b = amplitude_two_identical_monopoles(2, -1, 1, 1.0, p).f
        assert abs(a) == pytest.approx(abs(b), rel=1e-12)


def test_translation_and_exchange():
    rng = np.random.default_rng(9)
    for n1, n2 in ((1, 2), (2, 4), (3, 1), (2, -2)):
        b1, b2 = -1 + 0.3j, 0.8 - 0.2j
        d = 0.4 - 1.1j
        for _ in range(5):
            p = cmath.rect(rng.uniform(0.3, 4), rng.uniform(-math.pi, math.pi))
            f = amplitude_two_monopoles(n1, n2, b1, b2, 1.0, p).f
            g = amplitude_two_monopoles(n1, n2, b1 + d, b2 + d, 1.0, p).f
            h = amplitude_two_monopoles(n2, n1, b2, b1, 1.0, p).f
            assert rel(abs(g), abs(f)) < 1e-10
            # the only change is the centre-of-mass phase
            assert abs(g / f - cmath.exp(-0.5j * (d * p.conjugate()).real)) < 1e-9
            assert rel(abs(h), abs(f)) < 1e-9


def test_two_monopoles_against_oracle():
    cfg = make_config([(-1, 0, 2), (1, 0, 4)])
    p = 0.7 + 0.3j
    f = amplitude_two_monopoles(2, 4, -1, 1, 1.0, p).f
    assert rel(abs(f), abs(amplitude_oracle(cfg, p).f)) < 1e-4


def test_identical_against_oracle():
    cfg = make_config([(-1, 0, 2), (1, 0, 2)])
    f = amplitude_two_identical_monopoles(2, -1, 1, 1.0, 1.1).f
    assert rel(abs(f), abs(amplitude_oracle(cfg, 1.1).f)) < 1e-4


def test_printed_phase_fails_for_unequal_even_pair():
    # the printed second-term phase changes |f| for n1 != n2
    cfg = make_config([(-1, 0, 2), (1, 0, 4)])
    p = 1.7
    o = abs(amplitude_oracle(cfg, p).f)
    printed = abs(amplitude_two_monopoles(2, 4, -1, 1, 1.0, p, phase="printed").f)
    assert abs(printed / o - 1) > 1e-3
