import cmath
import csv
import dataclasses
import io
import math

import mpmath as mp
import numpy as np
import pytest
import sympy as sp

from direct2d import direct_amplitude
from monopole_eikonal.chargeconf import ChargeSpec, make_config
from monopole_eikonal.eikonal import amplitude_dyon
from monopole_eikonal.errors import ValidationError
from monopole_eikonal.oracle import (
    EPS_LADDER,
    Plane,
    _plane_data,
    amplitude_oracle,
    closed_form_amplitude,
    compare_amplitudes,
    contour_integral,
    default_contour,
    ordering_factors,
    steepest_direction,
)


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.mark.parametrize("alpha,b0,p,p0", [
    (1.0, 0j, 1.3, 1.0),
    (0.7, 0.4 - 0.2j, 0.8 + 0.5j, 2.0),
    (-1.5, 1j, -0.3 + 1.1j, 1.0),
])
def test_hankel_reciprocal_gamma(alpha, b0, p, p0):
    cfg = make_config([(b0, alpha, 0)], p0=p0)
    got = contour_integral(cfg, 0, "b", p)
    nu = 1j * alpha / p0
    kappa = -0.5j * complex(p).conjugate()
    # t = kappa (b - b0) puts the legs on arg t = -pi and +pi
    log_k = math.log(abs(kappa)) + 1j * (-math.pi / 2 - cmath.phase(p))
    ref = cmath.exp(-(nu + 1) * log_k + kappa * b0) * 2j * math.pi / complex(mp.gamma(-nu))
    assert rel(got, ref) < 1e-6


@pytest.mark.parametrize("order", [1, 2, 3])
def test_residue_single_monopole(order):
    b0 = sp.Rational(1, 2) + sp.I / 4
    theta = sp.Rational(3, 10)
    p = 1.2 + 0.4j
    cfg = make_config([(complex(b0), 0, 2 * order, float(theta))])
    b = sp.symbols("b")
    kappa = sp.nsimplify(-0.5j * p.conjugate())
    res = sp.residue(sp.exp(kappa * b) / (b - b0) ** order, b, b0)
    ref = complex(sp.N(2 * sp.pi * sp.I * res * sp.exp(-sp.I * theta * order), 30))
    assert rel(contour_integral(cfg, 0, "b", p), ref) < 1e-8


def test_residue_two_monopoles():
    b1, b2 = sp.Integer(-1), sp.Rational(3, 4) + sp.I / 2
    cfg = make_config([(complex(b1), 0, 2), (complex(b2), 0, 4)])
    p = 0.9 - 0.6j
    b = sp.symbols("b")
    kappa = sp.nsimplify(-0.5j * p.conjugate())
    g = sp.exp(kappa * b) / ((b - b1) * (b - b2) ** 2)
    for j, pole in enumerate((b1, b2)):
        ref = complex(sp.N(2 * sp.pi * sp.I * sp.residue(g, b, pole), 30))
        assert rel(contour_integral(cfg, j, "b", p), ref) < 1e-8


@pytest.mark.parametrize("n", [2, 4])
def test_conjugate_plane_vanishes(n):
    cfg = make_config([(0.2, 0, n)])
    got, err = contour_integral(cfg, 0, "b_conj", 1.1 + 0.3j, with_error=True)
    assert abs(got) < 1e-10 and abs(got) <= 10 * err + 1e-12


def test_single_electric_rutherford():
    cfg = make_config([(0.3 - 0.1j, 1.0, 0)])
    for p in (0.4, 1.0 + 0.7j, 2.5, -1.2j):
        f = amplitude_oracle(cfg, p).f
        assert abs(abs(f) ** 2 * abs(p) ** 4 / 4 - 1) < 1e-4


def test_dyon_ratio_constant():
    cfg = make_config([(0, 1.0, 1)])
    grid = np.linspace(0.3, 3.0, 10)
    ratios = [amplitude_dyon(1.0, 1, 0, 0, 1.0, p).f / amplitude_oracle(cfg, p).f for p in grid]
    mods = np.abs(ratios)
    assert np.max(np.abs(mods / mods.mean() - 1)) < 1e-4


def test_contour_deformation():
    cfg = make_config([(-1, 0.3, 1, 0.5), (0.8 + 0.4j, -0.2, 2, 1.0)])
    p = 1.4 + 0.3j
    for plane in (Plane.B, Plane.B_CONJ):
        for j in (0, 1):
            spec = default_contour(cfg, j, plane, p)
            ref, err = contour_integral(cfg, j, plane, p, spec, with_error=True)
            variants = [
                dataclasses.replace(spec, loop_radius=2 * spec.loop_radius),
                dataclasses.replace(spec, ray_direction=spec.ray_direction + math.radians(10)),
                dataclasses.replace(spec, ray_direction=spec.ray_direction - math.radians(10)),
            ]
            for v in variants:
                got, e2 = contour_integral(cfg, j, plane, p, v, with_error=True)
                assert abs(got - ref) < 10 * (err + e2) + 1e-13 * abs(ref)


def test_regulator_ladder_shift():
    cfg = make_config([(-1, 0, 2), (1, 0, 4)])
    for p in (0.9, 2.2):
        a = amplitude_oracle(cfg, p).f
        b = amplitude_oracle(cfg, p, eps_ladder=tuple(2 * e for e in EPS_LADDER)).f
        assert rel(b, a) < 1e-3
        r = amplitude_oracle(cfg, p)
        assert r.regulator_alpha == pytest.approx(EPS_LADDER[-1])


def test_string_angle_phase():
    base = make_config([(-1, 0, 1, 0.0), (1, 0, 2, 0.0)])
    turned = make_config([(-1, 0, 1, 0.7), (1, 0, 2, 2.1)])
    shift = 1 * 0.7 + 2 * 2.1
    for p in (0.8, 1.5 + 0.5j):
        a = amplitude_oracle(base, p).f
        b = amplitude_oracle(turned, p).f
        assert rel(abs(b), abs(a)) < 1e-9
        assert abs(b / a - cmath.exp(-1j * shift)) < 1e-8


def test_ordering_factors():
    cfg = make_config([(-1, 0, 1), (1, 0, 2), (0.2j, 0, 3)])
    data = _plane_data(cfg, Plane.B, 1.0)
    phi = steepest_direction(Plane.B, 1.0)
    f = ordering_factors(data, phi)
    # legs along -i: ordering by Re(b); odd n contribute a sign
    assert f[0] == pytest.approx(-1)     # charges to the right: n=2, n=3
    assert f[2] == pytest.approx(1)      # only n=2 to the right
    assert f[1] == pytest.approx(1)


@pytest.mark.parametrize("charges,p", [
    ([(-1, 1), (1, 1)], 1.3),
    ([(-1, 1), (1, 2)], 1.3 * cmath.exp(0.55j * math.pi)),
    ([(-0.5 - 0.5j, 1), (0.7 + 0.3j, -3)], 1.1 - 0.4j),
])
def test_against_direct_integral(charges, p):
    cfg = make_config([(b, 0, n) for b, n in charges])
    o = amplitude_oracle(cfg, p).f
    d = direct_amplitude(p, charges)
    # the direct integral is Abel-damped and extrapolated, good to ~1e-3
    assert rel(-d, o) < 2e-3


def test_closed_form_dispatch():
    assert closed_form_amplitude(make_config([(0, 1, 1)]), 1.0).method.value == "dyon_closed"
    eq = make_config([(-1, 0, 2), (1, 0, 2)])
    assert closed_form_amplitude(eq, 1.0).method.value == "identical_monopoles_bessel"
    assert closed_form_amplitude(eq, 1.0, "whittaker").method.value == "two_monopoles_whittaker"
    with pytest.raises(ValidationError):
        closed_form_amplitude(make_config([(-1, 1, 0), (1, 1, 0)]), 1.0)
    with pytest.raises(ValidationError):
        closed_form_amplitude(make_config([(-1, 0, 2), (1, 0, 4)]), 1.0, "bessel")


def test_compare_report_csv():
    cfg = make_config([(0, 1.0, 1)])
    rep = compare_amplitudes(cfg, [0.5, 1.0, 2.0])
    assert rep.passed and rep.abs_spread < 1e-4
    buf = io.StringIO()
    rep.to_csv(buf)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert rows[0] == ["re_p", "im_p", "re_f_closed", "im_f_closed", "re_f_oracle",
                       "im_f_oracle", "abs_ratio", "arg_ratio", "est_err"]
    assert len(rows) == 4
    assert float(rows[1][6]) == pytest.approx(abs(rep.rows[0].ratio))


def test_compare_records_failures():
    cfg = make_config([(0, 1.0, 1)])
    rep = compare_amplitudes(cfg, [0.0, 1.0])
    assert len(rep.rows) == 1
    assert any("skipped" in n for n in rep.notes)
