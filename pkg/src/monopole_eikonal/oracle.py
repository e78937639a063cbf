"""Contour-integral oracle for the eikonal amplitude.

The amplitude factorizes into one-dimensional Hankel-type integrals, one pair
per charge ``j``::

    f = p0/(4 pi) * sum_j I_j(p*) I_j(p)

``I_j(p*)`` lives in the impact-parameter plane ``b``::

    g(b) = exp(-i b p*/2) prod_k (b - b_k)^{nu_k} exp(i theta_k nu_k),
    nu_k = i Q_k / p0 = i alpha_k/p0 - n_k/2

and is the counterclockwise loop around ``b_j`` whose legs run to infinity
along the steepest-descent direction ``phi = arg p - pi/2``.  ``I_j(p)`` lives
in the conjugate plane ``w = conj(b)`` with ``p`` in the exponential,
exponents ``nu'_k = i conj(Q_k)/p0`` and ``theta -> -theta``; it is the ray
integral from ``conj(b_j)`` to infinity, obtained from the loop divided by
``exp(2 pi i nu'_j) - 1``.

Every factor uses the branch ``arg(b - b_k)`` in ``[phi, phi + 2 pi)``, so all
cuts run parallel to the legs.  When a branch point sits on (or near) another
one's cut line the whole contour family is rotated by the smallest angle that
clears it; the b-plane and conjugate-plane families rotate in mirror image.

Splitting the real-plane integrand into a ``b`` factor and a ``w`` factor
with these branches is only consistent on one side of each charge.  Project
the centres on the axis ``u = Re(b exp(-i psi))``, ``psi = phi + pi/2``: a
factor ``k`` agrees with the single-valued product on the side ``u > u_k``.
Term ``j`` therefore carries ``exp(-2 pi i nu_k)`` for every charge ``k`` with
``u_k > u_j``.  For odd ``n_k`` this is a sign, and leaving it out makes the
sum jump whenever the legs sweep across a branch point.

Pure monopoles with even ``n`` make ``nu'_j`` an integer and the ratio above
0/0.  Those charges get an electric regulator ``alpha = +-eps p0``; the
average over the sign is even in ``eps`` and is Richardson-extrapolated in
``eps^2`` to zero.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .chargeconf import ChargeSpec, ScatteringConfig, complex_charges
from .errors import (
    ConvergenceError,
    CutCollision,
    ForwardSingularity,
    NumericalError,
    RegulatorFailure,
    ValidationError,
)

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-11
EPS_LADDER = (1e-2, 5e-3, 2.5e-3)
_MAX_ROTATION = math.pi / 3.0
_ROTATION_STEP = math.pi / 180.0

# QUADPACK 15-point Kronrod rule with its embedded 7-point Gauss rule
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
WEIGHTS_K = np.concatenate([_WK[:-1], _WK[::-1]])
WEIGHTS_G = np.zeros(15)
WEIGHTS_G[1::2] = np.concatenate([_WG, _WG[-2::-1]])


def gauss_kronrod(func, a: float, b: float, tol: float, panels: int = 8, max_panels: int = 50000):
    """Adaptive G7K15 quadrature of a vectorized complex ``func`` on ``[a, b]``.

    Panel errors use the QUADPACK estimate ``resasc * min(1, (200 |K15 - G7| /
    resasc)^1.5)`` with ``resasc`` the K15 integral of ``|func - mean|``.  A
    panel is accepted when its error is below its share (by width) of
    ``tol * integral |func|``.  Returns ``(value, error_estimate, abs_integral)``.
    """
    edges = np.linspace(a, b, panels + 1)
    lo, hi = edges[:-1], edges[1:]
    value = 0j
    err = 0.0
    scale = None
    total = 0
    while lo.size:
        total += lo.size
        if total > max_panels:
            raise ConvergenceError(f"quadrature did not converge in {max_panels} panels")
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        t = mid[:, None] + half[:, None] * NODES[None, :]
        fv = func(t.ravel()).reshape(t.shape)
        k = half * (fv @ WEIGHTS_K)
        g = half * (fv @ WEIGHTS_G)
        kabs = half * (np.abs(fv) @ WEIGHTS_K)
        resasc = half * (np.abs(fv - (k / (2 * half))[:, None]) @ WEIGHTS_K)
        e = np.abs(k - g)
        pos = resasc > 0
        e[pos] = resasc[pos] * np.minimum(1.0, (200.0 * e[pos] / resasc[pos]) ** 1.5)
        if scale is None:
            scale = float(np.sum(kabs))
            if not np.all(np.isfinite(fv)):
                raise ConvergenceError("integrand is not finite on the contour")
        share = max(tol * scale, 1e-300) * (hi - lo) / (b - a)
        ok = (e <= share) | (half <= 1e-14 * max(abs(a), abs(b), 1.0))
        value += complex(np.sum(k[ok]))
        err += float(np.sum(e[ok]))
        lo, hi, mid = lo[~ok], hi[~ok], mid[~ok]
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
    return value, err, scale


# ------------------------------------------------------------------ types

class Plane(str, Enum):
    B = "b"
    B_CONJ = "b_conj"


@dataclass(frozen=True)
class ContourSpec:
    """Hankel loop around ``center``: legs along ``ray_direction``, circle of
    ``loop_radius``, legs truncated at ``leg_length`` from the center.
    ``nodes_per_unit`` sets the initial panel density on the legs."""

    center: complex
    ray_direction: float
    loop_radius: float
    leg_length: float
    nodes_per_unit: float = 2.0


@dataclass(frozen=True)
class LoopPieces:
    """``loop = jump * ray + circle`` with ``jump = exp(2 pi i nu_j) - 1``."""

    ray: complex
    circle: complex
    jump: complex
    err_ray: float
    err_circle: float

    @property
    def loop(self) -> complex:
        return self.jump * self.ray + self.circle

    @property
    def loop_err(self) -> float:
        return abs(self.jump) * self.err_ray + self.err_circle


@dataclass(frozen=True)
class OracleResult:
    f: complex
    est_err: float
    regulator_alpha: float = 0.0
    per_term: tuple = ()
    rotation: float = 0.0
    shortfall: bool = False
    extrapolation_err: float = 0.0


# ---------------------------------------------------------- plane set-up

@dataclass(frozen=True)
class _PlaneData:
    centers: np.ndarray
    nus: np.ndarray
    const: complex  # sum of string-angle phases
    kappa: complex  # exponential is exp(kappa * b)


def _plane_data(config: ScatteringConfig, plane: Plane, p: complex) -> _PlaneData:
    qs = np.array([q.value for q in complex_charges(config)], dtype=complex)
    bs = np.array(config.positions, dtype=complex)
    th = np.array([c.string_angle for c in config.charges])
    if plane == Plane.B:
        nus = 1j * qs / config.p0
        return _PlaneData(bs, nus, complex(np.sum(1j * th * nus)), -0.5j * complex(p).conjugate())
    nus = 1j * qs.conjugate() / config.p0
    return _PlaneData(bs.conj(), nus, complex(np.sum(-1j * th * nus)), -0.5j * complex(p))


def steepest_direction(plane: Plane, p: complex) -> float:
    ap = cmath.phase(complex(p))
    return ap - math.pi / 2 if plane == Plane.B else -ap - math.pi / 2


def _branch_log(z, phi):
    """log z with arg in [phi, phi + 2 pi)."""
    return np.log(np.abs(z)) + 1j * (phi + np.mod(np.angle(z) - phi, TWO_PI))


def _collisions(centers, phi, margins):
    u = cmath.exp(1j * phi)
    out = []
    for j in range(len(centers)):
        for k in range(len(centers)):
            if j == k:
                continue
            d = (centers[k] - centers[j]) * u.conjugate()
            if abs(d.imag) < margins[j]:
                out.append((j, k))
    return out


def _loop_radii(centers, p):
    n = len(centers)
    radii = np.full(n, 2.0 / abs(p))
    for j in range(n):
        others = np.delete(centers, j)
        if others.size:
            radii[j] = min(radii[j], 0.3 * float(np.min(np.abs(others - centers[j]))))
    return radii


def default_contour(config: ScatteringConfig, j: int, plane: Plane, p: complex,
                    rotation: float = 0.0, tol: float = DEFAULT_TOL) -> ContourSpec:
    data = _plane_data(config, plane, p)
    sgn = 1.0 if plane == Plane.B else -1.0
    phi = steepest_direction(plane, p) + sgn * rotation
    r = float(_loop_radii(data.centers, p)[j])
    decay = 0.5 * abs(p) * math.cos(rotation)
    spread = float(np.max(np.abs(data.centers - data.centers[j])))
    power = float(np.sum(np.abs(data.nus)))
    length = r + spread + (math.log(1.0 / tol) + 10.0 + power * math.log(2.0 + power)) / decay
    return ContourSpec(complex(data.centers[j]), phi, r, length, max(2.0, abs(p)))


# ------------------------------------------------------------ integration

def _log_integrand(data: _PlaneData, j: int, phi: float, b, logj):
    """log g(b) with the j-th factor's log supplied by the caller."""
    out = data.kappa * b + data.const + data.nus[j] * logj
    for k in range(len(data.centers)):
        if k != j and data.nus[k] != 0:
            out = out + data.nus[k] * _branch_log(b - data.centers[k], phi)
    return out


def _loop_pieces(data: _PlaneData, j: int, spec: ContourSpec, tol: float) -> LoopPieces:
    phi, r, c = spec.ray_direction, spec.loop_radius, spec.center
    u = cmath.exp(1j * phi)
    nu = data.nus[j]

    def leg(t):
        b = c + t * u
        return np.exp(_log_integrand(data, j, phi, b, np.log(t) + 1j * phi)) * u

    def circle(psi):
        e = np.exp(1j * psi)
        b = c + r * e
        return np.exp(_log_integrand(data, j, phi, b, math.log(r) + 1j * psi)) * (1j * r * e)

    length = spec.leg_length
    for _ in range(6):
        tail = abs(leg(np.array([length]))[0])
        probe = np.abs(leg(np.linspace(r, length, 64)))
        if tail <= 1e-3 * tol * max(float(np.max(probe)), 1e-300):
            break
        length = 2 * length
    else:
        raise ConvergenceError("leg integrand does not decay; wrong ray direction")
    panels = int(min(400, max(8, math.ceil((length - r) * spec.nodes_per_unit))))
    ray, e_ray, _ = gauss_kronrod(leg, r, length, tol, panels)
    circ, e_circ, _ = gauss_kronrod(circle, phi, phi + TWO_PI, tol, 8)
    jump = cmath.exp(TWO_PI * 1j * nu) - 1.0
    return LoopPieces(ray, circ, jump, e_ray, e_circ)


def contour_integral(config: ScatteringConfig, j: int, plane, momentum: complex,
                     spec: ContourSpec | None = None, tol: float = DEFAULT_TOL,
                     with_error: bool = False):
    """Counterclockwise Hankel loop around the ``j``-th branch point of ``plane``.

    Raises :class:`CutCollision` when the loop or its legs meet another cut.
    """
    plane = Plane(plane)
    p = complex(momentum)
    if p == 0:
        raise ForwardSingularity("p = 0")
    data = _plane_data(config, plane, p)
    if spec is None:
        spec = default_contour(config, j, plane, p, tol=tol)
    margins = np.full(len(data.centers), 1.5 * spec.loop_radius)
    if any(a == j or b == j for a, b in _collisions(data.centers, spec.ray_direction, margins)):
        raise CutCollision(f"contour around charge {j} meets another cut")
    pieces = _loop_pieces(data, j, spec, tol)
    if with_error:
        return pieces.loop, pieces.loop_err
    return pieces.loop


def _clearing_rotation(config: ScatteringConfig, p: complex) -> float:
    data = _plane_data(config, Plane.B, p)
    margins = 1.5 * _loop_radii(data.centers, p)
    base = steepest_direction(Plane.B, p)
    steps = int(_MAX_ROTATION / _ROTATION_STEP)
    for i in range(steps + 1):
        for delta in ((0.0,) if i == 0 else (i * _ROTATION_STEP, -i * _ROTATION_STEP)):
            if not _collisions(data.centers, base + delta, margins):
                return delta
    raise CutCollision("no contour rotation clears all cuts")


def ordering_factors(data: _PlaneData, phi: float) -> np.ndarray:
    """Branch-consistency factor of each term for b-plane legs along ``phi``."""
    u = (data.centers * cmath.exp(-1j * (phi + math.pi / 2))).real
    jumps = np.exp(-2j * math.pi * data.nus)
    out = np.ones(len(u), dtype=complex)
    for j in range(len(u)):
        for k in range(len(u)):
            if k != j and u[k] > u[j]:
                out[j] *= jumps[k]
    return out


def _single_amplitude(config: ScatteringConfig, p: complex, tol: float, rotation: float):
    db = _plane_data(config, Plane.B, p)
    dw = _plane_data(config, Plane.B_CONJ, p)
    total = 0j
    err = 0.0
    terms = []
    order = ordering_factors(db, steepest_direction(Plane.B, p) + rotation)
    for j in range(len(db.centers)):
        if db.nus[j] == 0:
            continue
        sb = default_contour(config, j, Plane.B, p, rotation, tol)
        sw = default_contour(config, j, Plane.B_CONJ, p, rotation, tol)
        lb = _loop_pieces(db, j, sb, tol)
        lw = _loop_pieces(dw, j, sw, tol)
        if abs(lw.jump) < 1e-12:
            raise RegulatorFailure("conjugate-plane exponent is an integer; regulator required")
        i_pstar = lb.loop
        i_p = lw.ray + lw.circle / lw.jump
        e_p = lw.err_ray + lw.err_circle / abs(lw.jump)
        total += order[j] * i_pstar * i_p
        err += abs(order[j]) * (abs(i_pstar) * e_p + abs(i_p) * lb.loop_err)
        terms.append((i_p, i_pstar))
    scale = config.p0 / (4 * math.pi)
    return scale * total, scale * err, tuple(terms)


def needs_regulator(config: ScatteringConfig) -> bool:
    return any(
        c.electric == 0 and c.dirac_n != 0 and float(c.dirac_n / 2).is_integer()
        for c in config.charges
    )


def regulated(config: ScatteringConfig, eps: float) -> ScatteringConfig:
    """Give every charge with ``alpha = 0`` and ``n != 0`` the coupling ``eps p0``."""
    charges = tuple(
        ChargeSpec(c.position, eps * config.p0, c.dirac_n, c.string_angle)
        if c.electric == 0 and c.dirac_n != 0 else c
        for c in config.charges
    )
    return config.with_charges(charges)


def _neville_at_zero(xs, ys):
    ys = list(ys)
    n = len(xs)
    for m in range(1, n):
        for i in range(n - m):
            ys[i] = (xs[i + m] * ys[i] - xs[i] * ys[i + 1]) / (xs[i + m] - xs[i])
    return ys[0]


def amplitude_oracle(config: ScatteringConfig, p: complex, tol: float = DEFAULT_TOL,
                     eps_ladder=EPS_LADDER) -> OracleResult:
    """Oracle amplitude ``f(p)``; pure even-``n`` monopoles go through the regulator."""
    p = complex(p)
    if p == 0:
        raise ForwardSingularity("p = 0")
    rotation = _clearing_rotation(config, p)
    if not needs_regulator(config):
        f, err, terms = _single_amplitude(config, p, tol, rotation)
        return OracleResult(f, err, 0.0, terms, rotation, bool(err > 1e3 * tol * abs(f)))

    eps = [float(e) for e in eps_ladder]
    if len(eps) < 2:
        raise ValueError("regulator needs at least two ladder points")
    # f(eps) is analytic; averaging +-eps removes the odd orders
    runs = [
        (_single_amplitude(regulated(config, e), p, tol, rotation),
         _single_amplitude(regulated(config, -e), p, tol, rotation))
        for e in eps
    ]
    values = [0.5 * (a[0] + b[0]) for a, b in runs]
    quad_err = max(0.5 * (a[1] + b[1]) for a, b in runs)
    diffs = [abs(values[i] - values[i + 1]) for i in range(len(values) - 1)]
    if len(diffs) > 1 and diffs[-1] > 0.75 * diffs[-2] + 1e3 * quad_err:
        raise RegulatorFailure(f"regulator ladder not converging: differences {diffs}")
    x = [e * e for e in eps]
    f0 = _neville_at_zero(x, values)
    f_lower = _neville_at_zero(x[1:], values[1:]) if len(x) > 2 else values[-1]
    extrap = abs(f0 - f_lower)
    # extrapolation weights for a halving ladder in eps^2 stay below 2 in sum
    err = extrap + 2.0 * quad_err
    return OracleResult(
        f0, err, eps[-1] * config.p0, runs[-1][0][2], rotation,
        bool(err > 1e3 * tol * abs(f0)), extrap,
    )


# -------------------------------------------------------------- comparison

@dataclass(frozen=True)
class ComparisonRow:
    p: complex
    f_closed: complex
    f_oracle: complex
    est_err: float

    @property
    def ratio(self) -> complex:
        return self.f_closed / self.f_oracle


@dataclass(frozen=True)
class ComparisonReport:
    method: str
    rows: tuple
    abs_tol: float = 1e-4
    arg_tol: float = 1e-4
    notes: tuple = field(default_factory=tuple)

    @property
    def mean_ratio(self) -> complex:
        return complex(np.mean([r.ratio for r in self.rows]))

    @property
    def abs_spread(self) -> float:
        """Largest ``| |ratio| - mean |ratio| | / mean |ratio|``."""
        if not self.rows:
            return math.inf
        a = np.array([abs(r.ratio) for r in self.rows])
        return float(np.max(np.abs(a - a.mean())) / a.mean())

    @property
    def arg_spread(self) -> float:
        """Largest deviation of ``arg ratio`` from its circular mean, radians."""
        if not self.rows:
            return math.inf
        z = np.array([r.ratio / abs(r.ratio) for r in self.rows])
        centre = np.angle(np.mean(z))
        return float(np.max(np.abs(np.angle(z * np.exp(-1j * centre)))))

    @property
    def passed(self) -> bool:
        return self.abs_spread < self.abs_tol and self.arg_spread < self.arg_tol

    def to_csv(self, destination) -> None:
        header = ["re_p", "im_p", "re_f_closed", "im_f_closed", "re_f_oracle",
                  "im_f_oracle", "abs_ratio", "arg_ratio", "est_err"]
        own = isinstance(destination, (str, bytes)) or hasattr(destination, "__fspath__")
        fh = open(destination, "w", newline="") if own else destination
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in self.rows:
                q = r.ratio
                w.writerow([repr(float(x)) for x in (
                    r.p.real, r.p.imag, r.f_closed.real, r.f_closed.imag,
                    r.f_oracle.real, r.f_oracle.imag, abs(q), cmath.phase(q), r.est_err)])
        finally:
            if own:
                fh.close()


def closed_form_amplitude(config: ScatteringConfig, p: complex, method: str = "auto"):
    """Dispatch ``config`` to the matching closed form.

    ``method`` is one of ``auto``, ``dyon``, ``whittaker``, ``bessel``.
    """
    from . import eikonal

    ch = config.charges
    if method == "auto":
        if len(ch) == 1:
            method = "dyon"
        elif len(ch) == 2 and all(c.electric == 0 for c in ch):
            method = "bessel" if ch[0].dirac_n == ch[1].dirac_n else "whittaker"
        else:
            raise ValidationError("no closed form for this configuration", "charges")
    if method == "dyon":
        if len(ch) != 1:
            raise ValidationError("dyon closed form needs exactly one charge", "charges")
        c = ch[0]
        return eikonal.amplitude_dyon(c.electric, c.dirac_n, c.position, c.string_angle, config.p0, p)
    if len(ch) != 2 or any(c.electric != 0 for c in ch):
        raise ValidationError("two-monopole closed forms need two pure monopoles", "charges")
    if method == "whittaker":
        return eikonal.amplitude_two_monopoles(
            ch[0].dirac_n, ch[1].dirac_n, ch[0].position, ch[1].position, config.p0, p)
    if method == "bessel":
        if ch[0].dirac_n != ch[1].dirac_n:
            raise ValidationError("Bessel form needs equal Dirac numbers", "charges")
        return eikonal.amplitude_two_identical_monopoles(
            ch[0].dirac_n, ch[0].position, ch[1].position, config.p0, p)
    raise ValidationError(f"unknown closed-form method {method!r}", "method")


def compare_amplitudes(config: ScatteringConfig, p_grid, method: str = "auto",
                       tol: float = DEFAULT_TOL, abs_tol: float = 1e-4,
                       arg_tol: float = 1e-4) -> ComparisonReport:
    """Closed form against the oracle on ``p_grid``.  Failures are report content."""
    rows = []
    notes = []
    label = method
    for p in p_grid:
        p = complex(p)
        try:
            fc = closed_form_amplitude(config, p, method)
            o = amplitude_oracle(config, p, tol)
        except NumericalError as exc:
            notes.append(f"skipped p={p!r}: {type(exc).__name__}: {exc}")
            continue
        label = fc.method.value if method == "auto" else method
        if o.shortfall:
            notes.append(f"accuracy shortfall at p={p!r}")
        rows.append(ComparisonRow(p, fc.f, o.f, o.est_err))
    return ComparisonReport(label, tuple(rows), abs_tol, arg_tol, tuple(notes))
