"""Momentum-grid scans, focal-point zooms and their CSV form.

A scan evaluates one quantity per grid point and never aborts: numerical
failures become row flags.  Row values are

* ``classical``: the cross section ``sigma`` (real);
* ``eikonal_closed`` / ``eikonal_oracle``: the amplitude ``f`` (complex).

``abs2`` is ``sigma`` or ``|f|^2`` and ``p_abs2_weighted`` is ``|p|^2`` times it.

Worker threads are capped by ``MONOPOLE_EIKONAL_THREADS`` (default 1).  Rows
are pure functions of their momentum, so the table does not depend on the
thread count.
"""

from __future__ import annotations

import csv
import hashlib
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import classical, oracle
from .chargeconf import ScatteringConfig
from .errors import MonopoleEikonalError, ValidationError

FOCAL_PROXIMITY = 0.02        # |p - p_f| <= this * |p_f|
SEMICLASSICAL_MIN = 4.0       # |p_f| * R below this counts as non-semiclassical
CLOSED_FORM_MAX_REL_ERR = 1e-6
THREADS_ENV = "MONOPOLE_EIKONAL_THREADS"

CSV_HEADER = ["re_p", "im_p", "value_re", "value_im", "abs2", "p_abs2_weighted", "flags"]

FLAG_FOCAL = "focal_proximity"
FLAG_DIVERGENT = "focal_divergence"
FLAG_NON_SEMICLASSICAL = "non_semiclassical"
FLAG_SHORTFALL = "accuracy_shortfall"


class ScanMode(str, Enum):
    CLASSICAL = "classical"
    EIKONAL_CLOSED = "eikonal_closed"
    EIKONAL_ORACLE = "eikonal_oracle"


@dataclass(frozen=True)
class GridSpec:
    points: tuple
    shape: tuple
    label: str = "points"

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        if not pts:
            raise ValidationError("grid is empty", "grid")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "shape", tuple(int(s) for s in self.shape))
        if int(np.prod(self.shape)) != len(pts):
            raise ValidationError("grid shape does not match its points", "grid")

    def digest(self) -> str:
        blob = ";".join(f"{repr(p.real)},{repr(p.imag)}" for p in self.points)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def real_grid(re0: float, re1: float, n: int, im: float = 0.0) -> GridSpec:
    """``n`` equispaced points from ``re0`` to ``re1`` at fixed imaginary part."""
    if n < 1:
        raise ValidationError("grid needs at least one point", "grid")
    xs = np.linspace(re0, re1, n)
    return GridSpec(tuple(complex(x, im) for x in xs), (n,), "real")


def square_grid(center: complex, window: float, resolution: int) -> GridSpec:
    """``resolution x resolution`` square of side ``window`` around ``center``, row-major in Im."""
    if window <= 0:
        raise ValidationError("window must be positive", "window")
    if resolution < 2:
        raise ValidationError("resolution must be at least 2", "resolution")
    offs = np.linspace(-window / 2, window / 2, resolution)
    center = complex(center)
    pts = [center + complex(x, y) for y in offs for x in offs]
    return GridSpec(tuple(pts), (resolution, resolution), "square")


def figure_grid(n_over_r: float, points: int = 400) -> GridSpec:
    """Real grid over ``[0.25, 1.75] * n/R``, the focal-family reproduction range."""
    return real_grid(0.25 * n_over_r, 1.75 * n_over_r, points)


@dataclass(frozen=True)
class ScanRow:
    p: complex
    value: complex
    flags: frozenset = field(default_factory=frozenset)

    @property
    def abs2(self) -> float:
        if isinstance(self.value, float):
            return self.value
        return abs(self.value) ** 2

    @property
    def p_abs2_weighted(self) -> float:
        return abs(self.p) ** 2 * self.abs2


@dataclass(frozen=True)
class ScanTable:
    config_digest: str
    mode: ScanMode
    rows: tuple
    grid: GridSpec | None = None

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def file_name(self) -> str:
        gh = self.grid.digest() if self.grid is not None else _rows_digest(self.rows)
        return f"{self.config_digest}_{ScanMode(self.mode).value}_{gh}.csv"


def _rows_digest(rows) -> str:
    return GridSpec(tuple(r.p for r in rows), (len(rows),)).digest()


# ----------------------------------------------------------- evaluation

def _focal_data(config: ScatteringConfig):
    pts = [fp for fp in classical.focal_points(config) if not fp.degenerate]
    bs = np.array(config.positions, dtype=complex)
    r_char = 0.5 * float(np.max(np.abs(bs[:, None] - bs[None, :]))) if len(bs) > 1 else 0.0
    return pts, r_char


def semiclassical(config: ScatteringConfig) -> bool | None:
    """``|p_f| R >= SEMICLASSICAL_MIN`` for the smallest finite focal momentum.

    ``R`` is half the largest charge separation.  ``None`` without focal points.
    """
    pts, r_char = _focal_data(config)
    if not pts:
        return None
    return min(abs(fp.p_f) for fp in pts) * r_char >= SEMICLASSICAL_MIN


def _evaluate(config, mode, p, tol):
    flags = set()
    if mode == ScanMode.CLASSICAL:
        sigma = classical.classical_cross_section(config, p)
        if math.isinf(sigma):
            flags.add(FLAG_DIVERGENT)
        return float(sigma), flags
    if mode == ScanMode.EIKONAL_CLOSED:
        s = oracle.closed_form_amplitude(config, p)
        if s.est_rel_err > CLOSED_FORM_MAX_REL_ERR:
            flags.add(FLAG_SHORTFALL)
        return complex(s.f), flags
    res = oracle.amplitude_oracle(config, p, tol)
    if res.shortfall:
        flags.add(FLAG_SHORTFALL)
    return complex(res.f), flags


def _thread_cap() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def scan_cross_section(config: ScatteringConfig, grid: GridSpec, mode="classical",
                       tol: float = oracle.DEFAULT_TOL) -> ScanTable:
    """Evaluate ``mode`` on every grid point; errors become ``error:<Name>`` flags."""
    mode = ScanMode(mode)
    pts, _ = _focal_data(config)
    common = {FLAG_NON_SEMICLASSICAL} if semiclassical(config) is False else set()

    def row(p):
        flags = set(common)
        for fp in pts:
            if abs(p - fp.p_f) <= FOCAL_PROXIMITY * abs(fp.p_f):
                flags.add(FLAG_FOCAL)
        try:
            value, extra = _evaluate(config, mode, p, tol)
            flags |= extra
        except ValidationError:
            raise
        except (MonopoleEikonalError, ArithmeticError) as exc:
            value = math.nan if mode == ScanMode.CLASSICAL else complex(math.nan, math.nan)
            flags.add(f"error:{type(exc).__name__}")
        return ScanRow(p, value, frozenset(flags))

    workers = min(_thread_cap(), len(grid.points))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(row, grid.points))
    else:
        rows = tuple(row(p) for p in grid.points)
    return ScanTable(config.digest(), mode, rows, grid)


def focal_momenta(config: ScatteringConfig) -> list[complex]:
    """Finite focal momenta in the order returned by ``classical.focal_points``."""
    return [fp.p_f for fp in classical.focal_points(config) if not fp.degenerate]


def _focal(config, focal_index):
    pfs = focal_momenta(config)
    if not pfs:
        raise ValidationError("configuration has no finite focal point", "charges")
    if not 0 <= focal_index < len(pfs):
        raise IndexError(f"focal index {focal_index} out of range (0..{len(pfs) - 1})")
    return pfs[focal_index]


def focal_zoom(config: ScatteringConfig, focal_index: int, window: float, resolution: int,
               mode="eikonal_closed", tol: float = oracle.DEFAULT_TOL) -> ScanTable:
    """Square complex window of side ``window`` centred on a focal momentum."""
    pf = _focal(config, focal_index)
    return scan_cross_section(config, square_grid(pf, window, resolution), mode, tol)


def focal_real_slice(config: ScatteringConfig, focal_index: int, window: float, resolution: int,
                     mode="eikonal_closed", tol: float = oracle.DEFAULT_TOL) -> ScanTable:
    """Real-``p`` slice through the window at ``Re p = Re p_f``'s neighbourhood.

    Only real momentum transfers are observable; for an off-axis focal point
    this is the physical cut through the zoom window.
    """
    pf = _focal(config, focal_index)
    grid = real_grid(pf.real - window / 2, pf.real + window / 2, resolution)
    return scan_cross_section(config, grid, mode, tol)


@dataclass(frozen=True)
class PeakSummary:
    p: complex
    height: float
    sharpness: float  # height / median
    index: int
    at_edge: bool


def peak_summary(table: ScanTable, column: str = "p_abs2_weighted",
                 skip_shortfall: bool = True) -> PeakSummary:
    """Largest finite value of ``column``.

    Rows with an ``error:`` flag are always skipped, accuracy shortfalls
    unless ``skip_shortfall`` is false.
    """
    vals = table.column(column)
    bad = {FLAG_SHORTFALL} if skip_shortfall else set()
    ok = np.isfinite(vals) & np.array(
        [not any(f.startswith("error:") or f in bad for f in r.flags) for r in table.rows]
    )
    if not ok.any():
        raise ValidationError("no usable rows in table", "rows")
    idx = np.flatnonzero(ok)
    i = int(idx[np.argmax(vals[idx])])
    med = float(np.median(vals[idx]))
    return PeakSummary(table.rows[i].p, float(vals[i]), float(vals[i] / med) if med > 0 else math.inf,
                       i, i in (int(idx[0]), int(idx[-1])))


# ------------------------------------------------------------------ csv

def write_rows(table: ScanTable, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in table.rows:
        v = complex(r.value)
        w.writerow([
            repr(r.p.real), repr(r.p.imag), repr(v.real), repr(v.imag),
            repr(float(r.abs2)), repr(float(r.p_abs2_weighted)), ";".join(sorted(r.flags)),
        ])


def emit_csv(table: ScanTable, destination) -> Path | None:
    """Write ``table`` to a path, a directory (conventional file name) or a stream."""
    if hasattr(destination, "write"):
        write_rows(table, destination)
        return None
    dest = Path(destination)
    if dest.is_dir():
        dest = dest / table.file_name()
    with open(dest, "w", newline="") as fh:
        write_rows(table, fh)
    return dest


_NAME = re.compile(r"^([0-9a-f]{12})_(classical|eikonal_closed|eikonal_oracle)_([0-9a-f]{12})\.csv$")


def read_csv(path, mode=None, config_digest: str = "") -> ScanTable:
    """Inverse of :func:`emit_csv`; mode and digest come from the file name unless given."""
    path = Path(path)
    m = _NAME.match(path.name)
    if mode is None:
        if m is None:
            raise ValidationError("cannot infer scan mode from file name; pass mode", "mode")
        mode = m.group(2)
    mode = ScanMode(mode)
    if not config_digest and m is not None:
        config_digest = m.group(1)
    rows = []
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if header != CSV_HEADER:
            raise ValidationError(f"unexpected header {header}", "header")
        for rec in rd:
            p = complex(float(rec[0]), float(rec[1]))
            if mode == ScanMode.CLASSICAL:
                value = float(rec[2])
            else:
                value = complex(float(rec[2]), float(rec[3]))
            flags = frozenset(x for x in rec[6].split(";") if x)
            rows.append(ScanRow(p, value, flags))
    rows = tuple(rows)
    return ScanTable(config_digest, mode, rows, GridSpec(tuple(r.p for r in rows), (len(rows),)))
