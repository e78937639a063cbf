"""Charge systems: domain types, unit conventions and config ingestion.

Units are natural (hbar = c = 1).  The electric charge of the projectile is
folded into each scatterer's coupling ``electric = e*q`` and the magnetic
charge into the Dirac integer ``dirac_n = 2*e*g``.  The complex charge of a
scatterer is then ``Q = electric + 1j * p0 * dirac_n / 2``.

Config documents are YAML (JSON is accepted as a subset)::

    p0: 1.0
    allow_noninteger: false      # optional
    charges:
      - {pos: [1.0, 0.0], n: 2}
      - {pos: [-1.0, 0.0], electric: 0.5, n: -2, theta: 0.3}
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass

import yaml

from .errors import SchemaError, ValidationError

TWO_PI = 2.0 * math.pi

_TOP_KEYS = {"p0", "allow_noninteger", "charges"}
_CHARGE_KEYS = {"pos", "electric", "n", "theta"}


@dataclass(frozen=True)
class UnitsConvention:
    """Documentation-bearing record of the unit system used everywhere."""

    hbar: float = 1.0
    c: float = 1.0
    electric_coupling: str = "electric = e*q (dimensionless)"
    magnetic_coupling: str = "dirac_n = 2*e*g (integer under Dirac quantization)"


UNITS = UnitsConvention()


@dataclass(frozen=True)
class ChargeSpec:
    """One point scatterer projected onto the impact-parameter plane."""

    position: complex
    electric: float = 0.0
    dirac_n: float = 0
    string_angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", complex(self.position))
        object.__setattr__(self, "electric", float(self.electric))
        object.__setattr__(self, "string_angle", float(self.string_angle) % TWO_PI)
        n = self.dirac_n
        if float(n).is_integer():
            n = int(n)
        object.__setattr__(self, "dirac_n", n)

    @property
    def is_integer_monopole(self) -> bool:
        return float(self.dirac_n).is_integer()


@dataclass(frozen=True)
class ComplexCharge:
    value: complex

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag


@dataclass(frozen=True)
class ScatteringConfig:
    charges: tuple
    p0: float
    allow_noninteger: bool = False

    def __post_init__(self):
        object.__setattr__(self, "charges", tuple(self.charges))
        object.__setattr__(self, "p0", float(self.p0))
        validate(self)

    @property
    def positions(self) -> list[complex]:
        return [c.position for c in self.charges]

    @property
    def n_charges(self) -> int:
        return len(self.charges)

    def with_charges(self, charges) -> "ScatteringConfig":
        return ScatteringConfig(tuple(charges), self.p0, self.allow_noninteger)

    def to_dict(self) -> dict:
        out = {"p0": self.p0}
        if self.allow_noninteger:
            out["allow_noninteger"] = True
        out["charges"] = [
            {
                "pos": [c.position.real, c.position.imag],
                "electric": c.electric,
                "n": c.dirac_n,
                "theta": c.string_angle,
            }
            for c in self.charges
        ]
        return out

    def digest(self) -> str:
        """Short stable hash of the normalized config."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def validate(config: ScatteringConfig) -> None:
    if not (config.p0 > 0 and math.isfinite(config.p0)):
        raise ValidationError("incident momentum must be a finite positive number", "p0")
    if len(config.charges) == 0:
        raise ValidationError("at least one charge is required", "charges")
    seen = {}
    for i, ch in enumerate(config.charges):
        path = f"charges[{i}]"
        if not (math.isfinite(ch.position.real) and math.isfinite(ch.position.imag)):
            raise ValidationError("position must be finite", path + ".pos")
        if not math.isfinite(ch.electric):
            raise ValidationError("electric coupling must be finite", path + ".electric")
        if not config.allow_noninteger and not ch.is_integer_monopole:
            raise ValidationError(
                "Dirac number must be an integer (set allow_noninteger to override)",
                path + ".n",
            )
        if ch.position in seen:
            raise ValidationError(
                f"duplicate position, coincides with charges[{seen[ch.position]}]; "
                "declare a single dyon instead",
                path + ".pos",
            )
        seen[ch.position] = i
    if all(ch.electric == 0 and ch.dirac_n == 0 for ch in config.charges):
        raise ValidationError("all charges vanish", "charges")


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{path}: expected a number, got {type(value).__name__}")
    return value


def from_dict(doc) -> ScatteringConfig:
    if not isinstance(doc, dict):
        raise SchemaError("top level must be a mapping")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise SchemaError(f"unknown top-level keys: {sorted(unknown)}")
    if "p0" not in doc:
        raise SchemaError("missing required key 'p0'")
    if "charges" not in doc:
        raise SchemaError("missing required key 'charges'")
    p0 = _number(doc["p0"], "p0")
    allow = doc.get("allow_noninteger", False)
    if not isinstance(allow, bool):
        raise SchemaError("allow_noninteger: expected a boolean")
    raw = doc["charges"]
    if not isinstance(raw, list):
        raise SchemaError("charges: expected a list")
    charges = []
    for i, item in enumerate(raw):
        path = f"charges[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(f"{path}: expected a mapping")
        unknown = set(item) - _CHARGE_KEYS
        if unknown:
            raise SchemaError(f"{path}: unknown keys {sorted(unknown)}")
        if "pos" not in item:
            raise SchemaError(f"{path}: missing required key 'pos'")
        pos = item["pos"]
        if not isinstance(pos, list) or len(pos) != 2:
            raise SchemaError(f"{path}.pos: expected [x, y]")
        x = _number(pos[0], path + ".pos[0]")
        y = _number(pos[1], path + ".pos[1]")
        charges.append(
            ChargeSpec(
                position=complex(x, y),
                electric=_number(item.get("electric", 0.0), path + ".electric"),
                dirac_n=_number(item.get("n", 0), path + ".n"),
                string_angle=_number(item.get("theta", 0.0), path + ".theta"),
            )
        )
    return ScatteringConfig(tuple(charges), p0, allow)


class _Loader(yaml.SafeLoader):
    """SafeLoader that also reads ``1e-3`` style floats (YAML 1.2 / JSON)."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
                  |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
                  |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
                  |[-+]?\.(?:inf|Inf|INF)
                  |\.(?:nan|NaN|NAN))$""", re.X),
    list("-+0123456789."),
)


def parse_config(text: str) -> ScatteringConfig:
    """Parse and validate a YAML/JSON config document."""
    try:
        doc = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        raise SchemaError(f"unparseable document: {exc}") from exc
    return from_dict(doc)


def load_config(path) -> ScatteringConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(config: ScatteringConfig) -> str:
    return json.dumps(config.to_dict(), indent=2, sort_keys=False) + "\n"


def complex_charges(config: ScatteringConfig) -> list[ComplexCharge]:
    """``Q_k = electric_k + 1j * p0 * n_k / 2`` in config order."""
    return [
        ComplexCharge(complex(c.electric, config.p0 * c.dirac_n / 2.0))
        for c in config.charges
    ]


def make_config(charges, p0=1.0, allow_noninteger=False) -> ScatteringConfig:
    """Build a config from ``(position, electric, n[, theta])`` tuples."""
    specs = []
    for item in charges:
        if isinstance(item, ChargeSpec):
            specs.append(item)
        else:
            specs.append(ChargeSpec(*item))
    return ScatteringConfig(tuple(specs), p0, allow_noninteger)
