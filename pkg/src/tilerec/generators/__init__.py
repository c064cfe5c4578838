"""Window providers for the lattice, shear, Penrose and pinwheel tiling families."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..errors import ConfigError
from ..tiling import WindowProvider
from .lattice import (
    GOLDEN,
    LatticeProvider,
    ShearProvider,
    golden_linear_offsets,
    golden_quadratic_offsets,
    seeded_offsets,
    shear_squares,
    square_lattice,
)
from .penrose import PenroseProvider, penrose
from .pinwheel import PinwheelProvider, pinwheel

KINDS = ("lattice", "shear", "penrose", "pinwheel")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        if not isinstance(d, dict) or "kind" not in d:
            raise ConfigError("generator spec needs a 'kind'")
        kind = d["kind"]
        if kind not in KINDS:
            raise ConfigError(f"unknown generator kind {kind!r}; expected one of {KINDS}")
        params = d.get("params", {})
        if params is None:
            params = {}
        if not isinstance(params, dict):
            raise ConfigError("generator 'params' must be an object")
        seed = d.get("seed", 0)
        if not isinstance(seed, int):
            raise ConfigError("generator 'seed' must be an integer")
        return cls(kind, dict(params), seed)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "seed": self.seed}


def make_provider(spec: GeneratorSpec | dict) -> WindowProvider:
    """Build a provider from a spec.

    lattice: ``basis`` [[x, y], [x, y]] (default unit square).
    shear: ``offsets`` one of "golden" (frac(k²φ), the default), "golden-linear"
    (frac(kφ)), "zero", "seeded" (uses ``seed``), or an explicit list.
    penrose: ``seed_triangle`` "thick" (default) or "thin".
    pinwheel: no parameters.
    """
    if isinstance(spec, dict):
        spec = GeneratorSpec.from_dict(spec)
    p = spec.params
    try:
        if spec.kind == "lattice":
            basis = p.get("basis", [[1.0, 0.0], [0.0, 1.0]])
            return square_lattice((tuple(basis[0]), tuple(basis[1])))
        if spec.kind == "shear":
            rule = p.get("offsets", "golden")
            if isinstance(rule, list):
                return shear_squares([float(x) for x in rule])
            rules = {
                "golden": golden_quadratic_offsets,
                "golden-linear": golden_linear_offsets,
                "zero": lambda k: 0.0,
                "seeded": seeded_offsets(spec.seed),
            }
            if rule not in rules:
                raise ConfigError(f"unknown shear offset rule {rule!r}")
            return shear_squares(rules[rule])
        if spec.kind == "penrose":
            tri = p.get("seed_triangle", "thick")
            if tri not in ("thick", "thin"):
                raise ConfigError("penrose seed_triangle must be 'thick' or 'thin'")
            return penrose(1 if tri == "thick" else 0)
        return pinwheel()
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"invalid {spec.kind} parameters: {exc}") from exc


__all__ = [
    "GOLDEN", "KINDS", "GeneratorSpec", "LatticeProvider", "PenroseProvider", "PinwheelProvider",
    "ShearProvider", "golden_linear_offsets", "golden_quadratic_offsets", "make_provider",
    "penrose", "pinwheel", "seeded_offsets", "shear_squares", "square_lattice",
]
