"""Problem configuration: explicit coefficient tables, no expression parsing.

A problem file is JSON:

    {
      "family": {"components": [{"z_coeffs": [[2.0, 1.0], [-1.0]]}, ...]},
      "domain": {"bounds": [[0.0, 1.0]]},
      "solver": {"boundary_samples": 512, ...},
      "output": {"directory": ".", "formats": ["json", "csv"]},
      "rescale_factor": 1.0
    }

``z_coeffs[j]`` is the dense coefficient table of the parameter polynomial
multiplying z**j: a flat list for one parameter axis, a rectangular nested
list for two.  Parsing is lossless: serialize(parse(text)) is semantically
identical to the input.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .polyalg import ParamFamily, SPoly, ZSPoly

MAX_Z_DEGREE = 64
MAX_S_DEGREE = 8
MAX_ORDER = 6


@dataclass(frozen=True)
class SolverSettings:
    boundary_samples: int = 512
    radial_samples: int = 64
    angular_samples: int = 128
    axis_samples: int = 33
    degree_cap_factor: int = 8
    max_refinements: int = 6
    order: int = 2

    def validate(self):
        checks = [
            ("boundary_samples", self.boundary_samples >= 8),
            ("radial_samples", self.radial_samples >= 2),
            ("angular_samples", self.angular_samples >= 4),
            ("axis_samples", self.axis_samples >= 2),
            ("degree_cap_factor", self.degree_cap_factor >= 1),
            ("max_refinements", self.max_refinements >= 0),
            ("order", 0 <= self.order <= MAX_ORDER),
        ]
        for name, ok in checks:
            if not ok:
                raise ConfigError(f"solver.{name} = {getattr(self, name)} out of range")

    def to_dict(self):
        return {
            "boundary_samples": self.boundary_samples,
            "radial_samples": self.radial_samples,
            "angular_samples": self.angular_samples,
            "axis_samples": self.axis_samples,
            "degree_cap_factor": self.degree_cap_factor,
            "max_refinements": self.max_refinements,
            "order": self.order,
        }


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "."
    formats: tuple = ("json", "csv")

    def validate(self):
        if not isinstance(self.directory, str) or not self.directory:
            raise ConfigError("output.directory must be a nonempty string")
        bad = set(self.formats) - {"json", "csv"}
        if bad:
            raise ConfigError(f"output.formats contains unknown entries {sorted(bad)}")

    def to_dict(self):
        return {"directory": self.directory, "formats": list(self.formats)}


def _int_field(raw, path, default):
    value = raw.get(path.split(".")[-1], default)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"{path} must be an integer, got {value!r}")
    return value


def _table_shape(table, path):
    """Validate a dense coefficient table; returns (depth, shape)."""
    if isinstance(table, (int, float)) and not isinstance(table, bool):
        raise ConfigError(f"{path} must be a list, got a bare number")
    if not isinstance(table, list) or not table:
        raise ConfigError(f"{path} must be a nonempty list")
    if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in table):
        for x in table:
            if not math.isfinite(x):
                raise ConfigError(f"{path} contains a non-finite value")
        return 1, (len(table),)
    widths = set()
    for i, row in enumerate(table):
        depth, shape = _table_shape(row, f"{path}[{i}]")
        if depth != 1:
            raise ConfigError(f"{path} nests deeper than two parameter axes")
        widths.add(shape[0])
    if len(widths) != 1:
        raise ConfigError(f"{path} must be rectangular")
    return 2, (len(table), widths.pop())


@dataclass(frozen=True)
class ProblemConfig:
    components: tuple          # tuple of tuples of dense coefficient tables
    bounds: tuple              # ((a, b), ...) per parameter axis
    solver: SolverSettings = field(default_factory=SolverSettings)
    output: OutputSettings = field(default_factory=OutputSettings)
    rescale_factor: float = 1.0

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def validate(self):
        if not 1 <= self.dim <= 2:
            raise ConfigError(f"domain has {self.dim} axes; only 1 or 2 supported")
        for i, (a, b) in enumerate(self.bounds):
            if not (math.isfinite(a) and math.isfinite(b) and b > a):
                raise ConfigError(f"domain.bounds[{i}] must be finite with upper > lower")
        if not self.components:
            raise ConfigError("family.components must be nonempty")
        for ci, tables in enumerate(self.components):
            if not tables:
                raise ConfigError(f"family.components[{ci}].z_coeffs must be nonempty")
            if len(tables) - 1 > MAX_Z_DEGREE:
                raise ConfigError(
                    f"family.components[{ci}] has z-degree {len(tables)-1} > {MAX_Z_DEGREE}"
                )
            for zi, table in enumerate(tables):
                path = f"family.components[{ci}].z_coeffs[{zi}]"
                depth, shape = _table_shape(list(table), path)
                if depth != self.dim:
                    raise ConfigError(
                        f"{path} has {depth} parameter axes, domain has {self.dim}"
                    )
                if any(n - 1 > MAX_S_DEGREE for n in shape):
                    raise ConfigError(
                        f"{path} exceeds parameter degree {MAX_S_DEGREE}"
                    )
        if not (math.isfinite(self.rescale_factor) and self.rescale_factor > 0):
            raise ConfigError("rescale_factor must be positive and finite")
        self.solver.validate()
        self.output.validate()

    def to_family(self) -> ParamFamily:
        comps = []
        for tables in self.components:
            comps.append(ZSPoly([SPoly(np.asarray(t, dtype=float)) for t in tables]))
        return ParamFamily(comps, self.bounds)

    def scaled(self, factor: float) -> "ProblemConfig":
        """Multiply every component by ``factor``; the accumulated factor is
        recorded so reported solution norms can be mapped back (the solution
        scales by 1 / factor)."""
        if not (math.isfinite(factor) and factor > 0):
            raise ConfigError("rescale factor must be positive and finite")

        def scale_table(t):
            return [scale_table(x) for x in t] if isinstance(t, list) else t * factor

        comps = tuple(
            tuple(scale_table(list(_deep_list(t))) for t in tables)
            for tables in self.components
        )
        return replace(self, components=comps,
                       rescale_factor=self.rescale_factor * factor)

    def to_dict(self):
        return {
            "family": {
                "components": [
                    {"z_coeffs": [_deep_list(t) for t in tables]}
                    for tables in self.components
                ]
            },
            "domain": {"bounds": [list(b) for b in self.bounds]},
            "solver": self.solver.to_dict(),
            "output": self.output.to_dict(),
            "rescale_factor": self.rescale_factor,
        }

    @staticmethod
    def from_dict(raw) -> "ProblemConfig":
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
        try:
            family = raw["family"]
            comps_raw = family["components"]
            bounds_raw = raw["domain"]["bounds"]
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"missing required section: {exc}") from exc
        if not isinstance(comps_raw, list):
            raise ConfigError("family.components must be a list")
        components = []
        for ci, entry in enumerate(comps_raw):
            if not isinstance(entry, dict) or "z_coeffs" not in entry:
                raise ConfigError(
                    f"family.components[{ci}] needs a z_coeffs table"
                )
            components.append(tuple(entry["z_coeffs"]))
        bounds = tuple(tuple(float(x) for x in b) for b in bounds_raw)

        solver_raw = raw.get("solver", {})
        if not isinstance(solver_raw, dict):
            raise ConfigError("solver must be an object")
        defaults = SolverSettings()
        solver = SolverSettings(**{
            name: _int_field(solver_raw, f"solver.{name}", getattr(defaults, name))
            for name in defaults.to_dict()
        })
        output_raw = raw.get("output", {})
        output = OutputSettings(
            directory=output_raw.get("directory", "."),
            formats=tuple(output_raw.get("formats", ["json", "csv"])),
        )
        cfg = ProblemConfig(
            components=tuple(components),
            bounds=bounds,
            solver=solver,
            output=output,
            rescale_factor=float(raw.get("rescale_factor", 1.0)),
        )
        cfg.validate()
        return cfg


def _deep_list(t):
    if isinstance(t, (list, tuple)):
        return [_deep_list(x) for x in t]
    return float(t)


def load_config(path) -> ProblemConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return ProblemConfig.from_dict(raw)


def save_config(config: ProblemConfig, path):
    config.validate()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
