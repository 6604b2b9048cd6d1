"""Solution-file persistence and grid exports.

A solution file is self-contained: the full problem configuration, the cover,
every pointwise solution's coefficients, and all certificates, so
verification needs no recomputation of the pipeline.  Complex numbers are
stored as [re, im] pairs; infinite radii as the string "inf".  Files are
written with sorted keys and LF endings so identical runs produce
byte-identical artifacts.
"""

from __future__ import annotations

import itertools
import json
import math
from pathlib import Path

import numpy as np

from .bezout_point import PointSolution
from .config import ProblemConfig
from .cover_pou import Cover, PartitionOfUnity
from .errors import ConfigError
from .glue import GluedSolution, PointSolutionSet, phi_eval
from .hnorm import NormCert
from .polyalg import CPoly

SOLUTION_FORMAT = "coronaglue-solution-v1"


def _complex_list(p: CPoly):
    return [[float(c.real), float(c.imag)] for c in p.coeffs]


def _cpoly_from_list(pairs) -> CPoly:
    return CPoly([complex(re, im) for re, im in pairs])


def _encode_radius(r: float):
    return "inf" if math.isinf(r) else float(r)


def _decode_radius(r):
    return math.inf if r == "inf" else float(r)


def solution_to_dict(config: ProblemConfig, glued: GluedSolution) -> dict:
    return {
        "format": SOLUTION_FORMAT,
        "config": config.to_dict(),
        "result": {
            "cover": glued.cover.to_dict(),
            "point_solutions": [
                {
                    "g": [_complex_list(gm) for gm in sol.g],
                    "norm_cert": sol.norm_cert.to_dict(),
                    "residual_cert": sol.residual_cert.to_dict(),
                }
                for sol in glued.points.solutions
            ],
            "c0": glued.c0,
            "delta_cert": glued.delta_cert.to_dict(),
            "sup_cert": glued.sup_cert.to_dict(),
            "residual_cert": glued.residual_cert.to_dict(),
            "r_final": _encode_radius(glued.cover.radius),
            "refinements": glued.refinements,
        },
    }


def solution_from_dict(raw: dict):
    """Rebuild (ProblemConfig, GluedSolution) from a solution dictionary."""
    if not isinstance(raw, dict) or raw.get("format") != SOLUTION_FORMAT:
        raise ConfigError(f"not a {SOLUTION_FORMAT} file")
    config = ProblemConfig.from_dict(raw["config"])
    result = raw["result"]
    cover = Cover.from_dict(result["cover"])
    solutions = []
    for entry in result["point_solutions"]:
        solutions.append(PointSolution(
            g=tuple(_cpoly_from_list(gm) for gm in entry["g"]),
            norm_cert=NormCert.from_dict(entry["norm_cert"]),
            residual_cert=NormCert.from_dict(entry["residual_cert"]),
        ))
    points = PointSolutionSet(tuple(solutions), float(result["c0"]))
    glued = GluedSolution(
        family=config.to_family(),
        pou=PartitionOfUnity(cover),
        points=points,
        delta_cert=NormCert.from_dict(result["delta_cert"]),
        sup_cert=NormCert.from_dict(result["sup_cert"]),
        residual_cert=NormCert.from_dict(result["residual_cert"]),
        refinements=int(result["refinements"]),
    )
    return config, glued


def save_solution(config: ProblemConfig, glued: GluedSolution, path):
    payload = solution_to_dict(config, glued)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_solution(path):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return solution_from_dict(raw)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def polar_grid(radial: int, angular: int):
    """Deterministic polar nodes of the closed disc, radii then angles."""
    radii = np.linspace(0.0, 1.0, radial) if radial > 0 else np.array([])
    angles = (
        np.exp(2j * math.pi * np.arange(angular) / angular)
        if angular > 0 else np.array([])
    )
    return radii, angles


def export_grid_csv(glued: GluedSolution, path, radial: int, angular: int,
                    s_per_axis: int):
    """One CSV row per grid node per component; returns (row count, summary).

    Columns: re_z, im_z, s1[, s2], k, re_g, im_g, abs_phi -- k is the
    1-based component index.  Floats carry 17 significant digits.
    """
    family = glued.family
    radii, angles = polar_grid(radial, angular)
    axes = [np.linspace(a, b, s_per_axis) for a, b in family.box] \
        if s_per_axis > 0 else [np.array([]) for _ in family.box]
    s_cols = [f"s{i+1}" for i in range(family.dim)]
    header = ["re_z", "im_z", *s_cols, "k", "re_g", "im_g", "abs_phi"]

    z_nodes = (radii[:, None] * angles[None, :]).ravel() if radii.size and \
        angles.size else np.array([], dtype=complex)

    rows = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        if z_nodes.size:
            for s in itertools.product(*axes):
                phi, gt = phi_eval(family, glued.pou, glued.points,
                                   z_nodes, np.asarray(s))
                g = gt / phi
                absphi = np.abs(phi)
                for zi, z in enumerate(z_nodes):
                    for k in range(family.size):
                        cells = [_fmt(z.real), _fmt(z.imag),
                                 *(_fmt(x) for x in s), str(k + 1),
                                 _fmt(g[k, zi].real), _fmt(g[k, zi].imag),
                                 _fmt(absphi[zi])]
                        fh.write(",".join(cells) + "\n")
                        rows += 1

    summary = {
        "csv": str(Path(path).name),
        "rows": rows,
        "grid": {"radial": radial, "angular": angular, "s_per_axis": s_per_axis},
        "c0": glued.c0,
        "delta_cert": glued.delta_cert.to_dict(),
        "sup_cert": glued.sup_cert.to_dict(),
        "residual_cert": glued.residual_cert.to_dict(),
    }
    return rows, summary


def save_summary(summary: dict, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
