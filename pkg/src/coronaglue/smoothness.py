"""Parameter derivatives of the glued solution and C^alpha norm reports.

One derivative mechanism everywhere: truncated jets in the parameter (see
:mod:`coronaglue.jets`).  The weights contribute jets through the bump
machinery, the data through exact Taylor coefficients of its parameter
polynomials, and the quotient g = gtilde / phi through the jet reciprocal,
which is valid wherever |phi| >= 1/2.

The norm reports never assert an inequality: the contract is finiteness and
stability under grid refinement, with the g-to-f ratio left to the reader.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import hnorm, jets
from .glue import GluedSolution, g_eval
from .polyalg import ParamFamily, partial_s


def _as_alpha(alpha, dim: int):
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    if len(alpha) != dim:
        raise ValueError("multi-index length must equal the parameter dimension")
    if any(a < 0 for a in alpha):
        raise ValueError("multi-index entries must be nonnegative")
    return alpha


def _solution_jets(glued: GluedSolution, z, s, orders):
    """Jets of every component of g at (z, s); shape (N_f, *jet, *z.shape)."""
    family = glued.family
    z_arr = np.asarray(z, dtype=complex)
    batch = z_arr.shape
    s = np.atleast_1d(np.asarray(s, dtype=float))
    family.require_inside(s)

    eta = glued.pou.weight_jets(s, orders)
    n_comp = family.size
    gt = [np.zeros(jets.jet_shape(orders) + batch, dtype=complex)
          for _ in range(n_comp)]
    for k, sol in enumerate(glued.points.solutions):
        ej = eta[k].reshape(eta[k].shape + (1,) * len(batch))
        for m, gm in enumerate(sol.g):
            gt[m] = gt[m] + ej * np.asarray(gm.eval(z_arr))

    phi = np.zeros(jets.jet_shape(orders) + batch, dtype=complex)
    point = tuple(s)
    for m, comp in enumerate(family.components):
        fj = comp.taylor_coeffs(point, orders, z_arr)
        phi = phi + jets.jet_mul(gt[m], fj, orders)
    inv = jets.jet_reciprocal(phi, orders)
    return [jets.jet_mul(g, inv, orders) for g in gt], phi


def g_partial(glued: GluedSolution, z, s, alpha) -> np.ndarray:
    """d^alpha_s of the glued solution at (z, s); order 0 reproduces the
    plain evaluator.  ``z`` may be scalar or an array."""
    alpha = _as_alpha(alpha, glued.family.dim)
    comps, _ = _solution_jets(glued, z, s, alpha)
    return np.stack([jets.jet_extract(c, alpha) for c in comps])


def bezout_identity_jet(glued: GluedSolution, z, s, orders) -> np.ndarray:
    """Jet of g^T f at (z, s): equals (1, 0, 0, ...) up to rounding because
    the identity holds exactly along the whole jet."""
    orders = tuple(int(o) for o in orders)
    comps, _ = _solution_jets(glued, z, s, orders)
    z_arr = np.asarray(z, dtype=complex)
    point = tuple(np.atleast_1d(np.asarray(s, dtype=float)))
    acc = np.zeros(jets.jet_shape(orders) + z_arr.shape, dtype=complex)
    for cj, comp in zip(comps, glued.family.components):
        acc = acc + jets.jet_mul(cj, comp.taylor_coeffs(point, orders, z_arr),
                                 orders)
    return acc


_FD_FLOOR = 1e-8


def fd_check(glued: GluedSolution, z, s, alpha, h: float) -> float:
    """Central-difference verification of :func:`g_partial` for |alpha| in
    {1, 2}; returns the relative deviation (absolute when the derivative is
    numerically zero)."""
    alpha = _as_alpha(alpha, glued.family.dim)
    order = sum(alpha)
    if order not in (1, 2):
        raise ValueError("finite-difference check supports orders 1 and 2")
    s = np.atleast_1d(np.asarray(s, dtype=float))

    def shift(*deltas):
        return g_eval(glued, z, s + np.asarray(deltas))

    dim = len(s)
    if order == 1:
        axis = alpha.index(1)
        e = np.eye(dim)[axis] * h
        fd = (shift(*e) - shift(*(-e))) / (2.0 * h)
    elif 2 in alpha:
        axis = alpha.index(2)
        e = np.eye(dim)[axis] * h
        fd = (shift(*e) - 2.0 * shift(*np.zeros(dim)) + shift(*(-e))) / (h * h)
    else:
        ex = np.eye(dim)[0] * h
        ey = np.eye(dim)[1] * h
        fd = (shift(*(ex + ey)) - shift(*(ex - ey))
              - shift(*(-ex + ey)) + shift(*(-ex - ey))) / (4.0 * h * h)

    analytic = g_partial(glued, z, s, alpha)
    err = float(np.linalg.norm(np.ravel(fd - analytic)))
    scale = float(np.linalg.norm(np.ravel(analytic)))
    return err / scale if scale > _FD_FLOOR else err


@dataclass(frozen=True)
class CAlphaReport:
    """Grid estimates of the C^alpha norms of the solution and the data."""

    order: int
    g_norm_estimate: float
    f_norm_estimate: float
    ratio: float
    axis_samples: int
    boundary_samples: int
    per_index: tuple

    def to_dict(self):
        return {
            "order": self.order,
            "g_norm_estimate": self.g_norm_estimate,
            "f_norm_estimate": self.f_norm_estimate,
            "ratio": self.ratio,
            "axis_samples": self.axis_samples,
            "boundary_samples": self.boundary_samples,
            "per_index": [
                {"alpha": list(a), "g": g, "f": f} for a, g, f in self.per_index
            ],
        }


def cnorm_report(glued: GluedSolution, order: int, axis_samples: int = 33,
                 boundary_samples: int = 256) -> CAlphaReport:
    """Estimate ||g|| and ||f|| in the C^order(K; H-infinity, l2) sense by
    maximizing over an s-grid, all multi-indices of total order <= order, and
    boundary-circle z samples (each parameter derivative is analytic in z, so
    the maximum principle applies)."""
    family = glued.family
    if order < 0:
        raise ValueError("order must be nonnegative")
    dim = family.dim
    orders = (order,) * dim
    indices = sorted(ix for ix in np.ndindex(*jets.jet_shape(orders))
                     if sum(ix) <= order)
    z = hnorm.boundary_points(boundary_samples)
    axes = [np.linspace(a, b, axis_samples) for a, b in family.box]

    g_best = {ix: 0.0 for ix in indices}
    for s in itertools.product(*axes):
        comps, _ = _solution_jets(glued, z, np.asarray(s), orders)
        for ix in indices:
            sq = np.zeros(z.shape)
            for cj in comps:
                sq += np.abs(jets.jet_extract(cj, ix)) ** 2
            g_best[ix] = max(g_best[ix], float(np.sqrt(sq.max())))

    f_best = {}
    for ix in indices:
        deriv = partial_s(family, ix)
        modulus = hnorm._family_modulus_on_grid(deriv, axes, z)
        f_best[ix] = float(modulus.max())

    g_norm = max(g_best.values())
    f_norm = max(f_best.values())
    ratio = g_norm / max(f_norm, float(np.finfo(float).tiny))
    per_index = tuple((ix, g_best[ix], f_best[ix]) for ix in indices)
    return CAlphaReport(order, g_norm, f_norm, ratio, axis_samples,
                        boundary_samples, per_index)


def pathmetric_modulus_bound(lipschitz_c1: float, t: float) -> float:
    """Data-variation bound omega(t) <= t * L on a convex box, where the path
    metric coincides with the ambient metric."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if lipschitz_c1 < 0:
        raise ValueError("the Lipschitz bound must be nonnegative")
    return t * lipschitz_c1


def modulus_samples(family: ParamFamily, pairs: int, boundary_samples: int = 256,
                    seed: int = 0):
    """Measured sup_z ||f(., s) - f(., s')|| against the Lipschitz bound for
    random parameter pairs; returns (worst measured / bound) ratios."""
    rng = np.random.default_rng(seed)
    z = hnorm.boundary_points(boundary_samples)
    from .cover_pou import lipschitz_s_bound

    bound = lipschitz_s_bound(family)
    ratios = []
    for _ in range(pairs):
        s1 = np.array([rng.uniform(a, b) for a, b in family.box])
        s2 = np.array([rng.uniform(a, b) for a, b in family.box])
        diff = 0.0
        for comp in family.components:
            diff += np.abs(comp.freeze(s1).eval(z) - comp.freeze(s2).eval(z)) ** 2
        measured = float(np.sqrt(diff.max()))
        allowed = pathmetric_modulus_bound(bound, float(np.linalg.norm(s1 - s2)))
        ratios.append(measured / allowed if allowed > 0 else 0.0)
    return ratios
