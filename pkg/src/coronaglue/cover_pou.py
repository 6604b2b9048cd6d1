"""Finite ball covers of the parameter box and the smooth partition of unity.

The bump profile is the classical mollifier beta(t) = exp(-1/(1-t^2)) for
|t| < 1 and 0 otherwise, scaled to the cover radius.  Radial slots are laid
out on an axis-aligned grid whose spacing keeps every box point strictly
inside some bump: centers are spread evenly with per-axis count
ceil(width * sqrt(d) / (2 r')), where r' is the radius shrunk by a 0.5%
safety margin.  Without the margin, box corners can land exactly on a support
boundary, where every bump vanishes and the normalization is undefined.

Derivatives of the normalized weights are computed by truncated-jet
arithmetic (see :mod:`coronaglue.jets`); no symbolic differentiation and no
finite differencing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import jets
from .errors import DomainError, InternalInconsistency
from .polyalg import ParamFamily

BUMP_CLAMP = 1e-6      # t >= 1 - this evaluates to exactly 0
COVER_MARGIN = 0.995   # effective radius factor used for center spacing


def lipschitz_s_bound(family: ParamFamily) -> float:
    """L with ||f(., s) - f(., s')|| <= L |s - s'| over disc x box, from
    coefficient-sum bounds on the parameter gradient."""
    total = 0.0
    for comp in family.components:
        for axis in range(family.dim):
            b = float(np.sum(comp.partial(axis).coeff_bounds(family.box)))
            total += b * b
    return math.sqrt(total)


def modulus_inverse(eps: float, lipschitz: float) -> float:
    """Largest radius whose data variation stays below ``eps``; infinite for
    parameter-independent data (a single cover ball suffices)."""
    if eps <= 0:
        raise DomainError("threshold must be positive")
    if lipschitz < 0:
        raise DomainError("Lipschitz bound must be nonnegative")
    if lipschitz == 0.0:
        return math.inf
    return eps / lipschitz


@dataclass(frozen=True)
class Cover:
    """Centers plus a common ball radius covering the box."""

    centers: tuple
    radius: float
    box: tuple

    @property
    def size(self) -> int:
        return len(self.centers)

    def to_dict(self):
        return {
            "centers": [list(c) for c in self.centers],
            "radius": self.radius if math.isfinite(self.radius) else "inf",
            "box": [list(b) for b in self.box],
        }

    @staticmethod
    def from_dict(d):
        radius = d["radius"]
        radius = math.inf if radius == "inf" else float(radius)
        return Cover(
            tuple(tuple(c) for c in d["centers"]),
            radius,
            tuple(tuple(b) for b in d["box"]),
        )


def build_cover(box, radius: float) -> Cover:
    """Axis-aligned grid cover: per-axis counts ceil(width sqrt(d)/(2 r')),
    centers spread evenly so the worst point sits strictly inside a bump."""
    box = tuple((float(a), float(b)) for a, b in box)
    if radius <= 0:
        raise DomainError("cover radius must be positive")
    d = len(box)
    if math.isinf(radius):
        center = tuple((a + b) / 2.0 for a, b in box)
        return Cover((center,), radius, box)
    spacing = 2.0 * (COVER_MARGIN * radius) / math.sqrt(d)
    axis_centers = []
    for a, b in box:
        n = max(1, math.ceil((b - a) / spacing))
        axis_centers.append([a + (b - a) * (2 * j + 1) / (2 * n) for j in range(n)])
    centers = tuple(tuple(c) for c in itertools.product(*axis_centers))
    return Cover(centers, radius, box)


def covers_box(cover: Cover, scan_per_axis: int = 100) -> bool:
    """Dense-grid check of the ball-cover invariant."""
    axes = [np.linspace(a, b, scan_per_axis) for a, b in cover.box]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    centers = np.asarray(cover.centers)
    dist = np.sqrt(((pts[:, None, :] - centers[None, :, :]) ** 2).sum(-1))
    return bool((dist.min(axis=1) <= cover.radius).all())


def bump(t):
    """Mollifier profile exp(-1/(1-t^2)) with exact compact support."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    inside = np.abs(t) < 1.0 - BUMP_CLAMP
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ti * ti))
    return out if out.ndim else float(out)


@lru_cache(maxsize=None)
def bump_derivative_sup(order: int, scan: int = 4001) -> float:
    """max_j<=order sup_t |beta^(j)(t)|, tabulated by a dense jet scan."""
    best = 0.0
    for t in np.linspace(0.0, 1.0 - 2 * BUMP_CLAMP, scan):
        jet = _bump_jet_1d(float(t), order)
        fact = 1.0
        for j in range(order + 1):
            if j > 1:
                fact *= j
            best = max(best, abs(jet[j]) * fact)
    return best


def _bump_jet_1d(t: float, order: int) -> np.ndarray:
    orders = (order,)
    if abs(t) >= 1.0 - BUMP_CLAMP:
        return jets.jet_zero(orders)
    tj = jets.jet_variable(t, 0, orders)
    u = jets.jet_mul(tj, tj, orders)
    v = jets.jet_const(1.0, orders) - u
    w = jets.jet_reciprocal(v, orders)
    return jets.jet_exp(-w, orders)


class PartitionOfUnity:
    """Normalized bumps subordinate to a cover: eta_k(s) =
    beta(|s - s_k| / r) / sum_j beta(|s - s_j| / r)."""

    __slots__ = ("cover",)

    def __init__(self, cover: Cover):
        self.cover = cover

    @property
    def size(self) -> int:
        return self.cover.size

    def _point(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if len(s) != len(self.cover.box):
            raise DomainError("point dimension does not match the box")
        return s

    def bump_values(self, s) -> np.ndarray:
        s = self._point(s)
        centers = np.asarray(self.cover.centers)
        if math.isinf(self.cover.radius):
            t = np.zeros(len(centers))
        else:
            t = np.sqrt(((s - centers) ** 2).sum(-1)) / self.cover.radius
        return np.asarray(bump(t))

    def weights(self, s) -> np.ndarray:
        """Normalized weight vector; sums to 1 on the box."""
        b = self.bump_values(s)
        total = b.sum()
        if total <= 0.0:
            raise InternalInconsistency(
                "cover invariant violated: no bump is positive at "
                f"{np.atleast_1d(s).tolist()}",
                witness=s,
            )
        return b / total

    def weight_jets(self, s, orders) -> np.ndarray:
        """Taylor-coefficient jets of every weight at ``s``; shape
        (centers, *jet_shape)."""
        s = self._point(s)
        orders = tuple(int(o) for o in orders)
        if len(orders) != len(s):
            raise DomainError("jet orders must match the parameter dimension")
        bumps = [self._center_bump_jet(s, c, orders) for c in self.cover.centers]
        total = bumps[0].copy()
        for b in bumps[1:]:
            total += b
        if total[(0,) * len(orders)] <= 0.0:
            raise InternalInconsistency(
                "cover invariant violated: no bump is positive at "
                f"{s.tolist()}",
                witness=tuple(s),
            )
        inv = jets.jet_reciprocal(total, orders)
        return np.stack([jets.jet_mul(b, inv, orders) for b in bumps])

    def _center_bump_jet(self, s, center, orders) -> np.ndarray:
        r = self.cover.radius
        if math.isinf(r):
            return jets.jet_const(math.exp(-1.0), orders)
        dist2 = sum((x - c) ** 2 for x, c in zip(s, center))
        if dist2 >= ((1.0 - BUMP_CLAMP) * r) ** 2:
            return jets.jet_zero(orders)
        u = jets.jet_zero(orders)
        for axis, (x, c) in enumerate(zip(s, center)):
            xi = jets.jet_variable(x - c, axis, orders)
            u += jets.jet_mul(xi, xi, orders)
        u /= r * r
        v = jets.jet_const(1.0, orders) - u
        w = jets.jet_reciprocal(v, orders)
        return jets.jet_exp(-w, orders)

    def derivs(self, s, alpha) -> np.ndarray:
        """Partial derivative d^alpha of every weight at an interior point.
        Orders with |alpha| >= 1 sum to zero across centers."""
        alpha = tuple(int(a) for a in np.atleast_1d(alpha))
        wj = self.weight_jets(s, alpha)
        return np.array([jets.jet_extract(j, alpha) for j in wj])

    def cnorm_estimate(self, order: int, grid_per_axis: int = 33):
        """Grid estimate of sum_k max over |alpha| <= order and the grid of
        |d^alpha eta_k|, with the tabulated envelope B * N * r^-order."""
        box = self.cover.box
        axes = [np.linspace(a, b, grid_per_axis) for a, b in box]
        pts = itertools.product(*axes)
        orders = (order,) * len(box)
        # order 0 measures the weights themselves; higher orders measure
        # derivatives only, so constant weights report 0.
        indices = [ix for ix in np.ndindex(*jets.jet_shape(orders))
                   if sum(ix) <= order and (order == 0 or sum(ix) >= 1)]
        best = np.zeros(self.size)
        for s in pts:
            wj = self.weight_jets(np.asarray(s), orders)
            for k in range(self.size):
                for ix in indices:
                    best[k] = max(best[k], abs(jets.jet_extract(wj[k], ix)))
        estimate = float(best.sum())
        r = self.cover.radius
        envelope = (
            bump_derivative_sup(order) * self.size
            * (1.0 if order == 0 or math.isinf(r) else r ** (-order))
        )
        return PouNormReport(order, estimate, envelope, grid_per_axis)


@dataclass(frozen=True)
class PouNormReport:
    """Measured weight-derivative sum next to its theoretical scale."""

    order: int
    estimate: float
    envelope: float
    grid_per_axis: int
