"""Dense polynomial arithmetic in the disc variable z and the parameter s.

Three layers:

* ``CPoly`` -- a complex polynomial in z, used for frozen-parameter data and
  for the pointwise Bezout solutions.
* ``SPoly`` -- a real (or complex) polynomial in the parameter
  s = (s_1, ..., s_d), d in {1, 2}, dense exponent-indexed coefficients.
* ``ZSPoly``/``ParamFamily`` -- polynomials in z whose z-coefficients are
  SPoly values, i.e. the parameter-dependent data tuple f(z, s) on a box K.

Everything is immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as npp

from .errors import DomainError

_BOX_EPS = 1e-12


def _trim1d(arr):
    """Strip trailing zero coefficients; canonical zero is length 1."""
    n = len(arr)
    while n > 1 and arr[n - 1] == 0:
        n -= 1
    return arr[:n]


class CPoly:
    """Complex polynomial in z; ``coeffs[j]`` multiplies z**j.

    Canonical form: the stored leading coefficient is nonzero, except for the
    zero polynomial which is stored as the single coefficient 0.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        arr = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if arr.ndim != 1:
            raise ValueError("CPoly coefficients must be one-dimensional")
        arr = _trim1d(arr).copy()
        arr.setflags(write=False)
        self.coeffs = arr

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "CPoly":
        return CPoly([0.0])

    @staticmethod
    def one() -> "CPoly":
        return CPoly([1.0])

    @staticmethod
    def monomial(power: int, coeff=1.0) -> "CPoly":
        c = np.zeros(power + 1, dtype=complex)
        c[power] = coeff
        return CPoly(c)

    # -- structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial reports 0."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def norm1(self) -> float:
        """Coefficient l1 norm."""
        return float(np.sum(np.abs(self.coeffs)))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _as_cpoly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        out = np.zeros(n, dtype=complex)
        out[: len(self.coeffs)] += self.coeffs
        out[: len(other.coeffs)] += other.coeffs
        return CPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return CPoly(-self.coeffs)

    def __sub__(self, other):
        return self + (-_as_cpoly(other))

    def __rsub__(self, other):
        return _as_cpoly(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, CPoly):
            if self.is_zero or other.is_zero:
                return CPoly.zero()
            return CPoly(np.convolve(self.coeffs, other.coeffs))
        return CPoly(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return CPoly(self.coeffs / complex(scalar))

    def __eq__(self, other):
        if not isinstance(other, CPoly):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(
            np.all(self.coeffs == other.coeffs)
        )

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"CPoly({list(self.coeffs)})"

    # -- evaluation --------------------------------------------------------

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        """Evaluate by nested multiplication; ``z`` may be a scalar or array."""
        z = np.asarray(z, dtype=complex)
        acc = np.full(z.shape, self.coeffs[-1], dtype=complex)
        for c in self.coeffs[-2::-1]:
            acc = acc * z + c
        if acc.ndim == 0:
            return complex(acc)
        return acc

    def derivative(self) -> "CPoly":
        """Formal derivative in z."""
        if self.degree == 0:
            return CPoly.zero()
        j = np.arange(1, len(self.coeffs))
        return CPoly(self.coeffs[1:] * j)


def _as_cpoly(value) -> CPoly:
    if isinstance(value, CPoly):
        return value
    return CPoly([complex(value)])


def eval_poly(p: CPoly, z):
    """Module-level alias for ``CPoly.eval``."""
    return p.eval(z)


def derivative_z(p: CPoly) -> CPoly:
    """Module-level alias for ``CPoly.derivative``."""
    return p.derivative()


# ---------------------------------------------------------------------------
# Parameter polynomials


def _trim_ndarray(arr):
    """Strip trailing zero slices along every axis (keep shape >= (1,)*d)."""
    for axis in range(arr.ndim):
        while arr.shape[axis] > 1:
            index = [slice(None)] * arr.ndim
            index[axis] = arr.shape[axis] - 1
            if np.any(arr[tuple(index)] != 0):
                break
            keep = [slice(None)] * arr.ndim
            keep[axis] = slice(0, arr.shape[axis] - 1)
            arr = arr[tuple(keep)]
    return arr


class SPoly:
    """Polynomial in the parameter s, dense coefficients indexed by exponent.

    ``coeffs`` has one axis per parameter variable (d = ndim <= 2);
    ``coeffs[e1]`` or ``coeffs[e1, e2]`` multiplies ``s1**e1 * s2**e2``.
    Family data carries real coefficients; complex arrays are accepted so the
    same arithmetic can host products with complex z-coefficients.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, dim=None):
        arr = np.asarray(coeffs)
        if arr.ndim == 0:
            arr = arr.reshape((1,) * (dim or 1))
        if dim is not None and arr.ndim != dim:
            raise ValueError(f"expected {dim} parameter axes, got {arr.ndim}")
        if arr.ndim not in (1, 2):
            raise ValueError("parameter dimension must be 1 or 2")
        dtype = complex if np.iscomplexobj(arr) else float
        arr = _trim_ndarray(arr.astype(dtype)).copy()
        arr.setflags(write=False)
        self.coeffs = arr

    @staticmethod
    def constant(value, dim: int) -> "SPoly":
        return SPoly(np.asarray(value).reshape((1,) * dim))

    @property
    def dim(self) -> int:
        return self.coeffs.ndim

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs.flat[0] == 0

    def __eq__(self, other):
        if not isinstance(other, SPoly):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(
            np.all(self.coeffs == other.coeffs)
        )

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"SPoly({self.coeffs.tolist()})"

    def __add__(self, other):
        other = other if isinstance(other, SPoly) else SPoly.constant(other, self.dim)
        shape = tuple(
            max(a, b) for a, b in zip(self.coeffs.shape, other.coeffs.shape)
        )
        out = np.zeros(shape, dtype=np.result_type(self.coeffs, other.coeffs))
        out[tuple(slice(0, n) for n in self.coeffs.shape)] += self.coeffs
        out[tuple(slice(0, n) for n in other.coeffs.shape)] += other.coeffs
        return SPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return SPoly(-self.coeffs)

    def __sub__(self, other):
        other = other if isinstance(other, SPoly) else SPoly.constant(other, self.dim)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, SPoly):
            a, b = self.coeffs, other.coeffs
            if self.dim == 1:
                return SPoly(np.convolve(a, b))
            out = np.zeros(
                (a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1),
                dtype=np.result_type(a, b),
            )
            for i in range(a.shape[0]):
                for j in range(a.shape[1]):
                    if a[i, j] != 0:
                        out[i : i + b.shape[0], j : j + b.shape[1]] += a[i, j] * b
            return SPoly(out)
        return SPoly(self.coeffs * other)

    __rmul__ = __mul__

    def eval(self, s):
        """Evaluate at a single point s (scalar for d=1 or length-d sequence)."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if len(s) != self.dim:
            raise ValueError(f"point has {len(s)} coordinates, expected {self.dim}")
        if self.dim == 1:
            val = npp.polyval(s[0], self.coeffs)
        else:
            val = npp.polyval2d(s[0], s[1], self.coeffs)
        return complex(val) if np.iscomplexobj(self.coeffs) else float(val)

    def eval_grid(self, axes):
        """Evaluate on the tensor grid spanned by 1-D sample arrays ``axes``."""
        if len(axes) != self.dim:
            raise ValueError("one sample array per parameter axis required")
        if self.dim == 1:
            return npp.polyval(np.asarray(axes[0], dtype=float), self.coeffs)
        return npp.polygrid2d(
            np.asarray(axes[0], dtype=float), np.asarray(axes[1], dtype=float),
            self.coeffs,
        )

    def partial(self, axis: int) -> "SPoly":
        """Formal partial derivative along one parameter axis."""
        return SPoly(npp.polyder(self.coeffs, m=1, axis=axis))

    def abs_coeff_bound(self, box) -> float:
        """Upper bound for |value| on the box via the coefficient sum
        sum_e |c_e| * prod_i max(|a_i|, |b_i|)**e_i."""
        mags = [max(abs(a), abs(b)) for a, b in box]
        absc = np.abs(self.coeffs)
        if self.dim == 1:
            return float(npp.polyval(mags[0], absc))
        return float(npp.polyval2d(mags[0], mags[1], absc))

    def taylor_coeffs(self, s0, orders):
        """Taylor coefficients about ``s0`` as an array of shape
        ``tuple(o+1 for o in orders)``; entry gamma is d^gamma p(s0) / gamma!."""
        out = np.zeros(
            tuple(o + 1 for o in orders),
            dtype=complex if np.iscomplexobj(self.coeffs) else float,
        )
        fact = 1.0
        row = self
        for g1 in range(orders[0] + 1):
            if g1 > 0:
                row = row.partial(0)
                fact *= g1
            if self.dim == 1:
                out[g1] = row.eval(s0) / fact
            else:
                col, cfact = row, fact
                for g2 in range(orders[1] + 1):
                    if g2 > 0:
                        col = col.partial(1)
                        cfact *= g2
                    out[g1, g2] = col.eval(s0) / cfact
        return out


class ZSPoly:
    """Polynomial in z whose z-coefficients are ``SPoly`` values."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("at least one z-coefficient required")
        dims = {c.dim for c in coeffs}
        if len(dims) != 1:
            raise ValueError("mixed parameter dimensions in one polynomial")
        while len(coeffs) > 1 and coeffs[-1].is_zero:
            coeffs = coeffs[:-1]
        self.coeffs = coeffs

    @staticmethod
    def from_cpoly(p: CPoly, dim: int) -> "ZSPoly":
        return ZSPoly([SPoly.constant(c, dim) for c in p.coeffs])

    @property
    def dim(self) -> int:
        return self.coeffs[0].dim

    @property
    def z_degree(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        zero = SPoly.constant(0.0, self.dim)
        a = list(self.coeffs) + [zero] * (n - len(self.coeffs))
        b = list(other.coeffs) + [zero] * (n - len(other.coeffs))
        return ZSPoly([x + y for x, y in zip(a, b)])

    def __neg__(self):
        return ZSPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ZSPoly):
            zero = SPoly.constant(0.0, self.dim)
            out = [zero] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if a.is_zero:
                    continue
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return ZSPoly(out)
        return ZSPoly([c * other for c in self.coeffs])

    __rmul__ = __mul__

    def partial(self, axis: int) -> "ZSPoly":
        return ZSPoly([c.partial(axis) for c in self.coeffs])

    def freeze(self, s) -> CPoly:
        """Substitute the parameter, leaving a plain polynomial in z."""
        return CPoly([c.eval(s) for c in self.coeffs])

    def eval(self, z, s):
        return self.freeze(s).eval(z)

    def eval_sgrid(self, axes, z):
        """Evaluate on (tensor s-grid) x (z array); returns an array of shape
        ``s_grid_shape + z.shape``."""
        z = np.asarray(z, dtype=complex)
        table = np.stack([np.asarray(c.eval_grid(axes), dtype=complex)
                          for c in self.coeffs])
        powers = z[None, ...] ** np.arange(len(self.coeffs)).reshape(
            (-1,) + (1,) * z.ndim
        )
        return np.tensordot(np.moveaxis(table, 0, -1), powers, axes=([-1], [0]))

    def coeff_bounds(self, box) -> np.ndarray:
        """Per-z-power upper bounds for the coefficient magnitude on the box."""
        return np.array([c.abs_coeff_bound(box) for c in self.coeffs])

    def z_lipschitz_bound(self, box) -> float:
        """L with |p(z,s) - p(w,s)| <= L |z - w| on the closed disc, s in box."""
        bounds = self.coeff_bounds(box)
        return float(np.sum(np.arange(len(bounds)) * bounds))

    def taylor_coeffs(self, s0, orders, z):
        """Taylor coefficients in s about ``s0`` of z -> p(z, s); shape
        ``jet_shape + z.shape``."""
        z = np.asarray(z, dtype=complex)
        jets = np.stack([c.taylor_coeffs(s0, orders).astype(complex)
                         for c in self.coeffs])
        powers = z[None, ...] ** np.arange(len(self.coeffs)).reshape(
            (-1,) + (1,) * z.ndim
        )
        return np.tensordot(np.moveaxis(jets, 0, -1), powers, axes=([-1], [0]))


class ParamFamily:
    """Tuple of z-polynomials with parameter-polynomial coefficients on a box.

    ``box`` is a tuple of per-axis (lower, upper) bounds with upper > lower,
    so the box is the closure of its interior.
    """

    __slots__ = ("components", "box")

    def __init__(self, components, box):
        components = tuple(components)
        if not components:
            raise ValueError("a family needs at least one component")
        box = tuple((float(a), float(b)) for a, b in box)
        if len(box) not in (1, 2):
            raise DomainError("parameter dimension must be 1 or 2")
        for a, b in box:
            if not b > a:
                raise DomainError("every box axis needs upper > lower")
        for c in components:
            if c.dim != len(box):
                raise ValueError("component parameter dimension != box dimension")
        self.components = components
        self.box = box

    @property
    def dim(self) -> int:
        return len(self.box)

    @property
    def size(self) -> int:
        return len(self.components)

    def contains(self, s) -> bool:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if len(s) != self.dim:
            return False
        for x, (a, b) in zip(s, self.box):
            pad = _BOX_EPS * (1.0 + abs(a) + abs(b))
            if x < a - pad or x > b + pad:
                return False
        return True

    def require_inside(self, s):
        if not self.contains(s):
            raise DomainError(f"parameter point {s!r} lies outside the box {self.box}")

    def freeze(self, s):
        """All components with the parameter substituted, as CPoly tuple."""
        self.require_inside(s)
        return tuple(c.freeze(s) for c in self.components)

    def scaled(self, factor: float) -> "ParamFamily":
        return ParamFamily([c * float(factor) for c in self.components], self.box)


def eval_family(family: ParamFamily, z, s) -> np.ndarray:
    """Component values (f_1(z,s), ..., f_N(z,s)); raises ``DomainError`` for
    s outside the box.  ``z`` may be scalar or an array."""
    family.require_inside(s)
    values = [c.freeze(s).eval(z) for c in family.components]
    if np.asarray(z).ndim == 0:
        return np.array(values, dtype=complex)
    return np.stack(values)


def partial_s(family: ParamFamily, alpha) -> ParamFamily:
    """Componentwise formal partial derivative d^alpha in the parameter."""
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    if len(alpha) != family.dim:
        raise ValueError("multi-index length must equal the parameter dimension")
    if any(a < 0 for a in alpha):
        raise ValueError("multi-index entries must be nonnegative")
    comps = list(family.components)
    for axis, order in enumerate(alpha):
        for _ in range(order):
            comps = [c.partial(axis) for c in comps]
    return ParamFamily(comps, family.box)
