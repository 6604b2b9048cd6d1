"""Truncated Taylor-coefficient (jet) arithmetic in one or two variables.

A jet is a plain numpy array whose leading ``len(orders)`` axes index Taylor
coefficients (axis i runs over exponents 0..orders[i]); any trailing axes are
a broadcast batch, so one pass can carry coefficients for a whole array of
disc points.  Entry gamma holds d^gamma f / gamma!, i.e. the monomial
coefficient, not the raw derivative.

Products, reciprocals and exponentials are exact for the truncation order up
to floating-point rounding; no finite differencing is involved.
"""

from __future__ import annotations

import numpy as np


def jet_shape(orders):
    return tuple(int(o) + 1 for o in orders)


def jet_zero(orders, batch=(), dtype=float):
    return np.zeros(jet_shape(orders) + tuple(batch), dtype=dtype)


def jet_const(value, orders, batch=(), dtype=None):
    value = np.asarray(value)
    if dtype is None:
        dtype = value.dtype if value.dtype.kind in "fc" else float
    out = np.zeros(jet_shape(orders) + tuple(batch), dtype=dtype)
    out[(0,) * len(orders)] = value
    return out


def jet_variable(value, axis, orders, batch=(), dtype=float):
    """Jet of the coordinate function s_axis at the point ``value``."""
    out = jet_const(value, orders, batch, dtype)
    if orders[axis] >= 1:
        index = [0] * len(orders)
        index[axis] = 1
        out[tuple(index)] = 1.0
    return out


def _lead(orders):
    return len(orders)


def jet_mul(a, b, orders):
    """Truncated product; truncation keeps exponents within ``orders``."""
    d = _lead(orders)
    shape = jet_shape(orders)
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
    if d == 1:
        (n1,) = shape
        for i in range(n1):
            for j in range(n1 - i):
                out[i + j] += a[i] * b[j]
    else:
        n1, n2 = shape
        for i1 in range(n1):
            for i2 in range(n2):
                ai = a[i1, i2]
                for j1 in range(n1 - i1):
                    for j2 in range(n2 - i2):
                        out[i1 + j1, i2 + j2] += ai * b[j1, j2]
    return out


def _graded_indices(orders):
    """All coefficient multi-indices except 0, in C (row-major) order, which
    guarantees every index is visited after all componentwise-smaller ones."""
    idx = list(np.ndindex(*jet_shape(orders)))
    return idx[1:]


def jet_reciprocal(a, orders):
    """Jet of 1/f given the jet of f; requires a nonzero constant term."""
    d = _lead(orders)
    out = np.zeros_like(a)
    zero = (0,) * d
    inv0 = 1.0 / a[zero]
    out[zero] = inv0
    for gamma in _graded_indices(orders):
        acc = 0.0
        if d == 1:
            (g,) = gamma
            for b in range(1, g + 1):
                acc = acc + a[b] * out[g - b]
        else:
            g1, g2 = gamma
            for b1 in range(g1 + 1):
                for b2 in range(g2 + 1):
                    if b1 == 0 and b2 == 0:
                        continue
                    acc = acc + a[b1, b2] * out[g1 - b1, g2 - b2]
        out[gamma] = -inv0 * acc
    return out


def jet_exp(a, orders):
    """Jet of exp(f) given the jet of f, via the graded convolution
    recurrence gamma_j * E_gamma = sum beta_j * f_beta * E_{gamma-beta}."""
    d = _lead(orders)
    out = np.zeros_like(a)
    zero = (0,) * d
    out[zero] = np.exp(a[zero])
    for gamma in _graded_indices(orders):
        if d == 1:
            (g,) = gamma
            acc = 0.0
            for b in range(1, g + 1):
                acc = acc + b * a[b] * out[g - b]
            out[gamma] = acc / g
        else:
            g1, g2 = gamma
            axis = 0 if g1 >= 1 else 1
            acc = 0.0
            for b1 in range(g1 + 1):
                for b2 in range(g2 + 1):
                    bj = b1 if axis == 0 else b2
                    if bj == 0:
                        continue
                    acc = acc + bj * a[b1, b2] * out[g1 - b1, g2 - b2]
            out[gamma] = acc / (g1 if axis == 0 else g2)
    return out


def jet_extract(jet, alpha):
    """The partial derivative d^alpha f from a jet (coefficient times alpha!)."""
    alpha = tuple(int(x) for x in alpha)
    fact = 1.0
    for a in alpha:
        for k in range(2, a + 1):
            fact *= k
    return jet[alpha] * fact
