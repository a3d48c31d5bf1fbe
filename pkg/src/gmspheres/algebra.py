"""Quaternion and octonion arithmetic on numpy arrays.

Conventions
-----------
* A quaternion is an array whose last axis has length 4, ordered
  ``(re, i, j, k)``. Any leading axes are batch axes and broadcast.
* A *pair* (an element of H^2, e.g. a column ``u = (u1, u2)``) has trailing
  shape ``(2, 4)``.
* An octonion is stored the same way, as the Cayley-Dickson pair ``(a, b)``,
  with product ``(a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))``.

Unit octonions and unit pairs are the same arrays; which product applies is
decided by the function called, not by the data.
"""
from __future__ import annotations

import numpy as np

ONE = np.array([1.0, 0.0, 0.0, 0.0])
I = np.array([0.0, 1.0, 0.0, 0.0])
J = np.array([0.0, 0.0, 1.0, 0.0])
K = np.array([0.0, 0.0, 0.0, 1.0])
ZERO = np.zeros(4)

SERIES_THRESHOLD = 1e-8


def quat(re=0.0, i=0.0, j=0.0, k=0.0) -> np.ndarray:
    return np.array([re, i, j, k], dtype=float)


def imag(vec) -> np.ndarray:
    """Embed 3-vectors as purely imaginary quaternions."""
    vec = np.asarray(vec, dtype=float)
    return np.concatenate([np.zeros(vec.shape[:-1] + (1,)), vec], axis=-1)


def pair(first, second) -> np.ndarray:
    """Stack two quaternions into an element of H^2."""
    first, second = np.broadcast_arrays(np.asarray(first, float), np.asarray(second, float))
    return np.stack([first, second], axis=-2)


def qmul(a, b) -> np.ndarray:
    """Hamilton product, broadcasting over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    b0, b1, b2, b3 = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def qconj(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def qnorm(q) -> np.ndarray:
    """Euclidean norm over the last axis (works for quaternions and, via
    ``pnorm``, for pairs)."""
    return np.sqrt(np.sum(np.square(q), axis=-1))


def qinv(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return qconj(q) / np.sum(np.square(q), axis=-1, keepdims=True)


def qre(q) -> np.ndarray:
    return np.asarray(q, dtype=float)[..., 0]


def qim(q) -> np.ndarray:
    """Imaginary part as a quaternion with zero real component."""
    q = np.array(q, dtype=float)
    q[..., 0] = 0.0
    return q


def qsandwich(q, x) -> np.ndarray:
    """``q x conj(q)``; for unit q this is the SO(3) rotation of Im H."""
    return qmul(qmul(q, x), qconj(q))


def qexp(p) -> np.ndarray:
    """Exponential of an imaginary quaternion, ``cos|p| + (p/|p|) sin|p|``.

    For ``|p| < 1e-8`` the ratio ``sin|p|/|p|`` is replaced by its series
    ``1 - |p|^2/6`` so that ``p = 0`` is handled without 0/0.
    """
    p = qim(p)
    r = qnorm(p)
    small = r < SERIES_THRESHOLD
    safe_r = np.where(small, 1.0, r)
    ratio = np.where(small, 1.0 - r * r / 6.0, np.sin(safe_r) / safe_r)
    out = p * ratio[..., None]
    out[..., 0] = np.where(small, 1.0, np.cos(r))
    return out


def qpow(q, n: int) -> np.ndarray:
    """Integer power of a unit quaternion; negative powers use the conjugate."""
    q = np.asarray(q, dtype=float)
    if n < 0:
        q = qconj(q)
        n = -n
    out = np.broadcast_to(ONE, q.shape).copy()
    for _ in range(n):
        out = qmul(out, q)
    return out


def qnormalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q / qnorm(q)[..., None]


# -- pairs (H^2) ----------------------------------------------------------------


def pnorm(u) -> np.ndarray:
    """Norm of an element of H^2 (trailing shape (2, 4))."""
    return np.sqrt(np.sum(np.square(u), axis=(-2, -1)))


def pnormalize(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return u / pnorm(u)[..., None, None]


def pleft(q, u) -> np.ndarray:
    """Left multiply both components of a pair by the quaternion q."""
    return qmul(np.asarray(q, float)[..., None, :], u)


def pright(u, q) -> np.ndarray:
    """Right multiply both components of a pair by the quaternion q."""
    return qmul(u, np.asarray(q, float)[..., None, :])


def psandwich(q, u) -> np.ndarray:
    """Simultaneous conjugation ``(q u1 conj(q), q u2 conj(q))``."""
    q = np.asarray(q, float)[..., None, :]
    return qmul(qmul(q, u), qconj(q))


def hermitian(u, v) -> np.ndarray:
    """Quaternionic Hermitian product ``conj(u1) v1 + conj(u2) v2``."""
    return np.sum(qmul(qconj(u), v), axis=-2)


# -- octonions ------------------------------------------------------------------


def omul(x, y) -> np.ndarray:
    """Cayley-Dickson product ``(a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a, b = x[..., 0, :], x[..., 1, :]
    c, d = y[..., 0, :], y[..., 1, :]
    first = qmul(a, c) - qmul(qconj(d), b)
    second = qmul(d, a) + qmul(b, qconj(c))
    return np.stack([first, second], axis=-2)


def oconj(x) -> np.ndarray:
    """Octonion conjugate ``(conj(a), -b)``."""
    x = np.asarray(x, dtype=float)
    return np.stack([qconj(x[..., 0, :]), -x[..., 1, :]], axis=-2)


# -- sampling -------------------------------------------------------------------

_KIND_SHAPES = {"S3": (4,), "S6": (2, 4), "S7": (2, 4), "S5": (2, 4)}


def random_unit(kind: str, seed, size=None) -> np.ndarray:
    """Uniform sample on a unit sphere by normalizing a Gaussian vector.

    ``kind`` is one of ``"S3"`` (unit quaternion), ``"S7"`` (unit pair),
    ``"S6"`` (unit pair with ``re(first) = 0``) or ``"S5"`` (unit pair with
    both components imaginary). The generator is numpy's PCG64 seeded with
    ``seed`` (an int or a sequence of ints), so equal seeds give equal output.
    ``size`` prepends batch axes.
    """
    try:
        shape = _KIND_SHAPES[kind]
    except KeyError:
        raise ValueError(f"unknown sphere kind {kind!r}; expected one of {sorted(_KIND_SHAPES)}") from None
    batch = () if size is None else tuple(np.atleast_1d(size))
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(batch + shape)
    if kind == "S6":
        x[..., 0, 0] = 0.0
    elif kind == "S5":
        x[..., :, 0] = 0.0
    axes = (-1,) if kind == "S3" else (-2, -1)
    return x / np.sqrt(np.sum(x * x, axis=axes, keepdims=True))
