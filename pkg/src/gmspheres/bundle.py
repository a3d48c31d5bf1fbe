"""The bundle spaces E_n, their group actions and invariant strata.

``E_n`` is the set of pairs ``(u, v)`` of unit vectors of H^2 with
``<<rho_n(u), v>> = 0``; it is written as a 2x2 quaternionic matrix with
columns ``u`` and ``v``. Projecting to ``u`` makes it a principal S^3-bundle
over S^7 (fibre action ``q . (u, v) = (u, v conj(q))``); the Gromoll-Meyer
type quotient is taken by the star action ``q * (u, v) = (q u conj(q), q v)``.

All arrays broadcast over leading batch axes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    I,
    ONE,
    ZERO,
    hermitian,
    pair,
    pnorm,
    pnormalize,
    qconj,
    qmul,
    qnorm,
    qnormalize,
    random_unit,
)
from .config import TOL_COMPOSITE
from .errors import MembershipError, PreconditionError
from .powermaps import rho

IDENTITY_U = pair(ONE, ZERO)
IDENTITY_V = pair(ZERO, ONE)


@dataclass(frozen=True)
class BundlePoint:
    """A point (or a batch of points) of ``E_n``."""

    n: int
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))

    def residual(self) -> np.ndarray:
        return membership_residual(self.n, self.u, self.v)

    def validate(self, tol=TOL_COMPOSITE) -> "BundlePoint":
        res = np.max(self.residual())
        if res > tol:
            raise MembershipError(f"point is not in E_{self.n} (residual {res:.3e} > {tol:g})")
        return self

    def matrix(self) -> np.ndarray:
        """The point as a (..., 2, 2, 4) quaternion matrix ``[[u1, v1], [u2, v2]]``."""
        return np.stack([self.u, self.v], axis=-2)

    def flat(self) -> np.ndarray:
        """16 real coordinates ``u1, u2, v1, v2`` (each re, i, j, k)."""
        return np.concatenate([self.u, self.v], axis=-2).reshape(self.u.shape[:-2] + (16,))

    @classmethod
    def from_flat(cls, n: int, values) -> "BundlePoint":
        arr = np.asarray(values, dtype=float).reshape(np.shape(values)[:-1] + (4, 4))
        return cls(n, arr[..., 0:2, :], arr[..., 2:4, :])

    def __neg__(self) -> "BundlePoint":
        return BundlePoint(self.n, -self.u, -self.v)

    def __getitem__(self, idx) -> "BundlePoint":
        return BundlePoint(self.n, self.u[idx], self.v[idx])


def membership_residual(n: int, u, v) -> np.ndarray:
    """``|<<rho_n(u), v>>|`` plus the unit-norm defects of both columns."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu_ = pnorm(u)
    nv = pnorm(v)
    # rho is only defined on the sphere; evaluate it on the normalized column
    r = rho(n, u / nu_[..., None, None], tol=np.inf)
    return qnorm(hermitian(r, v)) + np.abs(nu_ - 1.0) + np.abs(nv - 1.0)


def identity_point(n: int) -> BundlePoint:
    return BundlePoint(n, IDENTITY_U.copy(), IDENTITY_V.copy())


def fiber_complement(r, v0) -> np.ndarray:
    """Project ``v0`` onto the unit vectors Hermitian-orthogonal to ``r``."""
    v = v0 - pleft_right(r, hermitian(r, v0))
    return pnormalize(v)


def pleft_right(r, x) -> np.ndarray:
    """Componentwise ``r_i x`` (right multiplication of the column r by x)."""
    return qmul(r, np.asarray(x, float)[..., None, :])


def random_point(n: int, seed, size=None) -> BundlePoint:
    """A random point of ``E_n``: uniform ``u`` and a Gaussian ``v`` projected to its fibre."""
    rng = np.random.default_rng(seed)
    u = random_unit("S7", rng.integers(2**63), size)
    v0 = random_unit("S7", rng.integers(2**63), size)
    return BundlePoint(n, u, fiber_complement(rho(n, u), v0))


# -- group elements ----------------------------------------------------------------


@dataclass(frozen=True)
class GroupElement:
    """``(B, q1, q2, q3)`` in ``Z2 x Z2 x S^3 x S^3 x S^3``.

    ``signs`` are the diagonal entries ``(e1, e2)`` of ``B``. It acts by

        [[u1, v1], [u2, v2]] -> [[e1 q1 u1 q1*, e1 q1 v1 q3*], [e2 q2 u2 q1*, e2 q2 v2 q3*]].
    """

    q1: np.ndarray = field(default_factory=lambda: ONE.copy())
    q2: np.ndarray = field(default_factory=lambda: ONE.copy())
    q3: np.ndarray = field(default_factory=lambda: ONE.copy())
    signs: tuple = (1, 1)

    def __post_init__(self):
        for name in ("q1", "q2", "q3"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        e1, e2 = self.signs
        if {e1, e2} - {1, -1}:
            raise PreconditionError(f"signs must be +-1, got {self.signs}")
        object.__setattr__(self, "signs", (int(e1), int(e2)))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            qmul(self.q1, other.q1),
            qmul(self.q2, other.q2),
            qmul(self.q3, other.q3),
            (self.signs[0] * other.signs[0], self.signs[1] * other.signs[1]),
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(qconj(self.q1), qconj(self.q2), qconj(self.q3), self.signs)

    @classmethod
    def star(cls, q) -> "GroupElement":
        """The Gromoll-Meyer action ``q * (u, v) = (q u q*, q v)``."""
        return cls(q, q, ONE.copy())

    @classmethod
    def bullet(cls, q=None, signs=(1, 1)) -> "GroupElement":
        """The commuting action ``(B, q) . (u, v) = (B u, B v q*)``."""
        return cls(ONE.copy(), ONE.copy(), ONE.copy() if q is None else q, signs)


def act_columns(g: GroupElement, u, v):
    """Apply ``g`` to raw columns. Linear in (u, v), so it also pushes tangent vectors forward."""
    e = np.array(g.signs, dtype=float)[:, None]
    q1, q2, q3 = g.q1, g.q2, g.q3
    left = np.stack(np.broadcast_arrays(q1, q2), axis=-2)
    u_new = qmul(qmul(left, u), qconj(q1)[..., None, :])
    v_new = qmul(qmul(left, v), qconj(q3)[..., None, :])
    return e * u_new, e * v_new


def act(g: GroupElement, x: BundlePoint) -> BundlePoint:
    u, v = act_columns(g, x.u, x.v)
    return BundlePoint(x.n, u, v)


def random_group_element(seed, size=None, with_signs=True) -> GroupElement:
    """Random element; the sign matrix is shared by the whole batch."""
    rng = np.random.default_rng(seed)
    qs = [random_unit("S3", rng.integers(2**63), size) for _ in range(3)]
    signs = tuple(int(s) for s in rng.choice([-1, 1], size=2)) if with_signs else (1, 1)
    return GroupElement(*qs, signs=signs)


# -- star orbits -------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitWitness:
    """``y = q * x`` up to ``residual``."""

    q: np.ndarray
    residual: float


def star_orbit_witness(x: BundlePoint, y: BundlePoint, tol=1e-9) -> OrbitWitness | None:
    """Decide whether ``y`` lies in the star orbit of ``x`` and produce ``q``.

    If ``y = q * x`` then ``y.v_i = q x.v_i``, so ``sum_i y.v_i conj(x.v_i) = q``
    because ``|x.v| = 1``. That candidate is checked by applying it.
    Returns None when there is no such ``q``. Single points only.
    """
    q, norm_defect, residual = star_orbit_residual(x, y)
    if float(norm_defect) > 1e-8 or float(residual) > tol:
        return None
    return OrbitWitness(q, float(residual))


def star_orbit_residual(x: BundlePoint, y: BundlePoint):
    """Batched core of :func:`star_orbit_witness`.

    Returns the normalized candidate ``q``, the unit-norm defect of the raw
    candidate and the max-abs residual of ``q * x - y``.
    """
    if x.n != y.n:
        raise PreconditionError(f"points live in different spaces E_{x.n} and E_{y.n}")
    q = np.sum(qmul(y.v, qconj(x.v)), axis=-2)
    norm = qnorm(q)
    q = q / np.where(norm == 0.0, 1.0, norm)[..., None]
    image = act(GroupElement.star(q), x)
    residual = np.maximum(
        np.max(np.abs(image.u - y.u), axis=(-2, -1)), np.max(np.abs(image.v - y.v), axis=(-2, -1))
    )
    return q, np.abs(norm - 1.0), residual


# -- maps to Sp(2) and the invariant circle --------------------------------------------


@dataclass(frozen=True)
class Sp2Element:
    col1: np.ndarray
    col2: np.ndarray

    def residual(self) -> np.ndarray:
        """Defect of ``A* A = 1``."""
        return (
            qnorm(hermitian(self.col1, self.col2))
            + np.abs(pnorm(self.col1) - 1.0)
            + np.abs(pnorm(self.col2) - 1.0)
        )


def rho_tilde(x: BundlePoint, tol=TOL_COMPOSITE) -> Sp2Element:
    """The bundle map ``E_n -> Sp(2)``, ``(u, v) -> (rho_n(u), v)``."""
    x.validate(tol)
    return Sp2Element(rho(x.n, x.u), x.v)


def alpha_circle(n: int, t) -> BundlePoint:
    """``((cos t, sin t), (-sin nt, cos nt))``, the preimage of the SO(3)-fixed circle."""
    t = np.asarray(t, dtype=float)
    u = np.zeros(t.shape + (2, 4))
    v = np.zeros(t.shape + (2, 4))
    u[..., 0, 0] = np.cos(t)
    u[..., 1, 0] = np.sin(t)
    v[..., 0, 0] = -np.sin(n * t)
    v[..., 1, 0] = np.cos(n * t)
    return BundlePoint(n, u, v)


# -- cohomogeneity-two normal form ------------------------------------------------------


def normal_form_point(n: int, s, t) -> BundlePoint:
    """``[[cos t + i cos s sin t, -sin s sin nt], [sin s sin t, cos nt - i cos s sin nt]]``."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    s, t = np.broadcast_arrays(s, t)
    u = np.zeros(s.shape + (2, 4))
    v = np.zeros(s.shape + (2, 4))
    u[..., 0, 0] = np.cos(t)
    u[..., 0, 1] = np.cos(s) * np.sin(t)
    u[..., 1, 0] = np.sin(s) * np.sin(t)
    v[..., 0, 0] = -np.sin(s) * np.sin(n * t)
    v[..., 1, 0] = np.cos(n * t)
    v[..., 1, 1] = -np.cos(s) * np.sin(n * t)
    return BundlePoint(n, u, v)


def rotate_to(a, b) -> np.ndarray:
    """Unit quaternion q with ``q a q* = b`` for unit imaginary a, b."""
    q = ONE - qmul(b, a)
    norm = qnorm(q)
    if norm > 1e-6:
        return q / norm
    # a = -b: half turn about any axis orthogonal to a
    axis = np.cross(a[1:], [1.0, 0.0, 0.0])
    if np.linalg.norm(axis) < 0.5:
        axis = np.cross(a[1:], [0.0, 1.0, 0.0])
    return np.concatenate([[0.0], axis / np.linalg.norm(axis)])


@dataclass(frozen=True)
class NormalForm:
    s: float
    t: float
    witness: GroupElement
    residual: float
    degenerate: dict


def normal_form(x: BundlePoint, threshold=1e-12) -> NormalForm:
    """Move a point of ``E_n`` to normal form with the three S^3 factors.

    The invariants are read off ``u`` alone: ``cos t = re u1``,
    ``cos s sin t = |Im u1|`` and ``sin s sin t = |u2|``, with
    ``s in [0, pi/2]``. ``q1`` turns ``Im u1`` to the ``i`` axis, ``q2``
    makes ``u2`` real and positive, and ``q3`` is read off the second column.
    Rotations that the point does not determine are set to 1.
    """
    u, v = x.u, x.v
    im1 = u[0].copy()
    im1[0] = 0.0
    a = float(qnorm(im1))
    c = float(qnorm(u[1]))
    t = float(np.arctan2(np.hypot(a, c), u[0, 0]))
    s = float(np.arctan2(c, a))
    flags = {"sin_t": np.hypot(a, c) <= threshold, "cos_s": a <= threshold, "sin_s": c <= threshold}
    q1 = ONE.copy() if flags["cos_s"] else rotate_to(im1 / a, I)
    q2 = ONE.copy() if flags["sin_s"] else qmul(q1, qconj(u[1])) / c
    partial = GroupElement(q1, q2, ONE.copy())
    _, v_mid = act_columns(partial, u, v)
    target = normal_form_point(x.n, s, t)
    q3 = qnormalize(qconj(hermitian(v_mid, target.v)))
    witness = GroupElement(q1, q2, q3)
    image = act(witness, x)
    residual = float(max(np.max(np.abs(image.u - target.u)), np.max(np.abs(image.v - target.v))))
    return NormalForm(s, t, witness, residual, flags)


# -- strata -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Strata:
    in_E9: np.ndarray
    in_E8: np.ndarray
    in_E1: np.ndarray


def stratum_classify(x: BundlePoint, tol=TOL_COMPOSITE) -> Strata:
    """Which of the invariant submanifolds contain ``x`` (batched).

    ``E9``: ``u1`` imaginary; ``E8``: both components of ``u`` imaginary;
    ``E1``: both components of ``u`` real.
    """
    re1 = np.abs(x.u[..., 0, 0])
    re2 = np.abs(x.u[..., 1, 0])
    im1 = np.linalg.norm(x.u[..., 0, 1:], axis=-1)
    im2 = np.linalg.norm(x.u[..., 1, 1:], axis=-1)
    return Strata(
        in_E9=re1 <= tol,
        in_E8=(re1 <= tol) & (re2 <= tol),
        in_E1=(im1 <= tol) & (im2 <= tol),
    )


def sigma5_canonical_rep(x: BundlePoint, tol=TOL_COMPOSITE) -> BundlePoint:
    """Star-orbit representative with ``v = (0, 1)`` of a point of ``E8_0``.

    ``E8_0`` consists of ``((p1, p2), (0, q))``; acting by ``conj(q)`` gives
    ``((q* p1 q, q* p2 q), (0, 1))``.
    """
    if x.n != 0:
        raise PreconditionError(f"the canonical representative is defined on E8_0, got n = {x.n}")
    re = np.abs(x.u[..., :, 0])
    if np.any(re > tol) or np.any(qnorm(x.v[..., 0, :]) > tol):
        raise PreconditionError("point is not in E8_0 (u must be imaginary and v1 = 0)")
    q = qnormalize(x.v[..., 1, :])
    y = act(GroupElement.star(qconj(q)), x)
    v = np.broadcast_to(IDENTITY_V, y.v.shape).copy()
    return BundlePoint(0, y.u, v)


def random_e8_point(n: int, seed, size=None) -> BundlePoint:
    rng = np.random.default_rng(seed)
    u = random_unit("S5", rng.integers(2**63), size)
    v0 = random_unit("S7", rng.integers(2**63), size)
    return BundlePoint(n, u, fiber_complement(rho(n, u), v0))
