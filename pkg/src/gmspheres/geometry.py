"""Connection metrics on E_n, horizontal lifts and geodesic checks.

The metric with fibre parameter ``nu`` is fixed by three requirements: the
S^3-fibres of ``E_n -> S^7`` are round of curvature ``1/nu``, the horizontal
space is pulled back from the standard connection of ``Sp(2) -> S^7`` and the
projection to S^7 is a Riemannian submersion onto the unit sphere.

The connection on ``Sp(2)`` is the orthocomplement of the fibre for the
bi-invariant metric, i.e. ``A* dA`` has vanishing (2, 2)-entry. Pulled back
along ``(u, v) -> (rho_n(u), v)`` this becomes ``Im <<v, dv>> = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    ONE,
    ZERO,
    hermitian,
    pair,
    pleft,
    qconj,
    qexp,
    qim,
    qmul,
    qnorm,
)
from .bundle import (
    BundlePoint,
    GroupElement,
    act,
    act_columns,
    alpha_circle,
    fiber_complement,
    membership_residual,
    star_orbit_residual,
    stratum_classify,
)
from .config import TOL_COMPOSITE
from .errors import PreconditionError
from .powermaps import rho, rho_differential, sigma_pow


@dataclass(frozen=True)
class MetricParams:
    nu: float = 1.0

    def __post_init__(self):
        if not self.nu > 0:
            raise PreconditionError(f"nu must be positive, got {self.nu}")


@dataclass(frozen=True)
class TangentVector:
    at: BundlePoint
    du: np.ndarray
    dv: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "du", np.asarray(self.du, dtype=float))
        object.__setattr__(self, "dv", np.asarray(self.dv, dtype=float))

    def __add__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.at, self.du + other.du, self.dv + other.dv)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.at, self.du - other.du, self.dv - other.dv)

    def __mul__(self, c) -> "TangentVector":
        return TangentVector(self.at, self.du * c, self.dv * c)

    __rmul__ = __mul__

    def tangency_residual(self) -> np.ndarray:
        """Sphere tangency of both columns plus the linearized E_n constraint."""
        x = self.at
        r = rho(x.n, x.u, tol=np.inf)
        dr = rho_differential(x.n, x.u, self.du)
        constraint = qnorm(hermitian(dr, x.v) + hermitian(r, self.dv))
        return (
            np.abs(hermitian(x.u, self.du)[..., 0])
            + np.abs(hermitian(x.v, self.dv)[..., 0])
            + constraint
        )

    def validate(self, tol=1e-8) -> "TangentVector":
        res = np.max(self.tangency_residual())
        if res > tol:
            raise PreconditionError(f"vector is not tangent to E_{self.at.n} (residual {res:.3e})")
        return self


def vertical_component(x: BundlePoint, dv) -> np.ndarray:
    """The Lie-algebra coordinate ``xi = -Im <<v, dv>>`` of the fibre part."""
    return -qim(hermitian(x.v, dv))


def vertical_vector(x: BundlePoint, xi) -> TangentVector:
    """Fibre direction ``(0, -v xi)``, the velocity of ``v exp(-s xi)``."""
    xi = np.asarray(xi, dtype=float)
    dv = -qmul(x.v, np.broadcast_to(xi, x.v.shape[:-2] + (4,))[..., None, :])
    return TangentVector(x, np.zeros_like(x.u), dv)


def split_horizontal(x: BundlePoint, X: TangentVector, tol=1e-8):
    """Decompose ``X = X_h + X_v`` for the projection ``(u, v) -> u``."""
    X.validate(tol)
    X_v = vertical_vector(x, vertical_component(x, X.dv))
    return X - X_v, X_v


def metric_eval(m: MetricParams, X: TangentVector, Y: TangentVector) -> np.ndarray:
    """``nu <xi_X, xi_Y> + re <<dX.u, dY.u>>`` (the vertical part has ``du = 0``)."""
    if X.at is not Y.at and not (
        np.array_equal(X.at.u, Y.at.u) and np.array_equal(X.at.v, Y.at.v)
    ):
        raise PreconditionError("tangent vectors are attached to different points")
    x = X.at
    xi_x = vertical_component(x, X.dv)
    xi_y = vertical_component(x, Y.dv)
    vertical = np.sum(xi_x * xi_y, axis=-1)
    horizontal = np.sum(X.du * Y.du, axis=(-2, -1))
    return m.nu * vertical + horizontal


def act_tangent(g: GroupElement, X: TangentVector) -> TangentVector:
    """Differential of the (linear) action."""
    du, dv = act_columns(g, X.du, X.dv)
    return TangentVector(act(g, X.at), du, dv)


def random_tangent(x: BundlePoint, seed) -> TangentVector:
    """Random tangent vector of ``E_n`` at ``x``: any ``du`` tangent to S^7, the
    ``dv`` forced by the constraint, plus a random fibre component."""
    rng = np.random.default_rng(seed)
    batch = x.u.shape[:-2]
    du = rng.standard_normal(batch + (2, 4))
    du = du - np.sum(du * x.u, axis=(-2, -1))[..., None, None] * x.u
    r = rho(x.n, x.u, tol=np.inf)
    dr = rho_differential(x.n, x.u, du)
    xi = qim(rng.standard_normal(batch + (4,)))
    dv = -qmul(r, hermitian(dr, x.v)[..., None, :]) + qmul(x.v, xi[..., None, :])
    return TangentVector(x, du, dv)


def star_generator_vector(x: BundlePoint, xi) -> TangentVector:
    """Velocity of ``s -> exp(s xi) * x`` at ``s = 0``."""
    xi = np.asarray(xi, dtype=float)
    du = pleft(xi, x.u) - qmul(x.u, np.broadcast_to(xi, x.u.shape[:-2] + (4,))[..., None, :])
    return TangentVector(x, du, pleft(xi, x.v))


# -- explicit horizontal geodesics ---------------------------------------------------


def lift_gamma(n: int, p, w, t) -> BundlePoint:
    """Horizontal lift through the identity of ``beta(t) = (cos t + p sin t, w sin t)``.

    Second column: ``-e^{ntp} conj(w) sin nt`` and
    ``(w/|w|) e^{ntp} (cos nt - p sin nt) (conj w/|w|)``. At ``w = 0`` the unit
    factor ``w/|w|`` is dropped, which is the continuous limit: the result
    is ``((e^{tp}, 0), (0, 1))``.
    """
    p = qim(p)
    w = np.asarray(w, dtype=float)
    t = np.asarray(t, dtype=float)
    p, w, tt = np.broadcast_arrays(p, w, t[..., None])
    t = tt[..., 0]
    ct, st = np.cos(t)[..., None], np.sin(t)[..., None]
    cn, sn = np.cos(n * t)[..., None], np.sin(n * t)[..., None]
    u1 = p * st
    u1[..., 0] += ct[..., 0]
    u = pair(u1, w * st)
    e = qexp(n * t[..., None] * p)
    r = qnorm(w)[..., None]
    what = np.where(r == 0.0, ONE, w / np.where(r == 0.0, 1.0, r))
    v1 = -qmul(e, qconj(w)) * sn
    middle = -p * sn
    middle[..., 0] += cn[..., 0]
    v2 = qmul(qmul(qmul(what, e), middle), qconj(what))
    return BundlePoint(n, u, pair(v1, v2))


def lift_velocity(n: int, p, w, t, h=1e-6) -> TangentVector:
    """Central-difference velocity of :func:`lift_gamma`."""
    plus = lift_gamma(n, p, w, np.asarray(t) + h)
    minus = lift_gamma(n, p, w, np.asarray(t) - h)
    return TangentVector(lift_gamma(n, p, w, t), (plus.u - minus.u) / (2 * h), (plus.v - minus.v) / (2 * h))


# -- horizontal transport ----------------------------------------------------------------


def great_circle(start, direction):
    """Unit-speed great circle ``s -> cos s * start + sin s * direction``.

    Returns a callable giving ``(point, velocity)``; ``direction`` must be a
    unit vector orthogonal to ``start``.
    """
    start = np.asarray(start, dtype=float)
    direction = np.asarray(direction, dtype=float)

    def curve(s):
        c, sn = np.cos(s), np.sin(s)
        return c * start + sn * direction, -sn * start + c * direction

    return curve


def beta_curve(p, w):
    """The geodesic ``(cos t + p sin t, w sin t)`` leaving the north pole."""
    north = pair(ONE, ZERO)
    return great_circle(np.broadcast_to(north, np.shape(pair(qim(p), w))), pair(qim(p), w))


@dataclass(frozen=True)
class TransportResult:
    s: np.ndarray
    u: np.ndarray
    v: np.ndarray
    n: int
    membership: float
    horizontality: float

    def point(self, index=-1) -> BundlePoint:
        return BundlePoint(self.n, self.u[index], self.v[index])


def _transport_rhs(n, u, du, v):
    r = rho(n, u, tol=np.inf)
    dr = rho_differential(n, u, du)
    return -qmul(r, hermitian(dr, v)[..., None, :])


def horizontal_transport(n: int, curve, v0, s_max: float, step=1e-3) -> TransportResult:
    """Horizontally lift a curve of S^7 into ``E_n`` starting at ``(curve(0), v0)``.

    ``v`` must keep ``<<rho_n(u), v>> = 0``, stay unit and satisfy
    ``Im <<v, v'>> = 0``. With ``r = rho_n(u)`` the columns ``r, v`` are an
    orthonormal basis of H^2 as a right H-module, and those eight real
    conditions have the unique solution ``v' = -r <<r', v>>``. The ODE is
    integrated with classical RK4; after each step ``v`` is projected back
    onto the fibre.
    """
    steps = max(1, int(np.ceil(abs(s_max) / step - 1e-9))) if s_max != 0 else 0
    s_grid = np.linspace(0.0, s_max, steps + 1)
    h = s_grid[1] - s_grid[0] if steps else 0.0
    u0, _ = curve(0.0)
    v = fiber_complement(rho(n, u0, tol=np.inf), np.asarray(v0, dtype=float))
    us, vs = [u0], [v]
    horiz = []

    def f(s, v):
        u, du = curve(s)
        return _transport_rhs(n, u, du, v)

    for k in range(steps):
        s = s_grid[k]
        k1 = f(s, v)
        horiz.append(np.max(np.abs(qim(hermitian(v, k1)))))
        k2 = f(s + h / 2, v + h / 2 * k1)
        k3 = f(s + h / 2, v + h / 2 * k2)
        k4 = f(s + h, v + h * k3)
        v = v + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        u, _ = curve(s_grid[k + 1])
        v = fiber_complement(rho(n, u, tol=np.inf), v)
        us.append(u)
        vs.append(v)
    us = np.array(us)
    vs = np.array(vs)
    membership = float(np.max(membership_residual(n, us, vs)))
    return TransportResult(s_grid, us, vs, n, membership, float(max(horiz, default=0.0)))


# -- the wiedersehen property and the join ------------------------------------------------


@dataclass(frozen=True)
class WiedersehenReport:
    antipode_q: np.ndarray
    antipode_residual: np.ndarray
    return_q: np.ndarray
    return_residual: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(max(np.max(self.antipode_residual), np.max(self.return_residual)))


def wiedersehen_check(n: int, p, w) -> WiedersehenReport:
    """Star-orbit witnesses for ``lift(pi) ~ alpha(pi)`` and ``lift(2 pi) ~ alpha(0)``.

    A residual includes the unit-norm defect of the witness candidate, so it
    is small only when a genuine ``q`` exists. Batched over ``(p, w)``.
    """
    out = []
    for t in (np.pi, 2 * np.pi):
        y = lift_gamma(n, p, w, t)
        x = alpha_circle(n, np.full(y.u.shape[:-2], t))
        q, defect, res = star_orbit_residual(x, y)
        out.extend([q, res + defect])
    return WiedersehenReport(*out)


def clutching_relation(n: int, x):
    """Star-orbit test behind the clutching map.

    With ``(p', w') = sigma^n(p, w)`` the lifts ``lift(n, p, w, pi/2)`` and
    ``-lift(n, -p', -w', pi/2)`` lie in one star orbit. Returns the witness
    ``q`` and the residual (including the witness norm defect). Batched.
    """
    x = np.asarray(x, dtype=float)
    y = sigma_pow(n, x)
    a = lift_gamma(n, x[..., 0, :], x[..., 1, :], np.pi / 2)
    b = lift_gamma(n, -y[..., 0, :], -y[..., 1, :], np.pi / 2)
    q, defect, res = star_orbit_residual(a, -b)
    return q, res + defect


@dataclass(frozen=True)
class JoinReport:
    path: TransportResult
    length: float
    start_in_E1: np.ndarray
    end_in_E8: np.ndarray
    endpoint_error: float
    orthogonality: float


def join_segment(n: int, t0, y, step=1e-3) -> JoinReport:
    """Horizontal lift of the quarter great circle from ``(cos t0, sin t0)`` to ``y``.

    ``y`` is a unit pair of imaginary quaternions; the start is real, so the
    two are orthogonal and the arc has length exactly ``pi/2``. Batched over
    ``t0`` and ``y``.
    """
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y[..., :, 0]) > TOL_COMPOSITE):
        raise PreconditionError("join endpoint must have imaginary components")
    if np.any(np.abs(np.sqrt(np.sum(y * y, axis=(-2, -1))) - 1.0) > TOL_COMPOSITE):
        raise PreconditionError("join endpoint must be a unit pair")
    t0 = np.asarray(t0, dtype=float)
    start = alpha_circle(n, np.broadcast_to(t0, y.shape[:-2]))
    orth = float(np.max(np.abs(np.sum(start.u * y, axis=(-2, -1)))))
    path = horizontal_transport(n, great_circle(start.u, y), start.v, np.pi / 2, step)
    end = path.point(-1)
    return JoinReport(
        path=path,
        length=np.pi / 2,
        start_in_E1=stratum_classify(path.point(0)).in_E1,
        end_in_E8=stratum_classify(end).in_E8,
        endpoint_error=float(np.max(np.abs(end.u - y))),
        orthogonality=orth,
    )
