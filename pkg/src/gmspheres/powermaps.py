"""Power maps of S^7, the clutching map of S^6 and degree counting.

Points of S^7 are unit pairs ``u = (u1, u2)`` in H^2. Away from the poles
``(+-1, 0)`` every such point is written uniquely as

    u = (cos t + p sin t, w sin t),   t in (0, pi),  p in Im H,  |p|^2 + |w|^2 = 1,

and the power map replaces ``t`` by ``n t``. Read as octonions this is just
``u -> u^n``, which is what :func:`oct_power` computes independently.

Points of S^6 ("clutch values") are pairs ``(p, w)`` with ``re p = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    ONE,
    ZERO,
    omul,
    oconj,
    pair,
    pnorm,
    qconj,
    qexp,
    qmul,
    qnorm,
    qsandwich,
)
from .config import GAUGE_THRESHOLD, TOL_ALGEBRA, TOL_COMPOSITE
from .errors import ConvergenceError, DomainError, PreconditionError, RegularValueError

NORTH = pair(ONE, ZERO)


def require_unit(u, tol=TOL_COMPOSITE, what="u"):
    defect = np.abs(pnorm(u) - 1.0)
    if np.any(defect > tol):
        raise PreconditionError(f"{what} must be a unit pair (norm defect {np.max(defect):.3e} > {tol:g})")


@dataclass(frozen=True)
class SuspensionCoords:
    """``u = (cos t + p sin t, w sin t)``; arrays broadcast over a batch."""

    t: np.ndarray
    p: np.ndarray
    w: np.ndarray
    degenerate: np.ndarray

    def point(self) -> np.ndarray:
        st = np.sin(self.t)[..., None]
        first = self.p * st
        first[..., 0] += np.cos(self.t)
        return pair(first, self.w * st)


def decompose(u, tol=TOL_COMPOSITE) -> SuspensionCoords:
    """Suspension coordinates of a unit pair.

    Near the poles (``sin t <= 1e-12``) the direction ``(p, w)`` cannot be
    observed; it is then fixed to the gauge ``(i, 0)`` and ``degenerate`` is
    set.
    """
    u = np.asarray(u, dtype=float)
    require_unit(u, tol)
    x = u[..., 0, 0]
    im1 = u[..., 0, :].copy()
    im1[..., 0] = 0.0
    u2 = u[..., 1, :]
    s = np.sqrt(np.sum(im1 * im1, axis=-1) + np.sum(u2 * u2, axis=-1))
    # atan2 keeps full precision near the poles where arccos(x) does not
    t = np.arctan2(s, x)
    degenerate = s <= GAUGE_THRESHOLD
    safe = np.where(degenerate, 1.0, s)[..., None]
    p = np.where(degenerate[..., None], np.array([0.0, 1.0, 0.0, 0.0]), im1 / safe)
    w = np.where(degenerate[..., None], 0.0, u2 / safe)
    return SuspensionCoords(t=t, p=p, w=w, degenerate=degenerate)


def _sin_ratio(n, t, s):
    """sin(n t) / sin(t) where s = sin(t) >= 0, with the L'Hopital limit at the poles."""
    near_pole = s <= GAUGE_THRESHOLD
    safe_s = np.where(near_pole, 1.0, s)
    limit = n * np.cos(n * t) / np.where(near_pole, np.cos(t), 1.0)
    return np.where(near_pole, limit, np.sin(n * t) / safe_s)


def rho(n: int, u, tol=TOL_COMPOSITE) -> np.ndarray:
    """The power map ``(cos t + p sin t, w sin t) -> (cos nt + p sin nt, w sin nt)``."""
    u = np.asarray(u, dtype=float)
    require_unit(u, tol)
    x = u[..., 0, 0]
    s = np.sqrt(np.sum(u[..., 0, 1:] ** 2, axis=-1) + np.sum(u[..., 1, :] ** 2, axis=-1))
    t = np.arctan2(s, x)
    ratio = _sin_ratio(n, t, s)[..., None, None]
    out = u * ratio
    out[..., 0, 0] = np.cos(n * t)
    return out


def _chebyshev(m: int, x):
    """U_m(x) and U_m'(x) for m >= -1 by the three-term recurrence."""
    prev, cur = np.zeros_like(x), np.ones_like(x)
    dprev, dcur = np.zeros_like(x), np.zeros_like(x)
    if m == -1:
        return prev, dprev
    for _ in range(m):
        prev, cur, dprev, dcur = cur, 2 * x * cur - prev, dcur, 2 * cur + 2 * x * dcur - dprev
    return cur, dcur


def rho_differential(n: int, u, du) -> np.ndarray:
    """Exact differential of ``rho_n`` at ``u`` applied to a tangent vector ``du``.

    On the unit sphere ``rho_n(u) = (T_n(x) + U_{n-1}(x) Im u1, U_{n-1}(x) u2)``
    with ``x = re u1`` (Chebyshev polynomials), which is differentiated
    directly. Negative ``n`` uses ``rho_{-m} = conj o rho_m``.
    """
    u = np.asarray(u, dtype=float)
    du = np.asarray(du, dtype=float)
    m = abs(n)
    x = u[..., 0, 0]
    dx = du[..., 0, 0]
    U, dU = _chebyshev(m - 1, x)
    imu = u.copy()
    imu[..., 0, 0] = 0.0
    imdu = du.copy()
    imdu[..., 0, 0] = 0.0
    out = (dU * dx)[..., None, None] * imu + U[..., None, None] * imdu
    out[..., 0, 0] = m * U * dx
    return oconj(out) if n < 0 else out


def oct_power(n: int, u, tol=TOL_COMPOSITE) -> np.ndarray:
    """``u^n`` for a unit octonion by repeated Cayley-Dickson multiplication.

    A single octonion generates an associative subalgebra, so the bracketing
    of the product does not matter. Negative powers use the conjugate, which
    is the inverse of a unit octonion.
    """
    u = np.asarray(u, dtype=float)
    require_unit(u, tol)
    base = oconj(u) if n < 0 else u
    out = np.broadcast_to(NORTH, u.shape).copy()
    for _ in range(abs(n)):
        out = omul(out, base)
    return out


# -- clutching data on S^6 ------------------------------------------------------


def clutch_b(x) -> np.ndarray:
    """``b(p, w) = (w/|w|) e^{pi p} (conj w/|w|)``, a unit quaternion."""
    x = np.asarray(x, dtype=float)
    p, w = x[..., 0, :], x[..., 1, :]
    r = qnorm(w)
    if np.any(r == 0.0):
        raise DomainError("b(p, w) is undefined at w = 0 (its limit there is -1)")
    what = w / r[..., None]
    return qsandwich(what, qexp(np.pi * p))


def _b_or_limit(x):
    x = np.asarray(x, dtype=float)
    r = qnorm(x[..., 1, :])
    at_pole = r == 0.0
    if not np.any(at_pole):
        return clutch_b(x)
    safe = x.copy()
    safe[..., 1, :] = np.where(at_pole[..., None], ONE, safe[..., 1, :])
    return np.where(at_pole[..., None], -ONE, clutch_b(safe))


def sigma(x) -> np.ndarray:
    """``sigma(p, w) = conj(b) (p, w) b`` with ``b = b(p, w)``; identity at ``w = 0``."""
    x = np.asarray(x, dtype=float)
    b = _b_or_limit(x)[..., None, :]
    return qmul(qmul(qconj(b), x), b)


def sigma_inverse(x, tol=TOL_ALGEBRA, max_iter=200) -> np.ndarray:
    """Solve ``sigma(y) = x`` by the fixed-point iteration ``y <- b(y) x conj(b(y))``.

    Because ``b`` is constant along sigma-orbits the iteration is exact after
    its first step; the loop only confirms that.
    """
    x = np.asarray(x, dtype=float)
    y = x
    for it in range(1, max_iter + 1):
        b = _b_or_limit(y)[..., None, :]
        y_new = qmul(qmul(b, x), qconj(b))
        step = np.max(np.abs(y_new - y)) if y.size else 0.0
        y = y_new
        if step <= tol:
            return y
    raise ConvergenceError(f"sigma inverse did not converge in {max_iter} iterations", iterations=max_iter)


def sigma_pow(n: int, x) -> np.ndarray:
    """``sigma^n``; negative ``n`` iterates the inverse."""
    x = np.asarray(x, dtype=float)
    step = sigma if n >= 0 else sigma_inverse
    for _ in range(abs(n)):
        x = step(x)
    return x


# -- degree ----------------------------------------------------------------------


def preimages(n: int, y, tol=TOL_COMPOSITE) -> np.ndarray:
    """All solutions of ``rho_n(u) = y`` for a regular value ``y``.

    ``rho_n`` only rescales the suspension angle, so the preimages are the
    ``t' in (0, pi)`` with ``cos(n t') = cos(t_y)``; the direction is ``+-(p_y,
    w_y)`` according to the sign of ``sin(n t') / sin(t_y)``.
    """
    y = np.asarray(y, dtype=float)
    sc = decompose(y, tol)
    if sc.degenerate or np.sin(sc.t) < 1e-6:
        raise RegularValueError("value too close to a pole of the suspension chart")
    if n == 0:
        return np.empty((0, 2, 4))
    m = abs(n)
    ty = float(sc.t)
    direction = pair(sc.p, sc.w)
    cands = []
    for k in range(m + 1):
        for tt in ((ty + 2 * np.pi * k) / m, (2 * np.pi * k - ty) / m):
            if 0.0 < tt < np.pi:
                cands.append(tt)
    out = []
    for tt in sorted(cands):
        sign = np.sign(np.sin(n * tt) / np.sin(ty))
        pt = np.sin(tt) * sign * direction
        pt[0, 0] += np.cos(tt)
        out.append(pt)
    out = np.array(out).reshape(-1, 2, 4)
    resid = np.max(np.abs(rho(n, out) - y)) if len(out) else 0.0
    if resid > 1e-9:
        raise RegularValueError(f"preimage enumeration failed (residual {resid:.3e})")
    return out


def tangent_frame(x) -> np.ndarray:
    """Positively oriented orthonormal frame of ``T_x S^7`` as a (7, 8) array.

    Orientation: ``det[x, e1, ..., e7] > 0`` in R^8.
    """
    x = np.asarray(x, dtype=float).reshape(8)
    q, _ = np.linalg.qr(np.column_stack([x, np.eye(8)]))
    frame = q[:, 1:8].T.copy()
    if np.linalg.det(np.vstack([x, frame])) < 0:
        frame[-1] *= -1.0
    return frame


def jacobian_sign(n: int, u, jac_step=1e-6, min_det=1e-6) -> int:
    """Sign of ``det d(rho_n)`` at ``u`` in oriented frames, by central differences."""
    u = np.asarray(u, dtype=float).reshape(2, 4)
    src = tangent_frame(u)
    dst = tangent_frame(rho(n, u))
    cols = []
    for e in src:
        e = e.reshape(2, 4)
        fwd = rho(n, np.cos(jac_step) * u + np.sin(jac_step) * e)
        bwd = rho(n, np.cos(jac_step) * u - np.sin(jac_step) * e)
        cols.append(((fwd - bwd) / (2 * jac_step)).reshape(8))
    jac = dst @ np.array(cols).T
    det = np.linalg.det(jac)
    if abs(det) < min_det:
        raise RegularValueError(f"near-singular Jacobian (|det| = {abs(det):.3e})")
    return int(np.sign(det))


def degree_check(n: int, y, jac_step=1e-6) -> int:
    """Signed count of preimages of ``y`` under ``rho_n``."""
    return sum(jacobian_sign(n, u, jac_step) for u in preimages(n, y))
