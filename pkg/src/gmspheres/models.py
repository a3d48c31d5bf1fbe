"""Milnor spheres M^7_{k,l} and Brieskorn spheres W^5_d, W^7_{6n-1,3}.

A Milnor sphere with ``k + l = 1`` is glued from two charts ``H x S^3``;
its points carry the chart they are expressed in. ``d = k - l`` is odd.

The group ``O(2) x SO(3)`` acts on both M^5_d (inside M^7_d) and on W^5_d.
Elements of it are written ``Symmetry(theta, reflect, q)`` meaning the matrix
``R(theta) @ diag(1, -1)**reflect`` together with the rotation ``x -> q x q*``;
:meth:`Symmetry.milnor` and :meth:`Symmetry.brieskorn` turn one into the
action data of either side, which is how isotropy is compared.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .algebra import I, J, K, ONE, qconj, qinv, qmul, qnorm, qnormalize, qpow, qsandwich, random_unit
from .config import TOL_COMPOSITE
from .errors import DomainError, PreconditionError

REFLECTION = np.diag([1.0, -1.0])


def rotation(theta) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def exponents(d: int) -> tuple[int, int]:
    """``(k, l)`` with ``k + l = 1`` and ``k - l = d``."""
    if d % 2 == 0:
        raise PreconditionError(f"d = k - l must be odd when k + l = 1, got {d}")
    return (1 + d) // 2, (1 - d) // 2


# -- Milnor spheres -----------------------------------------------------------------


@dataclass(frozen=True)
class MilnorPoint:
    chart: int
    u: np.ndarray
    v: np.ndarray
    k: int
    l: int

    def __post_init__(self):
        if self.chart not in (1, 2):
            raise PreconditionError(f"chart must be 1 or 2, got {self.chart}")
        if self.k + self.l != 1:
            raise PreconditionError(f"need k + l = 1, got k = {self.k}, l = {self.l}")
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))

    @property
    def d(self) -> int:
        return self.k - self.l


@dataclass(frozen=True)
class MilnorGroupElement:
    """``(m, +-q)`` in ``GL(2, R) x SO(3)``, optionally composed with ``v -> -v``.

    ``m = [[a, c], [b, d]]`` acts in the first chart by the Moebius map
    ``u -> (a u + c)/(b u + d)``.
    """

    m: np.ndarray
    q: np.ndarray
    negate: bool = False

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if m.shape != (2, 2) or abs(np.linalg.det(m)) < 1e-14:
            raise PreconditionError("m must be an invertible 2x2 real matrix")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))

    def __mul__(self, other: "MilnorGroupElement") -> "MilnorGroupElement":
        return MilnorGroupElement(self.m @ other.m, qmul(self.q, other.q), self.negate != other.negate)

    @classmethod
    def identity(cls) -> "MilnorGroupElement":
        return cls(np.eye(2), ONE.copy())


def _upow(q, k):
    """Power of a unit quaternion; negative exponents use the conjugate."""
    return qpow(q, k)


def _twist(h, v, k, l):
    return qmul(qmul(_upow(h, k), v), _upow(h, l))


def milnor_transition(x: MilnorPoint) -> MilnorPoint:
    """Change chart: ``(u, v) -> (u/|u|^2, uh^k v uh^l)`` with ``uh = u/|u|``.

    Going back, ``uh`` is recomputed from the new ``u`` (same direction) and
    the exponents are negated.
    """
    r = float(qnorm(x.u))
    if r == 0.0:
        raise DomainError("u = 0 is not in the chart overlap")
    uh = x.u / r
    sign = 1 if x.chart == 1 else -1
    v = _twist(uh, x.v, sign * x.k, sign * x.l)
    return MilnorPoint(3 - x.chart, x.u / r**2, v, x.k, x.l)


def to_chart(x: MilnorPoint, chart: int) -> MilnorPoint:
    return x if x.chart == chart else milnor_transition(x)


def _gl_part(m, x: MilnorPoint) -> MilnorPoint:
    (a, c), (b, dd) = m
    det = np.linalg.det(m)
    u, v, k, l = x.u, x.v, x.k, x.l
    ubar = qconj(u)
    if x.chart == 1:
        num = a * u + c * ONE
        den = b * u + dd * ONE
        if qnorm(den) >= qnorm(num):
            return MilnorPoint(1, qmul(num, qinv(den)), det * _twist(qnormalize(den), v, k, l), k, l)
        # image lies near u = infinity of this chart; express it in chart 2
        u2 = qmul(b * ubar + dd * ONE, qinv(a * ubar + c * ONE))
        return MilnorPoint(2, u2, det * _twist(qnormalize(num), v, k, l), k, l)
    num = b * ONE + dd * u
    den = a * ONE + c * u
    if qnorm(den) >= qnorm(num):
        z = qnormalize(a * ONE + c * ubar)
        return MilnorPoint(2, qmul(num, qinv(den)), det * _twist(z, v, k, l), k, l)
    y = b * ONE + dd * ubar
    u1 = qmul(a * ONE + c * ubar, qinv(y))
    return MilnorPoint(1, u1, det * _twist(qnormalize(y), v, k, l), k, l)


def milnor_act(g: MilnorGroupElement, x: MilnorPoint) -> MilnorPoint:
    """The ``GL(2, R) x SO(3)`` action (with the determinant factor), plus the optional involution.

    The output chart is whichever keeps the Moebius denominator away from 0.
    """
    y = _gl_part(g.m, x)
    u = qsandwich(g.q, y.u)
    v = qsandwich(g.q, y.v)
    if g.negate:
        v = -v
    return MilnorPoint(y.chart, u, v, y.k, y.l)


def milnor_distance(x: MilnorPoint, y: MilnorPoint) -> float:
    """Max-abs coordinate difference after bringing ``y`` to the chart of ``x``."""
    if x.chart != y.chart:
        if qnorm(y.u) < 1e-12:
            return np.inf
        y = milnor_transition(y)
    return float(max(np.max(np.abs(x.u - y.u)), np.max(np.abs(x.v - y.v))))


def m5_residual(x: MilnorPoint) -> float:
    """``|re v| + |re(u v)|``; zero exactly on M^5_d (in either chart)."""
    return float(abs(x.v[0]) + abs(qmul(x.u, x.v)[0]))


def milnor_alpha(s: float, k: int, l: int) -> MilnorPoint:
    """``alpha(s) = (i tan s, j)`` in the first chart."""
    if not abs(s) < np.pi / 2:
        raise DomainError("alpha(s) needs |s| < pi/2")
    return MilnorPoint(1, np.tan(s) * I, J.copy(), k, l)


def milnor_conjugate(x: MilnorPoint) -> MilnorPoint:
    """``(u, v) -> (conj u, conj v)``, a map ``M_{k,l} -> M_{l,k}``."""
    return MilnorPoint(x.chart, qconj(x.u), qconj(x.v), x.l, x.k)


def random_milnor_point(seed, k: int, l: int, chart=1, on_m5=False) -> MilnorPoint:
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(4) * rng.uniform(0.2, 2.0)
    v = qnormalize(rng.standard_normal(4))
    if on_m5:
        v[0] = 0.0
        v = qnormalize(v)
        # re(u v) = u0 v0 - <Im u, Im v>; with v0 = 0 kill the Im v component of u
        u[1:] -= np.dot(u[1:], v[1:]) * v[1:]
    return MilnorPoint(chart, u, v, k, l)


# -- Brieskorn spheres ------------------------------------------------------------


@dataclass(frozen=True)
class BrieskornPoint5:
    """``(z0, z)`` on ``|z0|^2 + |z|^2 = 1``, ``z0^d + z1^2 + z2^2 + z3^2 = 0``."""

    d: int
    z0: complex
    z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z0", complex(self.z0))
        object.__setattr__(self, "z", np.asarray(self.z, dtype=complex))

    def coords(self) -> np.ndarray:
        return np.concatenate([[self.z0], self.z])

    def residuals(self) -> tuple[float, float]:
        """(norm defect, polynomial residual)."""
        norm = abs(np.sum(np.abs(self.coords()) ** 2) - 1.0)
        poly = abs(self.z0**self.d + np.sum(self.z**2))
        return float(norm), float(poly)


@dataclass(frozen=True)
class BrieskornPoint7:
    """``(w, z0, z)`` on ``S^9`` with ``w^(6n-1) + z0^3 + z1^2 + z2^2 + z3^2 = 0``."""

    n: int
    w: complex
    z0: complex
    z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", complex(self.w))
        object.__setattr__(self, "z0", complex(self.z0))
        object.__setattr__(self, "z", np.asarray(self.z, dtype=complex))

    def coords(self) -> np.ndarray:
        return np.concatenate([[self.w, self.z0], self.z])

    def residuals(self) -> tuple[float, float]:
        norm = abs(np.sum(np.abs(self.coords()) ** 2) - 1.0)
        poly = abs(self.w ** (6 * self.n - 1) + self.z0**3 + np.sum(self.z**2))
        return float(norm), float(poly)


def so3_matrix(q) -> np.ndarray:
    """Matrix of ``x -> q x q*`` on Im H in the basis ``i, j, k``."""
    q = qnormalize(q)
    return np.column_stack([qsandwich(q, e)[1:] for e in (I, J, K)])


def _check_rotation(A, tol=TOL_COMPOSITE):
    A = np.asarray(A, dtype=float)
    if A.shape != (3, 3) or np.max(np.abs(A.T @ A - np.eye(3))) > tol or abs(np.linalg.det(A) - 1) > tol:
        raise PreconditionError("A must be a 3x3 rotation matrix")
    return A


def brieskorn_act5(theta: float, reflect: bool, A, x: BrieskornPoint5) -> BrieskornPoint5:
    """``R(theta) diag(1,-1)^reflect`` together with ``A`` acting on W^5_d.

    The reflection is ``(z0, z) -> (conj z0, conj z)`` and the rotation is
    ``(z0, z) -> (e^{2 i theta} z0, e^{d i theta} z)``; ``A`` multiplies ``z``.
    """
    A = _check_rotation(A)
    z0, z = x.z0, x.z
    if reflect:
        z0, z = np.conj(z0), np.conj(z)
    z0 = np.exp(2j * theta) * z0
    z = np.exp(1j * x.d * theta) * (A @ z)
    return BrieskornPoint5(x.d, z0, z)


def beta_root(d: int) -> float:
    """The negative root ``s_-`` of ``1 - s^2 + s^d``."""
    f = lambda s: 1 - s * s + s**d
    return brentq(f, -1.0, 0.0, xtol=1e-16, rtol=4 * np.finfo(float).eps)


def brieskorn_beta(d: int, s: float) -> BrieskornPoint5:
    """``(s, 0, sqrt(1 - s^2 - s^d)/sqrt 2, -i sqrt(1 - s^2 + s^d)/sqrt 2)`` on ``[s_-, 0]``."""
    lo = beta_root(d)
    if not (lo - 1e-12 <= s <= 0.0):
        raise DomainError(f"beta(s) is defined on [{lo:.15g}, 0], got s = {s}")
    r1 = max(1 - s * s - s**d, 0.0)
    r2 = 1 - s * s + s**d
    # the second radicand vanishes at s_-; rounding there would leave a sqrt(eps) error
    r2 = 0.0 if r2 < 1e-14 else r2
    z = np.array([0.0, np.sqrt(r1) / np.sqrt(2), -1j * np.sqrt(r2) / np.sqrt(2)])
    return BrieskornPoint5(d, s, z)


def weighted_normalize(coords, degrees) -> np.ndarray:
    """Rescale ``c_i -> r^(1/e_i) c_i`` (r > 0) onto the unit sphere.

    This keeps ``sum c_i^(e_i) = 0`` because every monomial scales by ``r``.
    """
    coords = np.asarray(coords, dtype=complex)
    e = np.asarray(degrees, dtype=float)
    mag = np.abs(coords) ** 2
    f = lambda logr: np.sum(np.exp(2 * logr / e) * mag) - 1.0
    logr = brentq(f, -200.0, 200.0, xtol=1e-15)
    return coords * np.exp(logr / e)


def random_w5_point(d: int, seed, on_fixed_set=False) -> BrieskornPoint5:
    """Random point of W^5_d; with ``on_fixed_set`` it has ``z1 = 0``."""
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    if on_fixed_set:
        c[1] = 0.0
    c[3] = np.sqrt(-(c[0] ** d + c[1] ** 2 + c[2] ** 2))
    c = weighted_normalize(c, [d, 2, 2, 2])
    return BrieskornPoint5(d, c[0], c[1:])


def random_w7_point(n: int, seed, on_fixed_set=False) -> BrieskornPoint7:
    """Random point of W^7_{6n-1,3}; with ``on_fixed_set`` it lies on the W^3 with ``z2 = z3 = 0``."""
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    if on_fixed_set:
        c[3:] = 0.0
        c[2] = np.sqrt(-(c[0] ** (6 * n - 1) + c[1] ** 3))
    else:
        c[4] = np.sqrt(-(c[0] ** (6 * n - 1) + c[1] ** 3 + c[2] ** 2 + c[3] ** 2))
    c = weighted_normalize(c, [6 * n - 1, 3, 2, 2, 2])
    return BrieskornPoint7(n, c[0], c[1], c[2:])


def w7_so3_act(A, x: BrieskornPoint7) -> BrieskornPoint7:
    A = _check_rotation(A)
    return BrieskornPoint7(x.n, x.w, x.z0, A @ x.z)


def w7_fixed_residual(x: BrieskornPoint7) -> float:
    """``|z2| + |z3|``: zero exactly on the fixed set of ``diag(1, -1, -1)``."""
    return float(abs(x.z[1]) + abs(x.z[2]))


# -- isotropy --------------------------------------------------------------------


@dataclass(frozen=True)
class Symmetry:
    """``(R(theta) diag(1,-1)^reflect, +-q)`` in ``O(2) x SO(3)``."""

    theta: float
    reflect: bool
    q: np.ndarray
    label: str = ""

    def matrix(self) -> np.ndarray:
        m = rotation(self.theta)
        return m @ REFLECTION if self.reflect else m

    def milnor(self) -> MilnorGroupElement:
        return MilnorGroupElement(self.matrix(), self.q)

    def brieskorn(self):
        return self.theta, self.reflect, so3_matrix(self.q)


def _both_signs(theta, reflect, q, label):
    q = np.asarray(q, dtype=float)
    return [Symmetry(theta, reflect, q, label + "+"), Symmetry(theta, reflect, -q, label + "-")]


def _ejt(tau):
    return np.array([np.cos(tau), 0.0, np.sin(tau), 0.0])


def k_minus(taus=(0.0, 0.4, 1.3, 2.9)) -> list[Symmetry]:
    """Isotropy at ``alpha(0)``: the circle ``e^{j tau}`` extended by three cosets."""
    out = []
    for tau in taus:
        e = _ejt(tau)
        ie = qmul(I, e)
        out += _both_signs(0.0, False, e, f"K-:(E,e^j{tau:g})")
        out += _both_signs(np.pi, False, ie, f"K-:(-E,ie^j{tau:g})")
        out += _both_signs(0.0, True, e, f"K-:(diag(1,-1),e^j{tau:g})")
        out += _both_signs(np.pi, True, ie, f"K-:(diag(-1,1),ie^j{tau:g})")
    return out


def h_group() -> list[Symmetry]:
    """Principal isotropy along the open arc."""
    return (
        _both_signs(0.0, False, ONE, "H:(E,1)")
        + _both_signs(np.pi, False, I, "H:(-E,i)")
        + _both_signs(0.0, True, J, "H:(diag(1,-1),j)")
        + _both_signs(np.pi, True, K, "H:(diag(-1,1),k)")
    )


def k_plus(d: int, thetas=(0.0, 0.8, 2.1, 4.0)) -> list[Symmetry]:
    """Isotropy at ``alpha(pi/4)``: ``(R(theta), e^{-(d/2) i theta})`` and its reflected coset."""
    out = []
    for th in thetas:
        e = np.array([np.cos(d * th / 2), -np.sin(d * th / 2), 0.0, 0.0])
        out += _both_signs(th, False, e, f"K+:(R{th:g},e^-i{d}/2*{th:g})")
        out += _both_signs(th, True, qmul(e, J), f"K+:(R{th:g}diag(1,-1),e^-i{d}/2*{th:g}j)")
    return out


def random_symmetries(seed, count) -> list[Symmetry]:
    rng = np.random.default_rng(seed)
    return [
        Symmetry(rng.uniform(0, 2 * np.pi), bool(rng.integers(2)), random_unit("S3", rng.integers(2**63)), "random")
        for _ in range(count)
    ]


def matched_beta_parameter(d: int, s_alpha: float) -> float:
    """Affine match of ``[0, pi/4]`` (alpha) onto ``[s_-, 0]`` (beta)."""
    lo = beta_root(d)
    return lo * (1.0 - s_alpha / (np.pi / 4))


FAMILIES = ("milnor-alpha", "brieskorn-beta")


def isotropy_scan(family: str, s: float, candidates, d: int = 3) -> np.ndarray:
    """Displacement of the curve point at parameter ``s`` under each candidate."""
    if family == "milnor-alpha":
        k, l = exponents(d)
        x = milnor_alpha(s, k, l)
        return np.array([milnor_distance(x, milnor_act(g.milnor(), x)) for g in candidates])
    if family == "brieskorn-beta":
        x = brieskorn_beta(d, s)
        c = x.coords()
        return np.array([np.max(np.abs(brieskorn_act5(*g.brieskorn(), x).coords() - c)) for g in candidates])
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
