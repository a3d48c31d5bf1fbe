import numpy as np
import pytest
from hypothesis import given, strategies as st

from gmspheres.algebra import I, J, K, ZERO, hermitian, pair, qexp, qim, random_unit
from gmspheres.bundle import (
    GroupElement, IDENTITY_U, IDENTITY_V, act, alpha_circle, random_group_element, random_point,
    star_orbit_witness,
)
from gmspheres.errors import PreconditionError
from gmspheres.geometry import (
    MetricParams, TangentVector, act_tangent, beta_curve, clutching_relation, great_circle, horizontal_transport,
    join_segment, lift_gamma, lift_velocity, metric_eval, random_tangent, split_horizontal, star_generator_vector,
    vertical_component, vertical_vector, wiedersehen_check,
)
from gmspheres.powermaps import rho

seeds = st.integers(min_value=0, max_value=2**63 - 1)
indices = st.integers(min_value=-4, max_value=4)


def _close(X, Y, tol):
    return max(np.max(np.abs(X.du - Y.du)), np.max(np.abs(X.dv - Y.dv))) <= tol


def test_metric_params():
    with pytest.raises(PreconditionError):
        MetricParams(0.0)


def test_split_examples():
    x = random_point(2, 1)
    V = vertical_vector(x, I)
    h, v = split_horizontal(x, V)
    assert np.max(np.abs(h.du)) <= 1e-15 and np.max(np.abs(h.dv)) <= 1e-15
    assert np.allclose(vertical_component(x, V.dv), I, atol=1e-15)
    X = random_tangent(x, 3)
    h, v = split_horizontal(x, X)
    assert _close(h + v, X, 1e-13)
    assert np.max(np.abs(qim(hermitian(x.v, h.dv)))) <= 1e-12
    assert np.max(np.abs(v.du)) == 0.0
    h2, v2 = split_horizontal(x, h)
    assert np.max(np.abs(v2.dv)) <= 1e-12


def test_split_rejects_non_tangent():
    x = random_point(2, 1)
    bad = TangentVector(x, x.u, np.zeros_like(x.v))
    with pytest.raises(PreconditionError):
        split_horizontal(x, bad)


def test_metric_examples():
    nu = 2.5
    m = MetricParams(nu)
    x = random_point(3, 4)
    V = vertical_vector(x, I)
    assert np.isclose(metric_eval(m, V, V), nu)
    h, _ = split_horizontal(x, random_tangent(x, 5))
    h = h * (1 / np.linalg.norm(h.du))
    assert np.isclose(metric_eval(m, h, h), 1.0)
    assert abs(metric_eval(m, V, h)) <= 1e-15


def test_metric_scales_linearly_in_nu():
    x = random_point(1, 6)
    X = random_tangent(x, 7)
    h, v = split_horizontal(x, X)
    vals = [metric_eval(MetricParams(nu), v, v) for nu in (0.5, 1.0, 2.0)]
    assert np.isclose(vals[2] - vals[1], 2 * (vals[1] - vals[0]))
    assert np.isclose(vals[0], 0.5 * vals[1])
    # the split itself never sees nu
    assert np.isclose(metric_eval(MetricParams(0.5), h, h), metric_eval(MetricParams(2.0), h, h))


@given(seeds, indices, st.floats(0.1, 5.0))
def test_actions_are_isometries(seed, n, nu):
    m = MetricParams(nu)
    x = random_point(n, seed)
    X, Y = random_tangent(x, seed + 1), random_tangent(x, seed + 2)
    g = random_group_element(seed + 3)
    gX, gY = act_tangent(g, X), act_tangent(g, Y)
    assert gX.tangency_residual() <= 1e-10
    assert abs(metric_eval(m, gX, gY) - metric_eval(m, X, Y)) <= 1e-9


def test_metric_is_positive_definite():
    x = random_point(2, 8)
    basis = [random_tangent(x, s) for s in range(10)]
    gram = np.array([[metric_eval(MetricParams(0.7), a, b) for b in basis] for a in basis])
    assert np.allclose(gram, gram.T)
    # ten generic vectors span the 10-dimensional tangent space
    assert np.linalg.eigvalsh(gram).min() > 1e-8


def test_lift_examples():
    x = random_unit("S6", 5)
    e = lift_gamma(3, x[0], x[1], 0.0)
    assert np.allclose(e.u, IDENTITY_U, atol=1e-16) and np.allclose(e.v, IDENTITY_V, atol=1e-16)
    p = qim(random_unit("S3", 6))
    p = p / np.linalg.norm(p)
    for t in (0.3, 2.0):
        y = lift_gamma(4, p, ZERO, t)
        assert np.allclose(y.u, pair(qexp(t * p), ZERO), atol=1e-15)
        assert np.allclose(y.v, IDENTITY_V, atol=1e-15)


@given(seeds, indices, st.floats(-7.0, 7.0))
def test_lift_membership_and_projection(seed, n, t):
    x = random_unit("S6", seed)
    y = lift_gamma(n, x[0], x[1], t)
    assert y.residual() <= 1e-11
    beta = x * np.sin(t)
    beta[0, 0] += np.cos(t)
    assert np.max(np.abs(y.u - beta)) <= 1e-13


def test_pullback_identity():
    x = random_unit("S6", 9, size=100)
    t = np.linspace(0, 2 * np.pi, 50)[None, :]
    for n in range(-4, 5):
        a = lift_gamma(n, x[:, None, 0], x[:, None, 1], t)
        b = lift_gamma(1, x[:, None, 0], x[:, None, 1], n * t)
        assert np.max(np.abs(rho(n, a.u) - b.u)) <= 1e-10
        assert np.max(np.abs(a.v - b.v)) <= 1e-10


@given(seeds, indices, st.floats(0.0, 2 * np.pi))
def test_lift_is_doubly_horizontal(seed, n, t):
    x = random_unit("S6", seed)
    X = lift_velocity(n, x[0], x[1], t)
    assert np.max(np.abs(vertical_component(X.at, X.dv))) <= 1e-6
    m = MetricParams(1.3)
    for e in (I, J, K):
        assert abs(metric_eval(m, X, star_generator_vector(X.at, e))) <= 1e-6


def test_star_generator_is_star_velocity():
    x = random_point(2, 3)
    h = 1e-6
    fd = (act(GroupElement.star(qexp(h * J)), x).v - act(GroupElement.star(qexp(-h * J)), x).v) / (2 * h)
    assert np.max(np.abs(star_generator_vector(x, J).dv - fd)) <= 1e-9


def test_transport_examples():
    still = lambda s: (IDENTITY_U, np.zeros((2, 4)))
    r = horizontal_transport(2, still, IDENTITY_V, 1.0, step=0.1)
    assert np.allclose(r.v[-1], IDENTITY_V)
    x = random_unit("S6", 4)
    r = horizontal_transport(3, beta_curve(x[0], x[1]), IDENTITY_V, 2.0, step=1e-3)
    ref = lift_gamma(3, x[0], x[1], r.s)
    assert np.max(np.abs(r.v - ref.v)) <= 1e-7
    assert r.membership <= 1e-8 and r.horizontality <= 1e-9
    loop = horizontal_transport(2, great_circle(IDENTITY_U, pair(ZERO, I)), IDENTITY_V, 2 * np.pi, step=1e-2)
    assert np.allclose(loop.u[-1], loop.u[0], atol=1e-14)
    assert loop.membership <= 1e-8


def test_transport_zero_length():
    r = horizontal_transport(1, beta_curve(I, ZERO), IDENTITY_V, 0.0)
    assert len(r.s) == 1 and np.array_equal(r.v[0], IDENTITY_V)


def test_wiedersehen_examples():
    rep = wiedersehen_check(2, I, ZERO)
    assert rep.max_residual <= 1e-12
    x = random_unit("S6", 11, size=50)
    for n in (0, 3, -2):
        assert wiedersehen_check(n, x[:, 0], x[:, 1]).max_residual <= 1e-9


def test_wiedersehen_fails_off_orbit():
    # halfway there the lift is not in the antipode orbit
    x = random_unit("S6", 12)
    y = lift_gamma(3, x[0], x[1], np.pi / 3)
    assert star_orbit_witness(alpha_circle(3, np.pi), y) is None


def test_clutching_relation():
    x = random_unit("S6", 13, size=200)
    for n in range(-3, 4):
        q, res = clutching_relation(n, x)
        assert np.max(res) <= 1e-9


def test_join_examples():
    y = pair(I, ZERO)
    rep = join_segment(2, 0.0, y, step=1e-2)
    assert np.allclose(rep.path.u[-1], y, atol=1e-15)
    assert rep.end_in_E8 and rep.start_in_E1 and rep.length == np.pi / 2
    assert rep.orthogonality == 0.0
    y = random_unit("S5", 14)
    a = join_segment(2, 0.4, y, step=1e-2)
    b = join_segment(0, 0.4, y, step=1e-2)
    assert np.allclose(a.path.u, b.path.u)
    assert a.path.membership <= 1e-8
    with pytest.raises(PreconditionError):
        join_segment(1, 0.0, random_unit("S7", 1))
