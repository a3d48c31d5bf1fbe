import numpy as np
import pytest
from hypothesis import given, strategies as st

from gmspheres.algebra import (
    I, J, K, ONE, ZERO, hermitian, imag, omul, oconj, pair, pleft, pnorm, pright, qconj, qexp, qinv,
    qmul, qnorm, qpow, quat, random_unit,
)

seeds = st.integers(min_value=0, max_value=2**63 - 1)


def test_multiplication_table():
    assert np.array_equal(qmul(I, J), K)
    assert np.array_equal(qmul(J, K), I)
    assert np.array_equal(qmul(K, I), J)
    assert np.array_equal(qmul(J, I), -K)
    for e in (I, J, K):
        assert np.array_equal(qmul(e, e), -ONE)


def test_identity_and_unit_product():
    q = quat(0.3, -1.2, 2.0, 0.5)
    assert np.array_equal(qmul(ONE, q), q)
    a = quat(1, 1) / np.sqrt(2)
    b = quat(1, -1) / np.sqrt(2)
    assert np.allclose(qmul(a, b), ONE, atol=1e-15)


def test_qexp_examples():
    assert np.array_equal(qexp(ZERO), ONE)
    assert np.allclose(qexp(np.pi / 2 * I), I, atol=1e-15)
    d = np.array([0.0, 1.0, -2.0, 2.0]) / 3.0
    assert np.allclose(qexp(np.pi * d), -ONE, atol=1e-15)


def test_qexp_small_angle_branch_is_continuous():
    p = imag([1e-9, -2e-9, 0.5e-9])
    expected = ONE + p  # to first order
    assert np.allclose(qexp(p), expected, atol=1e-17)
    # just above the threshold the trigonometric branch agrees with the series
    p2 = imag([1.0000001e-8, 0, 0])
    assert np.allclose(qexp(p2), [np.cos(1.0000001e-8), np.sin(1.0000001e-8), 0, 0], atol=1e-20)


def test_omul_examples():
    assert np.array_equal(omul(pair(I, ZERO), pair(J, ZERO)), pair(K, ZERO))
    assert np.array_equal(omul(pair(ZERO, ONE), pair(ZERO, ONE)), pair(-ONE, ZERO))
    assert np.array_equal(omul(pair(I, ZERO), pair(ZERO, ONE)), pair(ZERO, I))


def test_octonions_are_not_associative():
    a, b, c = pair(I, ZERO), pair(J, ZERO), pair(ZERO, ONE)
    assert not np.allclose(omul(omul(a, b), c), omul(a, omul(b, c)))


def test_hermitian_examples():
    e1, e2 = pair(ONE, ZERO), pair(ZERO, ONE)
    assert np.array_equal(hermitian(e1, e2), ZERO)
    assert np.array_equal(hermitian(e1, e1), ONE)
    u = pair(I, J) / np.sqrt(2)
    assert np.allclose(hermitian(u, u), ONE, atol=1e-15)


def test_random_unit_contract():
    a = random_unit("S3", 99)
    assert np.array_equal(a, random_unit("S3", 99))
    x = random_unit("S6", 5, size=50)
    assert np.all(x[:, 0, 0] == 0.0)
    y = random_unit("S5", 5, size=50)
    assert np.all(y[:, :, 0] == 0.0)
    z = random_unit("S7", 7, size=10_000)
    assert np.max(np.abs(pnorm(z) - 1)) < 1e-14
    assert np.max(np.abs(z.reshape(-1, 8).mean(axis=0))) < 0.05
    with pytest.raises(ValueError):
        random_unit("S9", 0)


@given(seeds)
def test_norm_is_multiplicative(seed):
    a, b = random_unit("S3", seed, size=2)
    assert abs(qnorm(qmul(a, b)) - 1) <= 1e-12


def test_norm_multiplicative_bulk():
    a = random_unit("S3", 1, size=10_000)
    b = random_unit("S3", 2, size=10_000)
    assert np.max(np.abs(qnorm(qmul(a, b)) - 1)) <= 1e-12


@given(st.lists(st.floats(-10 / np.sqrt(3), 10 / np.sqrt(3)), min_size=3, max_size=3))
def test_qexp_inverse(v):
    p = imag(v)
    assert np.max(np.abs(qmul(qexp(p), qexp(-p)) - ONE)) <= 1e-12
    assert abs(qnorm(qexp(p)) - 1) <= 1e-12


@given(seeds)
def test_omul_restricts_to_qmul_exactly(seed):
    a, b = np.random.default_rng(seed).standard_normal((2, 4))
    assert np.array_equal(omul(pair(a, ZERO), pair(b, ZERO))[0], qmul(a, b))


@given(seeds)
def test_octonion_norm_multiplicative_and_conjugate(seed):
    x, y = random_unit("S7", seed, size=2)
    assert abs(pnorm(omul(x, y)) - 1) <= 1e-12
    assert np.allclose(omul(x, oconj(x)), pair(ONE, ZERO), atol=1e-14)


@given(seeds)
def test_hermitian_left_invariance_and_sesquilinearity(seed):
    rng = np.random.default_rng(seed)
    u, v = rng.standard_normal((2, 2, 4))
    q = random_unit("S3", seed)
    a, b = rng.standard_normal((2, 4))
    assert np.max(np.abs(hermitian(pleft(q, u), pleft(q, v)) - hermitian(u, v))) <= 1e-12
    lhs = hermitian(pright(u, a), pright(v, b))
    rhs = qmul(qmul(qconj(a), hermitian(u, v)), b)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_qinv_and_qpow():
    q = quat(1, 2, -1, 0.5)
    assert np.allclose(qmul(q, qinv(q)), ONE, atol=1e-15)
    u = q / qnorm(q)
    assert np.allclose(qpow(u, 3), qmul(u, qmul(u, u)), atol=1e-15)
    assert np.allclose(qmul(qpow(u, -2), qpow(u, 2)), ONE, atol=1e-15)
    assert np.array_equal(qpow(u, 0), ONE)


def test_batches_broadcast():
    q = random_unit("S3", 3, size=(5, 1))
    r = random_unit("S3", 4, size=(1, 7))
    assert qmul(q, r).shape == (5, 7, 4)
