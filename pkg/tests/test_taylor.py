import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frspace import taylor as T


def test_polynomial_partials_are_exact():
    x, y = T.variables([1.5, -0.5], 3)
    p = x**3 * y + 2 * x * y**2
    # d/dx = 3x^2 y + 2y^2, d2/dxdy = 3x^2 + 4y, d3/dx2dy = 6x
    assert p.partial(0) == pytest.approx(3 * 1.5**2 * -0.5 + 2 * 0.25)
    assert p.partial(0, 1) == pytest.approx(3 * 1.5**2 + 4 * -0.5)
    assert p.partial(0, 0, 1) == pytest.approx(6 * 1.5)
    assert p.partial(1, 1, 1) == 0.0


@pytest.mark.parametrize(
    "fn, d1, d2",
    [
        (T.exp, math.exp, math.exp),
        (T.log, lambda v: 1 / v, lambda v: -1 / v**2),
        (T.sqrt, lambda v: 0.5 / math.sqrt(v), lambda v: -0.25 * v**-1.5),
        (T.atan, lambda v: 1 / (1 + v * v), lambda v: -2 * v / (1 + v * v) ** 2),
        (T.sin, math.cos, lambda v: -math.sin(v)),
        (T.cos, lambda v: -math.sin(v), lambda v: -math.cos(v)),
    ],
)
def test_elementary_function_derivatives(fn, d1, d2):
    v = 0.7
    (x,) = T.variables([v], 2)
    r = fn(x)
    assert r.partial(0) == pytest.approx(d1(v), rel=1e-14)
    assert r.partial(0, 0) == pytest.approx(d2(v), rel=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 5.0), st.floats(-3.0, 3.0))
def test_identities_hold_to_all_orders(u, w):
    x, y = T.variables([u, w], 4)
    one = T.sin(y) ** 2 + T.cos(y) ** 2
    assert np.allclose(one.c, np.eye(1, one.c.size).ravel(), atol=1e-13)
    back = T.exp(T.log(x))
    assert np.allclose(back.c, x.c, atol=1e-12)
    sq = T.sqrt(x) * T.sqrt(x)
    assert np.allclose(sq.c, x.c, atol=1e-12)


def test_derivative_tensor_is_symmetric():
    v = T.variables([0.3, 0.8, -0.2], 3)
    f = T.exp(v[0] * v[1]) * T.atan(v[2] + v[0])
    D3 = f.derivatives(3)
    for perm in [(1, 0, 2), (2, 1, 0), (0, 2, 1)]:
        assert np.allclose(D3, D3.transpose(perm), atol=1e-14)


def test_matrix_inverse_and_determinant_match_numpy():
    rng = np.random.default_rng(3)
    m0 = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    (s,) = T.variables([0.0], 2)
    m = np.empty((3, 3), dtype=object)
    dm = rng.normal(size=(3, 3))
    for i in range(3):
        for j in range(3):
            m[i, j] = m0[i, j] + s * dm[i, j]
    inv = T.inv(m)
    assert np.allclose(T.values(inv), np.linalg.inv(m0), atol=1e-13)
    # d(M^-1)/ds = -M^-1 dM M^-1
    d_inv = T.derivatives(inv, 1)[..., 0]
    Mi = np.linalg.inv(m0)
    assert np.allclose(d_inv, -Mi @ dm @ Mi, atol=1e-12)
    assert T.value(T.det(m)) == pytest.approx(np.linalg.det(m0), rel=1e-13)


def test_basis_mismatch_is_rejected():
    (a,) = T.variables([1.0], 2)
    (b,) = T.variables([1.0], 3)
    with pytest.raises(ValueError):
        a * b


def test_truncate_degree_zero_gives_floats():
    v = T.variables([1.0, 2.0], 2)
    out = T.truncate(v * 3.0, 0)
    assert out.dtype == float and list(out) == [3.0, 6.0]
