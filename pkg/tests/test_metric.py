import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frspace.errors import ChargeOutOfRange
from frspace.jets import random_jet, with_charge
from frspace.metric import (
    K_value,
    angle_f,
    characteristic_form,
    charge_functions,
    core,
    covariant_y,
    eta,
    g_derivative_scalar,
    mbar_closed,
    metric_K,
    metric_matrix_closed,
    metric_tensor,
)

from conftest import rel

seeds = st.integers(0, 10_000)
dims = st.integers(2, 5)


def _y(seed, dim):
    return np.random.default_rng(seed + 17).normal(size=dim)


# frozen reference values ------------------------------------------------------------


@pytest.mark.parametrize("case", ["random3", "random2", "berwald3"])
def test_K_and_metric_match_frozen_oracle(frozen, case):
    c = frozen[case]
    assert K_value(c["jet"], c["y"]) == pytest.approx(c["K"], rel=1e-13)
    assert rel(metric_tensor(c["jet"], c["y"]).gmat, c["g"]) < 1e-12


def test_flat_field_value_at_e2():
    # a = I, b = (0.5, 0), g = 0.8, y = e2: b = 0, q = 1, B = 1, so
    # K = exp(-G f / 2) with f = pi/2 - atan(G/2) and G = 0.8 / sqrt(1 - 0.16)
    from frspace.fields import bundled_field, jet_at

    jet = jet_at(bundled_field("flat"), [0.0, 0.0])
    G = 0.8 / np.sqrt(0.84)
    expected = np.exp(-0.5 * G * (np.pi / 2 - np.arctan(G / 2)))
    assert K_value(jet, [0.0, 1.0]) == pytest.approx(expected, rel=1e-15)


# identities --------------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(seeds, dims)
def test_characteristic_quadratic_identity(seed, dim):
    jet = random_jet(dim, seed)
    y = _y(seed, dim)
    B, L = characteristic_form(jet, y)
    h, _ = charge_functions(jet.g)
    b = jet.b @ y
    assert abs(L * L + h * h * b * b - B) <= 1e-13 * B


@settings(max_examples=40, deadline=None)
@given(seeds, dims, st.floats(0.1, 10.0))
def test_homogeneity(seed, dim, lam):
    jet = random_jet(dim, seed)
    y = _y(seed, dim)
    assert K_value(jet, lam * y) == pytest.approx(lam * K_value(jet, y), rel=1e-13)
    g1 = metric_tensor(jet, y).gmat
    g2 = metric_tensor(jet, lam * y).gmat
    assert rel(g2, g1) < 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds, dims)
def test_determinant_identity(seed, dim):
    jet = random_jet(dim, seed)
    y = _y(seed, dim)
    cr = core(jet, y)
    det = metric_tensor(jet, y).det_g
    expected = cr.nu / cr.ts.q * (cr.K**2 / cr.B) ** dim * np.linalg.det(jet.a)
    assert det == pytest.approx(expected, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(seeds, dims)
def test_covariant_vector_contracts_to_K2_and_is_half_gradient(seed, dim):
    jet = random_jet(dim, seed)
    y = _y(seed, dim)
    ylow = covariant_y(jet, y)
    K = K_value(jet, y)
    assert ylow @ y == pytest.approx(K * K, rel=1e-13)
    eps = 1e-6
    fd = np.array([(K_value(jet, y + eps * e) ** 2 - K_value(jet, y - eps * e) ** 2) / (4 * eps) for e in np.eye(dim)])
    assert np.allclose(ylow, fd, atol=1e-8 * max(1, np.abs(fd).max()))
    # g_ij y^j = y_i
    assert np.allclose(metric_tensor(jet, y).gmat @ y, ylow, atol=1e-12 * np.abs(ylow).max())


def test_eta_B_on_axis_equals_c2():
    for seed in range(10):
        jet = random_jet(3, seed)
        B, _ = characteristic_form(jet, jet.bup)
        assert eta(jet) * B == pytest.approx(jet.c**2, abs=1e-13)


def test_riemannian_limit():
    jet = with_charge(random_jet(4, 3), 0.0, np.zeros(4))
    y = _y(3, 4)
    assert np.allclose(metric_tensor(jet, y).gmat, jet.a, atol=1e-12)
    assert K_value(jet, y) == pytest.approx(np.sqrt(y @ jet.a @ y), rel=1e-14)


@pytest.mark.parametrize("sign", [1.0, -1.0])
@pytest.mark.parametrize("c", [0.3, 0.9, 0.99])
def test_positive_definite_on_and_near_axis(sign, c):
    from frspace.jets import landsberg_candidate_jet

    jet = landsberg_candidate_jet(3, 4, 0.2, c=c, g=1.7)
    b = sign * jet.bup
    perp = np.linalg.svd(jet.b[None, :])[2][-1]
    for tilt in (0.0, 1e-9, 1e-6, 1e-3):
        y = b + tilt * np.linalg.norm(b) * perp
        lam = np.linalg.eigvalsh(metric_tensor(jet, y).gmat)
        assert lam[0] > 0 and np.isfinite(lam).all()


@settings(max_examples=30, deadline=None)
@given(seeds, dims)
def test_closed_forms_match_automatic_differentiation(seed, dim):
    jet = random_jet(dim, seed)
    y = _y(seed, dim)
    cr = core(jet, y)
    assert rel(metric_matrix_closed(jet, cr), metric_tensor(jet, y).gmat) < 1e-12
    assert mbar_closed(cr) == pytest.approx(g_derivative_scalar(jet, y), rel=1e-11, abs=1e-13)


def test_charge_derivative_against_finite_difference():
    jet = random_jet(3, 21)
    y = _y(21, 3)
    eps = 1e-6
    Kp = K_value(with_charge(jet, jet.g + eps), y)
    Km = K_value(with_charge(jet, jet.g - eps), y)
    fd = (np.log(Kp) - np.log(Km)) / (2 * eps)
    assert 0.5 * g_derivative_scalar(jet, y) == pytest.approx(fd, rel=1e-7)


def test_angle_is_continuous_across_b_equal_zero():
    jet = random_jet(3, 2)
    perp = np.linalg.svd(jet.b[None, :])[2][-1]
    vals = [angle_f(jet, perp + t * jet.bup) for t in (-1e-9, 0.0, 1e-9)]
    assert max(vals) - min(vals) < 1e-8


def test_scalars_record():
    jet = random_jet(3, 0)
    K, J, sc = metric_K(jet, _y(0, 3))
    assert K == sc.K and J == sc.J
    assert sc.gplus - sc.gminus == pytest.approx(2 * sc.h)


def test_charge_out_of_range():
    with pytest.raises(ChargeOutOfRange):
        charge_functions(2.0)
