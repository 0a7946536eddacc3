import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frspace.cartan import (
    axis_vector,
    cartan,
    cartan_closed_form,
    cartan_norm,
    cartan_tensor,
    cartan_vector,
    inverse_X,
    main_scalar,
    main_scalar_factorization,
)
from frspace.errors import DimensionNotTwo, RiemannianDegenerate
from frspace.jets import random_jet, with_charge
from frspace.metric import metric_tensor

from conftest import rel

seeds = st.integers(0, 10_000)
dims = st.integers(2, 5)


def _y(seed, dim):
    return np.random.default_rng(seed + 5).normal(size=dim)


@pytest.mark.parametrize("case", ["random3", "random2", "berwald3"])
def test_cartan_tensor_matches_frozen_oracle(frozen, case):
    c = frozen[case]
    assert rel(cartan_tensor(c["jet"], c["y"]), c["A"]) < 1e-11


@settings(max_examples=30, deadline=None)
@given(seeds, dims)
def test_closed_form_tensor(seed, dim):
    jet = random_jet(dim, seed)
    y = _y(seed, dim)
    assert rel(cartan_closed_form(jet, y), cartan_tensor(jet, y)) < 1e-9


@settings(max_examples=30, deadline=None)
@given(seeds, dims)
def test_vector_and_norm_are_contractions_of_the_tensor(seed, dim):
    jet = random_jet(dim, seed)
    y = _y(seed, dim)
    A3 = cartan_tensor(jet, y)
    ginv = metric_tensor(jet, y).ginv
    A1_direct = np.einsum("jk,ijk->i", ginv, A3)
    A1, X = cartan_vector(jet, y)
    assert rel(A1, A1_direct) < 1e-9
    assert cartan_norm(jet, y) == pytest.approx(A1_direct @ ginv @ A1_direct, rel=1e-9)
    assert dim * X < 1.0


@settings(max_examples=30, deadline=None)
@given(seeds, dims)
def test_orthogonality(seed, dim):
    jet = random_jet(dim, seed)
    y = _y(seed, dim)
    A3 = cartan_tensor(jet, y)
    assert np.abs(A3 @ y).max() <= 1e-11 * max(1.0, np.abs(A3).max()) * np.linalg.norm(y)
    assert abs(axis_vector(jet, y) @ y) <= 1e-12 * np.linalg.norm(y) * max(1, np.abs(jet.b).max())


def test_tensor_is_zero_homogeneous():
    # A_ijk = (K/2) dg_ij/dy^k: K has degree 1, dg_ij/dy^k degree -1
    jet = random_jet(3, 1)
    y = _y(1, 3)
    assert rel(cartan_tensor(jet, 3.0 * y), cartan_tensor(jet, y)) < 1e-12


def test_main_scalar_factorization_in_two_dimensions():
    for seed in range(10):
        jet = random_jet(2, seed)
        y = _y(seed, 2)
        assert rel(main_scalar_factorization(jet, y), cartan_tensor(jet, y)) < 1e-9
        assert main_scalar(jet, y) ** 2 == pytest.approx(cartan_norm(jet, y), rel=1e-12)


def test_main_scalar_needs_two_dimensions_and_nonzero_charge():
    with pytest.raises(DimensionNotTwo):
        main_scalar(random_jet(3, 0), np.ones(3))
    j0 = with_charge(random_jet(2, 0), 0.0)
    with pytest.raises(RiemannianDegenerate):
        main_scalar_factorization(j0, np.array([1.0, 0.3]))


def test_vanishes_in_riemannian_case():
    j0 = with_charge(random_jet(3, 4), 0.0)
    y = _y(4, 3)
    assert np.abs(cartan_tensor(j0, y)).max() < 1e-13
    assert np.array_equal(cartan_closed_form(j0, y), np.zeros((3, 3, 3)))


def test_vector_vanishes_on_the_axis_ray():
    jet = random_jet(3, 8)
    for s in (1.0, -2.0):
        A1, _ = cartan_vector(jet, s * jet.bup)
        assert np.abs(A1).max() < 1e-14
        assert inverse_X(jet, s * jet.bup) == pytest.approx(jet.dim + 1.0, abs=1e-12)


def test_record():
    jet = random_jet(2, 3)
    ev = cartan(jet, _y(3, 2))
    assert ev.I is not None and ev.A3.shape == (2, 2, 2)
    assert np.allclose(metric_tensor(jet, _y(3, 2)).gmat @ ev.A1up, ev.A1)
