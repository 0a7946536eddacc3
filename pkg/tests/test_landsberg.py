import numpy as np
import pytest

from frspace.cartan import cartan_tensor, cartan_vector
from frspace.errors import PreconditionViolated, RiemannianDegenerate
from frspace.jets import berwald_jet, landsberg_candidate_jet, random_jet
from frspace.landsberg import (
    angular_tensor_particular,
    berwald_verdict,
    cartan_vector_via_e,
    dotA_closed,
    dotA_closed_or_zero,
    dotA_numeric,
    fitted_k,
    landsberg_eval,
    landsberg_to_berwald_probe,
    m_coefficients,
    parallel_map,
    particular_G1,
    particular_G3,
    particular_G3_raw,
    particular_U,
    particular_U_raw,
    resolve_jobs,
    uG3_contraction,
    yG3_angular,
    yG3_numeric,
)
from frspace.metric import covariant_y, metric_tensor
from frspace.spray import spray_derivatives

from conftest import rel

CASES = [(n, s, k) for n in (2, 3, 4, 5) for s in (0, 1) for k in (0.4, -1.1)]


def _y(seed, dim):
    return np.random.default_rng(seed + 3).normal(size=dim)


@pytest.mark.parametrize("n, seed, k", CASES)
def test_particular_case_chain(n, seed, k):
    jet = landsberg_candidate_jet(n, seed, k)
    y = _y(seed, n)
    G1, _, G3 = spray_derivatives(jet, y)
    assert rel(particular_G1(jet, y, k), G1) < 1e-10
    U = particular_U(jet, y, k)
    Ur = particular_U_raw(jet, y, k)
    for a, b in zip(U, Ur):
        assert rel(a, b) < 1e-10
    assert rel(particular_G3_raw(jet, y, k), G3) < 1e-9
    G3e, yG3 = particular_G3(jet, y, k)
    assert rel(G3e, G3) < 1e-9
    yG3n = yG3_numeric(jet, y)
    assert rel(yG3, yG3n) < 1e-9
    assert rel(yG3_angular(jet, y, k), yG3n) < 1e-9
    u = jet.a @ y
    assert rel(uG3_contraction(jet, y, k), np.einsum("i,ikmj->kmj", u, G3)) < 1e-9


@pytest.mark.parametrize("n, seed, k", CASES)
def test_dual_route_landsberg_tensor(n, seed, k):
    jet = landsberg_candidate_jet(n, seed, k)
    y = _y(seed, n)
    _, _, closed = dotA_closed(jet, y, k)
    assert rel(closed, dotA_numeric(jet, y)) < 1e-7


def test_angular_tensor_and_e_form_of_cartan_vector():
    jet = landsberg_candidate_jet(3, 2, 0.5)
    y = _y(2, 3)
    me = metric_tensor(jet, y)
    assert rel(angular_tensor_particular(jet, y), me.hmat) < 1e-12
    assert rel(cartan_vector_via_e(jet, y), cartan_vector(jet, y)[0]) < 1e-12


def test_m2_carries_a_factor_two_relative_to_the_single_factor_variant():
    jet = landsberg_candidate_jet(3, 0, 0.7)
    y = _y(0, 3)
    m1, m2, m2_single = m_coefficients(jet, y)
    assert m2 == 2 * m2_single
    assert np.sign(m1) == -np.sign(jet.g)
    # the single-factor variant does not reproduce the numeric tensor
    A3 = cartan_tensor(jet, y)
    A1, _ = cartan_vector(jet, y)
    wrong = (1 - jet.c**2) * 0.7 * (m1 * A3 + m2_single * np.einsum("i,j,k->ijk", A1, A1, A1))
    assert rel(wrong, dotA_numeric(jet, y)) > 1e-3


def test_landsberg_tensor_vanishes_for_berwald_and_is_symmetric():
    jet = berwald_jet(4, 3)
    y = _y(3, 4)
    assert np.abs(dotA_numeric(jet, y)).max() < 1e-11
    Ad = dotA_numeric(landsberg_candidate_jet(4, 3, 0.9), y)
    for p in [(1, 0, 2), (0, 2, 1), (2, 1, 0)]:
        assert np.allclose(Ad, Ad.transpose(p), atol=1e-12)
    assert np.abs(Ad @ y).max() < 1e-11


def test_landsberg_tensor_against_covariant_definition_on_random_jets():
    # -1/4 y_i G^i_kmj is the contraction of the horizontal derivative of
    # g_ij with y; check its y-orthogonality on a generic jet as well
    jet = random_jet(3, 4)
    y = _y(4, 3)
    Ad = dotA_numeric(jet, y)
    assert np.abs(Ad @ y).max() < 1e-10 * max(1, np.abs(Ad).max())
    yl = covariant_y(jet, y)
    G3 = spray_derivatives(jet, y)[2]
    assert rel(Ad, -0.25 * np.einsum("i,ikmj->kmj", yl, G3)) < 1e-12


def test_preconditions():
    jet = random_jet(3, 0)
    with pytest.raises(PreconditionViolated):
        dotA_closed(jet, np.ones(3), 0.3)
    lj = landsberg_candidate_jet(3, 0, 0.3)
    with pytest.raises(PreconditionViolated):
        dotA_closed(lj, np.ones(3), 0.31)
    z = landsberg_candidate_jet(3, 0, 0.3, g=0.0)
    with pytest.raises(RiemannianDegenerate):
        dotA_closed(z, np.ones(3), 0.3)
    assert np.array_equal(dotA_closed_or_zero(z, np.ones(3), 0.3), np.zeros((3, 3, 3)))


def test_fitted_k_recovers_the_builder_k():
    jet = landsberg_candidate_jet(4, 7, -0.37)
    k, resid = fitted_k(jet)
    assert k == pytest.approx(-0.37, abs=1e-13)
    assert resid < 1e-13


def test_landsberg_eval_record():
    ev = landsberg_eval(landsberg_candidate_jet(3, 1, 0.4), _y(1, 3), 0.4)
    assert rel(ev.Adot_closed, ev.Adot_numeric) < 1e-7
    ev0 = landsberg_eval(landsberg_candidate_jet(3, 1, 0.4, g=0.0), _y(1, 3), 0.4)
    assert ev0.m1 == 0.0 and not ev0.Adot_closed.any()


@pytest.mark.parametrize(
    "jet, verdict",
    [
        (berwald_jet(3, 1), "BERWALD"),
        (berwald_jet(3, 1, g=0.0), "RIEMANNIAN"),
        (landsberg_candidate_jet(3, 1, 0.5), "NOT_BERWALD"),
        (random_jet(3, 1), "NOT_BERWALD"),
    ],
)
def test_berwald_verdict(jet, verdict):
    rep = berwald_verdict(jet, samples=8)
    assert rep["verdict"] == verdict
    assert rep["notable_consistent"]
    if verdict == "BERWALD":
        assert rep["landsberg"] and rep["max_abs_bdot"] < 1e-10
        assert rep["max_spray_minus_riemannian"] < 1e-11
    if verdict == "NOT_BERWALD" and jet.charge_constant:
        assert not rep["landsberg"]


def test_small_probe_grid():
    rep = landsberg_to_berwald_probe([2, 3], [0, 1], [0.0, 0.5], [0.0, 1.0], [0.3, 0.9], n_dirs=3, jobs=1)
    assert len(rep["cells"]) == 2 * 2 * 2 * 2 * 2
    assert rep["zero_cells_match_k0_or_g0"]
    assert rep["max_rel_err_closed_numeric"] < 1e-7
    assert rep["min_norm_nonzero_cells"] > 1e-6
    assert rep["max_norm_zero_cells"] <= 1e-10
    rows = rep["c_scaling"]
    assert rows and all(r["factor_ratio"] > 0 for r in rows)


def _square(v):
    return v * v


def test_parallel_map_preserves_order(monkeypatch):
    assert parallel_map(_square, range(7), jobs=2) == [v * v for v in range(7)]
    monkeypatch.setenv("FRSPACE_JOBS", "3")
    assert resolve_jobs() == 3
    assert resolve_jobs(1) == 1
