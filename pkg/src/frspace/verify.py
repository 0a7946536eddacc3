"""Seeded verification suites over random jets.

Every check draws its own (jet, y) samples from ``rng_for(seed, check_id)``,
so a check's result does not depend on which other checks run or on the
number of worker processes.  A cell passes iff max_residual <= tolerance.
"""

from __future__ import annotations

import datetime as _dt
import json
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from . import taylor as T
from .cartan import (
    axis_vector,
    cartan_closed_form,
    cartan_norm,
    cartan_tensor,
    cartan_vector,
    main_scalar_factorization,
)
from .jets import (
    berwald_jet,
    exact_form_jet,
    landsberg_candidate_jet,
    random_jet,
    with_charge,
)
from .landsberg import (
    angular_tensor_particular,
    cartan_vector_via_e,
    dotA_closed,
    dotA_numeric,
    m_coefficients,
    parallel_map,
    particular_G3,
    particular_G3_raw,
    particular_U,
    particular_U_raw,
    uG3_contraction,
    yG3_angular,
    yG3_numeric,
)
from .metric import (
    core,
    covariant_y,
    eta,
    g_derivative_scalar,
    mbar_closed,
    metric_matrix_closed,
    metric_tensor,
)
from .riemannian import background, riemannian_spray
from .sampling import rng_for
from .spray import (
    U_coefficients,
    U_series,
    bE_expansion,
    covariant_Db,
    covariant_Db_via_gradient,
    dot_b,
    dot_b_definition,
    spray,
    spray_derivatives,
    spray_oracle,
    spray_series,
)

SCHEMA_VERSION = 1
SUITES = ("metric", "cartan", "spray", "landsberg")
PROFILES = ("default", "strict")


def tolerance(exponent, profile: str = "default") -> float:
    """10^-p by default; the strict profile halves the distance to 10^-16."""
    if exponent is None:
        return 0.0
    if profile == "strict":
        exponent = exponent + (16 - exponent) / 2
    elif profile != "default":
        raise ValueError(f"unknown tolerance profile {profile!r}")
    return 10.0 ** (-exponent)


@dataclass(frozen=True)
class Check:
    check_id: str
    formula: str
    exponent: float | None  # None: inequality check, residual must be 0
    kind: str  # sample generator
    fn: object
    min_dim: int = 2
    fixed_dim: int | None = None


def _rel(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))


def _scaled(a, b, scale) -> float:
    return float(np.abs(np.asarray(a) - np.asarray(b)).max() / max(scale, 1e-300))


# sample generators --------------------------------------------------------------------


def _rand_y(rng, dim):
    y = rng.normal(size=dim)
    return y * rng.uniform(0.5, 2.0) / np.linalg.norm(y)


def _near_axis(rng, jet):
    """y within angle ~1e-6 of +b or -b."""
    d = jet.bup / np.linalg.norm(jet.bup)
    d = d + 1e-6 * rng.normal(size=jet.dim)
    return (1.0 if rng.uniform() < 0.5 else -1.0) * d


def _sample(kind, rng, dim, i):
    js = int(rng.integers(0, 2**31 - 1))
    if kind == "random":
        return random_jet(dim, js), _rand_y(rng, dim), None
    if kind == "random_axis":
        # every fourth state lies within ~1e-6 rad of the +-b ray
        jet = random_jet(dim, js)
        y = _near_axis(rng, jet) if i % 4 == 3 else _rand_y(rng, dim)
        return jet, y, None
    if kind == "exact":
        jet = exact_form_jet(dim, js)
        return jet, _rand_y(rng, dim), None
    if kind == "berwald":
        jet = berwald_jet(dim, js)
        return jet, _rand_y(rng, dim), 0.0
    if kind == "particular":
        k = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 1.5))
        g = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 1.8))
        c = float(rng.uniform(0.1, 0.95))
        jet = landsberg_candidate_jet(dim, js, k, c=c, g=g)
        return jet, _rand_y(rng, dim), k
    raise ValueError(kind)


# metric checks --------------------------------------------------------------------------


def _c_L2(jet, y, _):
    cr = core(jet, y)
    return abs(cr.L**2 + cr.h**2 * cr.ts.b**2 - cr.B) / cr.B


def _c_det(jet, y, _):
    me = metric_tensor(jet, y)
    cr = core(jet, y)
    n = jet.dim
    rhs = (cr.nu / cr.ts.q) * (cr.K**2 / cr.B) ** n * np.linalg.det(jet.a)
    return abs(me.det_g / rhs - 1.0)


def _c_etaB(jet, y, _):
    cr = core(jet, jet.bup)
    return abs(eta(jet) * cr.B - jet.c**2)


def _c_g0(jet, y, _):
    j0 = with_charge(jet, 0.0, np.zeros(jet.dim))
    return _scaled(metric_tensor(j0, y).gmat, jet.a, np.abs(jet.a).max())


def _c_ycontract(jet, y, _):
    K = core(jet, y).K
    return abs(covariant_y(jet, y) @ y - K**2) / K**2


def _c_homog_g(jet, y, _):
    g1 = metric_tensor(jet, y).gmat
    return max(_rel(metric_tensor(jet, lam * y).gmat, g1) for lam in (0.5, 2.0, 10.0))


def _c_spd(jet, y, _):
    lam = np.linalg.eigvalsh(metric_tensor(jet, y).gmat)
    # violations score at least 1 so that they can never pass a zero tolerance
    return 0.0 if lam[0] > 0 else 1.0 - lam[0] / abs(lam[-1])


def _c_gij_closed(jet, y, _):
    return _rel(metric_matrix_closed(jet, core(jet, y)), metric_tensor(jet, y).gmat)


def _c_mbar_closed(jet, y, _):
    ad = g_derivative_scalar(jet, y)
    return abs(mbar_closed(core(jet, y)) - ad) / max(1.0, abs(ad))


def _c_ylow_fd(jet, y, _):
    h = 1e-6
    fd = np.empty(jet.dim)
    for k in range(jet.dim):
        e = np.zeros(jet.dim)
        e[k] = h
        fd[k] = (core(jet, y + e).K ** 2 - core(jet, y - e).K ** 2) / (4 * h)
    yl = covariant_y(jet, y)
    return _scaled(yl, fd, max(1.0, np.abs(yl).max()))


# cartan checks ---------------------------------------------------------------------------


def _c_cartan_closed(jet, y, _):
    return _rel(cartan_closed_form(jet, y), cartan_tensor(jet, y))


def _c_trace(jet, y, _):
    A3 = cartan_tensor(jet, y)
    ginv = metric_tensor(jet, y).ginv
    A1, _x = cartan_vector(jet, y)
    return _rel(A1, np.einsum("jk,ijk->i", ginv, A3))


def _c_norm(jet, y, _):
    A1, _x = cartan_vector(jet, y)
    direct = A1 @ metric_tensor(jet, y).ginv @ A1
    return abs(cartan_norm(jet, y) - direct) / direct


def _c_Xbound(jet, y, _):
    _a, X = cartan_vector(jet, y)
    return 0.0 if jet.dim * X < 1.0 else 1.0 + (jet.dim * X - 1.0)


def _c_A_orth(jet, y, _):
    A3 = cartan_tensor(jet, y)
    return _scaled(A3 @ y, 0.0, np.abs(A3).max() * np.linalg.norm(y))


def _c_e_orth(jet, y, _):
    e = axis_vector(jet, y)
    return abs(e @ y) / (np.abs(e).max() * np.linalg.norm(y))


def _c_main_scalar(jet, y, _):
    A3 = cartan_tensor(jet, y)
    return _scaled(A3, main_scalar_factorization(jet, y), np.abs(A3).max())


def _c_cartan_e(jet, y, _):
    A1, _x = cartan_vector(jet, y)
    return _rel(cartan_vector_via_e(jet, y), A1)


# spray checks -----------------------------------------------------------------------------


def _c_oracle(jet, y, _):
    G, _E = spray(jet, y)
    return _rel(G, spray_oracle(jet, y))


def _c_A42(jet, y, _):
    bg = background(jet)
    cr = core(jet, y)
    G, E, GR = spray_series(jet, y, 0, bg)
    lhs = jet.b @ (G - GR)
    ys = y @ bg.nabla_b @ y
    sigma = jet.bup @ bg.f_skew @ y
    q, nu, b, g = cr.ts.q, cr.nu, cr.ts.b, jet.g
    rhs = g / nu * ys * (1 - jet.c**2) * b - g * q * q / nu * sigma + jet.b @ E
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def _c_A41(jet, y, _):
    _G, E = spray(jet, y)
    bE = jet.b @ E
    return abs(bE_expansion(jet, y) - bE) / max(1.0, abs(bE))


def _c_bdot(jet, y, _):
    v = dot_b(jet, y)
    return abs(v - dot_b_definition(jet, y)) / max(1.0, abs(v))


def _c_Db(jet, y, _):
    a = covariant_Db(jet, y)
    return _scaled(a, covariant_Db_via_gradient(jet, y), max(1.0, np.abs(a).max()))


def _c_Db_contract(jet, y, _):
    v = dot_b(jet, y)
    return abs(covariant_Db(jet, y) @ y - v) / max(1.0, abs(v))


def _c_homog_spray(jet, y, _):
    G1, G2, G3 = spray_derivatives(jet, y)
    G, _E = spray(jet, y)
    worst = 0.0
    for lam in (0.5, 2.0, 10.0):
        H1, H2, H3 = spray_derivatives(jet, lam * y)
        Hs, _E = spray(jet, lam * y)
        worst = max(
            worst,
            _rel(Hs, lam**2 * G),
            _rel(H1, lam * G1),
            _rel(H2, G2),
            _rel(H3, G3 / lam),
        )
    return worst


def _c_euler(jet, y, _):
    G, _E = spray(jet, y)
    G1, G2, G3 = spray_derivatives(jet, y)
    return max(
        _rel(G1 @ y, 2 * G),
        _rel(G2 @ y, G1),
        _scaled(G3 @ y, 0.0, np.abs(G2).max()),
    )


def _exact_parts(jet, y):
    bg = background(jet)
    ts_cr = core(jet, y)
    U1, U2, eta2 = U_coefficients(jet, y, bg)
    G1, G2, _G3 = spray_derivatives(jet, y)
    rup = jet.ainv @ jet.r
    return bg, ts_cr, U1, U2, rup, G1, G2


def _c_A52(jet, y, _):
    bg, cr, U1, U2, rup, G1, G2 = _exact_parts(jet, y)
    ys = y @ bg.nabla_b @ y
    g = jet.g
    closed = g * np.outer(cr.ts.vvec, U1) + g * ys / cr.nu * rup + 2 * np.einsum("ikm,m->ik", bg.gamma, y)
    return _rel(closed, G1)


def _c_A56(jet, y, _):
    bg, cr, U1, U2, rup, G1, G2 = _exact_parts(jet, y)
    g = jet.g
    closed = (
        g * np.einsum("k,im->ikm", U1, rup)
        + g * np.einsum("m,ik->ikm", U1, rup)
        + g * np.einsum("km,i->ikm", U2, cr.ts.vvec)
        + 2 * bg.gamma
    )
    return _rel(closed, G2)


def _c_A57(jet, y, _):
    bg, cr, U1, U2, rup, G1, G2 = _exact_parts(jet, y)
    g, b = jet.g, cr.ts.b
    lhs = np.einsum("i,ikm->km", jet.b, G2)
    rhs = (1 - jet.c**2) * (g * np.outer(U1, jet.b) + g * np.outer(jet.b, U1) + g * U2 * b) + 2 * np.einsum(
        "i,ikm->km", jet.b, bg.gamma
    )
    return _rel(rhs, lhs)


def _c_A58(jet, y, _):
    bg, cr, U1, U2, rup, G1, G2 = _exact_parts(jet, y)
    g, v, q = jet.g, cr.ts.v, cr.ts.q
    u = jet.a @ y
    lhs = np.einsum("i,ikm->km", u, G2)
    rhs = g * np.outer(U1, v) + g * np.outer(v, U1) + g * U2 * q * q + 2 * np.einsum("i,ikm->km", u, bg.gamma)
    return _rel(rhs, lhs)


def _c_Ukm(jet, y, _):
    _U1, U2, _eta = U_coefficients(jet, y)
    return _rel(U2, T.derivatives(U_series(jet, T.variables(y, 1)), 1))


def _c_berwald_spray(jet, y, _):
    G, _E = spray(jet, y)
    GR = riemannian_spray(jet, y, background(jet).gamma)
    return max(_rel(G, GR), _rel(spray_oracle(jet, y), GR))


def _c_berwald_bdot(jet, y, _):
    return abs(dot_b(jet, y)) / max(1.0, np.linalg.norm(y) ** 2)


# landsberg checks ----------------------------------------------------------------------------


def _c_dual_route(jet, y, k):
    _m1, _m2, closed = dotA_closed(jet, y, k)
    return _rel(dotA_numeric(jet, y), closed)


def _c_U_particular(jet, y, k):
    U1, U2, U3 = particular_U(jet, y, k)
    Us = U_series(jet, T.variables(y, 2))
    return max(_rel(U1, T.values(Us)), _rel(U2, T.derivatives(Us, 1)), _rel(U3, T.derivatives(Us, 2)))


def _c_U_raw(jet, y, k):
    U1, U2, U3 = particular_U_raw(jet, y, k)
    Us = U_series(jet, T.variables(y, 2))
    return max(_rel(U1, T.values(Us)), _rel(U2, T.derivatives(Us, 1)), _rel(U3, T.derivatives(Us, 2)))


def _c_G3_raw(jet, y, k):
    return _rel(particular_G3_raw(jet, y, k), spray_derivatives(jet, y)[2])


def _c_G3_particular(jet, y, k):
    G3, _yG3 = particular_G3(jet, y, k)
    return _rel(G3, spray_derivatives(jet, y)[2])


def _c_yG3(jet, y, k):
    _G3, yG3 = particular_G3(jet, y, k)
    return _rel(yG3, yG3_numeric(jet, y))


def _c_uG3(jet, y, k):
    G3 = spray_derivatives(jet, y)[2]
    return _rel(uG3_contraction(jet, y, k), np.einsum("i,ikmj->kmj", jet.a @ y, G3))


def _c_angular(jet, y, k):
    return _rel(angular_tensor_particular(jet, y), metric_tensor(jet, y).hmat)


def _c_yG3_angular(jet, y, k):
    return _rel(yG3_angular(jet, y, k), yG3_numeric(jet, y))


def _c_berwald_Adot(jet, y, _):
    return float(np.abs(dotA_numeric(jet, y)).max()) / max(1.0, float(np.abs(cartan_tensor(jet, y)).max()))


def _c_m1_sign(jet, y, k):
    m1, _m2, _p = m_coefficients(jet, y)
    return 0.0 if np.sign(m1) == -np.sign(jet.g) else 1.0


def _c_Adot_sym(jet, y, k):
    Ad = dotA_numeric(jet, y)
    scale = max(np.abs(Ad).max(), 1e-300) * max(1.0, np.linalg.norm(y))
    perms = [(0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    asym = max(float(np.abs(Ad - Ad.transpose(p)).max()) for p in perms) / scale
    return max(asym, float(np.abs(Ad @ y).max()) / scale)


CHECKS: dict[str, tuple[Check, ...]] = {
    "metric": (
        Check("metric.characteristic_form", "L^2 + h^2 b^2 = B", 13, "random_axis", _c_L2),
        Check("metric.determinant", "det(g_ij) = (nu/q) (K^2/B)^N det(a_ij)", 10, "random_axis", _c_det),
        Check("metric.eta_B_on_axis", "eta B = c^2 at y^i = b^i", 13, "random_axis", _c_etaB),
        Check("metric.riemannian_limit", "g_ij = a_ij when g = 0", 12, "random_axis", _c_g0),
        Check("metric.y_low_contraction", "y_i y^i = K^2 with y_i = (u_i + g q b_i) K^2/B", 13, "random_axis", _c_ycontract),
        Check("metric.y_low_gradient", "y_i = (1/2) dK^2/dy^i (central differences)", 8, "random_axis", _c_ylow_fd),
        Check("metric.g_homogeneity", "g_ij(x, lambda y) = g_ij(x, y)", 12, "random_axis", _c_homog_g),
        Check("metric.positive_definite", "g_ij positive-definite, including y near +-b", None, "random_axis", _c_spd),
        Check("metric.g_closed_form", "g_ij = (a_ij + g b_i v_j/q) K^2/B + W_i d(K^2/B)/dy^j", 12, "random_axis", _c_gij_closed),
        Check("metric.charge_derivative", "dK/dg = (1/2) M K, hand derivative vs AD", 12, "random_axis", _c_mbar_closed),
    ),
    "cartan": (
        Check(
            "cartan.closed_form",
            "A_ijk = X[A_i h_jk + A_j h_ik + A_k h_ij - (N+1-1/X) A_i A_j A_k / A^h A_h]",
            9,
            "random",
            _c_cartan_closed,
        ),
        Check("cartan.trace_vector", "A_i = g^{jk} A_ijk = (Kg/(2qB)) (1/X) (q^2 b_i - b v_i)", 9, "random", _c_trace),
        Check("cartan.norm", "A^h A_h = (g^2/4) (1/X^2) (N + 1 - 1/X)", 9, "random", _c_norm),
        Check("cartan.X_bound", "1/X = N + (1 - c^2) B/(q nu) > N", None, "random", _c_Xbound),
        Check("cartan.y_orthogonal", "A_ijk y^k = 0", 11, "random", _c_A_orth),
        Check("cartan.e_orthogonal", "e_k y^k = 0 with e_k = (b/q^2) v_k - b_k", 12, "random", _c_e_orth),
        Check("cartan.vector_via_e", "A_i = -(K g q/(2B)) (1/X) e_i", 9, "random", _c_cartan_e),
        Check("cartan.main_scalar", "A_ijk = I a_i a_j a_k, I^2 = A^h A_h (N = 2)", 9, "random", _c_main_scalar, fixed_dim=2),
    ),
    "spray": (
        Check(
            "spray.christoffel_oracle",
            "G^i = (g/nu)((ys) + g q sigma) v^i - g q f^i + E^i + a^i_nm y^n y^m = gamma^i_nm y^n y^m",
            8,
            "random_axis",
            _c_oracle,
        ),
        Check(
            "spray.b_contraction",
            "b_k (G^k - a^k_mn y^m y^n) = (g/nu)(ys)(1-c^2) b - (g q^2/nu) sigma + b_k E^k",
            9,
            "random_axis",
            _c_A42,
        ),
        Check("spray.bE_expansion", "b_h E^h = b M (yg) + (q^2/B)(yg) D/nu - (M/2)[(Bq/nu)(bg) - (g/nu) D (yg)], D = c^2 S^2 - b^2", 9, "random_axis", _c_A41),
        Check("spray.bdot_two_routes", "(ys) - (G^k - a^k_mn y^m y^n) b_k = (q/nu)(ys) + (g q^2/nu) sigma - b_k E^k", 11, "random_axis", _c_bdot),
        Check(
            "spray.Db_two_routes",
            "y^h nabla_h b_n - (G^k_n/2 - a^k_nh y^h) b_k = (1/2) y^h (nabla_h b_n - nabla_n b_h) + (1/2) d(Db)/dy^n",
            10,
            "random_axis",
            _c_Db,
        ),
        Check("spray.Db_contraction", "Db_n y^n = b'", 10, "random_axis", _c_Db_contract),
        Check("spray.homogeneity", "G, G_k, G_km, G_kmj homogeneous of degree 2, 1, 0, -1", 10, "random_axis", _c_homog_spray),
        Check("spray.euler", "G^i_k y^k = 2 G^i, G^i_km y^m = G^i_k, G^i_kmj y^j = 0", 10, "random_axis", _c_euler),
        Check("spray.U_derivative", "U_km = dU_k/dy^m", 10, "exact", _c_Ukm),
        Check("spray.exact_first_derivative", "G^i_k = g U_k v^i + g (ys)/nu r^i_k + 2 a^i_km y^m", 9, "exact", _c_A52),
        Check(
            "spray.exact_second_derivative",
            "G^i_km = g U_k r^i_m + g U_m r^i_k + g U_km v^i + 2 a^i_km",
            9,
            "exact",
            _c_A56,
        ),
        Check(
            "spray.b_second_contraction",
            "b_i G^i_km = (1-c^2)(g U_k b_m + g U_m b_k + g U_km b) + 2 b_i a^i_km",
            9,
            "exact",
            _c_A57,
        ),
        Check(
            "spray.u_second_contraction",
            "u_i G^i_km = g U_k v_m + g U_m v_k + g U_km q^2 + 2 u_i a^i_km",
            9,
            "exact",
            _c_A58,
        ),
        Check("spray.berwald", "G^i = a^i_nm y^n y^m in the Berwald case", 11, "berwald", _c_berwald_spray),
        Check("spray.berwald_bdot", "b' = 0 in the Berwald case", 11, "berwald", _c_berwald_bdot),
    ),
    "landsberg": (
        Check(
            "landsberg.dual_route",
            "-1/4 y_i G^i_kmj = (1-c^2) k (m1 A_kmj + m2 A_k A_m A_j)",
            7,
            "particular",
            _c_dual_route,
        ),
        Check("landsberg.U_e_basis", "U_k, U_km, U_kmj in the e_k / eta_km basis", 8, "particular", _c_U_particular),
        Check("landsberg.U_nu_basis", "U_k, U_km, U_kmj in the nu_k / v_k / eta_km basis", 8, "particular", _c_U_raw),
        Check(
            "landsberg.G3_raw",
            "G^i_kmj = g (U_kj r^i_m + U_mj r^i_k + U_km r^i_j) + g U_kmj v^i",
            8,
            "particular",
            _c_G3_raw,
        ),
        Check("landsberg.G3_eta_basis", "G^i_kmj with U_kmj expanded in eta_km and e_k", 8, "particular", _c_G3_particular),
        Check(
            "landsberg.yG3",
            "y_i G^i_kmj = -(1-c^2) k g^2 (q^2/nu^2) (K^2/B) (eta_kj e_m + eta_mj e_k + eta_mk e_j)",
            8,
            "particular",
            _c_yG3,
        ),
        Check("landsberg.uG3", "u_i G^i_kmj = g (U_kj v_m + U_mj v_k + U_km v_j) + g U_kmj q^2", 8, "particular", _c_uG3),
        Check("landsberg.angular_tensor", "h_ij = (K^2/B)(eta_ij + (q^2/B) e_i e_j)", 8, "particular", _c_angular),
        Check("landsberg.yG3_angular", "y_i G^i_kmj through h_kj and e_k", 8, "particular", _c_yG3_angular),
        Check("landsberg.berwald_vanishing", "dA_kmj = 0 in the Berwald case", 11, "berwald", _c_berwald_Adot),
        Check("landsberg.m1_sign", "m1 = -g q B/(2 K nu^2) has the sign of -g", None, "particular", _c_m1_sign),
        Check("landsberg.Adot_symmetry", "dA_kmj totally symmetric and dA_kmj y^j = 0", 10, "particular", _c_Adot_sym),
    ),
}


def all_checks(suite: str) -> tuple[Check, ...]:
    if suite == "all":
        return tuple(c for s in SUITES for c in CHECKS[s])
    if suite not in CHECKS:
        raise ValueError(f"unknown suite {suite!r}")
    return CHECKS[suite]


def _run_check(args) -> dict:
    check, dim, samples, seed, profile = args
    dim = check.fixed_dim or dim
    rng = rng_for(seed, check.check_id)
    worst = 0.0
    for i in range(samples):
        jet, y, k = _sample(check.kind, rng, dim, i)
        r = float(check.fn(jet, y, k))
        worst = max(worst, r if np.isfinite(r) else float("inf"))
    tol = tolerance(check.exponent, profile)
    return {
        "check_id": check.check_id,
        "paper_ref": check.formula,
        "dim": dim,
        "samples": samples,
        "max_residual": worst,
        "tolerance": tol,
        "pass": bool(worst <= tol),
    }


@dataclass
class VerificationReport:
    suite: str
    seed: int
    dim: int
    samples: int
    tol_profile: str
    cells: list
    timestamp: str
    version: str = __version__
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.cells)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def failures(self) -> list:
        return [c for c in self.cells if not c["pass"]]


def run_verification(
    suite: str = "all",
    dim: int = 3,
    samples: int = 200,
    seed: int = 0,
    tol_profile: str = "default",
    jobs=None,
) -> VerificationReport:
    if dim < 2:
        raise ValueError("dim must be at least 2")
    if samples < 1:
        raise ValueError("samples must be positive")
    tolerance(1, tol_profile)  # validates the profile name
    checks = all_checks(suite)
    cells = parallel_map(_run_check, [(c, dim, samples, seed, tol_profile) for c in checks], jobs)
    return VerificationReport(
        suite=suite,
        seed=seed,
        dim=dim,
        samples=samples,
        tol_profile=tol_profile,
        cells=cells,
        timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    )
