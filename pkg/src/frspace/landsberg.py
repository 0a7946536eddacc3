"""Particular case g = const, nabla_i b_j = k r_ij, and Berwald/Landsberg tests.

Closed forms here are checked against the AD spray derivatives; the
Landsberg tensor used throughout is dA_kmj = -1/4 y_i G^i_kmj.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import taylor as T
from .cartan import AA_FLOOR, cartan_norm, cartan_tensor, cartan_vector
from .errors import PreconditionViolated, RiemannianDegenerate
from .jets import PointJet, landsberg_candidate_jet, tangent_state
from .metric import core, covariant_y, metric_tensor
from .riemannian import background, riemannian_spray
from .sampling import directions
from .spray import dot_b, spray, spray_series

PRECONDITION_TOL = 1e-10
BERWALD_TOL = 1e-10
LANDSBERG_REL_TOL = 1e-9
ZERO_TOL = 1e-10


@dataclass(frozen=True)
class LandsbergEval:
    k: float
    m1: float
    m2: float
    Adot_closed: np.ndarray
    Adot_numeric: np.ndarray
    yG3: np.ndarray


def _outer3(a, b, c):
    return np.einsum("i,j,k->ijk", a, b, c)


def fitted_k(jet: PointJet, nabla_b=None):
    """Least-squares k in nabla b = k r and the residual max|nabla b - k r|."""
    nabla_b = background(jet).nabla_b if nabla_b is None else nabla_b
    r = jet.r
    k = float(np.sum(nabla_b * r) / np.sum(r * r))
    return k, float(np.abs(nabla_b - k * r).max())


def _require_particular(jet: PointJet, k: float):
    if not jet.charge_constant:
        raise PreconditionViolated("particular case needs dg = 0")
    nb = background(jet).nabla_b
    resid = np.abs(nb - k * jet.r).max()
    if resid > PRECONDITION_TOL * max(1.0, abs(k)):
        raise PreconditionViolated(f"nabla b differs from k r by {resid:.3e}")


class _Particular:
    """Scalars and vectors shared by the particular-case formulas."""

    def __init__(self, jet: PointJet, y, k: float):
        _require_particular(jet, k)
        y = np.asarray(y, dtype=float)
        ts = tangent_state(jet, y)
        cr = core(jet, y)
        self.n = jet.dim
        self.k = k
        self.g = jet.g
        self.c2 = jet.c**2
        self.b = ts.b
        self.q = ts.q
        self.v = ts.v
        self.vvec = ts.vvec
        self.u = ts.u
        self.bcov = jet.b
        self.nu = cr.nu
        self.K = cr.K
        self.B = cr.B
        self.nu_k = ts.v / ts.q + (1.0 - self.c2) * jet.g * jet.b
        self.e = ts.b / ts.q**2 * ts.v - jet.b
        self.eta = jet.r - np.outer(ts.v, ts.v) / ts.q**2
        self.r = jet.r
        self.ainv = jet.ainv
        self.y = y


# U coefficients ------------------------------------------------------------------


def particular_U(jet: PointJet, y, k: float):
    """(U_k, U_km, U_kmj) in the e_k basis."""
    P = _Particular(jet, y, k)
    q, nu, b, g, c2, e = P.q, P.nu, P.b, P.g, P.c2, P.e
    U1 = k * q**2 * (2 * nu - q) / (nu**2 * b) * e + k * q**2 / (nu * b) * P.bcov
    U2 = k * (2 * nu - q) / nu**2 * P.eta + 2 * k * (1 - c2) ** 2 * g**2 * q**2 / nu**3 * np.outer(e, e)
    U3 = _U3_from_U2(P, U2)
    return U1, U2, U3


def _U3_from_U2(P, U2):
    q, nu, b, g, c2, e, v = P.q, P.nu, P.b, P.g, P.c2, P.e, P.v
    k = P.k
    vU = np.einsum("k,mj->kmj", v, U2)
    # v_k U_mj + v_m U_kj + v_j U_km
    vsum = vU + vU.transpose(1, 0, 2) + vU.transpose(1, 2, 0)
    ee = np.einsum("kj,m->kmj", P.eta, e)
    # eta_kj e_m + eta_mj e_k + eta_mk e_j
    esum = ee + ee.transpose(1, 0, 2) + np.einsum("mk,j->kmj", P.eta, e)
    return (
        -vsum / q**2
        + 2 * k * (1 - c2) ** 2 * g**2 * b / nu**3 * esum
        + 6 * k * (1 - c2) ** 3 * g**3 * q**2 / nu**4 * _outer3(e, e, e)
    )


def particular_U_raw(jet: PointJet, y, k: float):
    """(U_k, U_km, U_kmj) in the nu_k, v_k, eta_km form."""
    P = _Particular(jet, y, k)
    q, nu, nk, v, eta = P.q, P.nu, P.nu_k, P.v, P.eta
    U1 = -k * q**2 / nu**2 * nk + 2 * k / nu * v
    U2 = (
        2 * k * q**2 / nu**3 * np.outer(nk, nk)
        - 2 * k / nu**2 * (np.outer(nk, v) + np.outer(v, nk))
        - k * q / nu**2 * eta
        + 2 * k / nu * P.r
    )
    nnv = _outer3(nk, nk, v)
    # nu_k nu_m v_j + nu_j nu_m v_k + nu_k nu_j v_m
    t2 = nnv + nnv.transpose(2, 1, 0) + nnv.transpose(0, 2, 1)
    ne = np.einsum("m,kj->kmj", nk, eta)
    # nu_m eta_kj + nu_k eta_mj + nu_j eta_km
    t3 = ne + np.einsum("k,mj->kmj", nk, eta) + np.einsum("j,km->kmj", nk, eta)
    nvv = np.einsum("m,k,j->kmj", nk, v, v)
    # nu_m v_k v_j + nu_k v_m v_j + nu_j v_k v_m
    t4 = nvv + np.einsum("k,m,j->kmj", nk, v, v) + np.einsum("j,k,m->kmj", nk, v, v)
    ev = np.einsum("km,j->kmj", eta, v)
    # eta_km v_j + eta_jm v_k + eta_kj v_m
    t5 = ev + np.einsum("jm,k->kmj", eta, v) + np.einsum("kj,m->kmj", eta, v)
    U3 = (
        -6 * k * q**2 / nu**4 * _outer3(nk, nk, nk)
        + 4 * k / nu**3 * t2
        + 2 * k * (q - nu) / nu**3 * t3
        - 2 * k / (q**2 * nu**2) * t4
        - k / (q * nu**2) * t5
    )
    return U1, U2, U3


def particular_G1(jet: PointJet, y, k: float) -> np.ndarray:
    """G^i_k = g U_k v^i + g k q^2/nu r^i_k + 2 a^i_km y^m."""
    P = _Particular(jet, y, k)
    U1, _, _ = particular_U_raw(jet, y, k)
    gamma = background(jet).gamma
    return (
        P.g * np.outer(P.vvec, U1)
        + P.g * k * P.q**2 / P.nu * (P.ainv @ P.r)
        + 2 * np.einsum("ikm,m->ik", gamma, P.y)
    )


# third derivatives of the spray ------------------------------------------------------


def particular_G3_raw(jet: PointJet, y, k: float) -> np.ndarray:
    """G^i_kmj = g (U_kj r^i_m + U_mj r^i_k + U_km r^i_j) + g U_kmj v^i."""
    P = _Particular(jet, y, k)
    _, U2, U3 = particular_U_raw(jet, y, k)
    rup = P.ainv @ P.r
    return P.g * _g3_assemble(U2, U3, rup, P.vvec)


def _g3_assemble(U2, U3, up, vvec):
    t = np.einsum("kj,im->ikmj", U2, up)
    t = t + np.einsum("mj,ik->ikmj", U2, up) + np.einsum("km,ij->ikmj", U2, up)
    return t + np.einsum("kmj,i->ikmj", U3, vvec)


def particular_G3(jet: PointJet, y, k: float):
    """G^i_kmj in the eta/e basis and the contraction y_i G^i_kmj."""
    P = _Particular(jet, y, k)
    _, U2, _ = particular_U(jet, y, k)
    q, nu, b, g, c2, e = P.q, P.nu, P.b, P.g, P.c2, P.e
    etaup = P.ainv @ P.eta
    esum = _esum(P.eta, e)
    bracket = 2 * k * (1 - c2) ** 2 * g**2 * b / nu**3 * esum + 6 * k * (1 - c2) ** 3 * g**3 * q**2 / nu**4 * _outer3(e, e, e)
    t = np.einsum("kj,im->ikmj", U2, etaup)
    t = t + np.einsum("mj,ik->ikmj", U2, etaup) + np.einsum("km,ij->ikmj", U2, etaup)
    G3 = g * t + g * np.einsum("kmj,i->ikmj", bracket, P.vvec)
    yG3 = -(1 - c2) * k * g**2 * q**2 / nu**2 * esum * P.K**2 / P.B
    return G3, yG3


def _esum(mat, e):
    """mat_kj e_m + mat_mj e_k + mat_mk e_j."""
    return np.einsum("kj,m->kmj", mat, e) + np.einsum("mj,k->kmj", mat, e) + np.einsum("mk,j->kmj", mat, e)


def uG3_contraction(jet: PointJet, y, k: float) -> np.ndarray:
    """u_i G^i_kmj = g (U_kj v_m + U_mj v_k + U_km v_j) + g U_kmj q^2."""
    P = _Particular(jet, y, k)
    _, U2, U3 = particular_U_raw(jet, y, k)
    t = np.einsum("kj,m->kmj", U2, P.v) + np.einsum("mj,k->kmj", U2, P.v) + np.einsum("km,j->kmj", U2, P.v)
    return P.g * (t + U3 * P.q**2)


def angular_tensor_particular(jet: PointJet, y) -> np.ndarray:
    """h_ij = (K^2/B) (eta_ij + (q^2/B) e_i e_j)."""
    y = np.asarray(y, dtype=float)
    cr = core(jet, y)
    ts = cr.ts
    e = ts.b / ts.q**2 * ts.v - jet.b
    eta = jet.r - np.outer(ts.v, ts.v) / ts.q**2
    return cr.K**2 / cr.B * (eta + ts.q**2 / cr.B * np.outer(e, e))


def yG3_angular(jet: PointJet, y, k: float) -> np.ndarray:
    """y_i G^i_kmj rewritten with h_kj and e_k."""
    P = _Particular(jet, y, k)
    h = metric_tensor(jet, y).hmat
    q, nu, g, c2, e, B = P.q, P.nu, P.g, P.c2, P.e, P.B
    return (
        -(1 - c2) * k * g**2 * q**2 / nu**2 * _esum(h, e)
        + (1 - c2) * k * 3 * g**2 * q**4 / (B * nu**2) * _outer3(e, e, e) * P.K**2 / B
    )


def cartan_vector_via_e(jet: PointJet, y) -> np.ndarray:
    """A_i = -(K g q / (2B)) (1/X) e_i."""
    y = np.asarray(y, dtype=float)
    cr = core(jet, y)
    ts = cr.ts
    e = ts.b / ts.q**2 * ts.v - jet.b
    invX = jet.dim + (1.0 - jet.c**2) * cr.B / (ts.q * cr.nu)
    return -cr.K * jet.g * ts.q / (2 * cr.B) * invX * e


# Landsberg tensor --------------------------------------------------------------------


def m_coefficients(jet: PointJet, y):
    """(m1, m2, m2_single_factor).

    m1 = -g q B / (2 K nu^2).  Substituting the e-form of A_i into the
    angular-tensor form of y_i G^i_kmj gives m2 = -2 m1 X (N+1-1/X) / A^h A_h;
    the single-factor variant is returned third for comparison.
    """
    y = np.asarray(y, dtype=float)
    cr = core(jet, y)
    q, B, K, nu = cr.ts.q, cr.B, cr.K, cr.nu
    m1 = -jet.g * q * B / (2 * K * nu**2)
    AA = cartan_norm(jet, y)
    if AA < AA_FLOOR:
        raise RiemannianDegenerate("m2 needs A^h A_h > 0 (g != 0)")
    _, X = cartan_vector(jet, y)
    single = -m1 * X * (jet.dim + 1 - 1 / X) / AA
    return float(m1), float(2 * single), float(single)


def dotA_closed(jet: PointJet, y, k: float):
    """(m1, m2, dA_kmj) with dA = (1 - c^2) k (m1 A_kmj + m2 A_k A_m A_j)."""
    _require_particular(jet, k)
    y = np.asarray(y, dtype=float)
    if jet.g == 0.0:
        raise RiemannianDegenerate("g = 0: the Landsberg tensor vanishes identically")
    m1, m2, _ = m_coefficients(jet, y)
    A3 = cartan_tensor(jet, y)
    A1, _ = cartan_vector(jet, y)
    Adot = (1 - jet.c**2) * k * (m1 * A3 + m2 * _outer3(A1, A1, A1))
    return m1, m2, Adot


def dotA_closed_or_zero(jet: PointJet, y, k: float) -> np.ndarray:
    try:
        return dotA_closed(jet, y, k)[2]
    except RiemannianDegenerate:
        return np.zeros((jet.dim,) * 3)


def yG3_numeric(jet: PointJet, y) -> np.ndarray:
    """y_i G^i_kmj with G^i_kmj from the third-order spray expansion."""
    y = np.asarray(y, dtype=float)
    G, _, _ = spray_series(jet, y, 3)
    return np.einsum("i,ikmj->kmj", covariant_y(jet, y), T.derivatives(G, 3))


def dotA_numeric(jet: PointJet, y) -> np.ndarray:
    """dA_kmj = -1/4 y_i G^i_kmj; valid for any jet."""
    return -0.25 * yG3_numeric(jet, y)


def landsberg_eval(jet: PointJet, y, k: float) -> LandsbergEval:
    y = np.asarray(y, dtype=float)
    yG3 = yG3_numeric(jet, y)
    if jet.g == 0.0:
        m1 = m2 = 0.0
        closed = np.zeros_like(yG3)
    else:
        m1, m2, closed = dotA_closed(jet, y, k)
    return LandsbergEval(k=k, m1=m1, m2=m2, Adot_closed=closed, Adot_numeric=-0.25 * yG3, yG3=yG3)


# verdicts ---------------------------------------------------------------------------


def berwald_verdict(jet: PointJet, samples: int = 32, seed: int = 0, tol: float = BERWALD_TOL) -> dict:
    """Classify a jet and cross-check the equivalent characterizations.

    BERWALD iff dg = 0 and |nabla b| <= tol (g != 0); RIEMANNIAN iff g = 0
    and dg = 0.  Over ``samples`` quasi-uniform directions the report records
    max |b'|, the deviation of G from the Riemannian spray and the Landsberg
    residual, and whether (b' = 0 and g = const != 0) agrees with the verdict.
    """
    bg = background(jet)
    nb_norm = float(np.abs(bg.nabla_b).max())
    const = jet.charge_constant
    if const and jet.g == 0.0:
        verdict = "RIEMANNIAN"
    elif const and nb_norm <= tol:
        verdict = "BERWALD"
    else:
        verdict = "NOT_BERWALD"

    dirs = directions(jet.dim, samples, seed)
    bdot_max = 0.0
    spray_dev = 0.0
    landsberg_ratio = 0.0
    for y in dirs:
        bdot_max = max(bdot_max, abs(dot_b(jet, y, bg)))
        G, _ = spray(jet, y)
        GR = riemannian_spray(jet, y, bg.gamma)
        spray_dev = max(spray_dev, float(np.abs(G - GR).max()) / max(1.0, float(np.abs(GR).max())))
        if verdict != "RIEMANNIAN":
            Ad = np.linalg.norm(dotA_numeric(jet, y))
            A3 = np.linalg.norm(cartan_tensor(jet, y))
            landsberg_ratio = max(landsberg_ratio, Ad / A3 if A3 > 0 else 0.0)
    bdot_zero = bdot_max <= tol
    notable = bdot_zero and const and jet.g != 0.0
    return {
        "verdict": verdict,
        "dim": jet.dim,
        "g": jet.g,
        "charge_constant": const,
        "max_nabla_b": nb_norm,
        "max_abs_bdot": bdot_max,
        "max_spray_minus_riemannian": spray_dev,
        "landsberg_ratio": landsberg_ratio,
        "landsberg": landsberg_ratio <= LANDSBERG_REL_TOL,
        "notable_consistent": notable == (verdict == "BERWALD"),
        "samples": samples,
    }


# probe --------------------------------------------------------------------------------


def _probe_cell(args):
    dim, seed, k, g, c, n_dirs = args
    jet = landsberg_candidate_jet(dim, seed, k, c=c, g=g)
    dirs = directions(dim, n_dirs, seed)
    norm_max = 0.0
    rel_err = 0.0
    worst_ratio = None
    for y in dirs:
        numeric = dotA_numeric(jet, y)
        closed = dotA_closed_or_zero(jet, y, k)
        nn = float(np.linalg.norm(numeric))
        nc = float(np.linalg.norm(closed))
        norm_max = max(norm_max, nn)
        if nc > 0.0:
            ratio = nn / nc
            rel_err = max(rel_err, float(np.linalg.norm(numeric - closed)) / nc)
            if worst_ratio is None or abs(ratio - 1) > abs(worst_ratio - 1):
                worst_ratio = ratio
        else:
            rel_err = max(rel_err, nn)
    verdict = berwald_verdict(jet, samples=8, seed=seed)["verdict"]
    return {
        "seed": seed,
        "dim": dim,
        "k": k,
        "g": g,
        "c": c,
        "norm_Adot": norm_max,
        "ratio_closed_numeric": worst_ratio,
        "rel_err_closed_numeric": rel_err,
        "berwald_verdict": verdict,
    }


def _scaling_row(args):
    dim, seed, k, g, c_values, c_ref = args
    y = directions(dim, 1, seed)[0]
    norms = {}
    for c in list(c_values) + [c_ref]:
        jet = landsberg_candidate_jet(dim, seed, k, c=c, g=g)
        norms[c] = float(np.linalg.norm(dotA_numeric(jet, y)))
    rows = []
    for c in c_values:
        rows.append(
            {
                "seed": seed,
                "dim": dim,
                "k": k,
                "g": g,
                "c": c,
                "c_ref": c_ref,
                "norm_Adot": norms[c],
                "norm_ratio": norms[c] / norms[c_ref] if norms[c_ref] > 0 else None,
                "factor_ratio": (1 - c * c) / (1 - c_ref * c_ref),
            }
        )
    return rows


def resolve_jobs(jobs=None) -> int:
    if jobs is None:
        env = os.environ.get("FRSPACE_JOBS")
        jobs = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(jobs))


def parallel_map(fn, items, jobs=None):
    """Order-preserving map; a worker pool when jobs > 1."""
    jobs = resolve_jobs(jobs)
    items = list(items)
    if jobs == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def landsberg_to_berwald_probe(
    dim,
    seeds,
    k_values,
    g_values,
    c_values,
    n_dirs: int = 8,
    jobs=None,
    zero_tol: float = ZERO_TOL,
) -> dict:
    """Grid demonstration that the Landsberg tensor vanishes only when k = 0 or g = 0.

    The (1 - c^2) table holds a, the direction of b, y, g and k fixed and
    rescales b to each target c (reference: the smallest c).
    """
    dims = [dim] if np.isscalar(dim) else list(dim)
    cells_in = [
        (d, s, float(k), float(g), float(c), n_dirs)
        for d in dims
        for s in seeds
        for k in k_values
        for g in g_values
        for c in c_values
    ]
    cells = parallel_map(_probe_cell, cells_in, jobs)

    c_ref = min(c_values)
    scale_in = [
        (d, s, float(k), float(g), [float(c) for c in c_values], float(c_ref))
        for d in dims
        for s in seeds
        for k in k_values
        for g in g_values
        if k != 0 and g != 0
    ]
    scaling = [row for rows in parallel_map(_scaling_row, scale_in, jobs) for row in rows]

    zero_idx = {i for i, c in enumerate(cells) if c["norm_Adot"] <= zero_tol}
    expected_idx = {i for i, c in enumerate(cells) if c["k"] == 0 or c["g"] == 0}
    expected_zero = [cells[i] for i in sorted(expected_idx)]
    nonzero = [c for i, c in enumerate(cells) if i not in expected_idx]
    max_rel = max((c["rel_err_closed_numeric"] for c in nonzero), default=0.0)
    return {
        "cells": cells,
        "c_scaling": scaling,
        "c_scaling_note": "a, b-direction, y, g, k held fixed; b rescaled to each c",
        "zero_cells_match_k0_or_g0": zero_idx == expected_idx,
        "max_rel_err_closed_numeric": max_rel,
        "min_norm_nonzero_cells": min((c["norm_Adot"] for c in nonzero), default=None),
        "max_norm_zero_cells": max((c["norm_Adot"] for c in expected_zero), default=None),
    }

