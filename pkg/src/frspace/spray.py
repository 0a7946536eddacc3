"""Spray coefficients, their y-derivatives and derived contractions.

Normalization: G^i = gamma^i_nm y^n y^m (no factor 1/2), so geodesics obey
x'' + G(x, x') = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import taylor as T
from .errors import ChargeNotConstant, NotExactForm
from .jets import PointJet, tangent_state
from .metric import (
    _angle,
    charge_functions,
    core,
    mbar_closed,
    mbar_series,
    metric_matrix_closed,
    metric_series,
)
from .riemannian import RiemannBackground, background, riemannian_spray

EXACT_TOL = 1e-12


@dataclass(frozen=True)
class SprayEval:
    G: np.ndarray
    E: np.ndarray
    G1: np.ndarray
    G2: np.ndarray
    G3: np.ndarray
    bdot: float
    Dbn: np.ndarray
    U1: np.ndarray | None
    U2: np.ndarray | None
    U3: np.ndarray | None
    eta2: np.ndarray


def _spray_terms(jet: PointJet, y0, order: int, bg: RiemannBackground):
    """Return (G, E, G_riemann) as series of degree ``order`` (floats at 0)."""
    n = jet.dim
    with_E = not jet.charge_constant
    if with_E and order == 0:
        # float fast path: closed-form g_ij and M (cross-checked against AD in tests)
        y = np.asarray(y0, dtype=float)
        cr = core(jet, y)
        ginv = np.linalg.inv(metric_matrix_closed(jet, cr))
        b, q, K, B, nu = cr.ts.b, cr.ts.q, cr.K, cr.B, cr.nu
        Mbar = mbar_closed(cr)
    elif with_E:
        cr, _, gmat = metric_series(jet, y0, order)
        ginv = T.inv(gmat)
        y = T.truncate(cr.ts.y, order)
        b, q, K, B, nu = (T.truncate(v, order) for v in (cr.ts.b, cr.ts.q, cr.K, cr.B, cr.nu))
        Mbar = mbar_series(jet, y0, order)
    else:
        y = T.variables(y0, order) if order > 0 else np.asarray(y0, dtype=float)
        cr = core(jet, y)
        b, q, K, B, nu = cr.ts.b, cr.ts.q, cr.K, cr.B, cr.nu
    g = jet.g
    vvec = y - jet.bup * b
    ys = y @ bg.nabla_b @ y
    sigma = jet.bup @ bg.f_skew @ y
    fup = bg.f_up @ y
    G = (g / nu) * (ys + g * q * sigma) * vvec - (g * q) * fup

    if with_E:
        E = charge_terms(jet, y, b, q, K, B, ginv, Mbar)
    else:
        E = np.zeros(n) if order == 0 else np.full(n, 0.0, dtype=object)
    GR = riemannian_spray(jet, y, bg.gamma)
    return G + E + GR, E, GR


def charge_terms(jet, y, b, q, K, B, ginv, Mbar):
    """E^i = M (yg) y^i + K (2q^2/(gB)) (yg) X A^i - (1/2) M K^2 g_h g^{ih}.

    The middle term is used with A_i substituted, which cancels g and X:
    K^2 q / B^2 (yg) g^{ij} (q^2 b_j - b v_j).
    """
    yg = jet.dg @ y
    v = jet.a @ y - jet.b * b
    K2 = K * K
    mid = (K2 * q / (B * B)) * yg * (ginv @ (jet.b * (q * q) - v * b))
    return Mbar * yg * y + mid - 0.5 * Mbar * K2 * (ginv @ jet.dg)


def spray(jet: PointJet, y):
    """Return (G^i, E^i) at a float tangent vector."""
    y = np.asarray(y, dtype=float)
    tangent_state(jet, y)
    G, E, _ = _spray_terms(jet, y, 0, background(jet))
    return np.asarray(G, dtype=float), np.asarray(E, dtype=float)


def spray_series(jet: PointJet, y, order: int, bg=None):
    bg = background(jet) if bg is None else bg
    return _spray_terms(jet, np.asarray(y, dtype=float), order, bg)


def spray_derivatives(jet: PointJet, y):
    """(G^i_k, G^i_km, G^i_kmj) by one exact third-order expansion."""
    G, _, _ = spray_series(jet, y, 3)
    return T.derivatives(G, 1), T.derivatives(G, 2), T.derivatives(G, 3)


# independent oracle -----------------------------------------------------------


def _K_raw(a, bcov, g, y):
    """K from its defining formulas with x-dependent a, b, g (Taylor-valued)."""
    bs = bcov @ y
    S2 = y @ a @ y
    q = T.sqrt(S2 - bs * bs)
    h, G = charge_functions(g)
    B = bs * bs + g * q * bs + q * q
    L = q + 0.5 * g * bs
    f = _angle(bs, L, h, G)
    return T.sqrt(B) * T.exp(-0.5 * G * f)


def finsler_christoffel(jet: PointJet, y):
    """gamma^i_nm = (1/2) g^{ik} (d_n g_km + d_m g_kn - d_k g_nm) at (x0, y).

    The x-derivatives of g_ij come from one joint third-order expansion of
    K^2 in (y, x), with a, b, g continued linearly from the jet.
    """
    n = jet.dim
    y = np.asarray(y, dtype=float)
    yv = T.variables(y, 3, nvars=2 * n)
    xi = T.variables(np.zeros(n), 3, nvars=2 * n, offset=n)
    a = jet.a + np.einsum("k,kij->ij", xi, jet.da)
    bcov = jet.b + xi @ jet.db
    g = jet.g + jet.dg @ xi
    K = _K_raw(a, bcov, g, yv)
    D3 = (K * K).derivatives(3)
    D2 = (K * K).derivatives(2)
    gmat = 0.5 * D2[:n, :n]
    dx_g = 0.5 * D3[:n, :n, n:]  # dx_g[i, j, k] = d g_ij / d x^k
    ginv = np.linalg.inv(gmat)
    first = 0.5 * (
        np.einsum("kmn->knm", dx_g) + np.einsum("knm->knm", dx_g) - np.einsum("nmk->knm", dx_g)
    )
    return np.einsum("ik,knm->inm", ginv, first)


def spray_oracle(jet: PointJet, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    tangent_state(jet, y)
    gam = finsler_christoffel(jet, y)
    return np.einsum("inm,n,m->i", gam, y, y)


# contractions -------------------------------------------------------------------


def dot_b(jet: PointJet, y, bg=None) -> float:
    """b' = (q/nu)(ys) + (g q^2/nu) sigma - b_k E^k."""
    y = np.asarray(y, dtype=float)
    bg = background(jet) if bg is None else bg
    cr = core(jet, y)
    ys = y @ bg.nabla_b @ y
    sigma = jet.bup @ bg.f_skew @ y
    _, E = spray(jet, y)
    q, nu = cr.ts.q, cr.nu
    return float(q / nu * ys + jet.g * q * q / nu * sigma - jet.b @ E)


def dot_b_definition(jet: PointJet, y, bg=None) -> float:
    """Db = (ys) - (G^k - a^k_mn y^m y^n) b_k from spray output."""
    y = np.asarray(y, dtype=float)
    bg = background(jet) if bg is None else bg
    G, _, GR = spray_series(jet, y, 0, bg)
    return float(y @ bg.nabla_b @ y - (G - GR) @ jet.b)


def _bE_parts(jet: PointJet, y):
    y = np.asarray(y, dtype=float)
    cr = core(jet, y)
    ts = cr.ts
    M = mbar_series(jet, y, 0)
    return dict(
        b=ts.b,
        q=ts.q,
        B=cr.B,
        nu=cr.nu,
        M=M,
        yg=float(jet.dg @ y),
        bg=float(jet.bup @ jet.dg),
        D=jet.c**2 * ts.S**2 - ts.b**2,
    )


def bE_expansion(jet: PointJet, y) -> float:
    """b_h E^h = b M (yg) + (q^2/B)(yg) D/nu - (M/2) [(B q/nu)(bg) - (g/nu) D (yg)].

    Here D = c^2 S^2 - b^2 and (bg) = b^h g_h.  It follows from
    K^2 g^{ih} b_i = (B q/nu) b^h - (g/nu) D y^h.
    """
    p = _bE_parts(jet, y)
    b, q, B, nu, M, yg, bg, D = (p[k] for k in ("b", "q", "B", "nu", "M", "yg", "bg", "D"))
    return float(b * M * yg + q * q / B * yg * D / nu - 0.5 * M * (B * q / nu * bg - jet.g * D / nu * yg))


def bE_expansion_c2_variant(jet: PointJet, y) -> float:
    """The variant whose (bg) coefficient is (q + g b) D/nu + b^2 = c^2 B q/nu.

    It differs from :func:`bE_expansion` by a factor c^2 on the (bg) term and
    is kept only to document that difference.
    """
    p = _bE_parts(jet, y)
    b, q, B, nu, M, yg, bg, D = (p[k] for k in ("b", "q", "B", "nu", "M", "yg", "bg", "D"))
    g = jet.g
    bracket = q * q / B * yg - 0.5 * M * (q * bg + g * (b * bg - yg))
    return float(b * M * yg + bracket / nu * D - 0.5 * M * bg * b * b)


def covariant_Db(jet: PointJet, y, bg=None) -> np.ndarray:
    """D b_n = y^h nabla_h b_n - (G^k_n / 2 - a^k_nh y^h) b_k."""
    y = np.asarray(y, dtype=float)
    bg = background(jet) if bg is None else bg
    G, _, _ = spray_series(jet, y, 1, bg)
    G1 = T.derivatives(G, 1)
    return y @ bg.nabla_b - (0.5 * G1 - np.einsum("knh,h->kn", bg.gamma, y)).T @ jet.b


def covariant_Db_via_gradient(jet: PointJet, y, bg=None) -> np.ndarray:
    """(1/2) y^h (nabla_h b_n - nabla_n b_h) + (1/2) d(Db)/dy^n."""
    y = np.asarray(y, dtype=float)
    bg = background(jet) if bg is None else bg
    G, _, GR = spray_series(jet, y, 1, bg)
    yv = T.variables(y, 1)
    Db = yv @ bg.nabla_b @ yv - (G - GR) @ jet.b
    grad = np.array([Db.partial(k) for k in range(jet.dim)])
    return 0.5 * y @ (bg.nabla_b - bg.nabla_b.T) + 0.5 * grad


# exact-form case ------------------------------------------------------------------


def _require_exact(jet, bg):
    if not jet.charge_constant:
        raise ChargeNotConstant("U coefficients need a constant charge (dg = 0)")
    scale = max(1.0, np.abs(bg.nabla_b).max())
    if np.abs(bg.f_skew).max() > EXACT_TOL * scale:
        raise NotExactForm("U coefficients need f_mn = 0")


def U_series(jet: PointJet, y, bg=None):
    """U_k = -(1/nu^2) nu_k (ys) + (2/nu) s_k on (float or Taylor) y."""
    bg = background(jet) if bg is None else bg
    ts = tangent_state(jet, y)
    nu = ts.q + (1.0 - jet.c**2) * jet.g * ts.b
    nu_k = ts.v / ts.q + (1.0 - jet.c**2) * jet.g * jet.b
    s = ts.y @ bg.nabla_b
    ys = s @ ts.y
    return -(ys / (nu * nu)) * nu_k + (2.0 / nu) * s


def eta_tensor(jet: PointJet, y) -> np.ndarray:
    """eta_km = r_km - v_k v_m / q^2."""
    ts = tangent_state(jet, np.asarray(y, dtype=float))
    return jet.r - np.outer(ts.v, ts.v) / ts.q**2


def U_coefficients(jet: PointJet, y, bg=None):
    """(U_k, U_km, eta_km) from the closed forms of the exact-form case."""
    y = np.asarray(y, dtype=float)
    bg = background(jet) if bg is None else bg
    _require_exact(jet, bg)
    ts = tangent_state(jet, y)
    q = ts.q
    nu = q + (1.0 - jet.c**2) * jet.g * ts.b
    nu_k = ts.v / q + (1.0 - jet.c**2) * jet.g * jet.b
    s = y @ bg.nabla_b
    ys = s @ y
    eta2 = jet.r - np.outer(ts.v, ts.v) / q**2
    U1 = -ys / nu**2 * nu_k + 2.0 / nu * s
    U2 = (
        2.0 / nu**3 * np.outer(nu_k, nu_k) * ys
        - 2.0 / nu**2 * (np.outer(nu_k, s) + np.outer(s, nu_k))
        - ys / (nu**2 * q) * eta2
        + 2.0 / nu * bg.nabla_b.T
    )
    return U1, U2, eta2


def spray_eval(jet: PointJet, y) -> SprayEval:
    y = np.asarray(y, dtype=float)
    bg = background(jet)
    G, E, _ = spray_series(jet, y, 3, bg)
    U1 = U2 = U3 = None
    try:
        _require_exact(jet, bg)
    except (NotExactForm, ChargeNotConstant):
        pass
    else:
        Us = U_series(jet, T.variables(y, 2), bg)
        U1 = T.values(Us)
        U2 = T.derivatives(Us, 1)
        U3 = T.derivatives(Us, 2)
    return SprayEval(
        G=T.values(G),
        E=T.values(E),
        G1=T.derivatives(G, 1),
        G2=T.derivatives(G, 2),
        G3=T.derivatives(G, 3),
        bdot=dot_b(jet, y, bg),
        Dbn=covariant_Db(jet, y, bg),
        U1=U1,
        U2=U2,
        U3=U3,
        eta2=eta_tensor(jet, y),
    )


def geodesic_rhs(jet: PointJet, y) -> np.ndarray:
    """Acceleration -G(x, y) for the geodesic system."""
    G, _ = spray(jet, y)
    return -G

