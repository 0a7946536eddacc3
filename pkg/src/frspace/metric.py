"""The Finsleroid-regular metric function and first-level metric objects.

All ``*_series`` helpers evaluate on Taylor arrays so that callers can
differentiate further in y; the public functions take float vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import taylor as T
from .errors import ChargeOutOfRange, SingularMetric
from .jets import PointJet, TangentState, tangent_state


@dataclass(frozen=True)
class FinsleroidScalars:
    h: float
    Gq: float  # G = g / h
    gplus: float
    gminus: float
    B: float
    L: float
    f: float
    J: float
    K: float
    nu: float
    eta: float
    Mbar: float


@dataclass(frozen=True)
class MetricEval:
    y_low: np.ndarray
    gmat: np.ndarray
    ginv: np.ndarray
    hmat: np.ndarray
    det_g: float
    nu_k: np.ndarray


def charge_functions(g):
    """h = sqrt(1 - g^2/4) and G = g/h."""
    if not isinstance(g, T.Taylor) and not -2.0 < g < 2.0:
        raise ChargeOutOfRange(f"g = {g} outside (-2, 2)")
    h = T.sqrt(1.0 - 0.25 * g * g)
    return h, g / h


def _angle(b, L, h, G):
    bv, Lv, hv = T.value(b), T.value(L), T.value(h)
    if Lv > 0.0 and abs(hv * bv) <= Lv:
        # both branch formulas written through atan(hb/L): no 0/0 at b = 0
        return 0.5 * math.pi - T.atan(0.5 * G) - T.atan(h * b / L)
    if bv > 0.0:
        return -T.atan(0.5 * G) + T.atan(L / (h * b))
    return math.pi - T.atan(0.5 * G) + T.atan(L / (h * b))


@dataclass
class _Core:
    """Scalars of one (jet, y, g) evaluation; entries may be Taylor."""

    ts: TangentState
    g: object
    h: object
    G: object
    B: object
    L: object
    f: object
    J: object
    K: object
    nu: object


def core(jet: PointJet, y, g=None) -> _Core:
    g = jet.g if g is None else g
    ts = tangent_state(jet, y)
    h, G = charge_functions(g)
    b, q = ts.b, ts.q
    B = b * b + g * q * b + q * q
    L = q + 0.5 * g * b
    f = _angle(b, L, h, G)
    J = T.exp(-0.5 * G * f)
    K = T.sqrt(B) * J
    nu = q + (1.0 - jet.c**2) * g * b
    return _Core(ts=ts, g=g, h=h, G=G, B=B, L=L, f=f, J=J, K=K, nu=nu)


def characteristic_form(jet: PointJet, y):
    """(B, L) with B = b^2 + g q b + q^2 and L = q + (g/2) b."""
    cr = core(jet, np.asarray(y, dtype=float))
    return cr.B, cr.L


def angle_f(jet: PointJet, y) -> float:
    return core(jet, np.asarray(y, dtype=float)).f


def eta(jet: PointJet) -> float:
    c = jet.c
    return 1.0 / (1.0 + jet.g * c * math.sqrt(1.0 - c * c))


def metric_K(jet: PointJet, y):
    """Return (K, J, FinsleroidScalars)."""
    y = np.asarray(y, dtype=float)
    cr = core(jet, y)
    h = cr.h
    sc = FinsleroidScalars(
        h=float(h),
        Gq=float(cr.G),
        gplus=float(0.5 * jet.g + h),
        gminus=float(0.5 * jet.g - h),
        B=float(cr.B),
        L=float(cr.L),
        f=float(cr.f),
        J=float(cr.J),
        K=float(cr.K),
        nu=float(cr.nu),
        eta=eta(jet),
        Mbar=g_derivative_scalar(jet, y),
    )
    return sc.K, sc.J, sc


def K_value(jet: PointJet, y) -> float:
    return core(jet, np.asarray(y, dtype=float)).K


def covariant_from_core(jet: PointJet, cr: _Core):
    """y_i = (u_i + g q b_i) K^2 / B."""
    return (cr.ts.u + jet.b * (cr.g * cr.ts.q)) * (cr.K * cr.K / cr.B)


def covariant_y(jet: PointJet, y) -> np.ndarray:
    return covariant_from_core(jet, core(jet, np.asarray(y, dtype=float)))


def metric_series(jet: PointJet, y0, order: int):
    """(core, y_i, g_ij) as Taylor series of degree ``order`` around y0.

    g_ij is the exact Jacobian of y_i, so y_i is expanded one degree higher.
    ``order == 0`` returns floats.
    """
    yv = T.variables(y0, order + 1)
    cr = core(jet, yv)
    ylow = covariant_from_core(jet, cr)
    gmat = T.jacobian(ylow)
    return cr, T.truncate(ylow, order), gmat


def metric_matrix_closed(jet: PointJet, cr: _Core) -> np.ndarray:
    """g_ij in closed form at a float state.

    With W_i = u_i + g q b_i and phi = K^2/B, y_i = W_i phi and
    d phi/dy^j = phi (2 W_j - dB/dy^j) / B, so
    g_ij = (a_ij + g b_i v_j / q) phi + W_i d phi/dy^j.
    """
    ts = cr.ts
    g, b, q = cr.g, ts.b, ts.q
    phi = cr.K * cr.K / cr.B
    W = ts.u + g * q * jet.b
    dB = 2.0 * b * jet.b + g * (b / q) * ts.v + g * q * jet.b + 2.0 * ts.v
    dphi = phi * (2.0 * W - dB) / cr.B
    gm = (jet.a + g / q * np.outer(jet.b, ts.v)) * phi + np.outer(W, dphi)
    return 0.5 * (gm + gm.T)


def mbar_closed(cr: _Core) -> float:
    """M = 2 d(ln K)/dg at fixed y, differentiated by hand.

    d ln B/dg = q b / B, dG/dg = 1/h^3 and
    df/dg = -1/(2h) + (g b L/(4h) + h b^2/2) / B.
    """
    g, h, G, B, L, f = cr.g, cr.h, cr.G, cr.B, cr.L, cr.f
    b, q = cr.ts.b, cr.ts.q
    f_g = -0.5 / h + (g * b * L / (4.0 * h) + 0.5 * h * b * b) / B
    return float(q * b / B - f / h**3 - G * f_g)


def metric_tensor(jet: PointJet, y) -> MetricEval:
    y = np.asarray(y, dtype=float)
    cr, ylow, gmat = metric_series(jet, y, 0)
    gmat = 0.5 * (gmat + gmat.T)
    try:
        ginv = np.linalg.inv(gmat)
    except np.linalg.LinAlgError as exc:
        raise SingularMetric(str(exc)) from None
    K2 = T.value(cr.K) ** 2
    hmat = gmat - np.outer(ylow, ylow) / K2
    ts = tangent_state(jet, y)
    nu_k = ts.v / ts.q + (1.0 - jet.c**2) * jet.g * jet.b
    return MetricEval(
        y_low=ylow,
        gmat=gmat,
        ginv=ginv,
        hmat=hmat,
        det_g=T.det(gmat),
        nu_k=nu_k,
    )


def mbar_series(jet: PointJet, y0, order: int):
    """M = 2 (dK/dg) / K as a Taylor series of degree ``order`` in y.

    K is expanded in (y, g) jointly; the g-derivative is taken exactly and
    the g-variable is then dropped.  ``order == 0`` returns a float.
    """
    n = jet.dim
    if order == 0:
        gv = T.variables([jet.g], 1)[0]
        K = core(jet, np.asarray(y0, dtype=float), g=gv).K
        return 2.0 * K.partial(0) / K.value
    yv = T.variables(y0, order + 1, nvars=n + 1)
    gv = T.variables([jet.g], order + 1, nvars=n + 1, offset=n)[0]
    K = core(jet, yv, g=gv).K
    keep = tuple(range(n))
    dK = K.deriv(n).restrict(keep)
    K0 = K.truncate(order).restrict(keep)
    return 2.0 * dK / K0


def g_derivative_scalar(jet: PointJet, y) -> float:
    return mbar_series(jet, y, 0)
