"""Cartan tensor, its trace vector and the two-dimensional main scalar."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import taylor as T
from .errors import DimensionNotTwo, RiemannianDegenerate
from .jets import PointJet, tangent_state
from .metric import core, metric_series, metric_tensor

# below this A^i A_i is treated as the Riemannian (g = 0) case
AA_FLOOR = 1e-20


@dataclass(frozen=True)
class CartanEval:
    A3: np.ndarray
    A1: np.ndarray
    A1up: np.ndarray
    X: float
    AA: float
    e: np.ndarray
    I: float | None


def cartan_tensor(jet: PointJet, y) -> np.ndarray:
    """A_ijk = (K/2) d g_ij / d y^k by exact differentiation of g_ij."""
    y = np.asarray(y, dtype=float)
    cr, _, gmat = metric_series(jet, y, 1)
    dg = T.derivatives(gmat, 1)  # dg[i, j, k] = d_k g_ij
    A = 0.5 * T.value(cr.K) * dg
    # average the six index orders: exact symmetry, rounding-level change only
    return (
        A
        + A.transpose(0, 2, 1)
        + A.transpose(1, 0, 2)
        + A.transpose(1, 2, 0)
        + A.transpose(2, 0, 1)
        + A.transpose(2, 1, 0)
    ) / 6.0


def axis_vector(jet: PointJet, y) -> np.ndarray:
    """e_k = (b/q^2) v_k - b_k."""
    ts = tangent_state(jet, np.asarray(y, dtype=float))
    return ts.b / ts.q**2 * ts.v - jet.b


def inverse_X(jet: PointJet, y) -> float:
    """1/X = N + (1 - c^2) B / (q nu)."""
    cr = core(jet, np.asarray(y, dtype=float))
    return jet.dim + (1.0 - jet.c**2) * cr.B / (cr.ts.q * cr.nu)


def cartan_vector(jet: PointJet, y):
    """Closed-form A_i = (K g / (2 q B)) (1/X) (q^2 b_i - b v_i); returns (A_i, X)."""
    y = np.asarray(y, dtype=float)
    cr = core(jet, y)
    ts = cr.ts
    invX = jet.dim + (1.0 - jet.c**2) * cr.B / (ts.q * cr.nu)
    A1 = cr.K * jet.g / (2.0 * ts.q * cr.B) * invX * (ts.q**2 * jet.b - ts.b * ts.v)
    return A1, 1.0 / invX


def cartan_norm(jet: PointJet, y) -> float:
    """A^i A_i = (g^2/4) (1/X^2) (N + 1 - 1/X)."""
    invX = inverse_X(jet, y)
    return 0.25 * jet.g**2 * invX**2 * (jet.dim + 1.0 - invX)


def cartan_closed_form(jet: PointJet, y) -> np.ndarray:
    """A_ijk = X [A_i h_jk + A_j h_ik + A_k h_ij - (N + 1 - 1/X) A_i A_j A_k / A^h A_h].

    Returns the zero tensor in the Riemannian case, where the last term is 0/0.
    """
    y = np.asarray(y, dtype=float)
    n = jet.dim
    AA = cartan_norm(jet, y)
    if jet.g == 0.0 or AA < AA_FLOOR:
        return np.zeros((n, n, n))
    A1, X = cartan_vector(jet, y)
    h = metric_tensor(jet, y).hmat
    Ah = np.einsum("i,jk->ijk", A1, h)
    sym = Ah + Ah.transpose(1, 0, 2) + Ah.transpose(1, 2, 0)
    AAA = np.einsum("i,j,k->ijk", A1, A1, A1)
    return X * (sym - (n + 1.0 - 1.0 / X) / AA * AAA)


def main_scalar(jet: PointJet, y) -> float:
    """I = sqrt(A^h A_h), defined for N = 2."""
    if jet.dim != 2:
        raise DimensionNotTwo(f"main scalar needs N = 2, got N = {jet.dim}")
    return float(np.sqrt(max(cartan_norm(jet, y), 0.0)))


def main_scalar_factorization(jet: PointJet, y) -> np.ndarray:
    """I a_i a_j a_k with a_i = A_i / sqrt(A^h A_h) (N = 2, g != 0)."""
    if jet.dim != 2:
        raise DimensionNotTwo(f"main scalar needs N = 2, got N = {jet.dim}")
    AA = cartan_norm(jet, y)
    if AA < AA_FLOOR:
        raise RiemannianDegenerate("A^i A_i vanishes (g = 0)")
    A1, _ = cartan_vector(jet, y)
    alpha = A1 / np.sqrt(AA)
    return main_scalar(jet, y) * np.einsum("i,j,k->ijk", alpha, alpha, alpha)


def cartan(jet: PointJet, y) -> CartanEval:
    y = np.asarray(y, dtype=float)
    A1, X = cartan_vector(jet, y)
    me = metric_tensor(jet, y)
    return CartanEval(
        A3=cartan_tensor(jet, y),
        A1=A1,
        A1up=me.ginv @ A1,
        X=X,
        AA=cartan_norm(jet, y),
        e=axis_vector(jet, y),
        I=main_scalar(jet, y) if jet.dim == 2 else None,
    )
