"""Background Riemannian quantities at a jet."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMetric
from .jets import PointJet


@dataclass(frozen=True)
class RiemannBackground:
    gamma: np.ndarray  # gamma[k, i, j] = a^k_ij
    nabla_b: np.ndarray  # nabla_b[i, j] = nabla_i b_j
    f_skew: np.ndarray  # f_mn
    f_up: np.ndarray  # f^i_n
    ainv: np.ndarray


def christoffel(jet: PointJet) -> np.ndarray:
    """a^k_ij = 1/2 a^{kn} (d_j a_ni + d_i a_nj - d_n a_ji), as ``gamma[k, i, j]``."""
    try:
        ainv = jet.ainv
    except np.linalg.LinAlgError as exc:
        raise SingularMetric(str(exc)) from None
    da = jet.da
    low = da.transpose(1, 2, 0) + da.transpose(1, 0, 2) - da
    gamma = 0.5 * np.einsum("kn,nij->kij", ainv, low)
    # exact symmetry in the lower pair
    return 0.5 * (gamma + gamma.transpose(0, 2, 1))


def covariant_derivative_b(jet: PointJet, gamma=None) -> np.ndarray:
    """nabla_i b_j = d_i b_j - b_k a^k_ij."""
    gamma = christoffel(jet) if gamma is None else gamma
    return jet.db - np.einsum("k,kij->ij", jet.b, gamma)


def skew_form(jet: PointJet, nabla_b=None):
    """Return (f_mn, f^i_n) with f_mn = nabla_m b_n - nabla_n b_m."""
    nabla_b = covariant_derivative_b(jet) if nabla_b is None else nabla_b
    f = nabla_b - nabla_b.T
    return f, jet.ainv @ f


def background(jet: PointJet) -> RiemannBackground:
    gamma = christoffel(jet)
    nb = covariant_derivative_b(jet, gamma)
    f, fup = skew_form(jet, nb)
    return RiemannBackground(gamma=gamma, nabla_b=nb, f_skew=f, f_up=fup, ainv=jet.ainv)


def riemannian_spray(jet: PointJet, y, gamma=None):
    """a^i_nm y^n y^m (works on Taylor arrays)."""
    gamma = christoffel(jet) if gamma is None else gamma
    y = np.asarray(y)
    return np.array([y @ gamma[i] @ y for i in range(jet.dim)], dtype=y.dtype)


def contraction_scalars(jet: PointJet, y, bg: RiemannBackground | None = None) -> dict:
    """s_k, (ys), sigma, (yg), (bg) for a tangent vector y.

    ``sigma = b^k y^n f_kn``; ``(yg) = g_h y^h``; ``(bg) = b^h g_h``.
    """
    bg = background(jet) if bg is None else bg
    y = np.asarray(y)
    s = y @ bg.nabla_b
    return {
        "s": s,
        "ys": s @ y,
        "sigma": jet.bup @ bg.f_skew @ y,
        "yg": jet.dg @ y,
        "bg": float(jet.bup @ jet.dg),
    }
