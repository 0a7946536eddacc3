"""Pointwise background data (1-jets) and tangent-vector scalars."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import taylor as T
from .errors import (
    BadRange,
    ChargeOutOfRange,
    NormOutOfRange,
    NotPositiveDefinite,
    ShapeMismatch,
    ZeroVector,
)

SPD_RATIO = 1e-10
DEFAULT_C_RANGE = (0.2, 0.8)
DEFAULT_G_RANGE = (-1.5, 1.5)


def _frozen(x):
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PointJet:
    """Values and first x-derivatives of ``a_ij``, ``b_i`` and ``g`` at a point.

    Index order: ``da[k, i, j] = d_k a_ij`` and ``db[k, i] = d_k b_i``.
    Construct through :func:`build_point_jet`, which validates.
    """

    dim: int
    a: np.ndarray
    da: np.ndarray
    b: np.ndarray
    db: np.ndarray
    g: float
    dg: np.ndarray
    dc: np.ndarray

    @cached_property
    def ainv(self) -> np.ndarray:
        return _frozen(np.linalg.inv(self.a))

    @cached_property
    def bup(self) -> np.ndarray:
        """b^i = a^{ij} b_j."""
        return _frozen(self.ainv @ self.b)

    @cached_property
    def c(self) -> float:
        return float(np.sqrt(self.b @ self.ainv @ self.b))

    @cached_property
    def r(self) -> np.ndarray:
        """r_ij = a_ij - b_i b_j."""
        return _frozen(self.a - np.outer(self.b, self.b))

    @property
    def charge_constant(self) -> bool:
        return not np.any(self.dg)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "a": self.a.tolist(),
            "da": self.da.tolist(),
            "b": self.b.tolist(),
            "db": self.db.tolist(),
            "g": self.g,
            "dg": self.dg.tolist(),
        }

    def __eq__(self, other):
        if not isinstance(other, PointJet):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(json.dumps(self.to_dict()))


def _check_shape(name, arr, shape):
    if arr.shape != shape:
        raise ShapeMismatch(f"{name} has shape {arr.shape}, expected {shape}")


def build_point_jet(dim, a, da, b, db, g, dg) -> PointJet:
    if int(dim) != dim or dim < 2:
        raise ShapeMismatch(f"dimension must be an integer >= 2, got {dim}")
    dim = int(dim)
    a, da, b, db, dg = (np.asarray(v, dtype=float) for v in (a, da, b, db, dg))
    _check_shape("a", a, (dim, dim))
    _check_shape("da", da, (dim, dim, dim))
    _check_shape("b", b, (dim,))
    _check_shape("db", db, (dim, dim))
    _check_shape("dg", dg, (dim,))
    g = float(g)
    arrays = (a, da, b, db, dg)
    if not all(np.all(np.isfinite(v)) for v in arrays) or not np.isfinite(g):
        raise ShapeMismatch("non-finite entries in jet")

    scale = max(np.abs(a).max(), 1.0)
    if np.abs(a - a.T).max() > 1e-12 * scale:
        raise NotPositiveDefinite("a is not symmetric")
    a = 0.5 * (a + a.T)
    eig = np.linalg.eigvalsh(a)
    if eig[-1] <= 0 or eig[0] <= SPD_RATIO * eig[-1]:
        raise NotPositiveDefinite(f"a has eigenvalues {eig}")
    if np.abs(da - da.transpose(0, 2, 1)).max() > 1e-12 * max(np.abs(da).max(), 1.0):
        raise ShapeMismatch("da must be symmetric in its last two indices")
    da = 0.5 * (da + da.transpose(0, 2, 1))

    if not -2.0 < g < 2.0:
        raise ChargeOutOfRange(f"g = {g} outside (-2, 2)")
    ainv = np.linalg.inv(a)
    c2 = float(b @ ainv @ b)
    c = np.sqrt(c2)
    if not 0.0 < c < 1.0:
        raise NormOutOfRange(f"c = {c} outside (0, 1)")

    # d_h(c^2) = -b^p b^q d_h a_pq + 2 b^i d_h b_i
    bup = ainv @ b
    dc2 = -np.einsum("p,q,hpq->h", bup, bup, da) + 2.0 * db @ bup
    dc = dc2 / (2.0 * c)
    return PointJet(dim, _frozen(a), _frozen(da), _frozen(b), _frozen(db), g, _frozen(dg), _frozen(dc))


# builders -------------------------------------------------------------------


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _random_metric(rng, dim, flat=False):
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    lam = rng.uniform(0.5, 2.0, size=dim)
    a = (q * lam) @ q.T
    a = 0.5 * (a + a.T)
    if flat:
        da = np.zeros((dim, dim, dim))
    else:
        da = rng.uniform(-0.5, 0.5, size=(dim, dim, dim))
        da = 0.5 * (da + da.transpose(0, 2, 1))
    return a, da


def _axis_with_norm(rng, a, c):
    w = rng.normal(size=a.shape[0])
    norm = np.sqrt(w @ np.linalg.solve(a, w))
    return w * (c / norm)


def _christoffel(a, da):
    # gamma[k, i, j] = 1/2 a^{kn} (d_j a_ni + d_i a_nj - d_n a_ji)
    low = da.transpose(1, 2, 0) + da.transpose(1, 0, 2) - da
    # low[n, i, j] = d_j a_ni + d_i a_nj - d_n a_ij
    return 0.5 * np.einsum("kn,nij->kij", np.linalg.inv(a), low)


def _solve_db(a, da, b, nabla_b):
    """Partial derivatives d_i b_j giving the requested nabla_i b_j."""
    gamma = _christoffel(a, da)
    return nabla_b + np.einsum("m,mij->ij", b, gamma)


def _check_range(name, rng_, lo, hi):
    if len(rng_) != 2 or not (lo < rng_[0] <= rng_[1] < hi):
        raise BadRange(f"{name} = {tuple(rng_)} must lie inside ({lo}, {hi})")


def random_jet(dim, seed, c_range=DEFAULT_C_RANGE, g_range=DEFAULT_G_RANGE) -> PointJet:
    """Deterministic random jet; nabla b, dg and da have entries in [-1, 1]."""
    _check_range("c_range", c_range, 0.0, 1.0)
    _check_range("g_range", g_range, -2.0, 2.0)
    rng = _rng(seed)
    a, da = _random_metric(rng, dim)
    c = rng.uniform(*c_range)
    g = rng.uniform(*g_range)
    b = _axis_with_norm(rng, a, c)
    nabla_b = rng.uniform(-1.0, 1.0, size=(dim, dim))
    dg = rng.uniform(-0.5, 0.5, size=dim)
    db = _solve_db(a, da, b, nabla_b)
    return build_point_jet(dim, a, da, b, db, g, dg)


def landsberg_candidate_jet(dim, seed, k, *, c=None, g=None, flat=False) -> PointJet:
    """Jet with constant charge and nabla_i b_j = k r_ij.

    ``c`` and ``g`` default to seeded draws from the default ranges.
    """
    if not np.isfinite(k):
        raise BadRange(f"k must be finite, got {k}")
    rng = _rng(seed)
    a, da = _random_metric(rng, dim, flat=flat)
    c_draw = rng.uniform(*DEFAULT_C_RANGE)
    g_draw = rng.uniform(*DEFAULT_G_RANGE)
    c = c_draw if c is None else c
    g = g_draw if g is None else g
    b = _axis_with_norm(rng, a, c)
    r = a - np.outer(b, b)
    db = _solve_db(a, da, b, k * r)
    return build_point_jet(dim, a, da, b, db, g, np.zeros(dim))


def exact_form_jet(dim, seed, *, c=None, g=None) -> PointJet:
    """Constant charge and symmetric nabla_i b_j (b closed, f_mn = 0)."""
    rng = _rng(seed)
    a, da = _random_metric(rng, dim)
    c = rng.uniform(*DEFAULT_C_RANGE) if c is None else c
    g = rng.uniform(*DEFAULT_G_RANGE) if g is None else g
    b = _axis_with_norm(rng, a, c)
    s = rng.uniform(-1.0, 1.0, size=(dim, dim))
    db = _solve_db(a, da, b, 0.5 * (s + s.T))
    return build_point_jet(dim, a, da, b, db, g, np.zeros(dim))


def berwald_jet(dim, seed, *, c=None, g=None, flat=False) -> PointJet:
    """Constant charge and parallel axis form (nabla b = 0)."""
    return landsberg_candidate_jet(dim, seed, 0.0, c=c, g=g, flat=flat)


def with_charge(jet: PointJet, g: float, dg=None) -> PointJet:
    dg = jet.dg if dg is None else dg
    return build_point_jet(jet.dim, jet.a, jet.da, jet.b, jet.db, g, dg)


# tangent vectors --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TangentState:
    """Scalars and auxiliary vectors of a tangent vector y at a jet."""

    y: np.ndarray
    b: object
    S: object
    q: object
    u: np.ndarray
    v: np.ndarray
    vvec: np.ndarray
    r: np.ndarray


def tangent_state(jet: PointJet, y) -> TangentState:
    """Works for float vectors and for arrays of Taylor scalars."""
    y = np.asarray(y)
    if y.shape != (jet.dim,):
        raise ShapeMismatch(f"y has shape {y.shape}, expected ({jet.dim},)")
    yv = T.values(y)
    if not np.any(yv):
        raise ZeroVector("y must be nonzero")
    u = jet.a @ y
    b = jet.b @ y
    S2 = y @ u
    q = T.sqrt(S2 - b * b)
    v = u - jet.b * b
    vvec = y - jet.bup * b
    return TangentState(y=y, b=b, S=T.sqrt(S2), q=q, u=u, v=v, vvec=vvec, r=jet.r)


# file format -------------------------------------------------------------------


def jet_from_dict(d: dict) -> PointJet:
    try:
        return build_point_jet(d["dim"], d["a"], d["da"], d["b"], d["db"], d["g"], d["dg"])
    except KeyError as exc:
        raise ShapeMismatch(f"jet file missing key {exc}") from None


def load_jet(path) -> PointJet:
    with open(path) as fh:
        return jet_from_dict(json.load(fh))


def save_jet(jet: PointJet, path) -> None:
    with open(path, "w") as fh:
        json.dump(jet.to_dict(), fh, indent=2)
