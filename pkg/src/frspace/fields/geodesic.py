"""Fixed-step RK4 geodesics of x'' + G(x, x') = 0 on an analytic field."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, FrspaceError, StepRejected
from ..metric import K_value
from ..riemannian import christoffel, riemannian_spray
from ..spray import spray
from .definition import FieldSpec, jet_at

DRIFT_LIMIT = 1e-4


@dataclass(frozen=True)
class GeodesicTrajectory:
    """Samples (t, x, y) and the conserved norm along the curve.

    In ``mode="finsler"`` the recorded norm is K(x, y); in
    ``mode="riemannian"`` it is sqrt(a_ij y^i y^j).
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    K: np.ndarray
    K_drift: float
    dt: float
    mode: str = "finsler"
    field_name: str = ""

    @property
    def points(self):
        return list(zip(self.t, self.x, self.y))

    def header(self) -> list[str]:
        n = self.x.shape[1]
        return ["t"] + [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)] + ["K"]

    def to_csv(self, fh=None) -> str | None:
        """Write the CSV to an open text file, or return it as a string."""
        own = fh is None
        out = io.StringIO() if own else fh
        w = csv.writer(out, lineterminator="\n")
        w.writerow(self.header())
        for t, x, y, K in zip(self.t, self.x, self.y, self.K):
            w.writerow([repr(float(t)), *map(repr, map(float, x)), *map(repr, map(float, y)), repr(float(K))])
        return out.getvalue() if own else None


def _partial(ts, xs, ys, Ks, dt, mode, name):
    K = np.array(Ks)
    drift = float(np.max(np.abs(K - K[0])) / K[0]) if len(K) else 0.0
    return GeodesicTrajectory(
        t=np.array(ts),
        x=np.array(xs),
        y=np.array(ys),
        K=K,
        K_drift=drift,
        dt=dt,
        mode=mode,
        field_name=name,
    )


class _Rhs:
    def __init__(self, field: FieldSpec, mode: str, method: str):
        self.field = field
        self.mode = mode
        self.method = method

    def jet(self, x):
        return jet_at(self.field, x, method=self.method)

    def accel(self, jet, y):
        if self.mode == "riemannian":
            return -riemannian_spray(jet, y, christoffel(jet))
        G, _ = spray(jet, y)
        return -G

    def norm(self, jet, y):
        if self.mode == "riemannian":
            return float(np.sqrt(y @ jet.a @ y))
        return float(K_value(jet, y))


def integrate_geodesic(
    field: FieldSpec,
    x0,
    y0,
    dt: float,
    steps: int,
    *,
    mode: str = "finsler",
    drift_limit: float = DRIFT_LIMIT,
    method: str = "complex",
) -> GeodesicTrajectory:
    """Classical RK4 on x' = y, y' = -G(x, y) (or the Riemannian spray).

    Raises DomainError carrying the last valid (t, x, y) if the field or the
    jet becomes invalid, and StepRejected (with the partial trajectory) once
    the relative drift of the conserved norm exceeds ``drift_limit``.
    """
    if mode not in ("finsler", "riemannian"):
        raise ValueError(f"mode must be 'finsler' or 'riemannian', got {mode!r}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    x = np.asarray(x0, dtype=float).copy()
    y = np.asarray(y0, dtype=float).copy()
    if x.shape != (field.dim,) or y.shape != (field.dim,):
        raise ValueError(f"x0 and y0 must have length {field.dim}")
    rhs = _Rhs(field, mode, method)

    ts, xs, ys, Ks = [], [], [], []
    t = 0.0
    try:
        jet = rhs.jet(x)
        K0 = rhs.norm(jet, y)
    except FrspaceError as exc:
        raise DomainError(f"invalid start state: {exc}", last_state=None) from exc

    for step in range(steps + 1):
        try:
            if step > 0:
                jet = rhs.jet(x)
            K = rhs.norm(jet, y) if step > 0 else K0
        except FrspaceError as exc:
            raise DomainError(
                f"left the field's domain at t = {t}: {exc}",
                last_state=(ts[-1], xs[-1].copy(), ys[-1].copy()),
            ) from exc
        ts.append(t)
        xs.append(x.copy())
        ys.append(y.copy())
        Ks.append(K)
        if abs(K - K0) > drift_limit * K0:
            raise StepRejected(
                f"norm drift {abs(K - K0) / K0:.3e} exceeds {drift_limit:g} at t = {t}; reduce dt",
                trajectory=_partial(ts, xs, ys, Ks, dt, mode, field.name),
            )
        if step == steps:
            break
        try:
            k1x, k1y = y, rhs.accel(jet, y)
            x2, y2 = x + 0.5 * dt * k1x, y + 0.5 * dt * k1y
            k2x, k2y = y2, rhs.accel(rhs.jet(x2), y2)
            x3, y3 = x + 0.5 * dt * k2x, y + 0.5 * dt * k2y
            k3x, k3y = y3, rhs.accel(rhs.jet(x3), y3)
            x4, y4 = x + dt * k3x, y + dt * k3y
            k4x, k4y = y4, rhs.accel(rhs.jet(x4), y4)
        except FrspaceError as exc:
            raise DomainError(
                f"left the field's domain during the step from t = {t}: {exc}",
                last_state=(t, x.copy(), y.copy()),
            ) from exc
        x = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        y = y + dt / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        t = (step + 1) * dt
    return _partial(ts, xs, ys, Ks, dt, mode, field.name)


def drift_order(field: FieldSpec, x0, y0, t_end: float, dts, mode: str = "finsler"):
    """Empirical order of the maximal norm drift on [0, t_end] over a dt sweep.

    Returns (dts, drifts, slope) where slope is the least-squares fit of
    log(drift) against log(dt).
    """
    dts = [float(d) for d in dts]
    drifts = []
    for dt in dts:
        steps = int(round(t_end / dt))
        traj = integrate_geodesic(field, x0, y0, dt, steps, mode=mode, drift_limit=np.inf)
        drifts.append(traj.K_drift)
    slope = float(np.polyfit(np.log(dts), np.log(drifts), 1)[0])
    return dts, drifts, slope
