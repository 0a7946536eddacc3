"""Analytic background fields a_ij(x), b_i(x), g(x) and their 1-jets."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.stats import qmc

from .. import taylor as T
from ..errors import (
    AsymmetricMetric,
    DimensionMismatch,
    DomainError,
    ExpressionSyntaxError,
    FieldError,
)
from ..jets import PointJet, build_point_jet
from .expr import Expr, compile_expr, max_variable, parse_expr, to_text

# complex-step increment; small enough that O(h^2) terms vanish in double precision
_CSTEP = 1e-100


@dataclass(frozen=True)
class FieldSpec:
    dim: int
    a_exprs: tuple
    b_exprs: tuple
    g_expr: Expr
    name: str = ""
    description: str = ""

    @cached_property
    def _programs(self):
        n = self.dim
        progs = [compile_expr(self.a_exprs[i][j]) for i in range(n) for j in range(i, n)]
        progs += [compile_expr(e) for e in self.b_exprs]
        progs.append(compile_expr(self.g_expr))
        return progs

    def _unpack(self, vals):
        n = self.dim
        a = np.empty((n, n), dtype=object)
        it = iter(vals)
        for i in range(n):
            for j in range(i, n):
                a[i, j] = a[j, i] = next(it)
        b = [next(it) for _ in range(n)]
        return a, b, next(it)

    def evaluate(self, x):
        """(a_ij, b_i, g) at x as floats."""
        x = _point(self, x)
        a, b, g = self._unpack(f(x) for f in self._programs)
        a = a.astype(float)
        b = np.array(b, dtype=float)
        g = float(g)
        _check_finite(x, a, b, g)
        return a, b, g

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "a": [[to_text(e) for e in row] for row in self.a_exprs],
            "b": [to_text(e) for e in self.b_exprs],
            "g": to_text(self.g_expr),
            "name": self.name,
            "description": self.description,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _point(field: FieldSpec, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (field.dim,):
        raise DimensionMismatch(f"point has shape {x.shape}, field has N = {field.dim}")
    return x


def _check_finite(x, *arrays):
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise DomainError(f"field value not finite at x = {list(map(float, x))}")


# parsing ---------------------------------------------------------------------------


def parse_field(text: str) -> FieldSpec:
    """Parse the JSON field format {"dim", "a", "b", "g", "name", "description"}."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ExpressionSyntaxError(exc.msg, exc.lineno, exc.colno, "json") from None
    return field_from_dict(data)


def field_from_dict(data: dict) -> FieldSpec:
    if not isinstance(data, dict):
        raise FieldError("field definition must be a JSON object")
    missing = [k for k in ("dim", "a", "b", "g") if k not in data]
    if missing:
        raise FieldError(f"field definition lacks {', '.join(missing)}")
    n = data["dim"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise DimensionMismatch(f"dim must be an integer >= 2, got {n!r}")
    a_raw, b_raw = data["a"], data["b"]
    if not isinstance(a_raw, list) or len(a_raw) != n or any(not isinstance(r, list) or len(r) != n for r in a_raw):
        raise DimensionMismatch(f"a must be a {n}x{n} array of expressions")
    if not isinstance(b_raw, list) or len(b_raw) != n:
        raise DimensionMismatch(f"b must list {n} expressions")

    def parse(text, where):
        node = parse_expr(text, where)
        if max_variable(node) > n:
            raise DimensionMismatch(f"{where}: uses x{max_variable(node)} but dim = {n}")
        return node

    a = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if a_raw[i][j] is not None:
                a[i][j] = parse(a_raw[i][j], f"a[{i + 1}][{j + 1}]")
    for i in range(n):
        for j in range(i, n):
            up, lo = a[i][j], a[j][i]
            if up is None and lo is None:
                raise FieldError(f"a[{i + 1}][{j + 1}] and a[{j + 1}][{i + 1}] are both missing")
            if up is not None and lo is not None and up != lo:
                raise AsymmetricMetric(
                    f"a[{i + 1}][{j + 1}] = {to_text(up)!r} differs from a[{j + 1}][{i + 1}] = {to_text(lo)!r}"
                )
            a[i][j] = a[j][i] = up if up is not None else lo
    b = tuple(parse(e, f"b[{i + 1}]") for i, e in enumerate(b_raw))
    g = parse(data["g"], "g")
    return FieldSpec(
        dim=n,
        a_exprs=tuple(tuple(row) for row in a),
        b_exprs=b,
        g_expr=g,
        name=str(data.get("name", "")),
        description=str(data.get("description", "")),
    )


def load_field(path) -> FieldSpec:
    return parse_field(Path(path).read_text(encoding="utf-8"))


def bundled_fields() -> list[str]:
    root = resources.files("frspace") / "data" / "fields"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def bundled_field(name: str) -> FieldSpec:
    root = resources.files("frspace") / "data" / "fields"
    path = root / f"{name}.json"
    if not path.is_file():
        raise FieldError(f"no bundled field {name!r}; available: {', '.join(bundled_fields())}")
    return parse_field(path.read_text(encoding="utf-8"))


# jets ---------------------------------------------------------------------------------


def _split_taylor(v, n):
    if isinstance(v, T.Taylor):
        return v.value, [v.partial(k) for k in range(n)]
    return float(v), [0.0] * n


def _split_complex(v, n):
    if isinstance(v, np.ndarray):
        return v.real[0], v.imag / _CSTEP
    return float(np.real(v)), [0.0] * n


def jet_at(field: FieldSpec, x, method: str = "taylor") -> PointJet:
    """Values and exact first x-derivatives of the field at x.

    ``method="taylor"`` seeds x as first-order Taylor variables;
    ``method="complex"`` uses complex-step differentiation of the same
    compiled expressions (one imaginary direction per coordinate, evaluated
    together), which is cheaper and is what the geodesic integrator uses.
    """
    x = _point(field, x)
    n = field.dim
    if method == "taylor":
        xs = T.variables(x, 1)
        split = _split_taylor
    elif method == "complex":
        xs = x[:, None] + (1j * _CSTEP) * np.eye(n)
        split = _split_complex
    else:
        raise ValueError(f"unknown method {method!r}")
    parts = [split(f(xs), n) for f in field._programs]
    vals = np.array([p[0] for p in parts], dtype=float)
    grads = np.array([p[1] for p in parts], dtype=float)  # grads[m, k]
    _check_finite(x, vals, grads)
    iu, ju = np.triu_indices(n)
    m = len(iu)
    a = np.empty((n, n))
    a[iu, ju] = a[ju, iu] = vals[:m]
    da = np.empty((n, n, n))
    da[:, iu, ju] = da[:, ju, iu] = grads[:m].T
    b, db = vals[m : m + n], grads[m : m + n].T
    return build_point_jet(n, a, da, b, db, vals[-1], grads[-1])


def finite_difference_jet(field: FieldSpec, x, step: float = 1e-6):
    """(da, db, dg) by central differences; an independent check of jet_at."""
    x = _point(field, x)
    n = field.dim
    da = np.empty((n, n, n))
    db = np.empty((n, n))
    dg = np.empty(n)
    for k in range(n):
        e = np.zeros(n)
        e[k] = step
        ap, bp, gp = field.evaluate(x + e)
        am, bm, gm = field.evaluate(x - e)
        da[k] = (ap - am) / (2 * step)
        db[k] = (bp - bm) / (2 * step)
        dg[k] = (gp - gm) / (2 * step)
    return da, db, dg


# validation ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoxSampler:
    """``count`` scrambled-Sobol points in the box [lo, hi]."""

    lo: tuple
    hi: tuple
    count: int = 256
    seed: int = 0

    def points(self, dim: int) -> np.ndarray:
        lo = np.broadcast_to(np.asarray(self.lo, dtype=float), (dim,))
        hi = np.broadcast_to(np.asarray(self.hi, dtype=float), (dim,))
        if np.any(hi < lo):
            raise ValueError("sampler box has hi < lo")
        sob = qmc.Sobol(d=dim, scramble=True, seed=self.seed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # non power-of-two counts are fine here
            u = sob.random(self.count)
        return qmc.scale(u, lo, hi) if np.any(hi > lo) else np.tile(lo, (self.count, 1))


def _check_point(field: FieldSpec, x) -> dict:
    entry = {"x": [float(v) for v in x]}
    try:
        a, b, g = field.evaluate(x)
    except (DomainError, ArithmeticError, ValueError) as exc:
        entry.update(spd=False, c=None, g=None, c_ok=False, g_ok=False, error=str(exc), ok=False)
        return entry
    lam = np.linalg.eigvalsh(a)
    spd = bool(lam[0] > 1e-10 * max(lam[-1], 0.0) and lam[0] > 0)
    c = float(np.sqrt(b @ np.linalg.solve(a, b))) if spd else None
    c_ok = c is not None and 0.0 < c < 1.0
    g_ok = -2.0 < g < 2.0
    entry.update(spd=spd, c=c, g=g, c_ok=c_ok, g_ok=g_ok, error=None, ok=spd and c_ok and g_ok)
    return entry


def validate_field(field: FieldSpec, sampler: BoxSampler) -> dict:
    """Per-point SPD / 0 < c < 1 / |g| < 2 checks over the sampler's box."""
    pts = sampler.points(field.dim)
    entries = [_check_point(field, x) for x in pts]
    failures = [e for e in entries if not e["ok"]]
    return {
        "field": field.name,
        "dim": field.dim,
        "box": {"lo": list(map(float, np.broadcast_to(sampler.lo, (field.dim,)))),
                "hi": list(map(float, np.broadcast_to(sampler.hi, (field.dim,))))},
        "count": len(entries),
        "n_fail": len(failures),
        "spd_failures": [e["x"] for e in failures if not e["spd"]],
        "c_failures": [e["x"] for e in failures if e["spd"] and not e["c_ok"]],
        "g_failures": [e["x"] for e in failures if e["g"] is not None and not e["g_ok"]],
        "domain_failures": [e["x"] for e in failures if e["error"]],
        "points": entries,
        "pass": not failures,
    }
