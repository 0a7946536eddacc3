"""Truncated multivariate Taylor arithmetic (forward-mode AD).

A :class:`Taylor` holds the Taylor coefficients of a scalar function of
``nvars`` perturbation variables, truncated at total degree ``degree``.
Degree 1 is ordinary dual-number arithmetic with a gradient; higher
degrees carry all mixed partials up to that order, so third derivatives
of the spray come out of a single forward sweep.

Everything in the geometry modules is written against plain arithmetic
and the functions exported here (:func:`sqrt`, :func:`exp`, :func:`atan`,
...), so the same code runs on floats and on Taylor scalars.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

__all__ = [
    "Basis",
    "Taylor",
    "variables",
    "value",
    "values",
    "sqrt",
    "exp",
    "log",
    "atan",
    "sin",
    "cos",
    "jacobian",
    "derivatives",
    "truncate",
    "inv",
    "det",
]


class Basis:
    """Monomial basis of total degree <= ``degree`` in ``nvars`` variables."""

    def __init__(self, nvars: int, degree: int):
        self.nvars = nvars
        self.degree = degree
        exps = []
        for d in range(degree + 1):
            for combo in itertools.combinations_with_replacement(range(nvars), d):
                e = [0] * nvars
                for v in combo:
                    e[v] += 1
                exps.append(tuple(e))
        self.exps = exps
        self.size = len(exps)
        self.index = {e: i for i, e in enumerate(exps)}
        self.total = np.array([sum(e) for e in exps], dtype=int)
        self.factorial = np.array(
            [math.prod(math.factorial(k) for k in e) for e in exps], dtype=float
        )
        if degree >= 2:
            ii, jj, kk = [], [], []
            for i, ei in enumerate(exps):
                di = sum(ei)
                for j, ej in enumerate(exps):
                    if di + sum(ej) <= degree:
                        ii.append(i)
                        jj.append(j)
                        kk.append(self.index[tuple(a + b for a, b in zip(ei, ej))])
            self.mul_i = np.array(ii)
            self.mul_j = np.array(jj)
            self.mul_k = np.array(kk)

    def __repr__(self):
        return f"Basis(nvars={self.nvars}, degree={self.degree})"

    @lru_cache(maxsize=None)
    def deriv_map(self, var: int):
        """Index/scale arrays taking coefficients to those of d/d(var)."""
        lower = get_basis(self.nvars, self.degree - 1)
        src = np.empty(lower.size, dtype=int)
        scale = np.empty(lower.size)
        for i, e in enumerate(lower.exps):
            up = list(e)
            up[var] += 1
            src[i] = self.index[tuple(up)]
            scale[i] = up[var]
        return lower, src, scale

    @lru_cache(maxsize=None)
    def restrict_map(self, keep: tuple):
        """Coefficients surviving when variables outside ``keep`` are set to 0."""
        target = get_basis(len(keep), self.degree)
        drop = [v for v in range(self.nvars) if v not in keep]
        src = np.empty(target.size, dtype=int)
        for i, e in enumerate(target.exps):
            full = [0] * self.nvars
            for slot, v in enumerate(keep):
                full[v] = e[slot]
            for v in drop:
                full[v] = 0
            src[i] = self.index[tuple(full)]
        return target, src

    @lru_cache(maxsize=None)
    def truncate_map(self, degree: int):
        target = get_basis(self.nvars, degree)
        src = np.array([self.index[e] for e in target.exps], dtype=int)
        return target, src

    @lru_cache(maxsize=None)
    def partial_table(self, order: int):
        """For every index tuple of length ``order``: (monomial index, alpha!)."""
        shape = (self.nvars,) * order
        idx = np.empty(shape, dtype=int)
        for tup in itertools.product(range(self.nvars), repeat=order):
            e = [0] * self.nvars
            for v in tup:
                e[v] += 1
            idx[tup] = self.index[tuple(e)]
        return idx, self.factorial[idx]


@lru_cache(maxsize=None)
def get_basis(nvars: int, degree: int) -> Basis:
    return Basis(nvars, degree)


def _series_power(x0: float, p: float, d: int) -> np.ndarray:
    # (x0 + t)^p = sum binom(p, k) x0^(p-k) t^k
    out = np.empty(d + 1)
    coef = 1.0
    for k in range(d + 1):
        out[k] = coef * x0 ** (p - k)
        coef *= (p - k) / (k + 1)
    return out


def _series_exp(x0, d):
    e = math.exp(x0)
    return np.array([e / math.factorial(k) for k in range(d + 1)])


def _series_log(x0, d):
    out = np.empty(d + 1)
    out[0] = math.log(x0)
    for k in range(1, d + 1):
        out[k] = (-1) ** (k + 1) / (k * x0**k)
    return out


def _series_atan(x0, d):
    # atan' = 1/(1 + x^2); divide 1 by the quadratic (1 + x0^2) + 2 x0 t + t^2
    den = [1.0 + x0 * x0, 2.0 * x0, 1.0]
    r = np.zeros(d)
    for k in range(d):
        acc = 1.0 if k == 0 else 0.0
        for j in range(1, min(k, 2) + 1):
            acc -= den[j] * r[k - j]
        r[k] = acc / den[0]
    out = np.empty(d + 1)
    out[0] = math.atan(x0)
    out[1:] = r / np.arange(1, d + 1)
    return out


def _series_sin(x0, d):
    s, c = math.sin(x0), math.cos(x0)
    cyc = [s, c, -s, -c]
    return np.array([cyc[k % 4] / math.factorial(k) for k in range(d + 1)])


def _series_cos(x0, d):
    s, c = math.sin(x0), math.cos(x0)
    cyc = [c, -s, -c, s]
    return np.array([cyc[k % 4] / math.factorial(k) for k in range(d + 1)])


class Taylor:
    """Scalar truncated Taylor polynomial over a :class:`Basis`."""

    __slots__ = ("basis", "c")
    # keep numpy scalars from swallowing Taylor operands
    __array_ufunc__ = None

    def __init__(self, basis: Basis, coeffs):
        self.basis = basis
        self.c = coeffs

    @classmethod
    def constant(cls, basis, x):
        c = np.zeros(basis.size)
        c[0] = x
        return cls(basis, c)

    @property
    def value(self) -> float:
        return float(self.c[0])

    def __repr__(self):
        return f"Taylor({self.value!r}, {self.basis!r})"

    def __float__(self):
        return self.value

    # arithmetic -----------------------------------------------------------
    # ndarray operands are handled elementwise so that rows of object
    # matrices can be scaled by a Taylor scalar.

    def _mul_coeffs(self, a, b):
        basis = self.basis
        if basis.degree == 0:
            return a * b
        if basis.degree == 1:
            out = a[0] * b
            out[1:] += b[0] * a[1:]
            return out
        return np.bincount(
            basis.mul_k, weights=a[basis.mul_i] * b[basis.mul_j], minlength=basis.size
        )

    def __add__(self, other):
        if isinstance(other, np.ndarray):
            return _map(lambda o: self.__add__(o), other)
        if isinstance(other, Taylor):
            return Taylor(self.basis, self.c + other.c)
        c = self.c.copy()
        c[0] += other
        return Taylor(self.basis, c)

    __radd__ = __add__

    def __neg__(self):
        return Taylor(self.basis, -self.c)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, np.ndarray):
            return _map(lambda o: self.__sub__(o), other)
        if isinstance(other, Taylor):
            return Taylor(self.basis, self.c - other.c)
        c = self.c.copy()
        c[0] -= other
        return Taylor(self.basis, c)

    def __rsub__(self, other):
        if isinstance(other, np.ndarray):
            return _map(lambda o: self.__rsub__(o), other)
        c = -self.c
        c[0] += other
        return Taylor(self.basis, c)

    def __mul__(self, other):
        if isinstance(other, np.ndarray):
            return _map(lambda o: self.__mul__(o), other)
        if isinstance(other, Taylor):
            if other.basis is not self.basis:
                raise ValueError(f"basis mismatch: {self.basis} vs {other.basis}")
            return Taylor(self.basis, self._mul_coeffs(self.c, other.c))
        return Taylor(self.basis, self.c * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, np.ndarray):
            return _map(lambda o: self.__truediv__(o), other)
        if isinstance(other, Taylor):
            return self * other.reciprocal()
        return Taylor(self.basis, self.c / other)

    def __rtruediv__(self, other):
        if isinstance(other, np.ndarray):
            return _map(lambda o: self.__rtruediv__(o), other)
        return self.reciprocal() * other

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            return self._compose(_series_power(self.value, float(n), self.basis.degree))
        if n < 0:
            return (self ** (-n)).reciprocal()
        out = Taylor.constant(self.basis, 1.0)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    # comparisons act on the expansion point
    def __lt__(self, other):
        return self.value < value(other)

    def __le__(self, other):
        return self.value <= value(other)

    def __gt__(self, other):
        return self.value > value(other)

    def __ge__(self, other):
        return self.value >= value(other)

    def __abs__(self):
        return -self if self.value < 0 else self

    # elementary functions -------------------------------------------------

    def _compose(self, series):
        """Evaluate sum series[k] * h^k with h the non-constant part (Horner)."""
        h = self.c.copy()
        h[0] = 0.0
        d = self.basis.degree
        acc = np.zeros(self.basis.size)
        acc[0] = series[d]
        for k in range(d - 1, -1, -1):
            acc = self._mul_coeffs(acc, h)
            acc[0] += series[k]
        return Taylor(self.basis, acc)

    def reciprocal(self):
        return self._compose(_series_power(self.value, -1.0, self.basis.degree))

    def sqrt(self):
        return self._compose(_series_power(self.value, 0.5, self.basis.degree))

    def exp(self):
        return self._compose(_series_exp(self.value, self.basis.degree))

    def log(self):
        return self._compose(_series_log(self.value, self.basis.degree))

    def atan(self):
        return self._compose(_series_atan(self.value, self.basis.degree))

    def sin(self):
        return self._compose(_series_sin(self.value, self.basis.degree))

    def cos(self):
        return self._compose(_series_cos(self.value, self.basis.degree))

    # calculus -------------------------------------------------------------

    def deriv(self, var: int) -> "Taylor":
        """Exact partial derivative; the result has degree one lower."""
        lower, src, scale = self.basis.deriv_map(var)
        return Taylor(lower, self.c[src] * scale)

    def restrict(self, keep) -> "Taylor":
        """Set every variable not in ``keep`` to zero and drop it."""
        target, src = self.basis.restrict_map(tuple(keep))
        return Taylor(target, self.c[src])

    def truncate(self, degree: int) -> "Taylor":
        target, src = self.basis.truncate_map(degree)
        return Taylor(target, self.c[src])

    def partial(self, *index) -> float:
        """Mixed partial derivative d^r/(dv_i1 ... dv_ir) at the expansion point."""
        e = [0] * self.basis.nvars
        for v in index:
            e[v] += 1
        k = self.basis.index[tuple(e)]
        return float(self.c[k] * self.basis.factorial[k])

    def derivatives(self, order: int) -> np.ndarray:
        """Full symmetric tensor of order-``order`` partials."""
        idx, fact = self.basis.partial_table(order)
        return self.c[idx] * fact


# ---------------------------------------------------------------------------
# generic helpers usable on floats and Taylor scalars


def value(x):
    return x.value if isinstance(x, Taylor) else float(x)


def values(arr) -> np.ndarray:
    arr = np.asarray(arr, dtype=object) if not isinstance(arr, np.ndarray) else arr
    if arr.dtype != object:
        return arr.astype(float)
    return np.vectorize(value, otypes=[float])(arr)


def _dispatch(name, npfunc):
    def f(x):
        if isinstance(x, Taylor):
            return getattr(x, name)()
        if isinstance(x, np.ndarray) and x.dtype == object:
            return np.vectorize(f, otypes=[object])(x)
        return npfunc(x)

    f.__name__ = name
    return f


sqrt = _dispatch("sqrt", np.sqrt)
exp = _dispatch("exp", np.exp)
log = _dispatch("log", np.log)
atan = _dispatch("atan", np.arctan)
sin = _dispatch("sin", np.sin)
cos = _dispatch("cos", np.cos)


def variables(x0, degree: int, nvars: int | None = None, offset: int = 0) -> np.ndarray:
    """Seed ``x0`` as independent variables ``offset .. offset+len(x0)-1``."""
    x0 = np.asarray(x0, dtype=float)
    nvars = len(x0) if nvars is None else nvars
    basis = get_basis(nvars, degree)
    out = np.empty(len(x0), dtype=object)
    for i, xi in enumerate(x0):
        c = np.zeros(basis.size)
        c[0] = xi
        if degree >= 1:
            e = [0] * nvars
            e[offset + i] = 1
            c[basis.index[tuple(e)]] = 1.0
        out[i] = Taylor(basis, c)
    return out


def _map(fn, arr):
    arr = np.asarray(arr, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = fn(arr[idx])
    return out


def truncate(arr, degree: int):
    """Truncate a Taylor scalar or array; degree 0 collapses to floats."""
    if isinstance(arr, Taylor):
        return arr.value if degree == 0 else arr.truncate(degree)
    if degree == 0:
        return values(arr)
    return _map(lambda t: t.truncate(degree) if isinstance(t, Taylor) else t, arr)


def jacobian(arr, nvars: int | None = None):
    """Append a derivative axis: out[..., v] = d arr[...] / d var_v.

    Degree-0 results are returned as a float array.
    """
    arr = np.asarray(arr, dtype=object)
    first = next(t for t in arr.flat if isinstance(t, Taylor))
    n = first.basis.nvars if nvars is None else nvars
    out = np.empty(arr.shape + (n,), dtype=object)
    lower = first.basis.degree - 1
    for idx in np.ndindex(arr.shape):
        t = arr[idx]
        for v in range(n):
            out[idx + (v,)] = t.deriv(v) if isinstance(t, Taylor) else 0.0
    return values(out) if lower == 0 else out


def derivatives(arr, order: int) -> np.ndarray:
    """Tensor of order-``order`` partials for every element of ``arr``."""
    arr = np.asarray(arr, dtype=object)
    first = next(t for t in arr.flat if isinstance(t, Taylor))
    n = first.basis.nvars
    out = np.zeros(arr.shape + (n,) * order)
    for idx in np.ndindex(arr.shape):
        t = arr[idx]
        if isinstance(t, Taylor):
            out[idx] = t.derivatives(order)
        elif order == 0:
            out[idx] = t
    return out


def inv(m) -> np.ndarray:
    """Gauss-Jordan inverse with partial pivoting on the expansion values."""
    m = np.asarray(m)
    if m.dtype != object:
        return np.linalg.inv(m)
    n = m.shape[0]
    a = m.copy()
    out = np.empty((n, n), dtype=object)
    out[...] = 0.0
    for i in range(n):
        out[i, i] = 1.0
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(value(a[r, col])))
        if value(a[piv, col]) == 0.0:
            raise np.linalg.LinAlgError("singular matrix")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            out[[col, piv]] = out[[piv, col]]
        p = 1.0 / a[col, col]
        a[col] = a[col] * p
        out[col] = out[col] * p
        for r in range(n):
            if r != col:
                fac = a[r, col]
                a[r] = a[r] - fac * a[col]
                out[r] = out[r] - fac * out[col]
    return out


def det(m):
    m = np.asarray(m)
    if m.dtype != object:
        return float(np.linalg.det(m))
    n = m.shape[0]
    a = m.copy()
    d = 1.0
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(value(a[r, col])))
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            d = -d
        d = d * a[col, col]
        for r in range(col + 1, n):
            fac = a[r, col] / a[col, col]
            a[r] = a[r] - fac * a[col]
    return d
