"""Smooth convex test functions and problem instances.

Every oracle evaluates ``f(x)`` and ``grad f(x)`` for a convex function whose
gradient is Lipschitz with the declared constant ``L``. Oracles are immutable
after construction and safe to share between threads.
"""
from dataclasses import dataclass
import math

import numpy as np

from .config import tolerance
from .errors import DataError, OracleInconsistencyError, ParameterError, UnsupportedError


def _positive(name, value):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ParameterError(f"{name} must be a positive finite number, got {value!r}")
    return value


def _frozen(array):
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


class SmoothOracle:
    """Base class: an L-smooth convex function on R^d.

    Subclasses implement :meth:`value` and :meth:`gradient`. ``fstar`` is a
    declaration (``None`` when unknown); ``minimizer`` likewise.
    """

    kind = "custom"

    def __init__(self, d, L, fstar=None, minimizer=None):
        if int(d) != d or d < 1:
            raise ParameterError(f"dimension must be a positive integer, got {d!r}")
        self.d = int(d)
        self.L = _positive("L", L)
        self.fstar = None if fstar is None else float(fstar)
        self.minimizer = None if minimizer is None else _frozen(minimizer)

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.d,):
            raise ParameterError(f"expected a vector of shape ({self.d},), got {x.shape}")
        return x

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.value(x)

    def __repr__(self):
        return f"{type(self).__name__}(d={self.d}, L={self.L:g})"


class Quadratic(SmoothOracle):
    """f(x) = (L/2)||x||^2."""

    kind = "quadratic"

    def __init__(self, L=1.0, d=8):
        super().__init__(d, L, fstar=0.0, minimizer=np.zeros(int(d)))

    def value(self, x):
        x = self._check(x)
        return 0.5 * self.L * float(x @ x)

    def gradient(self, x):
        return self.L * self._check(x)


class Huber(SmoothOracle):
    """Huber function with quadratic core of radius ``r0``.

    f(x) = (L/2)||x||^2 inside the ball ||x|| < r0 and
    L r0 ||x|| - L r0^2 / 2 outside it.
    """

    kind = "huber"

    def __init__(self, L=1.0, r0=1.0, d=8):
        super().__init__(d, L, fstar=0.0, minimizer=np.zeros(int(d)))
        self.r0 = _positive("r0", r0)

    def value(self, x):
        x = self._check(x)
        nx = float(np.linalg.norm(x))
        if nx >= self.r0:
            return self.L * self.r0 * nx - 0.5 * self.L * self.r0**2
        return 0.5 * self.L * nx * nx

    def gradient(self, x):
        x = self._check(x)
        nx = float(np.linalg.norm(x))
        if nx >= self.r0:
            return (self.L * self.r0 / nx) * x
        return self.L * x

    def in_affine_region(self, x):
        return float(np.linalg.norm(self._check(x))) >= self.r0

    def __repr__(self):
        return f"Huber(d={self.d}, L={self.L:g}, r0={self.r0:g})"


class LeastSquares(SmoothOracle):
    """f(x) = 0.5 ||A x - b||^2 with L = ||A||_2^2.

    ``fstar``/``minimizer`` may be declared by the caller (e.g. for a
    consistent system ``b = A x*``); nothing is solved here.
    """

    kind = "least_squares"

    def __init__(self, A, b, fstar=None, minimizer=None):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        if A.ndim != 2 or A.size == 0:
            raise DataError("least_squares needs a non-empty 2-D data matrix")
        if b.shape != (A.shape[0],):
            raise DataError(f"labels must have shape ({A.shape[0]},), got {b.shape}")
        L = float(np.linalg.norm(A, 2)) ** 2
        if L <= 0.0:
            raise DataError("data matrix is zero; Lipschitz constant would vanish")
        super().__init__(A.shape[1], L, fstar=fstar, minimizer=minimizer)
        self.A = _frozen(A)
        self.b = _frozen(b)

    def value(self, x):
        r = self.A @ self._check(x) - self.b
        return 0.5 * float(r @ r)

    def gradient(self, x):
        return self.A.T @ (self.A @ self._check(x) - self.b)


class Logistic(SmoothOracle):
    """Mean logistic loss (1/m) sum log(1 + exp(-y_i a_i^T x)).

    L = ||A||_2^2 / (4m). The optimal value is generally unknown.
    """

    kind = "logistic"

    def __init__(self, A, y, fstar=None):
        A = np.asarray(A, dtype=float)
        y = np.asarray(y, dtype=float)
        if A.ndim != 2 or A.size == 0:
            raise DataError("logistic needs a non-empty 2-D data matrix")
        if y.shape != (A.shape[0],):
            raise DataError(f"labels must have shape ({A.shape[0]},), got {y.shape}")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise DataError("logistic labels must be +1 or -1")
        m = A.shape[0]
        L = float(np.linalg.norm(A, 2)) ** 2 / (4.0 * m)
        if L <= 0.0:
            raise DataError("data matrix is zero; Lipschitz constant would vanish")
        super().__init__(A.shape[1], L, fstar=fstar)
        self.A = _frozen(A)
        self.y = _frozen(y)

    def value(self, x):
        margins = self.y * (self.A @ self._check(x))
        return float(np.mean(np.logaddexp(0.0, -margins)))

    def gradient(self, x):
        margins = self.y * (self.A @ self._check(x))
        # d/dm log(1+e^{-m}) = -sigmoid(-m)
        weights = -self.y * _sigmoid(-margins)
        return self.A.T @ weights / self.A.shape[0]


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


KINDS = ("quadratic", "huber", "least_squares", "logistic")


def make_instance(kind, params=None, d=None):
    """Build one of the shipped oracles.

    ``params`` keys: ``L`` (quadratic, huber), ``r0`` (huber), ``A`` and
    ``b`` (least_squares) or ``A`` and ``y`` (logistic), optionally
    ``fstar``/``minimizer`` for least_squares. ``d`` is required for
    quadratic and huber and must match the data otherwise.
    """
    params = dict(params or {})
    if kind in ("quadratic", "huber"):
        if d is None:
            raise ParameterError(f"{kind} needs a dimension d")
        if kind == "quadratic":
            return Quadratic(L=params.get("L", 1.0), d=d)
        if "r0" not in params:
            raise ParameterError("huber needs a radius r0")
        return Huber(L=params.get("L", 1.0), r0=params["r0"], d=d)
    if kind in ("least_squares", "logistic"):
        if "A" not in params:
            raise DataError(f"{kind} needs a data matrix A")
        if kind == "least_squares":
            if "b" not in params:
                raise DataError("least_squares needs labels b")
            oracle = LeastSquares(params["A"], params["b"], fstar=params.get("fstar"),
                                  minimizer=params.get("minimizer"))
        else:
            if "y" not in params:
                raise DataError("logistic needs labels y")
            oracle = Logistic(params["A"], params["y"], fstar=params.get("fstar"))
        if d is not None and d != oracle.d:
            raise DataError(f"data has {oracle.d} columns but d={d} was requested")
        return oracle
    raise ParameterError(f"unknown instance kind {kind!r}; expected one of {KINDS}")


def radius_from_gap(oracle, x0):
    """Smallest R with f(x0) - f* <= L R^2 / 2 (attained with equality)."""
    if oracle.fstar is None:
        raise UnsupportedError("radius_from_gap needs a declared optimal value f*")
    fx = oracle.value(x0)
    gap = fx - oracle.fstar
    if gap < 0.0:
        scale = max(1.0, abs(fx), abs(oracle.fstar))
        if gap < -tolerance("probe") * scale:
            raise OracleInconsistencyError(f"f(x0) = {fx!r} is below the declared f* = {oracle.fstar!r}")
        gap = 0.0
    return math.sqrt(2.0 * gap / oracle.L)


@dataclass(frozen=True)
class ProblemInstance:
    """An oracle with a starting point and its IFC / IDC radii."""

    oracle: SmoothOracle
    x0: np.ndarray
    R: float = None
    Rbar: float = None

    def __post_init__(self):
        x0 = _frozen(self.oracle._check(self.x0))
        object.__setattr__(self, "x0", x0)
        tol = tolerance("probe")
        if self.R is not None and self.oracle.fstar is not None:
            gap = self.oracle.value(x0) - self.oracle.fstar
            bound = 0.5 * self.oracle.L * self.R**2
            if gap > bound + tol * max(1.0, bound):
                raise ParameterError(f"initial gap {gap!r} exceeds L R^2/2 = {bound!r}")
        if self.Rbar is not None and self.oracle.minimizer is not None:
            dist = float(np.linalg.norm(x0 - self.oracle.minimizer))
            if dist > self.Rbar * (1.0 + tol) + tol:
                raise ParameterError(f"||x0 - x*|| = {dist!r} exceeds Rbar = {self.Rbar!r}")

    @classmethod
    def from_oracle(cls, oracle, x0):
        """Fill R (and Rbar when a minimizer is declared) tightly from x0."""
        R = radius_from_gap(oracle, x0) if oracle.fstar is not None else None
        Rbar = None
        if oracle.minimizer is not None:
            Rbar = float(np.linalg.norm(np.asarray(x0, dtype=float) - oracle.minimizer))
        return cls(oracle, x0, R=R, Rbar=Rbar)


def check_oracle(oracle, rng, n_pairs=1000, radius=10.0, rel=None):
    """Probe the Lipschitz, cocoercivity and f >= f* invariants.

    Returns the worst relative slack of each inequality (negative means a
    violation); raises nothing.
    """
    rel = tolerance("probe") if rel is None else rel
    L = oracle.L
    worst = {"lipschitz": math.inf, "cocoercive": math.inf, "lower_bound": math.inf}
    for _ in range(n_pairs):
        x = _ball_sample(rng, oracle.d, radius)
        y = _ball_sample(rng, oracle.d, radius)
        fx, fy = oracle.value(x), oracle.value(y)
        gx, gy = oracle.gradient(x), oracle.gradient(y)
        dg = float(np.linalg.norm(gx - gy))
        lhs = L * float(np.linalg.norm(x - y))
        worst["lipschitz"] = min(worst["lipschitz"], (lhs - dg) / max(1.0, lhs))
        gap = fx - fy - float(gy @ (x - y))
        need = dg * dg / (2.0 * L)
        worst["cocoercive"] = min(worst["cocoercive"], (gap - need) / max(1.0, abs(gap), need))
        if oracle.fstar is not None:
            worst["lower_bound"] = min(worst["lower_bound"], (fx - oracle.fstar) / max(1.0, abs(fx)))
    ok = all(v >= -rel for v in worst.values())
    return ok, worst


def _ball_sample(rng, d, radius):
    v = rng.normal(size=d)
    v /= np.linalg.norm(v)
    return v * radius * rng.uniform() ** (1.0 / d)
