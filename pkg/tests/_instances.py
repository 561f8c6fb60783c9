"""Random problem instances shared by the tests."""
import numpy as np

from fomlab.oracle import Huber, LeastSquares, Logistic, Quadratic


def least_squares(rng, d=6, m=None):
    """Consistent system, so f* = 0 and the minimizer are known."""
    m = 2 * d if m is None else m
    A = rng.normal(size=(m, d))
    xstar = rng.normal(size=d)
    return LeastSquares(A, A @ xstar, fstar=0.0, minimizer=xstar)


def logistic(rng, d=5, m=None):
    m = 4 * d if m is None else m
    A = rng.normal(size=(m, d))
    y = np.where(rng.normal(size=m) >= 0, 1.0, -1.0)
    return Logistic(A, y)


def huber(rng, d=4):
    return Huber(L=float(rng.uniform(0.5, 3.0)), r0=float(rng.uniform(0.1, 2.0)), d=d)


def quadratic(rng, d=4):
    return Quadratic(L=float(rng.uniform(0.5, 3.0)), d=d)


def start(rng, d, scale=3.0):
    return scale * rng.normal(size=d)


def rel_iterate_deviation(xs, ref):
    scale = max(float(np.max(np.linalg.norm(ref, axis=1))), np.finfo(float).tiny)
    return float(np.max(np.linalg.norm(xs - ref, axis=1))) / scale
