"""Run fixed-step methods from a triangle or from their recursive forms."""
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import NumericalFailure, ParameterError
from .schedule import (
    _check_N,
    fgm_coefficients,
    momentum_coefficients,
    theta_sequence,
)

RUN_METHODS = ("gm", "fgm", "ogm", "ogm_zform", "ogmg", "ogmg_zform", "accelerated")


@dataclass
class Trace:
    """Iterates x_0..x_N, auxiliary y_0..y_N (y_0 = x_0), gradients and values."""

    N: int
    xs: np.ndarray
    ys: np.ndarray
    grads: np.ndarray
    fvals: np.ndarray
    method: str = ""

    @property
    def grad_norm_sq(self):
        return np.einsum("ij,ij->i", self.grads, self.grads)


@dataclass
class TraceMetrics:
    grad_norm_sq_final: float
    func_gap_final: float = None
    per_iter: list = field(default_factory=list)


class _Recorder:
    def __init__(self, oracle, x0, N, method):
        x0 = oracle._check(x0)
        self.oracle = oracle
        self.N = N
        self.method = method
        d = oracle.d
        self.xs = np.empty((N + 1, d))
        self.ys = np.empty((N + 1, d))
        self.grads = np.empty((N + 1, d))
        self.fvals = np.empty(N + 1)
        self.xs[0] = x0
        self.ys[0] = x0

    def evaluate(self, i):
        x = self.xs[i]
        if not np.all(np.isfinite(x)):
            raise NumericalFailure(f"non-finite iterate at iteration {i}", iteration=i)
        g = self.oracle.gradient(x)
        fx = self.oracle.value(x)
        if not (np.all(np.isfinite(g)) and math.isfinite(fx)):
            raise NumericalFailure(f"non-finite oracle output at iteration {i}", iteration=i)
        self.grads[i] = g
        self.fvals[i] = fx
        return g

    def trace(self):
        return Trace(self.N, self.xs, self.ys, self.grads, self.fvals, self.method)


def run_fsfom(oracle, x0, schedule):
    """Apply x_{i+1} = x_i - (1/L) sum_k h_{i+1,k} grad f(x_k) with cached gradients."""
    N = schedule.N
    rec = _Recorder(oracle, x0, N, schedule.method)
    inv_L = 1.0 / oracle.L
    H = schedule.H
    for i in range(N):
        g = rec.evaluate(i)
        rec.ys[i + 1] = rec.xs[i] - inv_L * g
        rec.xs[i + 1] = rec.xs[i] - inv_L * (H[i, : i + 1] @ rec.grads[: i + 1])
    rec.evaluate(N)
    return rec.trace()


def _run_accelerated(oracle, x0, beta, gamma, method):
    N = len(beta)
    rec = _Recorder(oracle, x0, N, method)
    inv_L = 1.0 / oracle.L
    xs, ys = rec.xs, rec.ys
    for i in range(N):
        g = rec.evaluate(i)
        ys[i + 1] = xs[i] - inv_L * g
        xs[i + 1] = ys[i + 1] + beta[i] * (ys[i + 1] - ys[i]) + gamma[i] * (ys[i + 1] - xs[i])
    rec.evaluate(N)
    return rec.trace()


def _run_zform(oracle, x0, t, weight, method):
    # z_{i+1} = y_{i+1} + (t_i - 1)(y_{i+1} - y_i) + t_i (y_{i+1} - x_i)
    # x_{i+1} = (1 - w_i) y_{i+1} + w_i z_{i+1}
    N = len(weight)
    rec = _Recorder(oracle, x0, N, method)
    inv_L = 1.0 / oracle.L
    xs, ys = rec.xs, rec.ys
    for i in range(N):
        g = rec.evaluate(i)
        ys[i + 1] = xs[i] - inv_L * g
        z = ys[i + 1] + (t[i] - 1.0) * (ys[i + 1] - ys[i]) + t[i] * (ys[i + 1] - xs[i])
        xs[i + 1] = (1.0 - weight[i]) * ys[i + 1] + weight[i] * z
    rec.evaluate(N)
    return rec.trace()


def run_method(method, oracle, x0, N=None, coeffs=None):
    """Run an efficient (recursive) form.

    ``gm`` takes beta = gamma = 0; ``fgm`` uses Nesterov's t-sequence;
    ``accelerated`` needs ``coeffs`` (a :class:`MomentumCoeffs`), and N
    defaults to its length.
    """
    if method not in RUN_METHODS:
        raise ParameterError(f"unknown method {method!r}; expected one of {RUN_METHODS}")
    if method == "accelerated":
        if coeffs is None:
            raise ParameterError("accelerated form needs momentum coefficients")
        if N is not None and N != coeffs.N:
            raise ParameterError(f"coefficients have length {coeffs.N}, but N={N}")
        return _run_accelerated(oracle, x0, coeffs.beta, coeffs.gamma, method)
    N = _check_N(N)
    if method == "gm":
        zeros = np.zeros(N)
        return _run_accelerated(oracle, x0, zeros, zeros, method)
    if method == "fgm":
        c = fgm_coefficients(N)
        return _run_accelerated(oracle, x0, c.beta, c.gamma, method)
    if method in ("ogm", "ogm_zform"):
        seq = theta_sequence("ogm_hat", N)
        if method == "ogm":
            c = momentum_coefficients("ogm_hat", seq)
            return _run_accelerated(oracle, x0, c.beta, c.gamma, method)
        t = seq.values
        return _run_zform(oracle, x0, t[:-1], 1.0 / t[1:], method)
    seq = theta_sequence("ogmg_tilde", N)
    if method == "ogmg":
        c = momentum_coefficients("ogmg_tilde", seq)
        return _run_accelerated(oracle, x0, c.beta, c.gamma, method)
    t = seq.values
    weight = (2.0 * t[1:] - 1.0) / (t[:-1] * (2.0 * t[:-1] - 1.0))
    return _run_zform(oracle, x0, t[:-1], weight, method)


def run_chain(oracle, x0, N, first="ogm", split=None):
    """Accelerated phase then OGM-G on the remaining steps.

    The first phase (``ogm`` or ``fgm``) runs ``split`` steps, by default
    ceil(N/2); OGM-G restarts from its output for the other floor(N/2).
    """
    N = _check_N(N)
    if N < 2:
        raise ParameterError("chained method needs N >= 2")
    if first not in ("ogm", "fgm"):
        raise ParameterError(f"first phase must be ogm or fgm, got {first!r}")
    n1 = (N + 1) // 2 if split is None else int(split)
    if not 1 <= n1 <= N - 1:
        raise ParameterError(f"split must lie in 1..{N - 1}, got {split!r}")
    head = run_method(first, oracle, x0, n1)
    tail = run_method("ogmg", oracle, head.xs[-1], N - n1)

    def cat(a, b):
        return np.concatenate([a, b[1:]])

    return Trace(N, cat(head.xs, tail.xs), cat(head.ys, tail.ys), cat(head.grads, tail.grads),
                 cat(head.fvals, tail.fvals), method=f"chain[{first}:{n1}+ogmg:{N - n1}]")


def trace_metrics(trace, oracle):
    gns = trace.grad_norm_sq
    fstar = oracle.fstar
    per_iter = []
    for i in range(trace.N + 1):
        row = {"iter": i, "fval": float(trace.fvals[i]), "grad_norm_sq": float(gns[i])}
        if fstar is not None:
            row["func_gap"] = float(trace.fvals[i] - fstar)
        per_iter.append(row)
    gap = None if fstar is None else float(trace.fvals[-1] - fstar)
    return TraceMetrics(float(gns[-1]), gap, per_iter)
