"""Tight worst-case instances for GM and OGM-G under the initial-gap condition."""
from dataclasses import dataclass
import math

import numpy as np

from .config import tolerance
from .engine import run_method
from .errors import ParameterError, UnsupportedError
from .oracle import Huber, ProblemInstance, Quadratic
from .schedule import _check_N, theta_sequence


@dataclass(frozen=True)
class WorstInstance:
    instance: ProblemInstance
    method: str
    flavor: str
    N: int
    expected_grad_norm_sq: float

    @property
    def oracle(self):
        return self.instance.oracle


def _direction(direction, d):
    if direction is None:
        nu = np.zeros(d)
        nu[0] = 1.0
        return nu
    nu = np.asarray(direction, dtype=float)
    if nu.shape != (d,):
        raise ParameterError(f"direction must have shape ({d},), got {nu.shape}")
    norm = float(np.linalg.norm(nu))
    if abs(norm - 1.0) > 1e-12:
        raise ParameterError(f"direction must be a unit vector, has norm {norm!r}")
    return nu


def worst_instance(method, flavor, N, L=1.0, R=1.0, d=8, direction=None):
    """Build the instance on which ``method`` meets its gradient bound exactly.

    gm/huber: r0 = R/sqrt(2N+1), x0 = (N+1)/sqrt(2N+1) R nu.
    ogmg/huber: r0 = R/theta_0, x0 = (theta_0^2+1)/(2 theta_0) R nu.
    ogmg/quadratic: f = (L/2)||x||^2, x0 = R nu.
    """
    N = _check_N(N)
    if method not in ("gm", "ogmg"):
        raise ParameterError(f"no worst-case instance for method {method!r}")
    if flavor not in ("huber", "quadratic"):
        raise ParameterError(f"unknown flavor {flavor!r}")
    if method == "gm" and flavor == "quadratic":
        raise UnsupportedError("GM has no quadratic worst case here: it solves (L/2)||x||^2 in one step")
    if not R > 0:
        raise ParameterError(f"R must be positive, got {R!r}")
    nu = _direction(direction, d)
    if method == "gm":
        s = math.sqrt(2 * N + 1)
        oracle = Huber(L=L, r0=R / s, d=d)
        x0 = (N + 1) / s * R * nu
        expected = L * L * R * R / (2 * N + 1)
    else:
        t0 = theta_sequence("ogmg_tilde", N)[0]
        expected = L * L * R * R / (t0 * t0)
        if flavor == "huber":
            oracle = Huber(L=L, r0=R / t0, d=d)
            x0 = (t0 * t0 + 1.0) / (2.0 * t0) * R * nu
        else:
            oracle = Quadratic(L=L, d=d)
            x0 = R * nu
    Rbar = float(np.linalg.norm(x0))
    inst = ProblemInstance(oracle, x0, R=R, Rbar=Rbar)
    gap = oracle.value(inst.x0) - oracle.fstar
    target = 0.5 * L * R * R
    if abs(gap - target) > tolerance("ifc") * target:
        raise AssertionError(f"initial gap {gap!r} is not L R^2/2 = {target!r}")
    return WorstInstance(inst, method, flavor, N, expected)


@dataclass
class ExactnessReport:
    measured: float
    expected: float
    rel_err: float
    passed: bool
    affine_ok: bool = True

    def to_json(self):
        return {"expected": self.expected, "measured": self.measured,
                "rel_err": self.rel_err, "pass": self.passed, "affine_ok": self.affine_ok}


def verify_exact_bound(w, trace=None):
    """Run the method N steps and compare ||grad f(x_N)||^2 with the bound."""
    inst = w.instance
    if trace is None:
        trace = run_method(w.method, inst.oracle, inst.x0, w.N)
    g = trace.grads[-1]
    measured = float(g @ g)
    rel_err = abs(measured - w.expected_grad_norm_sq) / w.expected_grad_norm_sq
    affine_ok = True
    if w.flavor == "huber":
        r0 = inst.oracle.r0
        norms = np.linalg.norm(trace.xs, axis=1)
        # rounding may put an iterate a hair inside the boundary
        affine_ok = bool(np.all(norms >= r0 * (1.0 - 1e-12)))
    passed = rel_err <= tolerance("exact") and affine_ok
    return ExactnessReport(measured, w.expected_grad_norm_sq, rel_err, bool(passed), affine_ok)


def radius_ratio(N):
    """Rbar / R for the OGM-G Huber worst case: (theta_0^2 + 1) / (2 theta_0)."""
    t0 = theta_sequence("ogmg_tilde", N)[0]
    return (t0 * t0 + 1.0) / (2.0 * t0)
