"""Theta sequences of OGM-G and OGM, and their momentum coefficients.

The OGM-G sequence is built backward from theta_N = 1; the OGM sequence
forward from theta_0 = 1. Both use the same square-root recursion with a
doubled weight on the boundary step, which makes them mirror images.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .config import tolerance
from .errors import ParameterError

VARIANTS = ("ogmg_tilde", "ogm_hat")
_ALIASES = {"ogmg": "ogmg_tilde", "ogmg_tilde": "ogmg_tilde", "tilde": "ogmg_tilde",
            "ogm": "ogm_hat", "ogm_hat": "ogm_hat", "hat": "ogm_hat"}


def canonical_variant(variant):
    try:
        return _ALIASES[variant]
    except KeyError:
        raise ParameterError(f"unknown theta variant {variant!r}; expected one of {VARIANTS}") from None


def _check_N(N):
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise ParameterError(f"N must be a positive integer, got {N!r}")
    return int(N)


def _step(prev, weight):
    return 0.5 * (1.0 + math.sqrt(1.0 + weight * prev * prev))


@dataclass(frozen=True)
class ThetaSeq:
    variant: str
    N: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.N + 1,):
            raise ParameterError(f"expected {self.N + 1} theta values, got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __getitem__(self, i):
        return float(self.values[i])

    def __len__(self):
        return self.N + 1

    @property
    def theta0_sq(self):
        return float(self.values[0] ** 2)


@dataclass(frozen=True)
class MomentumCoeffs:
    beta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        beta = np.array(self.beta, dtype=float)
        gamma = np.array(self.gamma, dtype=float)
        if beta.shape != gamma.shape or beta.ndim != 1:
            raise ParameterError("beta and gamma must be 1-D sequences of equal length")
        beta.setflags(write=False)
        gamma.setflags(write=False)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)

    @property
    def N(self):
        return self.beta.size


def theta_sequence(variant, N):
    """Return the theta sequence of length N+1 for ``variant``."""
    variant = canonical_variant(variant)
    N = _check_N(N)
    t = np.empty(N + 1)
    if variant == "ogmg_tilde":
        t[N] = 1.0
        for i in range(N - 1, 0, -1):
            t[i] = _step(t[i + 1], 4.0)
        t[0] = _step(t[1], 8.0)
    else:
        t[0] = 1.0
        for i in range(N - 1):
            t[i + 1] = _step(t[i], 4.0)
        t[N] = _step(t[N - 1], 8.0)
    return ThetaSeq(variant, N, t)


@dataclass
class IdentityReport:
    """Outcome of an identity check; ``violations`` holds (name, index, residual)."""

    checked: int = 0
    max_residual: float = 0.0
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def record(self, name, index, residual, limit):
        self.checked += 1
        self.max_residual = max(self.max_residual, residual)
        if not residual <= limit:
            self.violations.append((name, index, residual))

    def __bool__(self):
        return self.ok


def verify_theta_identities(seq, other=None, rel=None):
    """Check the squared recursion rule and, given the mirror sequence, symmetry.

    For the OGM-G sequence the rule is theta_i^2 = theta_i + theta_{i+1}^2
    (with a factor 2 on theta_1^2 at i = 0); OGM mirrors it. Residuals are
    relative to theta_i^2. ``other`` must be the opposite variant with the
    same N; then theta_hat_i = theta_tilde_{N-i} is checked too.
    """
    rel = tolerance("theta") if rel is None else rel
    report = IdentityReport()
    t = seq.values
    N = seq.N
    if seq.variant == "ogmg_tilde":
        pairs = [(0, 1, 2.0)] + [(i, i + 1, 1.0) for i in range(1, N)]
    else:
        pairs = [(N, N - 1, 2.0)] + [(i, i - 1, 1.0) for i in range(1, N)]
    for i, j, w in pairs:
        lhs = t[i] * t[i]
        res = abs(lhs - (t[i] + w * t[j] * t[j])) / lhs
        report.record("theta_rule", i, res, rel)
    if other is not None:
        if other.N != N or other.variant == seq.variant:
            raise ParameterError("symmetry check needs the opposite variant with the same N")
        tilde, hat = (seq, other) if seq.variant == "ogmg_tilde" else (other, seq)
        for i in range(N + 1):
            res = abs(hat.values[i] - tilde.values[N - i]) / tilde.values[N - i]
            report.record("theta_symmetry", i, res, rel)
    return report


def momentum_coefficients(variant, seq):
    """(beta_i, gamma_i), i = 0..N-1, of the accelerated two-sequence form."""
    variant = canonical_variant(variant)
    if seq.variant != variant:
        raise ParameterError(f"sequence is {seq.variant}, but {variant} coefficients were requested")
    t = seq.values
    cur, nxt = t[:-1], t[1:]
    if variant == "ogmg_tilde":
        gamma = (2.0 * nxt - 1.0) / (2.0 * cur - 1.0)
        beta = (cur - 1.0) * gamma / cur
    else:
        beta = (cur - 1.0) / nxt
        gamma = cur / nxt
    return MomentumCoeffs(beta, gamma)


def fgm_coefficients(N):
    """Nesterov's fast gradient method: t_0 = 1, beta_i = (t_i - 1)/t_{i+1}, gamma_i = 0."""
    N = _check_N(N)
    t = np.empty(N + 1)
    t[0] = 1.0
    for i in range(N):
        t[i + 1] = _step(t[i], 4.0)
    return MomentumCoeffs((t[:-1] - 1.0) / t[1:], np.zeros(N))
