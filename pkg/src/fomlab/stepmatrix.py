"""Step-coefficient triangles of fixed-step first-order methods.

A method with N steps is ``x_{i+1} = x_i - (1/L) sum_{k<=i} h_{i+1,k} grad f(x_k)``.
:class:`StepSchedule` stores the triangle densely: ``H[i, k]`` is h_{i+1,k}.
"""
from dataclasses import dataclass, field
import json

import numpy as np

from . import _core
from .errors import DataError, ParameterError
from .schedule import IdentityReport, _check_N, theta_sequence

METHODS = ("gm", "ogm", "ogmg", "ogmg_alt", "custom")


@dataclass(frozen=True)
class StepSchedule:
    N: int
    H: np.ndarray = field(repr=False)
    method: str = "custom"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParameterError(f"unknown method tag {self.method!r}")
        _check_N(self.N)
        H = np.array(self.H, dtype=float)
        if H.shape != (self.N, self.N):
            raise ParameterError(f"triangle for N={self.N} must be {self.N}x{self.N}, got {H.shape}")
        if np.any(np.triu(H, 1) != 0.0):
            raise ParameterError("step triangle has entries above the diagonal")
        H.setflags(write=False)
        object.__setattr__(self, "H", H)

    def h(self, l, k):
        """One-based row accessor: h_{l,k} for 1 <= l <= N, 0 <= k <= l-1 (else 0)."""
        if 1 <= l <= self.N and 0 <= k < l:
            return float(self.H[l - 1, k])
        return 0.0

    def rows(self):
        """Row i+1 as a list of its i+1 entries."""
        return [self.H[i, : i + 1].tolist() for i in range(self.N)]

    @property
    def n_entries(self):
        return self.N * (self.N + 1) // 2

    def to_json(self):
        return {"N": self.N, "method": self.method, "h": self.rows()}

    @classmethod
    def from_json(cls, doc):
        try:
            N = int(doc["N"])
            rows = doc["h"]
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"triangle document needs N and h: {exc}") from exc
        method = doc.get("method", "custom")
        if len(rows) != N:
            raise DataError(f"triangle has {len(rows)} rows, expected N={N}")
        H = np.zeros((N, N))
        for i, row in enumerate(rows):
            if len(row) != i + 1:
                raise DataError(f"row {i + 1} must hold {i + 1} entries, got {len(row)}")
            H[i, : i + 1] = row
        return cls(N, H, method if method in METHODS else "custom")


def load_schedule(path):
    with open(path, encoding="utf-8") as fh:
        return StepSchedule.from_json(json.load(fh))


def step_schedule(method, N):
    """Build the triangle of ``gm``, ``ogm``, ``ogmg`` or ``ogmg_alt``.

    ``ogmg`` uses the recursion along a row (k descending); ``ogmg_alt`` the
    equivalent recursion down a column that the efficient form implies.
    """
    N = _check_N(N)
    if method == "gm":
        return StepSchedule(N, np.eye(N), "gm")
    if method == "ogm":
        return StepSchedule(N, _core.ogm_triangle(theta_sequence("ogm_hat", N).values), "ogm")
    if method == "ogmg":
        return StepSchedule(N, _core.ogmg_triangle(theta_sequence("ogmg_tilde", N).values), "ogmg")
    if method == "ogmg_alt":
        return StepSchedule(N, _core.ogmg_alt_triangle(theta_sequence("ogmg_tilde", N).values), "ogmg_alt")
    raise ParameterError(f"no built-in triangle for method {method!r}")


def closed_form_h(i, j, seq):
    """h_{i,j} = theta_i^2 (2 theta_i - 1) / (theta_j theta_{j+1}^2), 2 <= i <= N, j <= i-2."""
    if seq.variant != "ogmg_tilde":
        raise ParameterError("closed form applies to the OGM-G theta sequence")
    if not (2 <= i <= seq.N and 0 <= j <= i - 2):
        raise ParameterError(f"(i, j) = ({i}, {j}) outside 2 <= i <= N={seq.N}, 0 <= j <= i-2")
    t = seq.values
    return float(t[i] ** 2 * (2.0 * t[i] - 1.0) / (t[j] * t[j + 1] ** 2))


def _rel(x, y):
    return abs(x - y) / max(abs(y), np.finfo(float).tiny)


def closed_form_check(schedule, seq, rel=1e-11):
    """Compare every admissible recursive entry with :func:`closed_form_h`."""
    report = IdentityReport()
    for i in range(2, schedule.N + 1):
        for j in range(i - 1):
            report.record("closed_form", (i, j), _rel(schedule.h(i, j), closed_form_h(i, j, seq)), rel)
    return report


def column_tail_sums(schedule, seq, rel=1e-10):
    """Check the three column tail-sum identities of the OGM-G triangle.

    sum_{l=i+1}^N h_{l,j} equals (theta_0+1)/2 at i = j = 0, theta_i on the
    diagonal j = i >= 1, and theta_{i+1}^4 / (theta_j theta_{j+1}^2) for
    j < i, 1 <= i <= N-1.
    """
    if schedule.N != seq.N or seq.variant != "ogmg_tilde":
        raise ParameterError("column_tail_sums needs an OGM-G theta sequence of the same N")
    if schedule.method not in ("ogmg", "ogmg_alt", "custom"):
        raise ParameterError(f"tail-sum identities hold for OGM-G triangles, not {schedule.method}")
    N = schedule.N
    t = seq.values
    T = _core.tail_sums(schedule.H)
    report = IdentityReport()
    report.record("tail_first", (0, 0), _rel(T[1, 0], 0.5 * (t[0] + 1.0)), rel)
    for i in range(1, N):
        report.record("tail_diagonal", (i, i), _rel(T[i + 1, i], t[i]), rel)
        for j in range(i):
            expected = t[i + 1] ** 4 / (t[j] * t[j + 1] ** 2)
            report.record("tail_lower", (i, j), _rel(T[i + 1, j], expected), rel)
    return report


def symmetry_check(h_ogm, h_ogmg, rel=1e-11):
    """Check h_hat_{i+1,k} = h_tilde_{N-k,N-i-1} for all 0 <= k <= i <= N-1."""
    if h_ogm.N != h_ogmg.N:
        raise ParameterError("triangles must have the same N")
    N = h_ogm.N
    report = IdentityReport()
    for i in range(N):
        for k in range(i + 1):
            report.record("h_symmetry", (i, k), _rel(h_ogm.h(i + 1, k), h_ogmg.h(N - k, N - i - 1)), rel)
    return report


def total_step_sum(schedule):
    """sum over all entries of the triangle (equals (theta_0^2 - 1)/2 for OGM-G)."""
    return float(schedule.H.sum())
