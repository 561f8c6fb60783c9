"""Relaxed performance-estimation matrices and dual certificate verification.

For an N-step triangle h and multipliers (a, b, c, e) the dual certificate is
valid when a, b, c, e >= 0, the linear equalities

    -a_1 + b_0 + e = 0,  a_N - sum_i b_i - c = 0,  a_i - a_{i+1} + b_i = 0,

hold, and

    S = sum_i a_i A_{i-1,i} + sum_i b_i B_{N,i} + c C_N - u_N u_N^T

is positive semidefinite. Then ||grad f(x_N)||^2 <= L^2 R^2 e / 2 whenever
f(x_0) - f* <= L R^2 / 2. Matrices have order N+1 (indices 0..N).
"""
from dataclasses import dataclass, field
import json
import math

import numpy as np

from . import _core
from .config import tolerance
from .errors import ContractError, DataError, InternalConsistencyError, ParameterError
from .schedule import _check_N, theta_sequence


class SymMatrix:
    """Dense symmetric matrix storing only the upper triangle.

    Reads mirror the stored half, so symmetry holds by construction.
    """

    __slots__ = ("n", "_upper")

    def __init__(self, n, data=None):
        self.n = int(n)
        self._upper = np.zeros(self.n * (self.n + 1) // 2)
        if data is not None:
            data = np.asarray(data, dtype=float)
            if data.shape != (self.n, self.n):
                raise ParameterError(f"expected a {self.n}x{self.n} array, got {data.shape}")
            iu = np.triu_indices(self.n)
            self._upper[:] = data[iu]

    def _index(self, i, j):
        if i > j:
            i, j = j, i
        # row-major packed upper triangle
        return i * self.n - i * (i - 1) // 2 + (j - i)

    def __getitem__(self, ij):
        i, j = ij
        return float(self._upper[self._index(i, j)])

    def __setitem__(self, ij, value):
        i, j = ij
        self._upper[self._index(i, j)] = value

    def add_sym(self, i, ks, values):
        """Add sum_k values_k (u_i u_k^T + u_k u_i^T) / 2 for unit vectors u."""
        ks = np.atleast_1d(np.asarray(ks, dtype=int))
        values = np.atleast_1d(np.asarray(values, dtype=float))
        lo = np.minimum(ks, i)
        hi = np.maximum(ks, i)
        idx = lo * self.n - lo * (lo - 1) // 2 + (hi - lo)
        # the diagonal term u_i u_i^T appears twice in the symmetrized sum
        np.add.at(self._upper, idx, np.where(ks == i, values, 0.5 * values))

    def __iadd__(self, other):
        self._upper += other._upper
        return self

    def scaled(self, s):
        out = SymMatrix(self.n)
        out._upper = s * self._upper
        return out

    def to_array(self):
        out = np.zeros((self.n, self.n))
        iu = np.triu_indices(self.n)
        out[iu] = self._upper
        out.T[iu] = self._upper
        return out

    @classmethod
    def from_array(cls, array):
        array = np.asarray(array, dtype=float)
        return cls(array.shape[0], array)

    def __repr__(self):
        return f"SymMatrix(n={self.n})"


@dataclass(frozen=True)
class DualCertificate:
    """Multipliers a_1..a_N, b_0..b_{N-1}, c, e."""

    N: int
    a: np.ndarray
    b: np.ndarray
    c: float
    e: float

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        b = np.array(self.b, dtype=float)
        if a.shape != (self.N,) or b.shape != (self.N,):
            raise ParameterError(f"a and b must each hold N={self.N} values")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "e", float(self.e))

    def equality_residuals(self):
        """[-a_1 + b_0 + e, a_N - sum b - c, a_i - a_{i+1} + b_i (i=1..N-1)]."""
        a, b = self.a, self.b
        first = -a[0] + b[0] + self.e
        last = a[-1] - b.sum() - self.c
        chain = a[:-1] - a[1:] + b[1:]
        return np.concatenate(([first, last], chain))

    def to_json(self):
        return {"N": self.N, "a": self.a.tolist(), "b": self.b.tolist(), "c": self.c, "e": self.e}

    @classmethod
    def from_json(cls, doc):
        try:
            return cls(int(doc["N"]), doc["a"], doc["b"], doc["c"], doc["e"])
        except (KeyError, TypeError) as exc:
            raise DataError(f"certificate document needs N, a, b, c, e: {exc}") from exc


def load_certificate(path):
    with open(path, encoding="utf-8") as fh:
        return DualCertificate.from_json(json.load(fh))


@dataclass
class PepMatrices:
    A: list
    B: list
    C: SymMatrix


def _add_A(M, schedule, i, w=1.0):
    # A_{i-1,i} = (u_{i-1}-u_i)(u_{i-1}-u_i)^T/2 + sum_k h_{i,k}(u_i u_k^T + u_k u_i^T)/2
    M.add_sym(i - 1, [i - 1, i], [0.5 * w, -w])
    M.add_sym(i, [i], [0.5 * w])
    M.add_sym(i, np.arange(i), w * schedule.H[i - 1, :i])


def _add_B(M, schedule, i, w=1.0, weights=None):
    # B_{N,i} = (u_N-u_i)(u_N-u_i)^T/2 - sum_{l>i} sum_{k<l} h_{l,k}(u_i u_k^T + u_k u_i^T)/2
    N = schedule.N
    M.add_sym(N, [N, i], [0.5 * w, -w])
    M.add_sym(i, [i], [0.5 * w])
    if weights is None:
        # rows l-1 >= i of the triangle hold h_{l,k} for l = i+1..N
        weights = schedule.H[i:, :].sum(axis=0)
    M.add_sym(i, np.arange(N), -w * weights)


def _A_matrix(schedule, i):
    M = SymMatrix(schedule.N + 1)
    _add_A(M, schedule, i)
    return M


def _B_matrix(schedule, i):
    M = SymMatrix(schedule.N + 1)
    _add_B(M, schedule, i)
    return M


def _C_matrix(N):
    M = SymMatrix(N + 1)
    M.add_sym(N, [N], [0.5])
    return M


def pep_matrices(schedule):
    """A_{i-1,i} (i = 1..N), B_{N,i} (i = 0..N-1) and C_N, built from unit vectors."""
    N = schedule.N
    return PepMatrices([_A_matrix(schedule, i) for i in range(1, N + 1)],
                       [_B_matrix(schedule, i) for i in range(N)],
                       _C_matrix(N))


def _check_pair(schedule, cert):
    if cert.N != schedule.N:
        raise ParameterError(f"certificate has N={cert.N} but the schedule has N={schedule.N}")


def assemble_S_sum(schedule, cert, mats=None):
    """S as the weighted sum of the PEP matrices.

    Without ``mats`` the weighted terms are accumulated in place, so no
    per-term matrix is ever allocated.
    """
    _check_pair(schedule, cert)
    N = schedule.N
    S = SymMatrix(N + 1)
    if mats is not None:
        for i in range(N):
            S += mats.A[i].scaled(cert.a[i])
            S += mats.B[i].scaled(cert.b[i])
        S += mats.C.scaled(cert.c)
    else:
        # running column sums of rows i..N-1, built from the bottom up
        tail = np.zeros(N)
        tails = np.empty((N, N))
        for i in range(N - 1, -1, -1):
            tail += schedule.H[i]
            tails[i] = tail
        for i in range(N):
            _add_A(S, schedule, i + 1, cert.a[i])
            _add_B(S, schedule, i, cert.b[i], tails[i])
        S.add_sym(N, [N], [0.5 * cert.c])
    S[N, N] = S[N, N] - 1.0
    return S


def assemble_S(schedule, cert, check=True):
    """Entrywise S; cross-checked against :func:`assemble_S_sum` when ``check``."""
    _check_pair(schedule, cert)
    S = _core.assemble_s(schedule.H, cert.a, cert.b, cert.c)
    if check:
        ref = assemble_S_sum(schedule, cert).to_array()
        gap = float(np.max(np.abs(S - ref)))
        if gap > tolerance("assembly"):
            raise InternalConsistencyError(f"entrywise and summed S differ by {gap:.3e}")
    return SymMatrix.from_array(S)


def dual_certificate(method, N):
    """Closed-form multipliers for ``gm`` or ``ogmg``."""
    N = _check_N(N)
    if method == "gm":
        i = np.arange(1, N + 1, dtype=float)
        e = 2.0 / (2 * N + 1)
        a = 2.0 * (N + i) / ((N - i + 1) * (2 * N + 1))
        b = np.empty(N)
        b[0] = 2.0 / (N * (2 * N + 1))
        j = np.arange(1, N, dtype=float)
        b[1:] = 2.0 / ((N - j) * (N - j + 1))
        return DualCertificate(N, a, b, e, e)
    if method == "ogmg":
        t = theta_sequence("ogmg_tilde", N).values
        a = 1.0 / t[1:] ** 2
        b = 1.0 / (t[:-1] * t[1:] ** 2)
        e = 2.0 / t[0] ** 2
        return DualCertificate(N, a, b, e, e)
    raise ParameterError(f"no closed-form certificate for method {method!r}")


@dataclass
class VerificationReport:
    feasible: bool
    nonnegative: bool
    equalities_ok: bool
    equality_residuals: list
    psd: bool
    psd_margin: float
    psd_rank: int
    psd_residual: float
    dominance: bool
    max_abs_entry: float
    certificate: DualCertificate = field(repr=False)
    schedule_N: int = 0

    def to_json(self, L=1.0, R=1.0):
        return {
            "feasible": self.feasible,
            "nonnegative": self.nonnegative,
            "equality_residuals": [float(r) for r in self.equality_residuals],
            "psd_margin": self.psd_margin,
            "psd_rank": self.psd_rank,
            "dominance": self.dominance,
            "max_abs_entry": self.max_abs_entry,
            "bound": certified_bound(self, L, R) if self.feasible else None,
        }


def diagonal_dominance(S, slack=None):
    """[S]_ii >= sum_{j != i} |S_ij| - slack with nonnegative diagonal."""
    slack = tolerance("dominance") if slack is None else slack
    diag = np.diagonal(S)
    off = np.abs(S).sum(axis=1) - np.abs(diag)
    return bool(np.all(diag >= -slack) and np.all(diag >= off - slack))


def verify_certificate(schedule, cert):
    """Check nonnegativity, the equalities and S >= 0; never raises on infeasibility."""
    _check_pair(schedule, cert)
    eq_tol = tolerance("equality")
    values = np.concatenate((cert.a, cert.b, [cert.c, cert.e]))
    nonneg = bool(np.all(values >= 0.0) and np.all(np.isfinite(values)))
    res = cert.equality_residuals()
    eq_ok = bool(np.all(np.abs(res) <= eq_tol))
    S = assemble_S(schedule, cert).to_array()
    scale = max(1.0, float(np.linalg.norm(S)))
    psd, rank, residual = _core.pivoted_cholesky(S, tolerance("psd") * scale)
    margin = float(np.linalg.eigvalsh(S)[0]) if np.all(np.isfinite(S)) else -math.inf
    return VerificationReport(
        feasible=bool(nonneg and eq_ok and psd),
        nonnegative=nonneg,
        equalities_ok=eq_ok,
        equality_residuals=res.tolist(),
        psd=bool(psd),
        psd_margin=margin,
        psd_rank=int(rank),
        psd_residual=float(residual),
        dominance=diagonal_dominance(S),
        max_abs_entry=float(np.max(np.abs(S))),
        certificate=cert,
        schedule_N=schedule.N,
    )


def certified_bound(report, L, R):
    """L^2 R^2 e / 2 for a certificate that passed :func:`verify_certificate`."""
    if not isinstance(report, VerificationReport):
        raise ContractError("certified_bound needs the report of verify_certificate, not a raw certificate")
    if not report.feasible:
        raise ContractError("certificate failed verification; no bound is certified")
    return float(L) ** 2 * float(R) ** 2 * report.certificate.e / 2.0
