"""Pure-Python (NumPy) implementations of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable or when
``FOMLAB_PURE=1`` is set. Signatures match ``_kernels.pyx`` exactly.

Triangle layout: ``H[i, k]`` holds the step coefficient h_{i+1,k} for
0 <= k <= i <= N-1; entries above the diagonal are zero.
"""
import numpy as np


def ogmg_triangle(theta):
    theta = np.asarray(theta, dtype=float)
    N = theta.size - 1
    H = np.zeros((N, N))
    # ratio[k] = (theta_{k+1} - 1) / theta_k
    ratio = (theta[1:] - 1.0) / theta[:-1]
    for i in range(N):
        H[i, i] = 1.0 + (2.0 * theta[i + 1] - 1.0) / theta[i]
        if i == 0:
            continue
        H[i, i - 1] = ratio[i - 1] * (H[i, i] - 1.0)
        if i >= 2:
            # H[i, k] = H[i, i-1] * prod_{m=k}^{i-2} ratio[m]
            tail = np.cumprod(ratio[i - 2::-1])
            H[i, i - 2::-1] = H[i, i - 1] * tail
    return H


def ogmg_alt_triangle(theta):
    theta = np.asarray(theta, dtype=float)
    N = theta.size - 1
    H = np.zeros((N, N))
    for i in range(N):
        H[i, i] = 1.0 + (2.0 * theta[i + 1] - 1.0) / theta[i]
        if i == 0:
            continue
        coef = (theta[i] - 1.0) * (2.0 * theta[i + 1] - 1.0) / (theta[i] * (2.0 * theta[i] - 1.0))
        H[i, : i - 1] = coef * H[i - 1, : i - 1]
        H[i, i - 1] = coef * (H[i - 1, i - 1] - 1.0)
    return H


def ogm_triangle(theta):
    theta = np.asarray(theta, dtype=float)
    N = theta.size - 1
    H = np.zeros((N, N))
    for i in range(N):
        H[i, i] = 1.0 + (2.0 * theta[i] - 1.0) / theta[i + 1]
        if i == 0:
            continue
        coef = (theta[i] - 1.0) / theta[i + 1]
        H[i, : i - 1] = coef * H[i - 1, : i - 1]
        H[i, i - 1] = coef * (H[i - 1, i - 1] - 1.0)
    return H


def tail_sums(H):
    """T[m, k] = sum_{l=m}^{N} h_{l,k}, shape (N+2, N)."""
    H = np.asarray(H, dtype=float)
    N = H.shape[0]
    T = np.zeros((N + 2, N))
    # row l of padded holds h_{l,k}; l = 0 is empty
    T[1 : N + 1] = np.cumsum(H[::-1], axis=0)[::-1]
    return T


def assemble_s(H, a, b, c):
    """Entrywise S(h, a, b, c) of order N+1 (a = a_1..a_N, b = b_0..b_{N-1})."""
    H = np.asarray(H, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    N = H.shape[0]
    T = tail_sums(H)
    S2 = np.zeros((N + 1, N + 1))
    idx = np.arange(N)
    # diagonal, rows 0..N-1
    a_next = a  # a_{i+1} for i = 0..N-1
    a_cur = np.concatenate(([0.0], a[:-1]))  # a_i, with a_0 := 0
    S2[idx, idx] = a_cur + a_next + b * (1.0 - 2.0 * T[idx + 1, idx])
    S2[N, N] = a[-1] + b.sum() + c - 2.0
    # strict lower part, rows 1..N-1
    for i in range(1, N):
        row = a[i - 1] * H[i - 1, :i] - b[i] * T[i + 1, :i] - b[:i] * T[i + 1, i]
        row[i - 1] -= a[i - 1]
        S2[i, :i] = row
    if N >= 1:
        row = a[N - 1] * H[N - 1, :N] - b
        row[N - 1] -= a[N - 1]
        S2[N, :N] = row
    S2 += np.tril(S2, -1).T
    return 0.5 * S2


def pivoted_cholesky(S, tol):
    """Diagonally pivoted Cholesky PSD test.

    Returns ``(psd, rank, residual)``: ``rank`` pivots above ``tol`` were
    eliminated and ``residual`` is the largest magnitude left in the
    trailing Schur complement.
    """
    W = np.array(S, dtype=float, copy=True)
    n = W.shape[0]
    rank = 0
    for k in range(n):
        d = np.diagonal(W)[k:]
        p = k + int(np.argmax(d))
        piv = W[p, p]
        if piv <= tol:
            break
        if p != k:
            W[[k, p], :] = W[[p, k], :]
            W[:, [k, p]] = W[:, [p, k]]
        col = W[k + 1 :, k] / np.sqrt(piv)
        W[k + 1 :, k + 1 :] -= np.outer(col, col)
        rank += 1
    rest = W[rank:, rank:]
    residual = float(np.max(np.abs(rest))) if rest.size else 0.0
    return residual <= tol, rank, residual
