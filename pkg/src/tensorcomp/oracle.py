"""Brute-force reference computations for checking the fast code paths.

Everything here is deliberately slow and literal. Size guards raise
instead of subsampling.
"""
from __future__ import annotations

import itertools

import numpy as np

from .obs_model import Dataset, n_hat, observation_indices, t_init
from .tensor_core import basis_tensor, matricize

MAX_ENTRIES = 10_000
MAX_PAIR_ENTRIES = 1_000
MAX_PAIRWISE_N = 500


def _guard(size: int, limit: int, what: str) -> None:
    if size > limit:
        raise ValueError(f"{what} too large for the oracle ({size} > {limit})")


def expect_t_init_exhaustive(t: np.ndarray, estimator=t_init) -> np.ndarray:
    """Exact mean of ``estimator`` over every noiseless one-observation dataset."""
    t = np.asarray(t, dtype=np.float64)
    _guard(t.size, MAX_ENTRIES, "tensor")
    total = np.zeros(t.shape)
    for idx in observation_indices(t.shape):
        total += estimator(Dataset(t.shape, idx[None, :], [t[tuple(idx)]]))
    return total / t.size


def expect_n_hat_exhaustive(t: np.ndarray, mode: int, estimator=n_hat) -> np.ndarray:
    """Exact mean of ``estimator`` over every ordered pair of noiseless observations."""
    t = np.asarray(t, dtype=np.float64)
    _guard(t.size, MAX_PAIR_ENTRIES, "tensor")
    all_idx = observation_indices(t.shape)
    total = np.zeros((t.shape[mode],) * 2)
    for a, b in itertools.product(all_idx, repeat=2):
        idx = np.stack([a, b])
        total += estimator(Dataset(t.shape, idx, [t[tuple(a)], t[tuple(b)]]), mode)
    return total / t.size ** 2


def n_hat_pairwise(data: Dataset, mode: int) -> np.ndarray:
    """U-statistic summed literally over all ordered pairs ``i != i'``."""
    if data.n < 2:
        raise ValueError("needs at least two observations")
    _guard(data.n, MAX_PAIRWISE_N, "dataset")
    _guard(int(np.prod(data.dims)), MAX_ENTRIES, "tensor")
    flats = np.stack([matricize(basis_tensor(data.dims, idx), mode) for idx in data.indices])
    pair = np.einsum("iac,jbc->ijab", flats, flats)
    w = np.outer(data.values, data.values)
    np.fill_diagonal(w, 0.0)
    size = float(np.prod(data.dims))
    return np.einsum("ij,ijab->ab", w, pair) * size ** 2 / (data.n * (data.n - 1))


def gram_naive(t: np.ndarray, mode: int) -> np.ndarray:
    """``M_j(T) M_j(T)^T`` by summing fiber outer products one entry at a time."""
    t = np.asarray(t, dtype=np.float64)
    d = t.shape[mode]
    out = np.zeros((d, d))
    rest = [range(n) for j, n in enumerate(t.shape) if j != mode]
    for other in itertools.product(*rest):
        for a in range(d):
            for b in range(d):
                ia = list(other)
                ib = list(other)
                ia.insert(mode, a)
                ib.insert(mode, b)
                out[a, b] += t[tuple(ia)] * t[tuple(ib)]
    return out


def matricize_naive(t: np.ndarray, mode: int) -> np.ndarray:
    """Flattening from explicit mixed-radix column arithmetic."""
    t = np.asarray(t)
    rest = [j for j in range(t.ndim) if j != mode]
    ncols = int(np.prod([t.shape[j] for j in rest]))
    out = np.zeros((t.shape[mode], ncols), dtype=t.dtype)
    for idx in itertools.product(*(range(n) for n in t.shape)):
        col = 0
        for j in rest:
            col = col * t.shape[j] + idx[j]
        out[idx[mode], col] = t[idx]
    return out


def mode_multiply_naive(a: np.ndarray, mode: int, b: np.ndarray) -> np.ndarray:
    """Marginal multiplication by explicit summation over the contracted index."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 2 or b.shape[0] != a.shape[mode]:
        raise ValueError("dimension mismatch")
    shape = list(a.shape)
    shape[mode] = b.shape[1]
    out = np.zeros(shape)
    for idx in itertools.product(*(range(n) for n in shape)):
        src = list(idx)
        acc = 0.0
        for k in range(a.shape[mode]):
            src[mode] = k
            acc += a[tuple(src)] * b[k, idx[mode]]
        out[idx] = acc
    return out


def jacobi_svd(m: np.ndarray, tol: float = 1e-15, max_sweeps: int = 100):
    """One-sided Jacobi SVD, independent of LAPACK's bidiagonal routines.

    Returns ``(u, s, vt)`` with singular values in descending order and
    ``u`` of shape ``rows x min(rows, cols)``.
    """
    m = np.asarray(m, dtype=np.float64)
    transposed = m.shape[0] < m.shape[1]
    a = (m.T if transposed else m).copy()
    ncol = a.shape[1]
    v = np.eye(ncol)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(ncol - 1):
            for q in range(p + 1, ncol):
                alpha = a[:, p] @ a[:, p]
                beta = a[:, q] @ a[:, q]
                gamma = a[:, p] @ a[:, q]
                if abs(gamma) <= tol * np.sqrt(alpha * beta) or gamma == 0:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2 * gamma)
                t = np.sign(zeta) / (abs(zeta) + np.sqrt(1 + zeta * zeta)) if zeta else 1.0
                c = 1 / np.sqrt(1 + t * t)
                s = c * t
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * ap - s * aq, s * ap + c * aq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
        if not rotated:
            break
    sing = np.linalg.norm(a, axis=0)
    order = np.argsort(-sing, kind="stable")
    sing, a, v = sing[order], a[:, order], v[:, order]
    u = np.zeros_like(a)
    nz = sing > 0
    u[:, nz] = a[:, nz] / sing[nz]
    if transposed:
        return v, sing, u.T
    return u, sing, v.T
