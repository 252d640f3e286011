"""Dense spectral routines: truncated SVD, thresholded eigenvectors, subspace distances."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .tensor_core import matricize

RANK_TOL = 1e-12


def sign_normalize(u: np.ndarray) -> np.ndarray:
    """Flip columns so each column's largest-magnitude entry is positive.

    Ties in magnitude go to the earliest row.
    """
    u = np.array(u, dtype=np.float64, copy=True)
    if u.size == 0:
        return u
    rows = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[rows, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs


def top_left_singular_vectors(m: np.ndarray, r: int) -> np.ndarray:
    """Orthonormal basis (``rows x r``) of the top-``r`` left singular subspace of ``m``."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("expected a matrix")
    if not 1 <= r <= min(m.shape):
        raise ValueError(f"rank {r} out of range for a {m.shape[0]}x{m.shape[1]} matrix")
    try:
        u, _, _ = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"SVD did not converge: {exc}") from exc
    return sign_normalize(u[:, :r])


def symmetric_eigh(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of the symmetric part of ``n`` in descending eigenvalue order."""
    n = np.asarray(n, dtype=np.float64)
    if n.ndim != 2 or n.shape[0] != n.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.max(np.abs(n)))) if n.size else 1.0
    if np.max(np.abs(n - n.T), initial=0.0) > 1e-8 * scale:
        raise ValueError("matrix is not symmetric")
    vals, vecs = np.linalg.eigh(0.5 * (n + n.T))
    order = np.argsort(vals, kind="stable")[::-1]
    return vals[order], sign_normalize(vecs[:, order])


def eigvecs_above(n: np.ndarray, tau: float) -> np.ndarray:
    """Eigenvectors of symmetric ``n`` whose eigenvalues are strictly greater than ``tau``.

    Columns come in descending eigenvalue order. When nothing clears the
    threshold the result has zero columns; callers decide the fallback.
    """
    if tau < 0:
        raise ValueError("threshold must be nonnegative")
    vals, vecs = symmetric_eigh(n)
    return vecs[:, vals > tau]


def projector(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    return u @ u.T


def subspace_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Spectral norm of ``U U^T - V V^T`` (the sine of the largest principal angle)."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape[0] != v.shape[0]:
        raise ValueError(f"ambient dimensions differ: {u.shape[0]} vs {v.shape[0]}")
    diff = projector(u) - projector(v)
    # symmetric, so the spectral norm is the largest |eigenvalue|
    return float(np.max(np.abs(np.linalg.eigvalsh(diff)), initial=0.0))


@dataclass(frozen=True)
class ModeSpectrum:
    sigma_min: tuple[float, ...]
    sigma_max: tuple[float, ...]

    @property
    def lambda_min(self) -> float:
        return min(self.sigma_min)

    @property
    def lambda_max(self) -> float:
        return max(self.sigma_max)

    @property
    def kappa(self) -> float:
        return self.lambda_max / self.lambda_min


def mode_spectrum(a: np.ndarray, ranks: Sequence[int]) -> ModeSpectrum:
    """Per-mode extreme singular values of the flattenings of ``a``.

    The smallest value for mode ``j`` is the ``ranks[j]``-th singular value
    of the mode-``j`` flattening.
    """
    a = np.asarray(a, dtype=np.float64)
    if len(ranks) != a.ndim:
        raise ValueError(f"need {a.ndim} ranks, got {len(ranks)}")
    lo, hi = [], []
    for j, r in enumerate(ranks):
        s = np.linalg.svd(matricize(a, j), compute_uv=False)
        if not 1 <= r <= s.size:
            raise ValueError(f"rank {r} out of range for mode {j}")
        if s[r - 1] < RANK_TOL:
            raise ValueError(f"mode {j} has fewer than {r} nonzero singular values")
        lo.append(float(s[r - 1]))
        hi.append(float(s[0]))
    return ModeSpectrum(tuple(lo), tuple(hi))
