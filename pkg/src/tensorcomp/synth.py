"""Random low-rank tensor models and incoherence diagnostics."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .obs_model import make_rng
from .spectra import subspace_distance
from .tensor_core import core_tensor, lp_norm, matricize, outer_product

TUCKER = "tucker"
CP_ORTHO = "cp_ortho"
CP_SYM_GAUSS = "cp_sym_gauss"
KINDS = (TUCKER, CP_ORTHO, CP_SYM_GAUSS)


def random_orthonormal(d: int, r: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed ``d x r`` matrix with orthonormal columns.

    QR of a standard Gaussian matrix with the signs fixed so that R has a
    positive diagonal.
    """
    if not 1 <= r <= d:
        raise ValueError(f"cannot draw {r} orthonormal columns in dimension {d}")
    q, rr = np.linalg.qr(rng.standard_normal((d, r)))
    signs = np.sign(np.diag(rr))
    signs[signs == 0] = 1.0
    return q * signs


@dataclass(frozen=True)
class ModelSpec:
    """A random low-rank model.

    ``ranks`` holds per-mode Tucker ranks for TUCKER; the CP kinds use
    ``ranks[0]`` as the number of components. ``scale`` defaults to
    ``sqrt(prod(dims))`` for CP_ORTHO (``d**1.5`` for cubic third-order
    tensors) and to 1 otherwise.
    """

    kind: str
    dims: tuple[int, ...]
    ranks: tuple[int, ...]
    scale: float | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        ranks = (self.ranks,) if np.isscalar(self.ranks) else self.ranks
        object.__setattr__(self, "ranks", tuple(int(r) for r in ranks))
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if len(self.dims) < 2 or any(d < 1 for d in self.dims):
            raise ValueError(f"invalid dims {self.dims}")
        if self.kind == TUCKER:
            if len(self.ranks) != len(self.dims):
                raise ValueError("TUCKER needs one rank per mode")
            if any(not 1 <= r <= d for r, d in zip(self.ranks, self.dims)):
                raise ValueError(f"ranks {self.ranks} invalid for dims {self.dims}")
        else:
            if len(set(self.ranks)) != 1:
                raise ValueError("CP models take a single rank")
            if not 1 <= self.ranks[0] <= min(self.dims):
                raise ValueError(f"rank {self.ranks[0]} invalid for dims {self.dims}")
            if self.kind == CP_SYM_GAUSS and len(set(self.dims)) != 1:
                raise ValueError("the symmetric model needs equal dimensions")
        if self.scale is not None and not self.scale > 0:
            raise ValueError("scale must be positive")

    @property
    def rank(self) -> int:
        return self.ranks[0]


def _orth(a: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(a)
    return q


def generate(spec: ModelSpec, rng: np.random.Generator | None = None) -> tuple[np.ndarray, list[np.ndarray]]:
    """Draw a tensor from ``spec`` together with orthonormal bases of its mode subspaces."""
    rng = make_rng(spec.seed) if rng is None else rng
    dims, k = spec.dims, len(spec.dims)
    if spec.kind == CP_ORTHO:
        r = spec.rank
        scale = np.sqrt(float(np.prod(dims))) if spec.scale is None else spec.scale
        factors = [random_orthonormal(d, r, rng) for d in dims]
        core = np.zeros((r,) * k)
        core[(np.arange(r),) * k] = scale
        return core_tensor(core, [u.T for u in factors]), factors
    if spec.kind == CP_SYM_GAUSS:
        r, d = spec.rank, dims[0]
        scale = 1.0 if spec.scale is None else spec.scale
        vecs = rng.standard_normal((r, d))
        t = sum(outer_product([v] * k) for v in vecs) * scale
        return t, [_orth(vecs.T) for _ in range(k)]
    scale = 1.0 if spec.scale is None else spec.scale
    factors = [random_orthonormal(d, r, rng) for d, r in zip(dims, spec.ranks)]
    core = scale * rng.standard_normal(spec.ranks)
    return core_tensor(core, [u.T for u in factors]), factors


def coherence(u: np.ndarray) -> float:
    """``(d / r) * max_i ||U[i, :]||^2`` for a ``d x r`` orthonormal basis."""
    u = np.asarray(u, dtype=np.float64)
    d, r = u.shape
    return d / r * float(np.max(np.sum(u * u, axis=1)))


def mode_bases(a: np.ndarray, rtol: float = 1e-10) -> list[np.ndarray]:
    """Left singular bases of each flattening, truncated at ``rtol * sigma_max``."""
    out = []
    for j in range(np.ndim(a)):
        u, s, _ = np.linalg.svd(matricize(a, j), full_matrices=False)
        out.append(u[:, s > rtol * s[0]])
    return out


def tensor_coherence(a: np.ndarray, rtol: float = 1e-10) -> float:
    if not np.any(a):
        raise ValueError("coherence of the zero tensor is undefined")
    return max(coherence(u) for u in mode_bases(a, rtol))


def spikiness(a: np.ndarray) -> float:
    """``sqrt(prod(dims)) * ||A||_inf / ||A||_2``."""
    a = np.asarray(a, dtype=np.float64)
    norm = lp_norm(a, 2)
    if norm == 0:
        raise ValueError("spikiness of the zero tensor is undefined")
    return float(np.sqrt(a.size) * lp_norm(a, np.inf) / norm)


def relative_error(t_hat: np.ndarray, t_true: np.ndarray) -> float:
    t_hat = np.asarray(t_hat, dtype=np.float64)
    t_true = np.asarray(t_true, dtype=np.float64)
    if t_hat.shape != t_true.shape:
        raise ValueError(f"shape mismatch: {t_hat.shape} vs {t_true.shape}")
    norm = lp_norm(t_true, 2)
    if norm == 0:
        raise ValueError("relative error against a zero tensor is undefined")
    return lp_norm(t_hat - t_true, 2) / norm


def subspace_error(est: Sequence[np.ndarray], truth: Sequence[np.ndarray]) -> list[float]:
    if len(est) != len(truth):
        raise ValueError("factor sets differ in length")
    return [subspace_distance(u, v) for u, v in zip(est, truth)]
