"""Low-rank completion: spectral and HOSVD initializations followed by power iterations."""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from .obs_model import Dataset, n_hat, t_init
from .spectra import sign_normalize, subspace_distance, symmetric_eigh, top_left_singular_vectors
from .tensor_core import core_tensor, lp_norm, matricize, mode_multiply, project_multilinear

SPECTRAL = "spectral"
HOSVD = "hosvd"
AUTO = "auto"

# normal-consistency constant for the median absolute deviation
MAD_SCALE = 1.4826


def default_iter_max(dims: Sequence[int]) -> int:
    return max(10, math.ceil(4 * math.log(max(dims))))


@dataclass
class CompletionConfig:
    ranks: tuple[int, ...]
    iter_max: int | None = None
    lam: Union[float, str] = AUTO
    stop_tol: float = 1e-8
    init: str = SPECTRAL

    def __post_init__(self):
        self.ranks = tuple(int(r) for r in self.ranks)
        if any(r < 1 for r in self.ranks):
            raise ValueError("ranks must be positive")
        if self.iter_max is not None and self.iter_max < 0:
            raise ValueError("iter_max must be nonnegative")
        if self.init not in (SPECTRAL, HOSVD):
            raise ValueError(f"unknown init method {self.init!r}")
        if isinstance(self.lam, str):
            if self.lam != AUTO:
                raise ValueError(f"lambda must be a number or {AUTO!r}")
        elif not self.lam >= 0:
            raise ValueError("lambda must be nonnegative")
        if self.stop_tol < 0:
            raise ValueError("stop_tol must be nonnegative")

    def validate(self, dims: Sequence[int]) -> None:
        if len(self.ranks) != len(dims):
            raise ValueError(f"need {len(dims)} ranks, got {len(self.ranks)}")
        for j, (r, d) in enumerate(zip(self.ranks, dims)):
            rest = int(np.prod(dims)) // d
            if r > min(d, rest):
                raise ValueError(f"rank {r} too large for mode {j} of size {d}")


@dataclass
class Estimate:
    t_hat: np.ndarray
    factors: list[np.ndarray]
    trace: list[float]
    lambda_used: float
    init_ranks_selected: tuple[int, ...]
    init_factors: list[np.ndarray] = field(default_factory=list)
    objective: list[float] = field(default_factory=list)

    @property
    def iters_run(self) -> int:
        return len(self.trace)


class PowerResult(NamedTuple):
    factors: list[np.ndarray]
    t_hat: np.ndarray
    trace: list[float]
    objective: list[float]


def default_lambda(scale: float, kappa: float, r_max: int, dims: Sequence[int], n: int,
                   gamma: float = 1.0, alpha: float = 1.0) -> float:
    """Threshold level for the spectral initialization.

    ``scale`` stands for ``max(||T||_inf, sigma)``. The eigenvalue cut-off
    applied to the second-moment estimates is the square of the returned
    value. Logarithms are natural.
    """
    dims = [int(d) for d in dims]
    if n <= 0 or any(d <= 0 for d in dims):
        raise ValueError("n and dims must be positive")
    if min(scale, kappa, r_max, gamma, alpha) <= 0:
        raise ValueError("all arguments must be positive")
    k = len(dims)
    d_max = max(dims)
    size = float(np.prod(dims))
    rk = r_max ** ((k - 2) / 2)
    terms = (
        kappa * rk * math.sqrt(d_max * size / n)
        + size ** 0.75 / math.sqrt(n)
        + rk * size / n
    )
    return gamma * alpha ** 1.5 * scale * math.log(d_max) ** (k + 2) * terms


def auto_lambda(data: Dataset, ranks: Sequence[int]) -> float:
    """:func:`default_lambda` with plug-in estimates taken from the data.

    ``||T||_inf`` is replaced by ``max|y_i|``, the noise level by the
    normal-consistent MAD of ``y``; kappa, gamma and alpha are 1.
    """
    y = data.values
    sigma = MAD_SCALE * float(np.median(np.abs(y - np.median(y))))
    scale = max(float(np.max(np.abs(y))), sigma)
    if scale == 0:
        return 0.0
    return default_lambda(scale, 1.0, max(ranks), data.dims, data.n)


def spectral_init(data: Dataset, lam: float, ranks: Sequence[int]) -> tuple[list[np.ndarray], tuple[int, ...]]:
    """Eigenvectors of each mode's U-statistic with eigenvalue above ``lam**2``.

    The selection for mode ``j`` is clamped to at most ``ranks[j]``
    columns; an empty selection falls back to the leading eigenvector.
    Returns the factors and the number of columns kept per mode.
    """
    if data.n < 2:
        raise ValueError("spectral initialization needs at least two observations")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    factors, counts = [], []
    tau = lam * lam
    for j, r in enumerate(ranks):
        vals, vecs = symmetric_eigh(n_hat(data, j))
        keep = min(max(int(np.count_nonzero(vals > tau)), 1), r)
        counts.append(keep)
        factors.append(vecs[:, :keep])
    return factors, tuple(counts)


def hosvd_init(t0: np.ndarray, ranks: Sequence[int]) -> list[np.ndarray]:
    """Leading left singular vectors of each flattening of ``t0``."""
    t0 = np.asarray(t0, dtype=np.float64)
    if len(ranks) != t0.ndim:
        raise ValueError(f"need {t0.ndim} ranks, got {len(ranks)}")
    return [top_left_singular_vectors(matricize(t0, j), r) for j, r in enumerate(ranks)]


def pad_factors(t0: np.ndarray, factors: Sequence[np.ndarray], ranks: Sequence[int]) -> list[np.ndarray]:
    """Widen each factor to ``ranks[j]`` columns.

    Missing columns come from the HOSVD directions of ``t0`` after removing
    their component along the existing columns.
    """
    out = []
    for j, (u, r) in enumerate(zip(factors, ranks)):
        u = np.asarray(u, dtype=np.float64)
        if u.shape[1] > r:
            raise ValueError(f"factor {j} has {u.shape[1]} columns, more than rank {r}")
        if u.shape[1] == r:
            out.append(u)
            continue
        m = matricize(t0, j)
        m = m - u @ (u.T @ m)
        extra = top_left_singular_vectors(m, r - u.shape[1]) if np.any(m) else None
        if extra is None or np.linalg.matrix_rank(np.hstack([u, extra])) < r:
            # t0 gives no usable direction; complete with coordinate axes
            eye = np.eye(u.shape[0])
            extra = eye - u @ (u.T @ eye)
            extra = top_left_singular_vectors(extra, r - u.shape[1])
        extra = extra - u @ (u.T @ extra)
        q, _ = np.linalg.qr(extra)
        out.append(np.hstack([u, sign_normalize(q)]))
    return out


def _mode_update(t0: np.ndarray, factors: Sequence[np.ndarray], j: int, r: int) -> np.ndarray:
    y = t0
    for jj, u in enumerate(factors):
        if jj != j:
            y = mode_multiply(y, jj, u)
    return top_left_singular_vectors(matricize(y, j), r)


def power_iterations(t0: np.ndarray, init: Sequence[np.ndarray], ranks: Sequence[int],
                     iter_max: int, stop_tol: float = 1e-8) -> PowerResult:
    """Alternating updates of the mode subspaces (higher-order orthogonal iteration).

    Each sweep updates modes in ascending order; mode ``j`` uses the
    factors already refreshed in this sweep for modes below ``j`` and the
    previous sweep's factors above it. ``trace`` holds the largest subspace
    change per sweep and the loop stops early once it drops below
    ``stop_tol``. ``objective[i]`` is the norm of the projection of ``t0``
    after ``i`` sweeps (entry 0 is the initialization). With
    ``iter_max=0`` the result is the projection onto the padded init.
    """
    t0 = np.asarray(t0, dtype=np.float64)
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != t0.ndim or len(init) != t0.ndim:
        raise ValueError("ranks and init must have one entry per mode")
    if iter_max < 0:
        raise ValueError("iter_max must be nonnegative")
    for j, r in enumerate(ranks):
        if not 1 <= r <= t0.shape[j]:
            raise ValueError(f"rank {r} out of range for mode {j} of size {t0.shape[j]}")
    factors = pad_factors(t0, init, ranks)
    trace: list[float] = []
    objective = [lp_norm(core_tensor(t0, factors))]
    for _ in range(iter_max):
        change = 0.0
        for j, r in enumerate(ranks):
            new = _mode_update(t0, factors, j, r)
            change = max(change, subspace_distance(new, factors[j]))
            factors[j] = new
        trace.append(change)
        objective.append(lp_norm(core_tensor(t0, factors)))
        if change < stop_tol:
            break
    return PowerResult(factors, project_multilinear(t0, factors, check=False), trace, objective)


def complete(data: Dataset, config: CompletionConfig) -> Estimate:
    """Estimate the full tensor from ``data``.

    Builds the weighted estimate, initializes the subspaces (spectral or
    HOSVD), refines them with power iterations and projects.
    """
    config.validate(data.dims)
    ranks = config.ranks
    t0 = t_init(data)
    iter_max = default_iter_max(data.dims) if config.iter_max is None else config.iter_max
    if config.init == SPECTRAL:
        lam = auto_lambda(data, ranks) if config.lam == AUTO else float(config.lam)
        init, counts = spectral_init(data, lam, ranks)
    else:
        lam = float("nan")
        init = hosvd_init(t0, ranks)
        counts = tuple(ranks)
    init = pad_factors(t0, init, ranks)
    res = power_iterations(t0, init, ranks, iter_max, config.stop_tol)
    return Estimate(
        t_hat=res.t_hat,
        factors=res.factors,
        trace=res.trace,
        lambda_used=lam,
        init_ranks_selected=counts,
        init_factors=init,
        objective=res.objective,
    )


def multilinear_ranks(a: np.ndarray, rtol: float = 1e-10) -> tuple[int, ...]:
    """Numerical rank of every flattening (singular values above ``rtol * sigma_max``)."""
    out = []
    for j in range(np.ndim(a)):
        s = np.linalg.svd(matricize(a, j), compute_uv=False)
        out.append(int(np.count_nonzero(s > rtol * s[0])) if s.size and s[0] > 0 else 0)
    return tuple(out)


def low_rank_approx(t: np.ndarray, ranks: Sequence[int], iter_max: int = 50,
                    stop_tol: float = 1e-10) -> np.ndarray:
    """Multilinear rank-``ranks`` approximation of a fully known tensor (HOSVD + power iterations)."""
    t = np.asarray(t, dtype=np.float64)
    return power_iterations(t, hosvd_init(t, ranks), ranks, iter_max, stop_tol).t_hat
