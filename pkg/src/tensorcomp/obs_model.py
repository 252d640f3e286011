"""Uniform entry sampling with additive Gaussian noise, and the unbiased
estimators built from the observations."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .tensor_core import matricize


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Deterministic generator for ``seed``; ``stream`` selects an independent child stream."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream)))


def derive_seed(seed: int, *stream: int) -> int:
    """A 32-bit seed for the child stream ``stream`` of ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return int(ss.generate_state(1)[0])


@dataclass(frozen=True, eq=False)
class Dataset:
    """Observations ``(omega_i, y_i)`` of a tensor with shape ``dims``.

    ``indices`` is an ``(n, k)`` integer array of 0-based multi-indices and
    ``values`` the matching observed values. Repeated indices are allowed.
    """

    dims: tuple[int, ...]
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        idx = np.asarray(self.indices, dtype=np.int64)
        y = np.asarray(self.values, dtype=np.float64).ravel()
        if idx.ndim != 2 or idx.shape[1] != len(dims):
            raise ValueError(f"indices must have shape (n, {len(dims)})")
        if idx.shape[0] != y.size:
            raise ValueError("indices and values differ in length")
        if y.size < 1:
            raise ValueError("a dataset needs at least one observation")
        if np.any(idx < 0) or np.any(idx >= np.asarray(dims)):
            raise ValueError("observation index out of range")
        if not np.all(np.isfinite(y)):
            raise ValueError("observed values must be finite")
        idx.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", y)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def order(self) -> int:
        return len(self.dims)

    def with_values(self, values) -> "Dataset":
        return Dataset(self.dims, self.indices, values)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.dims == other.dims
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )


def sample_dataset(t: np.ndarray, n: int, sigma: float, rng: np.random.Generator) -> Dataset:
    """Draw ``n`` iid entries of ``t`` uniformly with replacement, plus ``N(0, sigma^2)`` noise."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    t = np.asarray(t, dtype=np.float64)
    flat = rng.integers(0, t.size, size=n)
    idx = np.stack(np.unravel_index(flat, t.shape), axis=1)
    y = t.ravel()[flat]
    if sigma > 0:
        y = y + sigma * rng.standard_normal(n)
    return Dataset(t.shape, idx, y)


def sample_entries(t: np.ndarray, n: int, sigma: float, rng: np.random.Generator) -> Dataset:
    """Observe ``n`` distinct entries of ``t`` chosen uniformly, plus ``N(0, sigma^2)`` noise.

    ``n == t.size`` observes every entry once.
    """
    t = np.asarray(t, dtype=np.float64)
    if not 1 <= n <= t.size:
        raise ValueError(f"n must lie in [1, {t.size}]")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    flat = np.sort(rng.choice(t.size, size=n, replace=False))
    idx = np.stack(np.unravel_index(flat, t.shape), axis=1)
    y = t.ravel()[flat]
    if sigma > 0:
        y = y + sigma * rng.standard_normal(n)
    return Dataset(t.shape, idx, y)


def full_dataset(t: np.ndarray) -> Dataset:
    """Every entry observed once without noise, in storage order."""
    t = np.asarray(t, dtype=np.float64)
    idx = np.stack(np.unravel_index(np.arange(t.size), t.shape), axis=1)
    return Dataset(t.shape, idx, t.ravel().copy())


def t_init(data: Dataset) -> np.ndarray:
    """Inverse-probability weighted estimate ``(prod(d)/n) * sum_i y_i e_{omega_i}``."""
    size = int(np.prod(data.dims))
    flat = np.ravel_multi_index(tuple(data.indices.T), data.dims)
    acc = np.bincount(flat, weights=data.values, minlength=size)
    return (acc * (size / data.n)).reshape(data.dims)


def _column_index(data: Dataset, mode: int) -> np.ndarray:
    rest = [j for j in range(data.order) if j != mode]
    if not rest:
        return np.zeros(data.n, dtype=np.int64)
    return np.ravel_multi_index(tuple(data.indices[:, rest].T), tuple(data.dims[j] for j in rest))


def n_hat(data: Dataset, mode: int) -> np.ndarray:
    """U-statistic estimate of ``M_j(T) M_j(T)^T`` from the observations.

    Only pairs of observations that share every coordinate outside ``mode``
    contribute, so observations are grouped by flattening column. Within a
    group with row sums ``S_g`` the off-diagonal pair sum is
    ``S_g S_g^T - sum_i y_i^2 e_{a_i} e_{a_i}^T``.
    """
    if data.n < 2:
        raise ValueError("the U-statistic needs at least two observations")
    if not 0 <= mode < data.order:
        raise ValueError(f"mode {mode} out of range")
    d = data.dims[mode]
    rows = data.indices[:, mode]
    y = data.values
    _, group = np.unique(_column_index(data, mode), return_inverse=True)
    s = np.zeros((d, int(group.max()) + 1))
    np.add.at(s, (rows, group), y)
    gram = s @ s.T
    # mirror the upper triangle so the result is symmetric bit for bit
    gram = np.triu(gram) + np.triu(gram, 1).T
    gram[np.diag_indices(d)] -= np.bincount(rows, weights=y * y, minlength=d)
    size = float(np.prod(data.dims))
    return gram * ((size / data.n) * (size / (data.n - 1)))


def n_exact(t: np.ndarray, mode: int) -> np.ndarray:
    m = matricize(t, mode)
    return m @ m.T


def observation_indices(dims: Sequence[int]) -> np.ndarray:
    """All multi-indices of a tensor with shape ``dims`` in storage order."""
    dims = tuple(dims)
    return np.stack(np.unravel_index(np.arange(int(np.prod(dims))), dims), axis=1)
