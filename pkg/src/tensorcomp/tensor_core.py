"""Dense tensors and the multilinear algebra used by the estimators.

Tensors are plain C-ordered ``numpy.ndarray`` objects of float64, so the
last index varies fastest in storage. Factor sets are lists of 2-D arrays
with orthonormal columns.
"""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np

ORTHO_TOL = 1e-8


def make_tensor(dims: Sequence[int], values) -> np.ndarray:
    """Build a tensor of shape ``dims`` from a flat array in row-major order.

    Raises
    ------
    ValueError
        If fewer than two modes are given, a dimension is not positive,
        the number of values does not match ``prod(dims)``, or a value is
        not finite.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2:
        raise ValueError(f"a tensor needs at least 2 modes, got {len(dims)}")
    if any(d < 1 for d in dims):
        raise ValueError(f"dimensions must be positive, got {dims}")
    flat = np.asarray(values, dtype=np.float64).ravel()
    size = int(np.prod(dims))
    if flat.size != size:
        raise ValueError(f"expected {size} values for dims {dims}, got {flat.size}")
    if not np.all(np.isfinite(flat)):
        raise ValueError("tensor values must be finite")
    return flat.reshape(dims).copy()


def basis_tensor(dims: Sequence[int], index: Sequence[int]) -> np.ndarray:
    """The tensor with a single one at ``index`` and zeros elsewhere."""
    out = np.zeros(tuple(dims))
    out[tuple(index)] = 1.0
    return out


def outer_product(vectors: Sequence) -> np.ndarray:
    """Rank-one tensor ``u_1 ⊗ ... ⊗ u_k``."""
    if len(vectors) == 0:
        raise ValueError("outer_product needs at least one vector")
    vecs = [np.asarray(v, dtype=np.float64).ravel() for v in vectors]
    if any(v.size == 0 for v in vecs):
        raise ValueError("outer_product vectors must be nonempty")
    out = vecs[0]
    for v in vecs[1:]:
        out = np.multiply.outer(out, v)
    return out


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")


def inner_product(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_same_shape(a, b)
    return float(np.dot(a.ravel(), b.ravel()))


def lp_norm(a: np.ndarray, p: float = 2) -> float:
    """Vectorized l_p norm; ``p=np.inf`` gives the max absolute entry."""
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    flat = np.asarray(a, dtype=np.float64).ravel()
    if flat.size == 0:
        return 0.0
    if np.isinf(p):
        return float(np.max(np.abs(flat)))
    if p == 1:
        return float(np.sum(np.abs(flat)))
    if p == 2:
        return float(np.sqrt(np.dot(flat, flat)))
    return float(np.sum(np.abs(flat) ** p) ** (1.0 / p))


def _check_mode(ndim: int, mode: int) -> int:
    if not 0 <= mode < ndim:
        raise ValueError(f"mode {mode} out of range for a tensor with {ndim} modes")
    return int(mode)


def matricize(a: np.ndarray, mode: int) -> np.ndarray:
    """Mode-``mode`` flattening.

    Row index is ``i_mode``; the column index encodes the remaining indices
    in ascending mode order with the last one varying fastest. For a
    third-order tensor and ``mode=0`` the column of ``A[i0, i1, i2]`` is
    ``i1 * d2 + i2``.
    """
    a = np.asarray(a)
    mode = _check_mode(a.ndim, mode)
    return np.moveaxis(a, mode, 0).reshape(a.shape[mode], -1)


def dematricize(m: np.ndarray, mode: int, dims: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`matricize`."""
    dims = tuple(int(d) for d in dims)
    mode = _check_mode(len(dims), mode)
    m = np.asarray(m)
    rest = dims[:mode] + dims[mode + 1:]
    expected = (dims[mode], int(np.prod(rest)))
    if m.shape != expected:
        raise ValueError(f"matrix shape {m.shape} does not match {expected} for mode {mode}")
    return np.moveaxis(m.reshape((dims[mode],) + rest), 0, mode).copy()


def mode_multiply(a: np.ndarray, mode: int, b: np.ndarray) -> np.ndarray:
    """Marginal multiplication: contract mode ``mode`` of ``a`` with the rows of ``b``.

    ``out[..., i, ...] = sum_k a[..., k, ...] * b[k, i]``, so the result
    has ``b.shape[1]`` in position ``mode`` and
    ``matricize(out, mode) == b.T @ matricize(a, mode)``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    mode = _check_mode(a.ndim, mode)
    if b.ndim != 2 or b.shape[0] != a.shape[mode]:
        raise ValueError(
            f"matrix of shape {b.shape} cannot multiply mode {mode} of size {a.shape[mode]}"
        )
    return np.moveaxis(np.tensordot(a, b, axes=(mode, 0)), -1, mode)


def check_orthonormal(u: np.ndarray, tol: float = ORTHO_TOL) -> None:
    u = np.asarray(u)
    if u.ndim != 2:
        raise ValueError("a basis must be a 2-D array")
    gram = u.T @ u
    err = np.max(np.abs(gram - np.eye(u.shape[1]))) if u.shape[1] else 0.0
    if err > tol:
        raise ValueError(f"columns are not orthonormal (max deviation {err:.2e})")


def core_tensor(a: np.ndarray, factors: Sequence[np.ndarray]) -> np.ndarray:
    """``a`` contracted with every factor, i.e. ``a x_1 U_1 ... x_k U_k``."""
    out = np.asarray(a)
    for j, u in enumerate(factors):
        out = mode_multiply(out, j, u)
    return out


def project_multilinear(a: np.ndarray, factors: Sequence[np.ndarray], check: bool = True) -> np.ndarray:
    """Project ``a`` onto the span of ``factors``: ``a x_j U_j U_j^T`` for every mode."""
    a = np.asarray(a, dtype=np.float64)
    if len(factors) != a.ndim:
        raise ValueError(f"need {a.ndim} factors, got {len(factors)}")
    for j, u in enumerate(factors):
        if u.shape[0] != a.shape[j]:
            raise ValueError(f"factor {j} has {u.shape[0]} rows, mode size is {a.shape[j]}")
        if check:
            check_orthonormal(u)
    out = a
    for j, u in enumerate(factors):
        out = mode_multiply(out, j, u)
    for j, u in enumerate(factors):
        out = mode_multiply(out, j, u.T)
    return out
