"""File formats: binary TNSR1 tensors and observation CSVs."""
from __future__ import annotations

import csv
import os
from collections.abc import Sequence

import numpy as np

from .obs_model import Dataset

MAGIC = b"TNSR1\n"
MAX_ENTRIES = 1 << 31


class FormatError(ValueError):
    pass


def write_tensor(path: str | os.PathLike, t: np.ndarray) -> None:
    """Write ``t`` as TNSR1: magic, ``k d_1 ... d_k`` header line, little-endian float64 payload."""
    t = np.ascontiguousarray(t, dtype=np.float64)
    header = " ".join(str(x) for x in (t.ndim, *t.shape)) + "\n"
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(header.encode("ascii"))
        fh.write(t.astype("<f8", copy=False).tobytes(order="C"))


def read_tensor(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    if not blob.startswith(MAGIC):
        raise FormatError(f"{path}: not a TNSR1 file (bad magic)")
    end = blob.find(b"\n", len(MAGIC))
    if end < 0:
        raise FormatError(f"{path}: missing header line")
    try:
        fields = [int(x) for x in blob[len(MAGIC):end].decode("ascii").split()]
    except (UnicodeDecodeError, ValueError) as exc:
        raise FormatError(f"{path}: malformed header") from exc
    if not fields or fields[0] != len(fields) - 1 or fields[0] < 1:
        raise FormatError(f"{path}: header order does not match the dimension list")
    dims = tuple(fields[1:])
    if any(d < 1 for d in dims):
        raise FormatError(f"{path}: dimensions must be positive")
    size = 1
    for d in dims:
        size *= d
        if size > MAX_ENTRIES:
            raise FormatError(f"{path}: tensor too large")
    payload = blob[end + 1:]
    if len(payload) != 8 * size:
        raise FormatError(f"{path}: expected {8 * size} payload bytes, found {len(payload)}")
    return np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(dims)


def write_dataset(path: str | os.PathLike, data: Dataset) -> None:
    """Observation CSV with header ``i_0,...,i_{k-1},y``; values use shortest round-trip repr."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"i_{j}" for j in range(data.order)] + ["y"])
        for idx, y in zip(data.indices.tolist(), data.values.tolist()):
            writer.writerow([*idx, repr(y)])


def read_dataset(path: str | os.PathLike, dims: Sequence[int]) -> Dataset:
    dims = tuple(int(d) for d in dims)
    k = len(dims)
    expected = [f"i_{j}" for j in range(k)] + ["y"]
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip() for h in rows[0]] != expected:
        raise FormatError(f"{path}: header must be {','.join(expected)}")
    body = [r for r in rows[1:] if r]
    if not body:
        raise FormatError(f"{path}: no observations")
    idx = np.empty((len(body), k), dtype=np.int64)
    y = np.empty(len(body))
    for i, row in enumerate(body):
        if len(row) != k + 1:
            raise FormatError(f"{path}: row {i + 2} has {len(row)} fields, expected {k + 1}")
        try:
            idx[i] = [int(x) for x in row[:k]]
            y[i] = float(row[k])
        except ValueError as exc:
            raise FormatError(f"{path}: row {i + 2}: {exc}") from exc
        if np.any(idx[i] < 0) or np.any(idx[i] >= dims):
            raise FormatError(f"{path}: row {i + 2}: index {tuple(idx[i])} out of range for {dims}")
    return Dataset(dims, idx, y)
