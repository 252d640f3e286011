"""Sample-size sweeps and the denoising workflow."""
from __future__ import annotations

import csv
import io
import math
import os
import sys
import time
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields

import numpy as np

from .completion import (
    AUTO,
    CompletionConfig,
    auto_lambda,
    complete,
    hosvd_init,
    low_rank_approx,
    multilinear_ranks,
    pad_factors,
    power_iterations,
    spectral_init,
)
from .obs_model import derive_seed, make_rng, sample_dataset, sample_entries, t_init
from .synth import CP_ORTHO, ModelSpec, generate, relative_error, subspace_error
from .tensor_core import lp_norm, project_multilinear

HOSVD = "hosvd"
SPECTRAL = "spectral"
SPECTRAL_POWER = "spectral_power"
METHODS = (HOSVD, SPECTRAL, SPECTRAL_POWER)


def parse_grid(text: str) -> tuple[float, ...]:
    """Parse ``lo:hi:step`` (inclusive of ``hi``) or a comma list of values."""
    if ":" not in text:
        return tuple(float(x) for x in text.split(","))
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like lo:hi:step, got {text!r}")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ValueError(f"empty grid {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(round(lo + i * step, 10) for i in range(count))


@dataclass
class SweepConfig:
    d: int
    r: int
    alpha_grid: tuple[float, ...]
    k: int = 3
    reps: int = 1
    sigma: float = 0.2
    methods: tuple[str, ...] = METHODS
    iter_max: int = 10
    lam: float | str = 0.0
    stop_tol: float = 1e-8
    seed: int = 0
    jobs: int = 1
    timing: bool = False

    def __post_init__(self):
        self.alpha_grid = tuple(float(a) for a in self.alpha_grid)
        self.methods = tuple(self.methods)
        if not self.alpha_grid:
            raise ValueError("alpha_grid must not be empty")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if self.k < 2 or self.d < 1 or not 1 <= self.r <= self.d:
            raise ValueError("need k >= 2 and 1 <= r <= d")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise ValueError(f"methods must be a nonempty subset of {METHODS}")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        for a in self.alpha_grid:
            if self.sample_size(a) < 2:
                raise ValueError(f"alpha={a} gives fewer than 2 samples")

    def sample_size(self, alpha: float) -> int:
        return int(round(self.r * self.d ** alpha))


@dataclass
class ResultRow:
    method: str
    d: int
    r: int
    alpha: float
    n: int
    sigma: float
    seed: int
    rel_error: float
    subspace_err_max: float
    iters_run: int
    lambda_used: float
    wall_time_s: float


RESULT_HEADER = [f.name for f in fields(ResultRow)]


def _fmt(value) -> str:
    return repr(float(value)) if isinstance(value, (float, np.floating)) else str(value)


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_HEADER)
    for row in rows:
        writer.writerow([_fmt(v) for v in astuple(row)])
    return buf.getvalue()


def run_replicate(cfg: SweepConfig, alpha_index: int, rep: int) -> list[ResultRow]:
    """One replicate: draw the truth and the sample, then evaluate every method on it."""
    alpha = cfg.alpha_grid[alpha_index]
    n = cfg.sample_size(alpha)
    seed = derive_seed(cfg.seed, alpha_index, rep)
    rng = make_rng(seed)
    ranks = (cfg.r,) * cfg.k
    truth, bases = generate(ModelSpec(CP_ORTHO, (cfg.d,) * cfg.k, (cfg.r,)), rng)
    data = sample_dataset(truth, n, cfg.sigma, rng)

    def row(method, t_hat, factors, iters, lam, elapsed):
        return ResultRow(method, cfg.d, cfg.r, alpha, n, cfg.sigma, seed,
                         relative_error(t_hat, truth), max(subspace_error(factors, bases)),
                         iters, lam, elapsed if cfg.timing else 0.0)

    # each method's time includes building the weighted estimate; the
    # power iterations also include the spectral initialization
    out = []
    clock = time.perf_counter()
    t0 = t_init(data)
    base = time.perf_counter() - clock
    if HOSVD in cfg.methods:
        clock = time.perf_counter()
        factors = hosvd_init(t0, ranks)
        t_hat = project_multilinear(t0, factors, check=False)
        out.append(row(HOSVD, t_hat, factors, 0, float("nan"), base + time.perf_counter() - clock))
    if SPECTRAL in cfg.methods or SPECTRAL_POWER in cfg.methods:
        clock = time.perf_counter()
        lam = auto_lambda(data, ranks) if cfg.lam == AUTO else float(cfg.lam)
        init, _ = spectral_init(data, lam, ranks)
        init = pad_factors(t0, init, ranks)
        init_time = base + time.perf_counter() - clock
        if SPECTRAL in cfg.methods:
            clock = time.perf_counter()
            t_hat = project_multilinear(t0, init, check=False)
            out.append(row(SPECTRAL, t_hat, init, 0, lam, init_time + time.perf_counter() - clock))
        if SPECTRAL_POWER in cfg.methods:
            clock = time.perf_counter()
            res = power_iterations(t0, init, ranks, cfg.iter_max, cfg.stop_tol)
            out.append(row(SPECTRAL_POWER, res.t_hat, res.factors, len(res.trace), lam,
                           init_time + time.perf_counter() - clock))
    return out


def _run_task(args):
    cfg, ai, rep = args
    return run_replicate(cfg, ai, rep)


def run_sweep(cfg: SweepConfig, out: str | os.PathLike | None = None) -> list[ResultRow]:
    """Run every (alpha, replicate) pair and collect rows in a fixed order.

    Replicates are independent, each with its own seed derived from the
    master seed, so the output does not depend on ``cfg.jobs``. When
    ``out`` is given the rows are written there as CSV.
    """
    tasks = [(cfg, ai, rep) for ai in range(len(cfg.alpha_grid)) for rep in range(cfg.reps)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(_run_task, tasks))
    else:
        chunks = [_run_task(t) for t in tasks]
    rows = [row for chunk in chunks for row in chunk]
    if out is not None:
        text = rows_to_csv(rows)
        if str(out) == "-":
            sys.stdout.write(text)
        else:
            with open(out, "w", newline="") as fh:
                fh.write(text)
    return rows


@dataclass
class DenoiseResult:
    t_hat: np.ndarray
    target: np.ndarray
    rel_error: float
    n: int
    sigma: float
    projected: bool


def denoise(t: np.ndarray, ranks: Sequence[int], sample_ratio: float, gamma: float, seed: int = 0,
            iter_max: int = 10, lam: float | str = 0.0, rtol: float = 1e-10) -> DenoiseResult:
    """Observe a fraction of the entries of ``t`` with noise and reconstruct it.

    ``round(sample_ratio * t.size)`` distinct entries are observed. A tensor whose multilinear ranks exceed ``ranks`` is first replaced by
    its rank-``ranks`` approximation, which then serves as the ground
    truth. The noise level is ``gamma`` times the root-mean-square entry.
    """
    t = np.asarray(t, dtype=np.float64)
    ranks = tuple(int(r) for r in ranks)
    if not 0 < sample_ratio <= 1:
        raise ValueError("sample_ratio must lie in (0, 1]")
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    CompletionConfig(ranks).validate(t.shape)
    projected = any(m > r for m, r in zip(multilinear_ranks(t, rtol), ranks))
    target = low_rank_approx(t, ranks) if projected else t
    size = target.size
    n = max(2, int(round(sample_ratio * size)))
    sigma = gamma * lp_norm(target) / math.sqrt(size)
    data = sample_entries(target, n, sigma, make_rng(seed))
    est = complete(data, CompletionConfig(ranks, iter_max=iter_max, lam=lam))
    return DenoiseResult(est.t_hat, target, relative_error(est.t_hat, target), n, sigma, projected)
