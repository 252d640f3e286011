"""Command line interface: ``tensorcomp {gen,sample,complete,sweep,denoise,diag}``."""
from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .completion import AUTO, CompletionConfig, complete, multilinear_ranks
from .io import read_dataset, read_tensor, write_dataset, write_tensor
from .obs_model import make_rng, sample_dataset
from .spectra import mode_spectrum
from .synth import KINDS, ModelSpec, generate, relative_error, spikiness, tensor_coherence


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace("x", ",").split(",") if x)


def _lam(text: str):
    return AUTO if text == AUTO else float(text)


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def cmd_gen(args) -> None:
    spec = ModelSpec(args.kind, args.dims, args.ranks, args.scale, args.seed)
    t, _ = generate(spec)
    write_tensor(args.out, t)


def cmd_sample(args) -> None:
    t = read_tensor(args.input)
    write_dataset(args.out, sample_dataset(t, args.n, args.sigma, make_rng(args.seed)))


def cmd_complete(args) -> None:
    data = read_dataset(args.obs, args.dims)
    cfg = CompletionConfig(args.ranks, iter_max=args.iters, lam=args.lam,
                           stop_tol=args.stop_tol, init=args.init)
    est = complete(data, cfg)
    write_tensor(args.out, est.t_hat)
    report = {
        "n": data.n,
        "lambda_used": est.lambda_used,
        "init_ranks_selected": list(est.init_ranks_selected),
        "iters_run": est.iters_run,
        "trace": est.trace,
    }
    if args.truth:
        report["rel_error"] = relative_error(est.t_hat, read_tensor(args.truth))
    _emit(report)


def cmd_sweep(args) -> None:
    cfg = harness.SweepConfig(
        d=args.d, r=args.r, k=args.k, alpha_grid=harness.parse_grid(args.alpha_grid),
        reps=args.reps, sigma=args.sigma, methods=tuple(args.methods.split(",")),
        iter_max=args.iters, lam=args.lam, stop_tol=args.stop_tol, seed=args.seed,
        jobs=args.jobs, timing=args.timing,
    )
    harness.run_sweep(cfg, args.out)


def cmd_denoise(args) -> None:
    t = read_tensor(args.input)
    res = harness.denoise(t, args.ranks, args.ratio, args.gamma, seed=args.seed,
                          iter_max=args.iters, lam=args.lam)
    write_tensor(args.out, res.t_hat)
    _emit({"rel_error": res.rel_error, "n": res.n, "sigma": res.sigma,
           "projected_to_ranks": res.projected})


def cmd_diag(args) -> None:
    t = read_tensor(args.input)
    ranks = args.ranks or multilinear_ranks(t)
    spec = mode_spectrum(t, ranks)
    _emit({
        "dims": list(t.shape),
        "multilinear_ranks": list(multilinear_ranks(t)),
        "coherence": tensor_coherence(t),
        "spikiness": spikiness(t),
        "lambda_min": spec.lambda_min,
        "lambda_max": spec.lambda_max,
        "kappa": spec.kappa,
    })


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tensorcomp", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a random low-rank tensor")
    g.add_argument("--kind", choices=KINDS, default="tucker")
    g.add_argument("--dims", type=_ints, required=True)
    g.add_argument("--ranks", type=_ints, required=True)
    g.add_argument("--scale", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("sample", help="draw noisy observations of a tensor file")
    s.add_argument("--input", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--sigma", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    c = sub.add_parser("complete", help="estimate a tensor from an observation CSV")
    c.add_argument("--obs", required=True)
    c.add_argument("--dims", type=_ints, required=True)
    c.add_argument("--ranks", type=_ints, required=True)
    c.add_argument("--lambda", dest="lam", type=_lam, default=AUTO)
    c.add_argument("--iters", type=int)
    c.add_argument("--stop-tol", type=float, default=1e-8)
    c.add_argument("--init", choices=("spectral", "hosvd"), default="spectral")
    c.add_argument("--truth", help="tensor file to report the relative error against")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_complete)

    w = sub.add_parser("sweep", help="sample-size sweep on the orthogonal CP model")
    w.add_argument("--d", type=int, default=50)
    w.add_argument("--r", type=int, default=5)
    w.add_argument("--k", type=int, default=3)
    w.add_argument("--alpha-grid", default="1.5:2.5:0.25")
    w.add_argument("--reps", type=int, default=30)
    w.add_argument("--sigma", type=float, default=0.2)
    w.add_argument("--methods", default=",".join(harness.METHODS))
    w.add_argument("--iters", type=int, default=10)
    w.add_argument("--lambda", dest="lam", type=_lam, default=0.0)
    w.add_argument("--stop-tol", type=float, default=1e-8)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--jobs", type=int, default=1)
    w.add_argument("--timing", action="store_true", help="record wall times (breaks byte-reproducibility)")
    w.add_argument("--out", default="-")
    w.set_defaults(func=cmd_sweep)

    d = sub.add_parser("denoise", help="subsample, add noise and reconstruct a tensor file")
    d.add_argument("--input", required=True)
    d.add_argument("--ranks", type=_ints, required=True)
    d.add_argument("--ratio", type=float, default=0.5)
    d.add_argument("--gamma", type=float, default=0.1)
    d.add_argument("--iters", type=int, default=10)
    d.add_argument("--lambda", dest="lam", type=_lam, default=0.0)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_denoise)

    q = sub.add_parser("diag", help="coherence, spikiness and mode spectrum of a tensor file")
    q.add_argument("--input", required=True)
    q.add_argument("--ranks", type=_ints)
    q.set_defaults(func=cmd_diag)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"tensorcomp: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
