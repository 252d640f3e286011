import csv
import json

import numpy as np
import pytest

from tensorcomp import harness
from tensorcomp.cli import main
from tensorcomp.io import read_tensor, write_tensor
from tensorcomp.synth import TUCKER, ModelSpec, generate, relative_error


def small_cfg(**kw):
    base = dict(d=12, r=2, alpha_grid=(2.0,), reps=1, sigma=0.2, iter_max=5, seed=3)
    base.update(kw)
    return harness.SweepConfig(**base)


def test_parse_grid():
    assert harness.parse_grid("1:2:0.5") == (1.0, 1.5, 2.0)
    assert harness.parse_grid("2.2") == (2.2,)
    gammas = harness.parse_grid("0.05:1.0:0.05")
    assert len(gammas) == 20 and gammas[0] == 0.05 and gammas[-1] == 1.0
    with pytest.raises(ValueError):
        harness.parse_grid("2:1:0.5")


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        small_cfg(alpha_grid=())
    with pytest.raises(ValueError):
        small_cfg(methods=("magic",))
    with pytest.raises(ValueError):
        small_cfg(reps=0)
    with pytest.raises(ValueError):
        small_cfg(alpha_grid=(-5.0,))


def test_single_row_sweep(tmp_path):
    out = tmp_path / "res.csv"
    rows = harness.run_sweep(small_cfg(methods=(harness.SPECTRAL_POWER,)), out)
    lines = out.read_text().splitlines()
    assert len(rows) == 1 and len(lines) == 2
    assert lines[0] == ("method,d,r,alpha,n,sigma,seed,rel_error,subspace_err_max,"
                        "iters_run,lambda_used,wall_time_s")
    row = next(csv.DictReader(lines))
    assert row["method"] == "spectral_power"
    assert int(row["n"]) == round(2 * 12 ** 2.0)
    assert float(row["rel_error"]) >= 0
    assert 0 <= float(row["subspace_err_max"]) <= 2


def test_reference_setting_runs():
    rows = harness.run_sweep(harness.SweepConfig(d=50, r=5, alpha_grid=(2.2,), sigma=0.2, iter_max=10))
    assert [r.method for r in rows] == list(harness.METHODS)
    assert all(np.isfinite(r.rel_error) for r in rows)


def test_sweep_byte_identical(tmp_path):
    cfg = small_cfg(alpha_grid=(1.8, 2.2), reps=2)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    harness.run_sweep(cfg, a)
    harness.run_sweep(cfg, b)
    assert a.read_bytes() == b.read_bytes()


def test_sweep_independent_of_jobs(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    harness.run_sweep(small_cfg(reps=3, jobs=1), a)
    harness.run_sweep(small_cfg(reps=3, jobs=2), b)
    assert a.read_bytes() == b.read_bytes()


def test_replicate_rerun_from_row_seed():
    cfg = small_cfg(reps=2)
    rows = harness.run_sweep(cfg)
    again = harness.run_replicate(cfg, 0, 1)
    assert [r.rel_error for r in rows[3:]] == [r.rel_error for r in again]


def test_timing_is_opt_in():
    assert all(r.wall_time_s == 0.0 for r in harness.run_sweep(small_cfg()))
    assert all(r.wall_time_s > 0 for r in harness.run_sweep(small_cfg(timing=True)))


def test_denoise_noiseless_full():
    t, _ = generate(ModelSpec(TUCKER, (10, 9, 8), (2, 2, 2), seed=1))
    res = harness.denoise(t, (2, 2, 2), 1.0, 0.0, seed=0)
    assert not res.projected
    assert res.rel_error <= 1e-6


def test_denoise_projects_full_rank_input(rng):
    t = rng.standard_normal((8, 8, 8))
    res = harness.denoise(t, (2, 2, 2), 1.0, 0.0)
    assert res.projected
    assert res.rel_error <= 1e-6
    assert relative_error(res.target, t) > 0.1


def test_denoise_more_samples_help():
    t, _ = generate(ModelSpec(TUCKER, (64, 64, 64), (5, 5, 5), seed=2))
    err = {ratio: np.mean([harness.denoise(t, (5, 5, 5), ratio, 0.1, seed=s).rel_error for s in range(5)])
           for ratio in (0.2, 1.0)}
    assert err[1.0] <= err[0.2]


def test_denoise_rejects_bad_ratio():
    with pytest.raises(ValueError):
        harness.denoise(np.ones((3, 3, 3)), (1, 1, 1), 0.0, 0.1)


def run_cli(args, capsys):
    code = main([str(a) for a in args])
    return code, capsys.readouterr()


def test_cli_end_to_end(tmp_path, capsys):
    t = tmp_path / "t.tnsr"
    obs = tmp_path / "obs.csv"
    est = tmp_path / "est.tnsr"
    assert run_cli(["gen", "--kind", "tucker", "--dims", "8,8,8", "--ranks", "2,2,2", "--seed", 4,
                    "--out", t], capsys)[0] == 0
    assert run_cli(["sample", "--input", t, "--n", 4096, "--out", obs], capsys)[0] == 0
    code, cap = run_cli(["complete", "--obs", obs, "--dims", "8,8,8", "--ranks", "2,2,2",
                         "--lambda", "0", "--iters", 20, "--truth", t, "--out", est], capsys)
    assert code == 0
    report = json.loads(cap.out)
    assert report["rel_error"] < 0.5
    assert read_tensor(est).shape == (8, 8, 8)

    code, cap = run_cli(["diag", "--input", t], capsys)
    assert code == 0
    diag = json.loads(cap.out)
    assert diag["multilinear_ranks"] == [2, 2, 2] and diag["kappa"] >= 1

    code, cap = run_cli(["denoise", "--input", t, "--ranks", "2,2,2", "--ratio", 1.0, "--gamma", 0,
                         "--out", tmp_path / "den.tnsr"], capsys)
    assert code == 0 and json.loads(cap.out)["rel_error"] <= 1e-6


def test_cli_complete_auto_lambda(tmp_path, capsys):
    t = tmp_path / "t.tnsr"
    obs = tmp_path / "obs.csv"
    run_cli(["gen", "--dims", "6,6,6", "--ranks", "2,2,2", "--out", t], capsys)
    run_cli(["sample", "--input", t, "--n", 200, "--sigma", 0.1, "--out", obs], capsys)
    code, cap = run_cli(["complete", "--obs", obs, "--dims", "6,6,6", "--ranks", "2,2,2",
                         "--out", tmp_path / "e.tnsr"], capsys)
    assert code == 0 and json.loads(cap.out)["lambda_used"] > 0


def test_cli_sweep(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _ = run_cli(["sweep", "--d", 10, "--r", 2, "--alpha-grid", "2:2.5:0.5", "--reps", 2,
                       "--iters", 3, "--out", out], capsys)
    assert code == 0
    assert len(out.read_text().splitlines()) == 1 + 2 * 2 * 3


def test_cli_errors_exit_nonzero(tmp_path, capsys):
    code, cap = run_cli(["diag", "--input", tmp_path / "missing.tnsr"], capsys)
    assert code != 0 and "error" in cap.err
    bad = tmp_path / "bad.tnsr"
    bad.write_bytes(b"nope")
    assert run_cli(["diag", "--input", bad], capsys)[0] != 0
    t = tmp_path / "t.tnsr"
    write_tensor(t, np.ones((3, 3, 3)))
    assert run_cli(["denoise", "--input", t, "--ranks", "4,4,4", "--out", tmp_path / "o"], capsys)[0] != 0
