import json
import math
import shutil

import numpy as np
import pytest

from trigmin.cli import (
    EXIT_BAD_CONFIG,
    EXIT_LIMITS,
    EXIT_OK,
    EXIT_UNWRITABLE,
    EXIT_USAGE,
    SCHEMA_VERSION,
    ConfigError,
    RunConfig,
    apply_config_updates,
    config_pairs,
    main,
    parse_config,
    run_trial_batch,
    serialize_config,
)
from trigmin.coeffs import CoefficientModel


def _summary(capsys):
    out = capsys.readouterr().out.strip().splitlines()
    return json.loads(out[-1])


def test_defaults_match_documented_values():
    cfg = RunConfig()
    assert cfg.n == 256
    assert cfg.trials == 20000
    assert cfg.eps_net == 0.01
    assert cfg.C0 == 10.0
    assert cfg.window == 3.0
    assert cfg.master_seed == 0
    assert cfg.model.kind == "ComplexGaussian"
    assert cfg.intervals == ((-2.0, 2.0), (-1.0, 1.0))
    assert cfg.format == "csv"


def test_config_roundtrip_defaults():
    cfg = RunConfig()
    assert parse_config(serialize_config(cfg)) == cfg


def test_config_roundtrip_custom():
    cfg = RunConfig(
        model=CoefficientModel(kind="CramerPerturbed", delta=0.25, base="Laplace"),
        n=128,
        eps_net=0.02,
        round_to_pow2=False,
        trials=321,
        master_seed=99,
        window=2.5,
        tau_grid=(0.0, 0.5, 1.0),
        intervals=((-1.0, 1.0),),
        eps_zone=0.1,
        limits=(("ks", 0.05), ("zone_fraction", 0.1)),
        format="jsonl",
        output="out.jsonl",
    )
    assert parse_config(serialize_config(cfg)) == cfg


def test_parse_config_comments_and_blank_lines():
    text = "# a comment\n\nn=64\n  trials = 7 \n# another\nmaster_seed=3\n"
    cfg = parse_config(text)
    assert (cfg.n, cfg.trials, cfg.master_seed) == (64, 7, 3)


def test_parse_config_rejects_garbage():
    with pytest.raises(ConfigError):
        parse_config("n 64\n")
    with pytest.raises(ConfigError):
        parse_config("unknown_key=1\n")
    with pytest.raises(ConfigError):
        parse_config("n=sixty-four\n")


def test_apply_updates_validation():
    cfg = RunConfig()
    assert apply_config_updates(cfg, [("n", "512")]).n == 512
    for key, value in (
        ("n", "0"),
        ("trials", "0"),
        ("eps_net", "3.0"),
        ("round_to_pow2", "maybe"),
        ("format", "xml"),
        ("model.kind", "Quaternion"),
        ("intervals", "2:1"),
        ("window", "-1"),
    ):
        with pytest.raises(ConfigError):
            apply_config_updates(cfg, [(key, value)])


def test_config_pairs_use_dotted_model_keys():
    keys = [k for k, _ in config_pairs(RunConfig())]
    assert "model.kind" in keys
    assert "model.delta" in keys
    assert "model.base" in keys
    assert len(keys) == len(set(keys))


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["frobnicate"]) == EXIT_USAGE
    capsys.readouterr()


def test_bad_config_exit_code(capsys):
    assert main(["simulate", "--set", "n=-3"]) == EXIT_BAD_CONFIG
    assert main(["simulate", "--set", "nonsense"]) == EXIT_BAD_CONFIG
    assert main(["simulate", "--config", "/no/such/file.cfg"]) == EXIT_BAD_CONFIG
    capsys.readouterr()


def test_unwritable_output_exit_code(capsys):
    rc = main(
        [
            "simulate",
            "--n",
            "64",
            "--trials",
            "5",
            "--output",
            "/no-such-dir/x.csv",
        ]
    )
    assert rc == EXIT_UNWRITABLE
    capsys.readouterr()


def test_limits_exit_codes(capsys):
    base = ["intensity", "--n", "64", "--trials", "150"]
    assert main(base + ["--set", "limits=max_relative_error:0.9"]) == EXIT_OK
    summary = _summary(capsys)
    assert "limit_failures" not in summary
    assert main(base + ["--set", "limits=max_relative_error:1e-9"]) == EXIT_LIMITS
    summary = _summary(capsys)
    assert summary["limit_failures"]
    # asking for a statistic the subcommand does not produce is a config error
    assert main(base + ["--set", "limits=no_such_stat:1.0"]) == EXIT_BAD_CONFIG
    capsys.readouterr()


def test_simulate_csv_records_and_survival(tmp_path, capsys):
    out = tmp_path / "records.csv"
    surv = tmp_path / "survival.csv"
    rc = main(
        [
            "simulate",
            "--n",
            "64",
            "--trials",
            "50",
            "--output",
            str(out),
            "--survival",
            str(surv),
        ]
    )
    assert rc == EXIT_OK
    summary = _summary(capsys)
    assert summary["schema_version"] == SCHEMA_VERSION
    assert summary["subcommand"] == "simulate"
    assert summary["config"]["n"] == "64"
    assert 0.0 < summary["stats"]["ks"] < 1.0

    lines = out.read_text().splitlines()
    header = [l for l in lines if l.startswith("#")]
    assert any(l.startswith("# schema_version=") for l in header)
    assert any(l.startswith("# n=64") for l in header)
    body = [l for l in lines if not l.startswith("#")]
    assert body[0] == "trial,m,scaled_min,argmin,count_in_window,certified_bound"
    assert len(body) == 51
    first = body[1].split(",")
    assert int(first[0]) == 0
    assert float(first[2]) == pytest.approx(64.0 * float(first[1]), rel=1e-12)
    assert float(first[5]) >= 0.0

    slines = surv.read_text().splitlines()
    sbody = [l for l in slines if not l.startswith("#")]
    assert sbody[0] == "tau,empirical,reference"
    assert len(sbody) == 102  # 101 grid points
    emp = np.array([float(l.split(",")[1]) for l in sbody[1:]])
    assert emp[0] == 1.0
    assert np.all(np.diff(emp) <= 0)


def test_simulate_jsonl_records(tmp_path, capsys):
    out = tmp_path / "records.jsonl"
    rc = main(
        [
            "simulate",
            "--n",
            "64",
            "--trials",
            "10",
            "--format",
            "jsonl",
            "--output",
            str(out),
        ]
    )
    assert rc == EXIT_OK
    capsys.readouterr()
    lines = out.read_text().splitlines()
    head = json.loads(lines[0])
    assert head["schema_version"] == SCHEMA_VERSION
    assert head["subcommand"] == "simulate"
    rows = [json.loads(l) for l in lines[1:]]
    assert len(rows) == 10
    assert set(rows[0]) == {
        "trial",
        "m",
        "scaled_min",
        "argmin",
        "count_in_window",
        "certified_bound",
    }


def test_worker_count_never_changes_output(tmp_path, capsys):
    out = tmp_path / "r.csv"
    args = [
        "simulate",
        "--n",
        "64",
        "--trials",
        "40",
        "--output",
        str(out),
    ]
    assert main(args + ["--workers", "1"]) == EXIT_OK
    sum1 = capsys.readouterr().out
    shutil.copy(out, tmp_path / "w1.csv")
    assert main(args + ["--workers", "3"]) == EXIT_OK
    sum3 = capsys.readouterr().out
    shutil.copy(out, tmp_path / "w3.csv")
    assert (tmp_path / "w1.csv").read_bytes() == (tmp_path / "w3.csv").read_bytes()
    assert sum1 == sum3


def test_batch_matches_across_worker_counts():
    cfg = RunConfig(n=64, trials=30)
    b1 = run_trial_batch(cfg, workers=1)
    b3 = run_trial_batch(cfg, workers=3)
    assert np.array_equal(b1.scaled_minima, b3.scaled_minima)
    for p1, p3 in zip(b1.processes, b3.processes):
        assert np.array_equal(p1.values, p3.values)


def test_kernel_check_summary_and_csv(tmp_path, capsys):
    out = tmp_path / "kernel.csv"
    rc = main(["kernel-check", "--n", "128", "--output", str(out)])
    assert rc == EXIT_OK
    summary = _summary(capsys)
    assert summary["max_abs_error"] <= 1e-10
    body = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert body[0] == (
        "x,r_closed,r_sum,r1_closed,r1_sum,r2_closed,r2_sum,abs_errors"
    )
    assert len(body) == summary["points"] + 1


def test_realcase_swaps_complex_model(tmp_path, capsys):
    out = tmp_path / "rc.csv"
    rc = main(
        [
            "realcase",
            "--n",
            "64",
            "--trials",
            "60",
            "--output",
            str(out),
        ]
    )
    assert rc == EXIT_OK
    captured = capsys.readouterr()
    assert "RealGaussian" in captured.err
    summary = json.loads(captured.out.strip().splitlines()[-1])
    assert summary["model_kind"] == "RealGaussian"
    assert summary["zone"]["eps_zone"] == 0.05
    assert summary["zone"]["threshold"] == pytest.approx(math.log(64) / 64)
    assert 0.0 <= summary["zone"]["fraction_below"] <= 1.0
    body = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert body[0].endswith("zone_min_zero,zone_min_pi")
    assert len(body) == 61


def test_poisson_summary_structure(capsys):
    rc = main(["poisson", "--n", "64", "--trials", "200"])
    assert rc == EXIT_OK
    summary = _summary(capsys)
    assert len(summary["windows"]) == 2
    for w in summary["windows"]:
        assert 0.3 < w["dispersion"] < 1.7
        assert 0.0 <= w["void_prob"] <= 1.0
    cov = summary["covariance"]
    assert cov["window_left"][1] == cov["window_right"][0]
    assert set(summary["stats"]) == {
        "dispersion_error",
        "void_error",
        "cov_abs_over_se",
    }


def test_separation_summary(capsys):
    rc = main(["separation", "--n", "64", "--trials", "200"])
    assert rc == EXIT_OK
    summary = _summary(capsys)
    assert summary["scale"] == pytest.approx(64.0**-0.5)
    assert 0.0 <= summary["fraction_deepest_two"] <= summary["fraction_any_pair"] <= 1.0
