"""Command line interface: config files, orchestration, reports, benchmarks.

Every output file starts with a header that embeds the full configuration
and the master seed, so a result can always be traced back to the run that
produced it.  Outputs are byte-identical for a fixed seed regardless of the
worker count: each trial draws from its own counter-based stream and the
reduction happens in trial order.

Exit codes: 0 all requested limits met (or report-only), 1 internal error,
2 command line error (unknown subcommand or bad flag), 3 invalid
configuration, 4 unwritable output path, 5 requested limits not met.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Callable, Optional, Sequence

import numpy as np

from .coeffs import (
    CoefficientModel,
    InvalidModelError,
    RngSpec,
    derive_trial_stream,
    sample_coefficients,
)
from .extremal import (
    DEFAULT_C0,
    DEFAULT_EPS_EVENT,
    EventThresholds,
    GlobalMinResult,
    NearMinimaProcess,
    extract_process,
    global_min,
)
from .neteval import (
    NetParameterError,
    build_net,
    direct_net_evaluation,
    evaluate_on_net,
    net_from_size,
)
from .perturb import DEFAULT_MATCH_RADIUS, build_perturb_trial, invariance_report
from .poly import TrigPolynomial, kernel, sigma_n
from .realcase import (
    DEFAULT_EPS_ZONE,
    RealCaseConfig,
    limit_rate,
    realcase_pipeline,
)
from .stats import (
    INTENSITY,
    default_tau_grid,
    empirical_survival,
    ks_exponential,
    poisson_diagnostics,
    separation_statistic,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_BAD_CONFIG = 3
EXIT_UNWRITABLE = 4
EXIT_LIMITS = 5

SUBCOMMANDS = (
    "simulate",
    "intensity",
    "poisson",
    "perturb",
    "separation",
    "kernel-check",
    "realcase",
    "bench",
)


class ConfigError(ValueError):
    """Raised for malformed or out-of-range configuration input."""


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs, serializable to a flat key=value file.

    The worker count is deliberately not part of the configuration: it can
    never change results, only wall time.
    """

    model: CoefficientModel = CoefficientModel()
    n: int = 256
    eps_net: float = 0.01
    # Calibrated default; the candidate-event exponent 0.5 misses a few
    # percent of true minima at desk-scale degrees.
    eps_event: float = DEFAULT_EPS_EVENT
    C0: float = DEFAULT_C0
    round_to_pow2: bool = True
    trials: int = 20000
    master_seed: int = 0
    window: float = 3.0
    tau_grid: tuple[float, ...] = tuple(float(t) for t in default_tau_grid())
    intervals: tuple[tuple[float, float], ...] = ((-2.0, 2.0), (-1.0, 1.0))
    eps_zone: float = DEFAULT_EPS_ZONE
    eps_separation: float = 0.5
    limits: tuple[tuple[str, float], ...] = ()
    format: str = "csv"
    output: str = ""

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if not 0.0 < self.eps_net < 1.0:
            raise ConfigError(f"eps_net must lie in (0, 1), got {self.eps_net}")
        if not 0.0 < self.eps_event < 2.0:
            raise ConfigError(
                f"eps_event must lie in (0, 2), got {self.eps_event}"
            )
        if self.C0 <= 0.0:
            raise ConfigError(f"C0 must be positive, got {self.C0}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.window <= 0.0:
            raise ConfigError(f"window must be positive, got {self.window}")
        if len(self.tau_grid) == 0:
            raise ConfigError("tau_grid must not be empty")
        taus = np.asarray(self.tau_grid, dtype=float)
        if np.any(taus < 0.0) or np.any(np.diff(taus) <= 0.0):
            raise ConfigError("tau_grid must be nonnegative and increasing")
        for a, b in self.intervals:
            if not a < b:
                raise ConfigError(f"interval [{a}, {b}) is empty")
        if not 0.0 < self.eps_zone < 1.0:
            raise ConfigError(
                f"eps_zone must lie in (0, 1), got {self.eps_zone}"
            )
        if not 0.0 < self.eps_separation < 1.0:
            raise ConfigError(
                f"eps_separation must lie in (0, 1), got {self.eps_separation}"
            )
        for name, bound in self.limits:
            if not name or not math.isfinite(bound):
                raise ConfigError(f"bad limit entry {name!r}:{bound!r}")
        if self.format not in ("csv", "jsonl"):
            raise ConfigError(
                f"format must be 'csv' or 'jsonl', got {self.format!r}"
            )


def _fmt_float(x: float) -> str:
    return repr(float(x))


def config_pairs(config: RunConfig) -> list[tuple[str, str]]:
    """Flat (key, value) pairs; the canonical serialized form."""
    model = config.model
    return [
        ("model.kind", model.kind),
        ("model.delta", "" if model.delta is None else _fmt_float(model.delta)),
        ("model.base", model.base),
        ("n", str(config.n)),
        ("eps_net", _fmt_float(config.eps_net)),
        ("eps_event", _fmt_float(config.eps_event)),
        ("C0", _fmt_float(config.C0)),
        ("round_to_pow2", "true" if config.round_to_pow2 else "false"),
        ("trials", str(config.trials)),
        ("master_seed", str(config.master_seed)),
        ("window", _fmt_float(config.window)),
        ("tau_grid", ",".join(_fmt_float(t) for t in config.tau_grid)),
        (
            "intervals",
            ";".join(
                f"{_fmt_float(a)}:{_fmt_float(b)}" for a, b in config.intervals
            ),
        ),
        ("eps_zone", _fmt_float(config.eps_zone)),
        ("eps_separation", _fmt_float(config.eps_separation)),
        (
            "limits",
            ";".join(f"{name}:{_fmt_float(v)}" for name, v in config.limits),
        ),
        ("format", config.format),
        ("output", config.output),
    ]


def serialize_config(config: RunConfig) -> str:
    lines = ["# flat key=value run configuration"]
    lines += [f"{k}={v}" for k, v in config_pairs(config)]
    return "\n".join(lines) + "\n"


def _parse_bool(value: str, key: str) -> bool:
    if value == "true":
        return True
    if value == "false":
        return False
    raise ConfigError(f"{key} must be 'true' or 'false', got {value!r}")


def _parse_float(value: str, key: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {value!r}") from None


def _parse_int(value: str, key: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {value!r}") from None


def _parse_intervals(value: str, key: str) -> tuple[tuple[float, float], ...]:
    if not value:
        raise ConfigError(f"{key} must name at least one interval")
    out = []
    for part in value.split(";"):
        bits = part.split(":")
        if len(bits) != 2:
            raise ConfigError(f"{key} entries must look like a:b, got {part!r}")
        out.append((_parse_float(bits[0], key), _parse_float(bits[1], key)))
    return tuple(out)


def _parse_limits(value: str) -> tuple[tuple[str, float], ...]:
    if not value:
        return ()
    out = []
    for part in value.split(";"):
        bits = part.split(":")
        if len(bits) != 2 or not bits[0]:
            raise ConfigError(
                f"limits entries must look like name:value, got {part!r}"
            )
        out.append((bits[0], _parse_float(bits[1], "limits")))
    return tuple(out)


def apply_config_updates(config: RunConfig, items: Sequence[tuple[str, str]]) -> RunConfig:
    """Apply key=value updates on top of a config, with type coercion."""
    model = config.model
    values = {f.name: getattr(config, f.name) for f in fields(config)}
    kind, delta, base = model.kind, model.delta, model.base
    for key, value in items:
        if key == "model.kind":
            kind = value
        elif key == "model.delta":
            delta = None if value == "" else _parse_float(value, key)
        elif key == "model.base":
            base = value
        elif key == "n":
            values["n"] = _parse_int(value, key)
        elif key == "eps_net":
            values["eps_net"] = _parse_float(value, key)
        elif key == "eps_event":
            values["eps_event"] = _parse_float(value, key)
        elif key == "C0":
            values["C0"] = _parse_float(value, key)
        elif key == "round_to_pow2":
            values["round_to_pow2"] = _parse_bool(value, key)
        elif key == "trials":
            values["trials"] = _parse_int(value, key)
        elif key == "master_seed":
            values["master_seed"] = _parse_int(value, key)
        elif key == "window":
            values["window"] = _parse_float(value, key)
        elif key == "tau_grid":
            if not value:
                raise ConfigError("tau_grid must not be empty")
            values["tau_grid"] = tuple(
                _parse_float(t, key) for t in value.split(",")
            )
        elif key == "intervals":
            values["intervals"] = _parse_intervals(value, key)
        elif key == "eps_zone":
            values["eps_zone"] = _parse_float(value, key)
        elif key == "eps_separation":
            values["eps_separation"] = _parse_float(value, key)
        elif key == "limits":
            values["limits"] = _parse_limits(value)
        elif key == "format":
            values["format"] = value
        elif key == "output":
            values["output"] = value
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    try:
        values["model"] = CoefficientModel(kind=kind, delta=delta, base=base)
    except InvalidModelError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(**values)


def parse_config(text: str) -> RunConfig:
    """Parse a flat key=value file (UTF-8, '#' comments) into a RunConfig."""
    items = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        items.append((key.strip(), value.strip()))
    return apply_config_updates(RunConfig(), items)


# ---------------------------------------------------------------------------
# orchestration


@dataclass(frozen=True)
class TrialBatch:
    """Fixed-order per-trial results of a Monte Carlo run."""

    scaled_minima: np.ndarray
    minima: tuple[GlobalMinResult, ...]
    processes: tuple[NearMinimaProcess, ...]


def _parallel_map(work: Callable[[int], object], count: int, workers: int) -> list:
    """Deterministic map over trial indices; order fixed by index."""
    out: list = [None] * count
    if workers <= 1:
        for t in range(count):
            out[t] = work(t)
        return out
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for t, value in zip(range(count), pool.map(work, range(count))):
            out[t] = value
    return out


def run_trial_batch(config: RunConfig, workers: int = 1) -> TrialBatch:
    """Sample, evaluate, minimize, and extract candidates for every trial."""
    net = build_net(config.n, config.eps_net, round_to_pow2=config.round_to_pow2)
    thresholds = EventThresholds.for_degree(
        config.n, eps_event=config.eps_event, C0=config.C0
    )

    def work(trial: int):
        stream = derive_trial_stream(RngSpec(config.master_seed, trial))
        p = TrigPolynomial(
            config.n, sample_coefficients(config.model, config.n, stream)
        )
        values = evaluate_on_net(p, net, order=0)
        slopes = evaluate_on_net(p, net, order=1)
        result = global_min(p, values, slopes, net)
        proc = extract_process(values, slopes, net, thresholds, config.n)
        return result, proc

    results = _parallel_map(work, config.trials, workers)
    minima = tuple(r for r, _ in results)
    processes = tuple(p for _, p in results)
    scaled = np.array([config.n * r.m for r in minima], dtype=np.float64)
    return TrialBatch(
        scaled_minima=scaled, minima=minima, processes=processes
    )


# ---------------------------------------------------------------------------
# output plumbing


def _header_lines(subcommand: str, config: RunConfig) -> list[str]:
    lines = [
        f"# schema_version={SCHEMA_VERSION}",
        f"# subcommand={subcommand}",
    ]
    lines += [f"# {k}={v}" for k, v in config_pairs(config)]
    return lines


def _config_dict(config: RunConfig) -> dict:
    return {k: v for k, v in config_pairs(config)}


def _open_out(path: str):
    try:
        return open(path, "w", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise _Unwritable(f"cannot write {path!r}: {exc}") from exc


class _Unwritable(OSError):
    pass


def _write_records(
    subcommand: str,
    config: RunConfig,
    columns: Sequence[str],
    rows: Sequence[dict],
) -> None:
    """Write per-trial records to config.output (skipped when empty)."""
    if not config.output:
        return
    with _open_out(config.output) as fh:
        if config.format == "csv":
            for line in _header_lines(subcommand, config):
                fh.write(line + "\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_cell(row[c]) for c in columns) + "\n")
        else:
            header = {
                "schema_version": SCHEMA_VERSION,
                "subcommand": subcommand,
                "config": _config_dict(config),
            }
            fh.write(json.dumps(header) + "\n")
            for row in rows:
                fh.write(json.dumps(row) + "\n")


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _fmt_float(value)
    return str(value)


def _write_survival(
    path: str, subcommand: str, config: RunConfig, samples: np.ndarray, rate: float
) -> None:
    curve = empirical_survival(
        samples, taus=np.asarray(config.tau_grid, dtype=float), rate=rate
    )
    with _open_out(path) as fh:
        for line in _header_lines(subcommand, config):
            fh.write(line + "\n")
        fh.write("tau,empirical,reference\n")
        for tau, emp, ref in zip(curve.taus, curve.empirical, curve.reference):
            fh.write(f"{_fmt_float(tau)},{_fmt_float(emp)},{_fmt_float(ref)}\n")


def _summary(subcommand: str, config: RunConfig, report: dict, stats: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "subcommand": subcommand,
        "config": _config_dict(config),
        **report,
        "stats": {k: (float(v) if isinstance(v, (int, float)) else v) for k, v in stats.items()},
    }


def _check_limits(config: RunConfig, subcommand: str, stats: dict) -> list[str]:
    failures = []
    for name, bound in config.limits:
        if name not in stats:
            known = ", ".join(sorted(stats))
            raise ConfigError(
                f"limits: unknown statistic {name!r} for {subcommand} "
                f"(known: {known})"
            )
        if not stats[name] <= bound:
            failures.append(f"{name}={stats[name]!r} exceeds {bound!r}")
    return failures


# ---------------------------------------------------------------------------
# subcommand handlers; each returns (report dict, stats dict)


def _trial_rows(config: RunConfig, batch: TrialBatch) -> list[dict]:
    K = config.window
    rows = []
    for t, (result, proc) in enumerate(zip(batch.minima, batch.processes)):
        rows.append(
            {
                "trial": t,
                "m": float(result.m),
                "scaled_min": float(config.n * result.m),
                "argmin": float(result.argmin),
                "count_in_window": proc.count_in(-K, K),
                "certified_bound": float(result.certified_bound),
            }
        )
    return rows


def _handle_simulate(config: RunConfig, workers: int, survival: Optional[str]):
    batch = run_trial_batch(config, workers)
    rate = limit_rate(config.model)
    ks = ks_exponential(batch.scaled_minima, rate=rate)
    _write_records(
        "simulate",
        config,
        (
            "trial",
            "m",
            "scaled_min",
            "argmin",
            "count_in_window",
            "certified_bound",
        ),
        _trial_rows(config, batch),
    )
    if survival:
        _write_survival(survival, "simulate", config, batch.scaled_minima, rate)
    report = {
        "trials": config.trials,
        "reference_rate": rate,
        "ks": ks.statistic,
        "ks_critical_95": ks.critical_95,
        "mean_scaled_min": float(batch.scaled_minima.mean()),
    }
    return report, {"ks": ks.statistic}


def _handle_intensity(config: RunConfig, workers: int, survival: Optional[str]):
    batch = run_trial_batch(config, workers)
    windows = []
    worst = 0.0
    for a, b in config.intervals:
        mean = float(
            np.mean([proc.count_in(a, b) for proc in batch.processes])
        )
        expected = INTENSITY * (b - a)
        rel = abs(mean / expected - 1.0)
        worst = max(worst, rel)
        windows.append(
            {
                "interval": [a, b],
                "mean_count": mean,
                "expected": expected,
                "relative_error": rel,
            }
        )
    report = {"trials": config.trials, "windows": windows}
    return report, {"max_relative_error": worst}


def _handle_poisson(config: RunConfig, workers: int, survival: Optional[str]):
    batch = run_trial_batch(config, workers)
    windows = []
    disp_err = 0.0
    void_err = 0.0
    for a, b in config.intervals:
        # dispersion and void need a disjoint companion window; covariance
        # with the companion is not part of this block
        diag = poisson_diagnostics(batch.processes, (a, b), (b, b + 1.0))
        expected_void = math.exp(-INTENSITY * (b - a))
        disp_err = max(disp_err, abs(diag.dispersion - 1.0))
        void_err = max(void_err, abs(diag.void_prob - expected_void))
        windows.append(
            {
                "interval": [a, b],
                "mean_count": diag.mean_count,
                "var_count": diag.var_count,
                "dispersion": diag.dispersion,
                "void_prob": diag.void_prob,
                "expected_void": expected_void,
            }
        )
    a, b = config.intervals[0]
    mid = 0.5 * (a + b)
    split = poisson_diagnostics(batch.processes, (a, mid), (mid, b))
    cov_z = (
        abs(split.covariance) / split.covariance_se
        if split.covariance_se > 0
        else math.inf
    )
    report = {
        "trials": config.trials,
        "windows": windows,
        "covariance": {
            "window_left": [a, mid],
            "window_right": [mid, b],
            "covariance": split.covariance,
            "se": split.covariance_se,
            "abs_over_se": cov_z,
        },
    }
    stats = {
        "dispersion_error": disp_err,
        "void_error": void_err,
        "cov_abs_over_se": cov_z,
    }
    return report, stats


def _handle_separation(config: RunConfig, workers: int, survival: Optional[str]):
    batch = run_trial_batch(config, workers)
    eps = config.eps_separation
    deepest_two = separation_statistic(
        batch.processes, config.n, eps=eps, deepest=2
    )
    any_pair = separation_statistic(batch.processes, config.n, eps=eps)
    report = {
        "trials": config.trials,
        "eps": eps,
        "scale": float(config.n) ** (-eps),
        "fraction_deepest_two": deepest_two,
        "fraction_any_pair": any_pair,
    }
    stats = {
        "separation_fraction": deepest_two,
        "any_pair_fraction": any_pair,
    }
    return report, stats


def _handle_perturb(config: RunConfig, workers: int, survival: Optional[str]):
    net = build_net(config.n, config.eps_net, round_to_pow2=config.round_to_pow2)
    thresholds = EventThresholds.for_degree(
        config.n, eps_event=config.eps_event, C0=config.C0
    )

    def work(trial: int):
        stream = derive_trial_stream(RngSpec(config.master_seed, trial))
        return build_perturb_trial(
            config.n,
            net,
            thresholds,
            stream,
            model=config.model,
            window=config.window,
            match_radius=DEFAULT_MATCH_RADIUS,
        )

    trials = _parallel_map(work, config.trials, workers)
    rep = invariance_report(trials, K=config.window)
    report = {
        "trials": config.trials,
        "law_ks": rep.law_ks,
        "shift_mean": rep.shift_mean,
        "shift_var": rep.shift_var,
        "shift_ks_gauss": rep.shift_ks_gauss,
        "unmatched_frac": rep.unmatched_frac,
        "residual_max_scaled": rep.residual_max_scaled,
        "n_matches": rep.n_matches,
    }
    stats = {
        "law_ks": rep.law_ks,
        "shift_ks_gauss": rep.shift_ks_gauss,
        "shift_mean_abs": abs(rep.shift_mean),
        "shift_var_error": abs(rep.shift_var - 0.5),
        "unmatched_frac": rep.unmatched_frac,
        "residual_max_scaled": rep.residual_max_scaled,
    }
    return report, stats


def _kernel_direct(n: int, xs: np.ndarray):
    j = np.arange(-n, n + 1, dtype=np.float64)
    phase = np.outer(xs, j)
    norm = 1.0 / (2 * n + 1)
    r = np.cos(phase).sum(axis=1) * norm
    r1 = -(np.sin(phase) * j).sum(axis=1) * norm
    r2 = -(np.cos(phase) * j * j).sum(axis=1) * norm
    return r, r1, r2


def _handle_kernel_check(config: RunConfig, workers: int, survival: Optional[str]):
    n = config.n
    seam = 1.0 / (4.0 * n)
    xs = np.concatenate(
        [
            np.linspace(-math.pi, math.pi, 2001),
            np.linspace(-2.0 * seam, 2.0 * seam, 401),
            seam + np.linspace(-1e-9, 1e-9, 21),
            -seam + np.linspace(-1e-9, 1e-9, 21),
        ]
    )
    xs = np.unique(xs)
    kv = kernel(n, xs)
    r_s, r1_s, r2_s = _kernel_direct(n, xs)
    sigma = sigma_n(n)
    # error in normalized units: slopes scale with sigma, curvatures with
    # sigma^2, so raw differences would mislead at large n
    err = np.maximum(
        np.abs(kv.r - r_s),
        np.maximum(
            np.abs(kv.r1 - r1_s) / sigma, np.abs(kv.r2 - r2_s) / sigma**2
        ),
    )
    rows = [
        {
            "x": float(x),
            "r_closed": float(a),
            "r_sum": float(b),
            "r1_closed": float(c),
            "r1_sum": float(d),
            "r2_closed": float(e),
            "r2_sum": float(f),
            "abs_errors": float(g),
        }
        for x, a, b, c, d, e, f, g in zip(
            xs, kv.r, r_s, kv.r1, r1_s, kv.r2, r2_s, err
        )
    ]
    _write_records(
        "kernel-check",
        config,
        (
            "x",
            "r_closed",
            "r_sum",
            "r1_closed",
            "r1_sum",
            "r2_closed",
            "r2_sum",
            "abs_errors",
        ),
        rows,
    )
    worst = float(err.max())
    report = {"points": len(xs), "sigma_n": float(sigma), "max_abs_error": worst}
    return report, {"max_abs_error": worst}


def _handle_realcase(config: RunConfig, workers: int, survival: Optional[str]):
    model = config.model
    if model.kind == "ComplexGaussian":
        # this subcommand studies real coefficient draws; the plain complex
        # model belongs to `simulate`
        print(
            "realcase: replacing model.kind=ComplexGaussian with RealGaussian",
            file=sys.stderr,
        )
        model = CoefficientModel(kind="RealGaussian", delta=model.delta, base=model.base)
    thresholds = EventThresholds.for_degree(
        config.n, eps_event=config.eps_event, C0=config.C0
    )
    rep = realcase_pipeline(
        RealCaseConfig(config.n, config.eps_zone),
        thresholds,
        config.trials,
        model=model,
        eps_net=config.eps_net,
        round_to_pow2=config.round_to_pow2,
        master_seed=config.master_seed,
    )
    ks = rep.ks()
    K = config.window
    rows = []
    for t, (result, proc, zone) in enumerate(
        zip(rep.minima, rep.processes, rep.zone_minima)
    ):
        rows.append(
            {
                "trial": t,
                "m": float(result.m),
                "scaled_min": float(config.n * result.m),
                "argmin": float(result.argmin),
                "count_in_window": proc.count_in(-K, K),
                "certified_bound": float(result.certified_bound),
                "zone_min_zero": float(zone.zero),
                "zone_min_pi": float(zone.pi),
            }
        )
    _write_records(
        "realcase",
        config,
        (
            "trial",
            "m",
            "scaled_min",
            "argmin",
            "count_in_window",
            "certified_bound",
            "zone_min_zero",
            "zone_min_pi",
        ),
        rows,
    )
    if survival:
        _write_survival(
            survival, "realcase", config, rep.samples, rep.reference_rate
        )
    windows = []
    worst = 0.0
    for a, b in config.intervals:
        mean = rep.mean_count(a, b)
        expected = INTENSITY * (b - a)
        rel = abs(mean / expected - 1.0)
        worst = max(worst, rel)
        windows.append(
            {
                "interval": [a, b],
                "mean_count": mean,
                "expected": expected,
                "relative_error": rel,
            }
        )
    threshold = math.log(config.n) / config.n
    zone_fraction = rep.zone_fraction(threshold)
    report = {
        "trials": config.trials,
        "model_kind": model.kind,
        "reference_rate": rep.reference_rate,
        "ks": ks.statistic,
        "ks_critical_95": ks.critical_95,
        "mean_scaled_min": float(rep.samples.mean()),
        "windows": windows,
        "zone": {
            "eps_zone": config.eps_zone,
            "half_width": rep.config.zone_half_width,
            "threshold": threshold,
            "fraction_below": zone_fraction,
        },
    }
    stats = {
        "ks": ks.statistic,
        "zone_fraction": zone_fraction,
        "max_relative_error": worst,
    }
    return report, stats


def _handle_bench(config: RunConfig, workers: int, survival: Optional[str]):
    pairs = ((256, 1 << 16), (512, 1 << 17))
    rows = []
    min_speedup = math.inf
    for i, (n, N) in enumerate(pairs):
        net = net_from_size(n, N)
        stream = derive_trial_stream(RngSpec(config.master_seed, i))
        p = TrigPolynomial(
            n, sample_coefficients(CoefficientModel(), n, stream)
        )
        t0 = time.perf_counter()
        direct = direct_net_evaluation(p, net)
        t_direct = time.perf_counter() - t0
        t_fft = math.inf
        for _ in range(3):
            t0 = time.perf_counter()
            fast = evaluate_on_net(p, net, order=0)
            t_fft = min(t_fft, time.perf_counter() - t0)
        del direct, fast
        speedup = t_direct / t_fft if t_fft > 0 else math.inf
        min_speedup = min(min_speedup, speedup)
        # direct work ~ 2nN terms, transform ~ N log2 N
        op_ratio = 2.0 * n * N / (N * math.log2(N))
        rows.append(
            {
                "n": n,
                "N": N,
                "direct_seconds": t_direct,
                "transform_seconds": t_fft,
                "speedup": speedup,
                "op_ratio": op_ratio,
            }
        )
    _write_records(
        "bench",
        config,
        ("n", "N", "direct_seconds", "transform_seconds", "speedup", "op_ratio"),
        rows,
    )
    report = {"grid": rows}
    stats = {
        "inverse_speedup": 1.0 / min_speedup if min_speedup > 0 else math.inf
    }
    return report, stats


_HANDLERS = {
    "simulate": _handle_simulate,
    "intensity": _handle_intensity,
    "poisson": _handle_poisson,
    "perturb": _handle_perturb,
    "separation": _handle_separation,
    "kernel-check": _handle_kernel_check,
    "realcase": _handle_realcase,
    "bench": _handle_bench,
}


def run(
    subcommand: str,
    config: RunConfig,
    *,
    workers: int = 1,
    survival: Optional[str] = None,
    stream=None,
) -> int:
    """Execute one subcommand; returns the process exit code."""
    out = stream if stream is not None else sys.stdout
    if subcommand not in _HANDLERS:
        print(f"unknown subcommand {subcommand!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report, stats = _HANDLERS[subcommand](config, workers, survival)
        failures = _check_limits(config, subcommand, stats)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except _Unwritable as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_UNWRITABLE
    except (InvalidModelError, NetParameterError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    summary = _summary(subcommand, config, report, stats)
    if failures:
        summary["limit_failures"] = failures
    print(json.dumps(summary), file=out)
    return EXIT_LIMITS if failures else EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trigmin",
        description=(
            "Monte Carlo study of the minimum modulus of random "
            "trigonometric polynomials"
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="flat key=value configuration file")
        sp.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one configuration key (repeatable)",
        )
        sp.add_argument("--n", type=int, help="polynomial degree")
        sp.add_argument("--trials", type=int, help="number of Monte Carlo trials")
        sp.add_argument("--seed", type=int, help="master seed")
        sp.add_argument("--model", help="coefficient model kind")
        sp.add_argument("--output", help="per-record artifact path")
        sp.add_argument("--format", choices=("csv", "jsonl"))
        sp.add_argument(
            "--workers",
            type=int,
            default=1,
            help="worker threads; never changes results",
        )
        if name in ("simulate", "realcase"):
            sp.add_argument(
                "--survival",
                help="also write a survival-curve CSV (tau,empirical,reference)",
            )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        config = RunConfig()
        if args.config:
            try:
                with open(args.config, "r", encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config file: {exc}") from exc
            config = parse_config(text)
        updates = []
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            key, _, value = item.partition("=")
            updates.append((key.strip(), value.strip()))
        if args.n is not None:
            updates.append(("n", str(args.n)))
        if args.trials is not None:
            updates.append(("trials", str(args.trials)))
        if args.seed is not None:
            updates.append(("master_seed", str(args.seed)))
        if args.model is not None:
            updates.append(("model.kind", args.model))
        if args.output is not None:
            updates.append(("output", args.output))
        if args.format is not None:
            updates.append(("format", args.format))
        config = apply_config_updates(config, updates)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    survival = getattr(args, "survival", None)
    return run(
        args.subcommand, config, workers=args.workers, survival=survival
    )


if __name__ == "__main__":
    sys.exit(main())
