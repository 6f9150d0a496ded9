"""Acceptance gates for the shipped defaults.

One test per criterion, each emitting a single pass/fail line through the
acceptance_report fixture; the expensive Monte Carlo batches are shared
session fixtures (seed 0 throughout).
"""
import io
import json
import math
import shutil

import numpy as np

from helpers import brute_force_min, make_poly
from trigmin import cli
from trigmin.cli import RunConfig, main, run_trial_batch
from trigmin.coeffs import CoefficientModel, RngSpec, derive_trial_stream, sample_coefficients
from trigmin.extremal import EventThresholds, candidate_record, global_min
from trigmin.neteval import direct_net_evaluation, evaluate_on_net, net_from_size
from trigmin.poly import TrigPolynomial, kernel, sigma_n
from trigmin.realcase import limit_rate
from trigmin.stats import (
    EXP_RATE,
    INTENSITY,
    intensity_estimate,
    ks_exponential,
    poisson_diagnostics,
    separation_statistic,
)


def test_criterion_01_scaled_minimum_law(batch256, batch512, acceptance_report):
    ks256 = ks_exponential(batch256.scaled_minima, rate=EXP_RATE).statistic
    ks512 = ks_exponential(batch512.scaled_minima, rate=EXP_RATE).statistic
    ok = ks256 <= 0.03 and ks512 <= 0.03 and ks512 <= ks256 + 0.01
    acceptance_report(
        1,
        ok,
        f"KS(n=256, M=20000)={ks256:.4f} <= 0.03; "
        f"KS(n=512, M=10000)={ks512:.4f} <= 0.03 and <= {ks256 + 0.01:.4f}",
    )


def test_criterion_02_window_intensity(batch256, acceptance_report):
    mean2 = intensity_estimate(batch256.processes, -2.0, 2.0)
    mean1 = intensity_estimate(batch256.processes, -1.0, 1.0)
    target2 = 4.0 * INTENSITY
    target1 = 2.0 * INTENSITY
    rel2 = abs(mean2 / target2 - 1.0)
    rel1 = abs(mean1 / target1 - 1.0)
    ok = rel2 <= 0.05 and rel1 <= 0.05
    acceptance_report(
        2,
        ok,
        f"mean count [-2,2)={mean2:.4f} vs {target2:.4f} (rel {rel2:.3%}); "
        f"[-1,1)={mean1:.4f} vs {target1:.4f} (rel {rel1:.3%}); both <= 5%",
    )


def test_criterion_03_poisson_diagnostics(batch256, acceptance_report):
    procs = batch256.processes
    disp = poisson_diagnostics(procs, (-1.0, 1.0), (1.0, 2.0)).dispersion
    # the quoted void reference e^(-4 sqrt(pi/3)) ~ 0.0167 is the count of
    # an empty [-2, 2) window, so that window is what gets tested
    void = poisson_diagnostics(procs, (-2.0, 2.0), (2.0, 3.0)).void_prob
    void_ref = math.exp(-4.0 * INTENSITY)
    cov = poisson_diagnostics(procs, (-2.0, 0.0), (0.0, 2.0))
    cov_z = abs(cov.covariance) / cov.covariance_se
    ok = (
        0.9 <= disp <= 1.1
        and abs(void - void_ref) <= 0.005
        and cov_z <= 3.0
    )
    acceptance_report(
        3,
        ok,
        f"dispersion[-1,1)={disp:.4f} in [0.9,1.1]; "
        f"void[-2,2)={void:.4f} within 0.005 of {void_ref:.4f}; "
        f"|cov|/se={cov_z:.2f} <= 3",
    )


def test_criterion_04_minimum_capture(batch256, acceptance_report):
    n = 256
    captured = 0
    explanations = []
    for t, (res, proc) in enumerate(zip(batch256.minima, batch256.processes)):
        mp = proc.min_abs_point()
        if mp is not None and abs(abs(mp[1]) / n - res.m) <= res.certified_bound:
            captured += 1
            continue
        explanations.append(_explain_miss(t, res, proc))
    frac = captured / len(batch256.minima)
    ok = frac >= 0.99
    for line in explanations:
        print("capture exception:", line)
    acceptance_report(
        4,
        ok,
        f"flagged-process minimum matches certified minimum in {frac:.4%} "
        f"of trials (>= 99%); {len(explanations)} exceptions logged",
    )


def _explain_miss(trial, res, proc):
    """Rebuild the trial and report the event flags around the argmin."""
    n, N = 256, 65536
    stream = derive_trial_stream(RngSpec(0, trial))
    p = TrigPolynomial(n, sample_coefficients(CoefficientModel(), n, stream))
    net = net_from_size(n, N)
    Pv = evaluate_on_net(p, net, 0)
    P1v = evaluate_on_net(p, net, 1)
    th = EventThresholds.for_degree(n)
    alpha0 = int(round(res.argmin * N / (2.0 * math.pi)))
    flags = []
    for alpha in (alpha0 - 1, alpha0, alpha0 + 1):
        a = (alpha + N // 2) % N - N // 2
        rec = candidate_record(Pv, P1v, net, th, n, a)
        flags.append(
            f"alpha={a} location_event={rec.aprime} magnitude_event={rec.adprime} "
            f"|A|={abs(rec.A):.3g} |B|={abs(rec.B):.3g}"
        )
    mp = proc.min_abs_point()
    head = (
        f"trial {trial}: m={res.m:.3g} bound={res.certified_bound:.3g} "
        f"min-|X| point={'none' if mp is None else f'{mp[1]:.4f}@{mp[0]}'}"
    )
    return head + " | " + "; ".join(flags)


def test_criterion_05_perturbation_invariance(perturb_report256, acceptance_report):
    report, _ = perturb_report256
    ok = (
        0.45 <= report["shift_var"] <= 0.55
        and report["shift_ks_gauss"] <= 0.03
        and report["law_ks"] <= 0.03
        and report["unmatched_frac"] <= 0.02
    )
    acceptance_report(
        5,
        ok,
        f"shift var={report['shift_var']:.4f} in [0.45,0.55]; "
        f"shift KS={report['shift_ks_gauss']:.4f} <= 0.03; "
        f"law KS={report['law_ks']:.4f} <= 0.03; "
        f"unmatched={report['unmatched_frac']:.4f} <= 0.02",
    )


def test_criterion_06_candidate_separation(batch256, acceptance_report):
    frac = separation_statistic(batch256.processes, 256, eps=0.5, deepest=2)
    ok = frac <= 0.02
    acceptance_report(
        6,
        ok,
        f"fraction of trials whose two deepest candidates sit within "
        f"256^-0.5 of each other: {frac:.4f} <= 0.02",
    )


def _kernel_direct(n, xs):
    j = np.arange(-n, n + 1, dtype=np.float64)
    phase = np.outer(xs, j)
    norm = 1.0 / (2 * n + 1)
    r = np.cos(phase).sum(axis=1) * norm
    r1 = -(np.sin(phase) * j).sum(axis=1) * norm
    r2 = -(np.cos(phase) * j * j).sum(axis=1) * norm
    return r, r1, r2


def test_criterion_07_analytic_oracles(acceptance_report):
    # kernel closed forms against direct sums, full sweep of degrees
    worst_kernel = 0.0
    base = np.linspace(-math.pi, math.pi, 1001)
    for n in range(1, 513):
        seam = 1.0 / (4.0 * n)
        xs = np.unique(
            np.concatenate([base, np.linspace(-2 * seam, 2 * seam, 41)])
        )
        kv = kernel(n, xs)
        r, r1, r2 = _kernel_direct(n, xs)
        s = sigma_n(n)
        err = max(
            float(np.max(np.abs(kv.r - r))),
            float(np.max(np.abs(kv.r1 - r1))) / s,
            float(np.max(np.abs(kv.r2 - r2))) / s**2,
        )
        worst_kernel = max(worst_kernel, err)

    # series branch against the closed form across the seam
    worst_seam = 0.0
    for n in (4, 16, 64, 256, 512):
        s = sigma_n(n)
        for x0 in (1.0 / (4.0 * n), -1.0 / (4.0 * n)):
            lo = kernel(n, x0 * (1 - 1e-9))
            hi = kernel(n, x0 * (1 + 1e-9))
            worst_seam = max(
                worst_seam,
                abs(lo.r - hi.r),
                abs(lo.r1 - hi.r1) / s,
                abs(lo.r2 - hi.r2) / s**2,
            )

    # transform evaluation against direct evaluation, full sweep n <= 64
    worst_net = 0.0
    for n in range(1, 65):
        p = make_poly(n, seed=n, kind="ComplexGaussian")
        net = net_from_size(n, 1024)
        for order in (0, 1):
            fast = evaluate_on_net(p, net, order=order)
            slow = direct_net_evaluation(p, net, order=order)
            scale = float(np.max(np.abs(slow)))
            worst_net = max(worst_net, float(np.max(np.abs(fast - slow))) / scale)

    # certified minimum against a brute-force oracle on 200 polynomials
    worst_min = 0.0
    degrees = (4, 8, 16, 24, 32, 48, 64)
    for k in range(200):
        n = degrees[k % len(degrees)]
        kind = "ComplexGaussian" if k % 2 == 0 else "RealGaussian"
        p = make_poly(n, seed=7, kind=kind, trial=k)
        net = net_from_size(n, 4096)
        res = global_min(
            p, evaluate_on_net(p, net, 0), evaluate_on_net(p, net, 1), net
        )
        bm, _ = brute_force_min(p)
        worst_min = max(worst_min, abs(res.m - bm))

    ok = (
        worst_kernel <= 1e-10
        and worst_seam <= 1e-9
        and worst_net <= 1e-9
        and worst_min <= 1e-8
    )
    acceptance_report(
        7,
        ok,
        f"kernel vs sums (n<=512): {worst_kernel:.2e} <= 1e-10; "
        f"seam gap: {worst_seam:.2e} <= 1e-9; "
        f"net vs direct (n<=64): {worst_net:.2e} <= 1e-9; "
        f"certified min vs brute force (200 polys): {worst_min:.2e} <= 1e-8",
    )


def test_criterion_08_real_coefficients(realcase_report256, acceptance_report):
    rep = realcase_report256
    # real draws make |T| even, so the minimum ranges over half the circle
    # and the fitted exponential rate is half the complex-case rate
    rate = rep.reference_rate
    ks = rep.ks().statistic
    zf = rep.zone_fraction()
    ok = ks <= 0.035 and zf <= 0.05
    acceptance_report(
        8,
        ok,
        f"KS(real, n=256, M=20000) vs Exp({rate:.4f})={ks:.4f} <= 0.035; "
        f"zone-minimum fraction below log(n)/n: {zf:.4f} <= 0.05",
    )


def test_criterion_09_non_gaussian_model(cramer_batch256, acceptance_report):
    model = CoefficientModel(kind="CramerPerturbed")
    rate = limit_rate(model)  # real-valued draws: same halved rate
    ks = ks_exponential(cramer_batch256.scaled_minima, rate=rate).statistic
    ok = ks <= 0.04
    acceptance_report(
        9,
        ok,
        f"KS(uniform+Gaussian mix, n=256, M=20000) vs Exp({rate:.4f})"
        f"={ks:.4f} <= 0.04",
    )


def test_criterion_10_reproducibility_and_speed(tmp_path, capsys, acceptance_report):
    # library-level determinism across worker counts
    cfg = RunConfig(n=128, trials=200)
    b1 = run_trial_batch(cfg, workers=1)
    b3 = run_trial_batch(cfg, workers=3)
    same_lib = bool(np.array_equal(b1.scaled_minima, b3.scaled_minima)) and all(
        np.array_equal(p1.values, p3.values)
        for p1, p3 in zip(b1.processes, b3.processes)
    )

    # file-level determinism through the command line
    out = tmp_path / "records.csv"
    args = ["simulate", "--n", "64", "--trials", "50", "--output", str(out)]
    assert main(args + ["--workers", "1"]) == 0
    shutil.copy(out, tmp_path / "w1.csv")
    assert main(args + ["--workers", "4"]) == 0
    shutil.copy(out, tmp_path / "w4.csv")
    capsys.readouterr()
    same_files = (
        (tmp_path / "w1.csv").read_bytes() == (tmp_path / "w4.csv").read_bytes()
    )

    # transform evaluation speed advantage at n=512, N=2^17
    buf = io.StringIO()
    rc = cli.run(
        "bench",
        RunConfig(limits=(("inverse_speedup", 0.1),)),
        stream=buf,
    )
    summary = json.loads(buf.getvalue())
    speedups = {row["n"]: row["speedup"] for row in summary["grid"]}
    ok = same_lib and same_files and rc == 0
    acceptance_report(
        10,
        ok,
        f"outputs identical across worker counts (library and files): "
        f"{same_lib and same_files}; transform speedup n=512, N=2^17: "
        f"{speedups.get(512, float('nan')):.0f}x >= 10x",
    )
