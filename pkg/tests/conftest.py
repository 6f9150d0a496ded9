"""Session fixtures for the expensive Monte Carlo batches.

The acceptance tests share a handful of large simulation runs; building them
once per session keeps the suite under half an hour.  Each fixture is pinned
to master seed 0 so reruns are bit-identical.
"""
import sys

import pytest

sys.path.insert(0, str(__import__("pathlib").Path(__file__).parent))

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_report():
    """Record one pass/fail line per criterion, then assert."""

    def _report(num, ok, detail):
        line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _report


@pytest.fixture(scope="session")
def batch256():
    """Complex Gaussian, n=256, 20000 trials, seed 0."""
    from trigmin.cli import RunConfig, run_trial_batch

    return run_trial_batch(RunConfig())


@pytest.fixture(scope="session")
def batch512():
    """Complex Gaussian, n=512, 10000 trials, seed 0."""
    from trigmin.cli import RunConfig, run_trial_batch

    return run_trial_batch(RunConfig(n=512, trials=10000))


@pytest.fixture(scope="session")
def cramer_batch256():
    """Cramer-perturbed uniform coefficients, n=256, 20000 trials, seed 0."""
    from trigmin.cli import RunConfig, run_trial_batch
    from trigmin.coeffs import CoefficientModel

    cfg = RunConfig(model=CoefficientModel(kind="CramerPerturbed"), trials=20000)
    return run_trial_batch(cfg)


@pytest.fixture(scope="session")
def realcase_report256():
    """Real Gaussian pipeline with zone scanning, n=256, 20000 trials."""
    from trigmin.realcase import RealCaseConfig, realcase_pipeline

    return realcase_pipeline(RealCaseConfig(256), M=20000, master_seed=0)


@pytest.fixture(scope="session")
def perturb_report256():
    """Paired-polynomial invariance report, n=256, 10000 trials, seed 0."""
    from trigmin.cli import RunConfig, _handle_perturb

    cfg = RunConfig(trials=10000, window=3.0)
    report, stats = _handle_perturb(cfg, 1, None)
    return report, stats
