"""Statistical verification layer.

Everything here reduces lists of per-trial results to the quantities the
limit theory predicts: the exponential law of the scaled minimum (rate
2 sqrt(pi/3)), constant intensity sqrt(pi/3) of the near-minima process,
Poissonian count behavior, and separation of candidate intervals.

All reductions are permutation-invariant in the trial list and use fixed
summation order, so parallel runs reduce identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .extremal import NearMinimaProcess

__all__ = [
    "EXP_RATE",
    "INTENSITY",
    "SurvivalCurve",
    "KsResult",
    "PoissonDiagnostics",
    "default_tau_grid",
    "empirical_survival",
    "ks_exponential",
    "intensity_estimate",
    "poisson_diagnostics",
    "separation_statistic",
]

# Limit intensity of the near-minima process and the exponential rate of
# the scaled minimum (two-sided window of length 2 tau).
INTENSITY = math.sqrt(math.pi / 3.0)
EXP_RATE = 2.0 * INTENSITY


def default_tau_grid() -> np.ndarray:
    """0 to 5 in steps of 0.05; covers where exp(-2.047 tau) has mass."""
    return 0.05 * np.arange(101)


@dataclass(frozen=True)
class SurvivalCurve:
    """Empirical P(sample >= tau) against the limit exp(-rate * tau)."""

    taus: np.ndarray
    empirical: np.ndarray
    reference: np.ndarray
    M: int

    def sup_gap(self) -> float:
        return float(np.abs(self.empirical - self.reference).max())


@dataclass(frozen=True)
class KsResult:
    statistic: float
    M: int
    critical_95: float

    def __post_init__(self):
        if not 0.0 <= self.statistic <= 1.0:
            raise ValueError(f"KS statistic outside [0,1]: {self.statistic}")

    @property
    def reject_95(self) -> bool:
        return self.statistic > self.critical_95


@dataclass(frozen=True)
class PoissonDiagnostics:
    """Count moments on one window plus cross-window covariance.

    dispersion is var/mean (1 for Poisson); void_prob estimates
    P(no point in the window); covariance_se is the standard error of
    the sample covariance under the independence null.
    """

    interval: tuple[float, float]
    mean_count: float
    var_count: float
    dispersion: float
    void_prob: float
    covariance: float
    covariance_se: float
    M: int

    def __post_init__(self):
        if self.mean_count < 0 or self.var_count < 0:
            raise ValueError("count moments must be nonnegative")


def _as_samples(samples) -> np.ndarray:
    s = np.asarray(samples, dtype=np.float64)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("need a nonempty 1-D sample array")
    if np.any(s < 0):
        raise ValueError("samples must be nonnegative")
    return s


def empirical_survival(samples, taus=None, rate: float = EXP_RATE) -> SurvivalCurve:
    """Survival curve of the samples on a tau grid, with the exponential
    reference exp(-rate * tau) attached."""
    s = np.sort(_as_samples(samples))
    if taus is None:
        taus = default_tau_grid()
    taus = np.asarray(taus, dtype=np.float64)
    if taus.ndim != 1 or taus.size == 0:
        raise ValueError("need a nonempty 1-D tau grid")
    if np.any(np.diff(taus) <= 0):
        raise ValueError("tau grid must be strictly increasing")
    M = s.size
    # empirical[k] = #{s >= tau_k} / M
    emp = (M - np.searchsorted(s, taus, side="left")) / M
    ref = np.exp(-rate * taus)
    return SurvivalCurve(taus=taus, empirical=emp, reference=ref, M=M)


def ks_exponential(samples, rate: float = EXP_RATE) -> KsResult:
    """Exact Kolmogorov-Smirnov statistic against Exp(rate).

    The sup of |F_hat - F| is attained at a jump of the empirical CDF,
    so both one-sided gaps are evaluated at every sorted sample.
    """
    if not rate > 0:
        raise ValueError(f"rate must be positive, got {rate}")
    s = np.sort(_as_samples(samples))
    M = s.size
    F = 1.0 - np.exp(-rate * s)
    k = np.arange(1, M + 1)
    d_plus = (k / M - F).max()
    d_minus = (F - (k - 1) / M).max()
    return KsResult(
        statistic=float(max(d_plus, d_minus)),
        M=M,
        critical_95=1.358 / math.sqrt(M),
    )


def intensity_estimate(
    processes: Sequence[NearMinimaProcess], a: float, b: float
) -> float:
    """Mean count of process values in [a, b) across trials.

    Half-open windows make the estimate exactly additive over a
    partition of [a, b).
    """
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b})")
    processes = list(processes)
    if not processes:
        return 0.0
    total = 0
    for proc in processes:
        total += proc.count_in(a, b)
    return total / len(processes)


def _counts(processes: Sequence[NearMinimaProcess], interval) -> np.ndarray:
    a, b = interval
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b})")
    return np.array([proc.count_in(a, b) for proc in processes], dtype=np.float64)


def poisson_diagnostics(
    processes: Sequence[NearMinimaProcess],
    interval_1: tuple[float, float],
    interval_2: tuple[float, float],
) -> PoissonDiagnostics:
    """Dispersion, void probability, and disjoint-window covariance.

    A Poisson limit forces dispersion 1, void probability
    exp(-INTENSITY * |I|), and zero covariance between disjoint windows.
    """
    processes = list(processes)
    M = len(processes)
    if M < 2:
        raise ValueError("need at least 2 trials for variance estimates")
    lo1, hi1 = interval_1
    lo2, hi2 = interval_2
    if max(lo1, lo2) < min(hi1, hi2):
        raise ValueError(
            f"windows [{lo1},{hi1}) and [{lo2},{hi2}) overlap"
        )
    c1 = _counts(processes, interval_1)
    c2 = _counts(processes, interval_2)
    mean = float(c1.mean())
    var = float(c1.var(ddof=1))
    dispersion = var / mean if mean > 0 else math.nan
    void = float(np.count_nonzero(c1 == 0)) / M
    cov = float(np.cov(c1, c2, ddof=1)[0, 1])
    cov_se = math.sqrt(float(c1.var(ddof=1)) * float(c2.var(ddof=1)) / M)
    return PoissonDiagnostics(
        interval=(float(lo1), float(hi1)),
        mean_count=mean,
        var_count=var,
        dispersion=dispersion,
        void_prob=void,
        covariance=cov,
        covariance_se=cov_se,
        M=M,
    )


def _min_circular_gap(positions: np.ndarray) -> float:
    xs = np.sort(positions)
    gaps = np.diff(xs)
    wrap = xs[0] + 2.0 * math.pi - xs[-1]
    return float(min(gaps.min(), wrap)) if gaps.size else float(wrap)


def separation_statistic(
    processes: Sequence[NearMinimaProcess],
    n: int,
    eps: float = 0.5,
    deepest: int | None = None,
) -> float:
    """Fraction of trials with two flagged candidates within n^(-eps).

    With deepest=None every pair of candidate positions counts; with
    deepest=k only the k candidates of smallest |X| are examined (k=2
    asks whether the minimum and its runner-up share a neighborhood).
    Distances are circular.
    """
    if deepest is not None and deepest < 2:
        raise ValueError(f"deepest must be >= 2 when given, got {deepest}")
    processes = list(processes)
    if not processes:
        return 0.0
    scale = n ** (-eps)
    hits = 0
    for proc in processes:
        if len(proc) < 2:
            continue
        pos = proc.positions
        if deepest is not None and len(proc) > deepest:
            order = np.argsort(np.abs(proc.values), kind="stable")
            pos = pos[order[:deepest]]
        if _min_circular_gap(pos) <= scale:
            hits += 1
    return hits / len(processes)
