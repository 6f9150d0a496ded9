"""Real-coefficient polynomials: correlation identities, exclusion zones, pipeline.

With real coefficients the polynomial T(x) = (2n+1)^{-1/2} sum_j xi_j e^{ijx}
is no longer stationary: Re T and Im T have position-dependent covariances,
Im T vanishes at x = 0 and x = pi, and T(-x) = conj(T(x)) exactly.  This
module provides the covariance closed forms, a scan of the two non-stationary
zones around 0 and pi, and a Monte Carlo pipeline that reuses the net
evaluation, global minimization, and candidate extraction machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .coeffs import CoefficientModel, RngSpec, derive_trial_stream, sample_coefficients
from .extremal import (
    EventThresholds,
    GlobalMinResult,
    NearMinimaProcess,
    extract_process,
    global_min,
)
from .neteval import build_net, evaluate_on_net
from .poly import TrigPolynomial, evaluate, kernel
from .stats import EXP_RATE, KsResult, ks_exponential

# Zone exponent default.  Calibrated: the zone-minimum tail is dominated by
# the real Gaussian value at the zone center, and wider zones sweep in
# near-stationary deep minima at a rate that grows with the width.
DEFAULT_EPS_ZONE = 0.05

# Start of the range where Re T and Im T both carry variance 1/2 to within
# a couple of percent at desk-scale degrees; the covariance deviation is
# |r(2x)|/2 <= 1/(2(2n+1)sin x), which stays below 0.02 for x >= n^{-1/2}.
STATIONARY_EXPONENT = 0.5


def limit_rate(model: CoefficientModel) -> float:
    """Exponential rate of the scaled minimum for the given coefficient model.

    Real coefficients force T(-x) = conj(T(x)), so |T| is even, the minimum
    is effectively taken over half the circle, and the rate is half the
    complex-coefficient rate.
    """
    if model.kind == "ComplexGaussian":
        return EXP_RATE
    return EXP_RATE / 2.0


@dataclass(frozen=True)
class RealCaseConfig:
    """Degree and zone exponent for the real-coefficient pipeline."""

    n: int
    eps_zone: float = DEFAULT_EPS_ZONE

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"degree must be >= 1, got {self.n}")
        if not 0.0 < self.eps_zone < 1.0:
            raise ValueError(
                f"eps_zone must lie in (0, 1), got {self.eps_zone}"
            )

    @property
    def zone_half_width(self) -> float:
        """Half width n^(-1+eps_zone) of the zones around 0 and pi."""
        return float(self.n) ** (-1.0 + self.eps_zone)


def real_correlations(n: int, x, y):
    """Covariances (ERR, EII, ERI) of (Re T(x), Im T(y)) for real draws.

    ERR = (r(x-y) + r(x+y)) / 2, EII = (r(x-y) - r(x+y)) / 2, and the
    cross term is identically zero.  Accepts scalars or arrays.
    """
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    rm = kernel(n, xa - ya).r
    rp = kernel(n, xa + ya).r
    err = (rm + rp) / 2.0
    eii = (rm - rp) / 2.0
    if np.ndim(err) == 0:
        return float(err), float(eii), 0.0
    return np.asarray(err), np.asarray(eii), np.zeros(np.shape(err))


@dataclass(frozen=True)
class ZoneMinima:
    """Minimum of |T| over the zone around 0 and the zone around pi."""

    zero: float
    pi: float

    @property
    def overall(self) -> float:
        return min(self.zero, self.pi)


def _golden_section(
    fn: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12
) -> tuple[float, float]:
    """Minimize a unimodal scalar function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = fn(c)
    fd = fn(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


def _zone_scan(
    p: TrigPolynomial, center: float, half_width: float, points: int, mirror: bool
) -> float:
    # For real coefficients |T| is even about 0 and about pi, so scanning
    # the non-negative offsets suffices.
    if mirror:
        offsets = np.linspace(0.0, half_width, max(2, (points + 1) // 2))
    else:
        offsets = np.linspace(-half_width, half_width, max(3, points))
    grid = center + offsets
    vals = np.abs(evaluate(p, grid))
    k = int(np.argmin(vals))
    lo = float(grid[max(k - 1, 0)])
    hi = float(grid[min(k + 1, len(grid) - 1)])
    x, fx = _golden_section(lambda t: float(np.abs(evaluate(p, t))), lo, hi)
    return float(min(fx, float(vals[k])))


def exclusion_zone_min(
    p: TrigPolynomial, eps_zone: float = DEFAULT_EPS_ZONE
) -> ZoneMinima:
    """Minimum of |T| over each non-stationary zone.

    Each zone {|x - c| <= n^(-1+eps_zone)}, c in {0, pi}, is scanned on a
    grid of max(1024, 64 * n^eps_zone) points and the best bracket is
    refined by golden-section search.
    """
    if not 0.0 < eps_zone < 1.0:
        raise ValueError(f"eps_zone must lie in (0, 1), got {eps_zone}")
    n = p.n
    half_width = float(n) ** (-1.0 + eps_zone)
    points = max(1024, int(64 * float(n) ** eps_zone))
    mirror = bool(np.all(p.coeffs.imag == 0.0))
    zero = _zone_scan(p, 0.0, half_width, points, mirror)
    around_pi = _zone_scan(p, math.pi, half_width, points, mirror)
    return ZoneMinima(zero=zero, pi=around_pi)


def restrict_to_stationary(
    proc: NearMinimaProcess, eps_zone: float
) -> NearMinimaProcess:
    """Drop candidates whose angle lies inside either non-stationary zone.

    Removes exactly the points with |x| < n^(-1+eps_zone) or circular
    distance to pi below the same bound; everything else is kept unchanged.
    """
    half_width = float(proc.n) ** (-1.0 + eps_zone)
    dist_zero = np.abs(proc.positions)
    dist_pi = math.pi - dist_zero
    keep = (dist_zero >= half_width) & (dist_pi >= half_width)
    return NearMinimaProcess(
        alphas=proc.alphas[keep],
        values=proc.values[keep],
        positions=proc.positions[keep],
        n=proc.n,
        N=proc.N,
        degenerate_count=proc.degenerate_count,
    )


@dataclass(frozen=True)
class RealCaseReport:
    """Per-trial outputs of the real-coefficient pipeline."""

    config: RealCaseConfig
    model: CoefficientModel
    M: int
    samples: np.ndarray
    minima: tuple[GlobalMinResult, ...]
    processes: tuple[NearMinimaProcess, ...]
    zone_minima: Optional[tuple[ZoneMinima, ...]]

    @property
    def reference_rate(self) -> float:
        return limit_rate(self.model)

    def ks(self, rate: Optional[float] = None) -> KsResult:
        """KS statistic of the scaled minima against their exponential law."""
        return ks_exponential(
            self.samples, rate=self.reference_rate if rate is None else rate
        )

    def zone_fraction(self, threshold: Optional[float] = None) -> float:
        """Fraction of trials whose zone minimum falls at or below threshold.

        Default threshold is log(n)/n.
        """
        if self.zone_minima is None:
            raise ValueError("pipeline ran without zone scanning")
        thr = (
            math.log(self.config.n) / self.config.n
            if threshold is None
            else threshold
        )
        hits = sum(1 for z in self.zone_minima if z.overall <= thr)
        return hits / len(self.zone_minima)

    def mean_count(self, a: float, b: float) -> float:
        """Mean number of restricted candidates with X in [a, b)."""
        if not self.processes:
            return 0.0
        return float(np.mean([proc.count_in(a, b) for proc in self.processes]))


def realcase_pipeline(
    config: RealCaseConfig,
    thresholds: Optional[EventThresholds] = None,
    M: int = 1000,
    *,
    model: Optional[CoefficientModel] = None,
    eps_net: float = 0.01,
    round_to_pow2: bool = True,
    master_seed: int = 0,
    scan_zones: bool = True,
) -> RealCaseReport:
    """Monte Carlo pipeline for real-coefficient minima.

    Per trial: sample coefficients (RealGaussian unless a model is given),
    evaluate on the net, take the global minimum over the FULL circle (the
    zones are excluded from candidate extraction, not from the minimum),
    restrict the candidate process to the stationary range, and optionally
    scan the two zones.  Complex-Gaussian input runs the same code path and
    reproduces the complex-case statistics.
    """
    if config.n < 64:
        raise ValueError(
            f"real-case pipeline requires degree >= 64, got {config.n}"
        )
    if M < 1:
        raise ValueError(f"trial count must be >= 1, got {M}")
    if model is None:
        model = CoefficientModel(kind="RealGaussian")
    if thresholds is None:
        thresholds = EventThresholds.for_degree(config.n)
    net = build_net(config.n, eps_net, round_to_pow2=round_to_pow2)

    samples = np.empty(M, dtype=np.float64)
    minima: list[GlobalMinResult] = []
    processes: list[NearMinimaProcess] = []
    zones: list[ZoneMinima] = []
    for trial in range(M):
        stream = derive_trial_stream(RngSpec(master_seed, trial))
        p = TrigPolynomial(config.n, sample_coefficients(model, config.n, stream))
        values = evaluate_on_net(p, net, order=0)
        slopes = evaluate_on_net(p, net, order=1)
        result = global_min(p, values, slopes, net)
        samples[trial] = config.n * result.m
        minima.append(result)
        proc = extract_process(values, slopes, net, thresholds, config.n)
        processes.append(restrict_to_stationary(proc, config.eps_zone))
        if scan_zones:
            zones.append(exclusion_zone_min(p, config.eps_zone))

    return RealCaseReport(
        config=config,
        model=model,
        M=M,
        samples=samples,
        minima=tuple(minima),
        processes=tuple(processes),
        zone_minima=tuple(zones) if scan_zones else None,
    )
