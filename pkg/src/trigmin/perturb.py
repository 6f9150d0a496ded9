"""Resampling-invariance experiment.

A fresh independent copy Q of the polynomial is blended in as
Phat = sqrt(1 - 1/n^2) P + Q/n, which leaves the law of the coefficients
(hence of the whole process) unchanged while displacing each near-minimum
value by an approximately independent N(0, 1/2) amount.  This module
builds the coupled pair, matches the two extracted processes point by
point, and reduces the matches to the law-invariance and shift-law
statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .coeffs import CoefficientModel, sample_coefficients
from .extremal import EventThresholds, NearMinimaProcess, extract_process
from .neteval import Net, evaluate_on_net
from .poly import TrigPolynomial, evaluate

__all__ = [
    "DEFAULT_WINDOW",
    "DEFAULT_MATCH_RADIUS",
    "MatchedPoint",
    "PerturbTrial",
    "InvarianceReport",
    "perturb_polynomial",
    "build_perturb_trial",
    "match_and_shift",
    "invariance_report",
]

DEFAULT_WINDOW = 3.0
# The coupling moves a predicted minimizer by ~0.5 net spacings rms, so
# the same minimum may re-flag one or two intervals over; exact-index
# matching would drop ~19% of points at n=256.
DEFAULT_MATCH_RADIUS = 2


@dataclass(frozen=True)
class MatchedPoint:
    """One near-minimum tracked through the perturbation."""

    alpha: int
    alpha_hat: int
    X: float
    Xhat: float
    shift: float
    predictor: float
    residual: float


@dataclass(frozen=True)
class PerturbTrial:
    """Coupled pair (P, Phat) with both extracted processes.

    matches pairs points of the two processes; unmatched_small counts
    points with |X| <= window that found no partner with |Xhat| <= twice
    the window nearby.
    """

    P: TrigPolynomial
    Q: TrigPolynomial
    Phat: TrigPolynomial
    procP: NearMinimaProcess
    procPhat: NearMinimaProcess
    matches: tuple[MatchedPoint, ...] = ()
    unmatched_small: int = 0
    window: float = DEFAULT_WINDOW


@dataclass(frozen=True)
class InvarianceReport:
    """Pooled statistics over many perturbation trials."""

    law_ks: float
    shift_mean: float
    shift_var: float
    shift_ks_gauss: float
    unmatched_frac: float
    residual_max_scaled: float
    n_matches: int
    n_small: int
    M: int


def perturb_polynomial(P: TrigPolynomial, Q: TrigPolynomial) -> TrigPolynomial:
    """Blend an independent copy into P without changing its law.

    Coefficientwise sqrt(1 - 1/n^2) P + (1/n) Q; the weights satisfy
    (1 - 1/n^2) + 1/n^2 = 1 so per-coefficient variance is preserved.
    """
    if P.n != Q.n:
        raise ValueError(f"degree mismatch: {P.n} vs {Q.n}")
    n = P.n
    if n < 2:
        raise ValueError("perturbation degenerates at n=1 (weight 0); need n >= 2")
    w = math.sqrt(1.0 - 1.0 / n**2)
    return TrigPolynomial(n, w * P.coeffs + Q.coeffs / n)


def build_perturb_trial(
    n: int,
    net: Net,
    thresholds: EventThresholds,
    rng: np.random.Generator,
    model: CoefficientModel | None = None,
    window: float = DEFAULT_WINDOW,
    match_radius: int = DEFAULT_MATCH_RADIUS,
) -> PerturbTrial:
    """Sample the coupled pair, extract both processes, and match.

    P then Q are drawn consecutively from the given stream, so one
    stream per trial keeps the whole experiment reproducible.
    """
    if model is None:
        model = CoefficientModel()
    pc = sample_coefficients(model, n, rng)
    qc = sample_coefficients(model, n, rng)
    P = TrigPolynomial(n, pc)
    Q = TrigPolynomial(n, qc)
    Phat = perturb_polynomial(P, Q)
    procP = extract_process(
        evaluate_on_net(P, net, 0), evaluate_on_net(P, net, 1), net, thresholds, n
    )
    procPhat = extract_process(
        evaluate_on_net(Phat, net, 0),
        evaluate_on_net(Phat, net, 1),
        net,
        thresholds,
        n,
    )
    trial = PerturbTrial(
        P=P, Q=Q, Phat=Phat, procP=procP, procPhat=procPhat, window=window
    )
    matches = match_and_shift(trial, window, match_radius)
    n_small = int(np.count_nonzero(np.abs(procP.values) <= window))
    return PerturbTrial(
        P=P,
        Q=Q,
        Phat=Phat,
        procP=procP,
        procPhat=procPhat,
        matches=tuple(matches),
        unmatched_small=n_small - len(matches),
        window=window,
    )


def match_and_shift(
    trial: PerturbTrial,
    K: float = DEFAULT_WINDOW,
    match_radius: int = DEFAULT_MATCH_RADIUS,
) -> list[MatchedPoint]:
    """Pair each |X| <= K point of procP with the nearest-index point of
    procPhat within match_radius net steps and |Xhat| <= 2K.

    Each match carries the observed shift Xhat - X, the analytic
    predictor G = Im(Q(x_alpha) conj(P'(x_alpha)))/|P'(x_alpha)|, and
    the residual shift - G.
    """
    if match_radius < 0:
        raise ValueError(f"match_radius must be >= 0, got {match_radius}")
    procP, procH = trial.procP, trial.procPhat
    hat = dict(zip(procH.alphas.tolist(), procH.values.tolist()))
    small = np.abs(procP.values) <= K
    alphas = procP.alphas[small]
    values = procP.values[small]
    if alphas.size == 0:
        return []
    x_a = 2.0 * math.pi * alphas / procP.N
    Qx = np.atleast_1d(evaluate(trial.Q, x_a))
    B = np.atleast_1d(evaluate(trial.P, x_a, 1))
    G = (Qx * np.conj(B)).imag / np.abs(B)
    offsets = sorted(range(-match_radius, match_radius + 1), key=abs)
    out: list[MatchedPoint] = []
    for k in range(alphas.size):
        a = int(alphas[k])
        X = float(values[k])
        for da in offsets:
            Xhat = hat.get(a + da)
            if Xhat is not None and abs(Xhat) <= 2.0 * K:
                shift = Xhat - X
                out.append(
                    MatchedPoint(
                        alpha=a,
                        alpha_hat=a + da,
                        X=X,
                        Xhat=float(Xhat),
                        shift=shift,
                        predictor=float(G[k]),
                        residual=shift - float(G[k]),
                    )
                )
                break
    return out


def _ks_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    """Exact sup gap between two empirical CDFs."""
    a = np.sort(a)
    b = np.sort(b)
    grid = np.concatenate([a, b])
    Fa = np.searchsorted(a, grid, side="right") / a.size
    Fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(Fa - Fb).max())


def _ks_gaussian_half(shifts: np.ndarray) -> float:
    """Exact KS statistic of the shifts against N(0, 1/2)."""
    s = np.sort(shifts)
    M = s.size
    # variance 1/2 makes the CDF (1 + erf(x))/2
    F = 0.5 * (1.0 + np.vectorize(math.erf)(s))
    k = np.arange(1, M + 1)
    return float(max((k / M - F).max(), (F - (k - 1) / M).max()))


def invariance_report(
    trials: Sequence[PerturbTrial],
    K: float = DEFAULT_WINDOW,
    match_radius: int = DEFAULT_MATCH_RADIUS,
) -> InvarianceReport:
    """Reduce perturbation trials to the invariance test statistics.

    law_ks compares the pooled X and Xhat values inside [-K, K] (equal
    in law if the perturbation preserves the process); the shift block
    tests the matched displacements against N(0, 1/2).
    """
    trials = list(trials)
    if len(trials) < 100:
        raise ValueError(f"need at least 100 trials, got {len(trials)}")
    pooled_X: list[np.ndarray] = []
    pooled_Xhat: list[np.ndarray] = []
    shifts: list[float] = []
    residuals: list[float] = []
    n_small = 0
    n_unmatched = 0
    n = trials[0].P.n
    for trial in trials:
        v = trial.procP.values
        vh = trial.procPhat.values
        pooled_X.append(v[np.abs(v) <= K])
        pooled_Xhat.append(vh[np.abs(vh) <= K])
        if trial.matches and trial.window == K:
            matches = trial.matches
            small = int(np.count_nonzero(np.abs(v) <= K))
            unmatched = trial.unmatched_small
        else:
            matches = match_and_shift(trial, K, match_radius)
            small = int(np.count_nonzero(np.abs(v) <= K))
            unmatched = small - len(matches)
        n_small += small
        n_unmatched += unmatched
        for mp in matches:
            shifts.append(mp.shift)
            residuals.append(mp.residual)
    if not shifts:
        raise ValueError("no matched points in any trial")
    X = np.concatenate(pooled_X)
    Xhat = np.concatenate(pooled_Xhat)
    sh = np.array(shifts)
    return InvarianceReport(
        law_ks=_ks_two_sample(X, Xhat),
        shift_mean=float(sh.mean()),
        shift_var=float(sh.var(ddof=1)),
        shift_ks_gauss=_ks_gaussian_half(sh),
        unmatched_frac=n_unmatched / n_small if n_small else 0.0,
        residual_max_scaled=float(np.abs(residuals).max()) * math.sqrt(n),
        n_matches=len(shifts),
        n_small=n_small,
        M=len(trials),
    )
