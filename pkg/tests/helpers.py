"""Shared oracles for the test suite.

Everything here is deliberately slow and simple: direct summation loops and
dense grid searches that the fast library code is checked against.
"""
import math

import numpy as np

from trigmin.coeffs import CoefficientModel, RngSpec, derive_trial_stream, sample_coefficients
from trigmin.poly import TrigPolynomial


def make_poly(n, seed, kind="ComplexGaussian", trial=0):
    model = CoefficientModel(kind=kind)
    stream = derive_trial_stream(RngSpec(seed, trial))
    return TrigPolynomial(n, sample_coefficients(model, n, stream))


def eval_loop(p, x, order=0):
    """Scalar evaluation as an explicit loop over coefficient indices."""
    total = 0.0 + 0.0j
    norm = math.sqrt(2 * p.n + 1)
    for j in range(-p.n, p.n + 1):
        c = p.coeffs[j + p.n] / norm
        if order:
            c = c * (1j * j) ** order
        total += c * complex(math.cos(j * x), math.sin(j * x))
    return total


def _golden(fn, lo, hi, tol=1e-13):
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = fn(d)
    return (a + b) / 2.0


def brute_force_min(p, points_per_degree=4096):
    """Global minimum of |P| by dense sampling plus local refinement.

    Returns (min_value, argmin). Costs O(points_per_degree * n^2) so keep n
    small; it exists only to cross-check the certified fast path.
    """
    grid = max(4096, points_per_degree * max(p.n, 1) // 16)
    xs = np.linspace(-math.pi, math.pi, grid, endpoint=False)
    j = np.arange(-p.n, p.n + 1)
    w = p.coeffs / math.sqrt(2 * p.n + 1)
    vals = np.abs(np.exp(1j * np.outer(xs, j)) @ w)
    h = 2 * math.pi / grid

    def absval(x):
        return abs(eval_loop(p, x))

    order = np.argsort(vals)
    best_v = float(vals[order[0]])
    best_x = float(xs[order[0]])
    for idx in order[:8]:
        x0 = float(xs[idx])
        xm = _golden(absval, x0 - h, x0 + h)
        vm = absval(xm)
        if vm < best_v:
            best_v, best_x = vm, xm
    return best_v, best_x


def reference_extract(Pvals, P1vals, net, th, n):
    """Candidate sets built one net point at a time via candidate_record."""
    from trigmin.extremal import candidate_record

    alphas, values, positions = [], [], []
    degenerate = 0
    for alpha in net.alphas:
        rec = candidate_record(Pvals, P1vals, net, th, n, int(alpha))
        if math.isnan(rec.t):
            degenerate += 1
        if rec.flagged:
            alphas.append(rec.alpha)
            values.append(rec.Z)
            positions.append(rec.x_alpha + rec.t)
    return (np.array(alphas, dtype=np.int64),
            np.array(values, dtype=np.float64),
            np.array(positions, dtype=np.float64),
            degenerate)
