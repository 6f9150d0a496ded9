"""Trigonometric polynomial objects, pointwise evaluation, and the
analytic covariance kernel.

The central object is

    P(x) = (2n+1)^{-1/2} * sum_{j=-n}^{n} c_j exp(i j x)

with complex coefficients c_j stored at slot j+n.  Under the unit-variance
coefficient models of :mod:`trigmin.coeffs`, P is a stationary Gaussian
field on the circle whose covariance E[P(0) conj(P(x))] is the normalized
Dirichlet kernel

    r(x) = sin((n+1/2) x) / ((2n+1) sin(x/2)),

extended by r(0) = 1.  The kernel, its first two derivatives, and
sigma = sqrt(n(n+1)/3) = sqrt(E|P'(x)|^2) drive the statistical
predictions tested elsewhere in the package.

Evaluation here is direct summation: O(n) per point, pairwise-accumulated.
It is the slow, trusted oracle against which the FFT batch evaluator in
:mod:`trigmin.neteval` is verified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "TrigPolynomial",
    "KernelValue",
    "evaluate",
    "evaluate_with_derivatives",
    "kernel",
    "sigma_n",
]


@dataclass(frozen=True)
class TrigPolynomial:
    """Degree n plus the 2n+1 complex coefficients, immutable.

    Parameters
    ----------
    n : int
        Degree, at least 1.
    coeffs : array_like
        Complex vector of length 2n+1; slot j+n holds the coefficient of
        exp(i j x).  The 1/sqrt(2n+1) normalization is applied at
        evaluation time, not stored.
    """

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"degree must be >= 1, got {self.n}")
        c = np.array(self.coeffs, dtype=np.complex128)
        if c.shape != (2 * self.n + 1,):
            raise ValueError(
                f"need {2 * self.n + 1} coefficients for degree {self.n}, "
                f"got shape {c.shape}"
            )
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)


@dataclass(frozen=True)
class KernelValue:
    """Covariance kernel r with derivatives r1, r2 at a point (or points).

    r is dimensionless; r1 scales like n and r2 like n^2, so comparisons
    are best made on r, r1/sigma_n, r2/sigma_n^2.
    """

    r: np.ndarray | float
    r1: np.ndarray | float
    r2: np.ndarray | float
    sigma_n: float


def sigma_n(n: int) -> float:
    """sqrt(n(n+1)/3), the standard deviation of P' at any fixed point."""
    if n < 1:
        raise ValueError(f"degree must be >= 1, got {n}")
    return math.sqrt(n * (n + 1) / 3.0)


def _phase_matrix(x: np.ndarray, n: int) -> np.ndarray:
    """exp(i j x) for j = -n..n, shape x.shape + (2n+1,).

    Powers are built by a cumulative product of the unit-modulus factor
    exp(ix) (degree-ascending recursion); negative frequencies are the
    conjugates since x is real.
    """
    w = np.exp(1j * x)
    steps = np.broadcast_to(w[..., None], w.shape + (n,))
    pos = np.cumprod(steps, axis=-1)
    ones = np.ones(w.shape + (1,), dtype=np.complex128)
    return np.concatenate([pos[..., ::-1].conj(), ones, pos], axis=-1)


def evaluate(p: TrigPolynomial, x, order: int = 0):
    """Evaluate P, P', or P'' at x by direct summation.

    Parameters
    ----------
    p : TrigPolynomial
    x : float or 1-D array of angles
    order : {0, 1, 2}
        Derivative order; coefficient j picks up the factor (i j)^order.

    Returns
    -------
    complex scalar for scalar x, complex array for array x.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order}")
    xs = np.asarray(x, dtype=np.float64)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    j = np.arange(-p.n, p.n + 1)
    w = p.coeffs / math.sqrt(2 * p.n + 1)
    if order:
        w = w * (1j * j) ** order
    vals = np.sum(_phase_matrix(xs, p.n) * w, axis=-1)
    return vals[0] if scalar else vals


def evaluate_with_derivatives(p: TrigPolynomial, x):
    """(P, P', P'') at x sharing one phase computation.

    Used by the Newton refinement loop, where all three orders are needed
    at the same points each iteration.
    """
    xs = np.asarray(x, dtype=np.float64)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    j = np.arange(-p.n, p.n + 1)
    base = p.coeffs / math.sqrt(2 * p.n + 1)
    ph = _phase_matrix(xs, p.n)
    ij = 1j * j
    v0 = np.sum(ph * base, axis=-1)
    v1 = np.sum(ph * (base * ij), axis=-1)
    v2 = np.sum(ph * (base * ij * ij), axis=-1)
    if scalar:
        return v0[0], v1[0], v2[0]
    return v0, v1, v2


# ---------------------------------------------------------------------------
# covariance kernel
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _even_moments(n: int) -> tuple[float, ...]:
    """M_{2k} = sum_{j=-n..n} j^{2k} / (2n+1) for k = 1..5, exactly.

    Computed in integer arithmetic before the single final division;
    M_2 equals n(n+1)/3 = sigma_n^2.
    """
    total = 2 * n + 1
    out = []
    for k in range(1, 6):
        s = 2 * sum(j ** (2 * k) for j in range(1, n + 1))
        out.append(s / total)
    return tuple(out)


def _kernel_series(n: int, x: np.ndarray):
    """Small-|x| Taylor branch of (r, r1, r2).

    Exact moment coefficients are used rather than their large-n limits;
    truncation after x^10 leaves an error below 1e-13 for |x| <= 1/(4n),
    which is what the seam-agreement requirement needs.
    """
    m2, m4, m6, m8, m10 = _even_moments(n)
    # r = sum_k (-1)^k M_{2k} x^{2k} / (2k)!
    c = (1.0, -m2 / 2.0, m4 / 24.0, -m6 / 720.0, m8 / 40320.0,
         -m10 / 3628800.0)
    u = x * x
    r = c[0] + u * (c[1] + u * (c[2] + u * (c[3] + u * (c[4] + u * c[5]))))
    r1 = x * (2 * c[1] + u * (4 * c[2] + u * (6 * c[3]
              + u * (8 * c[4] + u * 10 * c[5]))))
    r2 = (2 * c[1] + u * (12 * c[2] + u * (30 * c[3]
          + u * (56 * c[4] + u * 90 * c[5]))))
    return r, r1, r2


def _kernel_closed(n: int, x: np.ndarray):
    """Closed-form branch of (r, r1, r2), valid away from x = 0 mod 2pi.

    r2 is evaluated through the recurrences

        r1 = (cos(mx) - cos(x/2) r) / (2 sin(x/2)),          m = n + 1/2
        r2 = (sin(x/2) r / 2 - 2 cos(x/2) r1 - m sin(mx)) / (2 sin(x/2)),

    which are algebraic rearrangements of the direct second derivative.
    The textbook single-fraction form for r2 cancels catastrophically near
    the series seam; this form loses no accuracy there.
    """
    m = n + 0.5
    s = np.sin(0.5 * x)
    cc = np.cos(0.5 * x)
    um = np.sin(m * x)
    vm = np.cos(m * x)
    r = um / ((2 * n + 1) * s)
    r1 = (vm - cc * r) / (2.0 * s)
    r2 = (0.5 * s * r - 2.0 * cc * r1 - m * um) / (2.0 * s)
    return r, r1, r2


def _wrap(x: np.ndarray) -> np.ndarray:
    """Reduce angles to [-pi, pi]."""
    return x - 2.0 * np.pi * np.round(x / (2.0 * np.pi))


def kernel(n: int, x) -> KernelValue:
    """Covariance kernel r and derivatives r1, r2 at x.

    Accepts a scalar or array x.  For |x| < 1/(4n) (after reduction mod
    2pi) the Taylor branch is used; otherwise the closed forms.  The two
    branches agree at the switch point to well below 1e-9 in the
    normalized quantities (r, r1/sigma, r2/sigma^2).
    """
    if n < 1:
        raise ValueError(f"degree must be >= 1, got {n}")
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    scalar = np.asarray(x).ndim == 0
    xw = _wrap(xs)
    small = np.abs(xw) < 1.0 / (4.0 * n)
    r = np.empty_like(xw)
    r1 = np.empty_like(xw)
    r2 = np.empty_like(xw)
    if np.any(small):
        a, b, c = _kernel_series(n, xw[small])
        r[small], r1[small], r2[small] = a, b, c
    big = ~small
    if np.any(big):
        a, b, c = _kernel_closed(n, xw[big])
        r[big], r1[big], r2[big] = a, b, c
    if scalar:
        return KernelValue(float(r[0]), float(r1[0]), float(r2[0]), sigma_n(n))
    return KernelValue(r, r1, r2, sigma_n(n))
