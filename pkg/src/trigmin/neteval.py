"""Batch evaluation of P and P' on the equispaced net, the performance core.

The net is x_alpha = 2 pi alpha / N for alpha = -N/2 .. N/2 - 1, with N
roughly n^{2-eps}: dense enough that each interval of half-width pi/N
supports an accurate linear model of P.  Values on all N points at once
come from one length-N inverse DFT of the coefficient vector placed at
frequency slots (j mod N), which needs N > 2n for the slots to be
injective.

The direct per-point evaluator lives in :mod:`trigmin.poly`; a chunked
direct sweep over the whole net is provided here as the benchmark
baseline and as the exactness oracle's subject.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .poly import TrigPolynomial, evaluate

__all__ = [
    "NetParameterError",
    "Net",
    "build_net",
    "net_from_size",
    "evaluate_on_net",
    "direct_net_evaluation",
]


class NetParameterError(ValueError):
    """Net parameters violate the density or injectivity requirements."""


@dataclass(frozen=True)
class Net:
    """Equispaced evaluation grid on the circle.

    N is even, exceeds 2n (injective frequency slots) and meets the
    density floor 2*floor(n^{2-eps}/2).  half_width = pi/N is the
    interval half-width around each net point.
    """

    n: int
    eps: float
    N: int

    def __post_init__(self):
        if self.n < 1:
            raise NetParameterError(f"degree must be >= 1, got {self.n}")
        if not 0.0 < self.eps < 1.0:
            raise NetParameterError(f"eps must lie in (0, 1), got {self.eps}")
        if self.N % 2:
            raise NetParameterError(f"N must be even, got {self.N}")
        if self.N <= 2 * self.n:
            raise NetParameterError(
                f"net too coarse: N={self.N} <= 2n={2 * self.n}"
            )
        floor_even = 2 * int(self.n ** (2.0 - self.eps) / 2.0)
        if self.N < floor_even:
            raise NetParameterError(
                f"net too coarse: N={self.N} below density floor {floor_even}"
            )

    @property
    def half_width(self) -> float:
        return math.pi / self.N

    @cached_property
    def alphas(self) -> np.ndarray:
        return np.arange(-self.N // 2, self.N // 2)

    @cached_property
    def x(self) -> np.ndarray:
        """Net point angles, x[i] for alpha = i - N/2."""
        return 2.0 * np.pi * self.alphas / self.N

    def x_of(self, alpha) -> np.ndarray | float:
        """Angle of a net index (vectorized)."""
        return 2.0 * np.pi * np.asarray(alpha) / self.N


def build_net(n: int, eps: float, round_to_pow2: bool = True) -> Net:
    """Construct the net for degree n and density exponent eps.

    round_to_pow2 picks the smallest power of two >= n^{2-eps} (radix-2
    transform speed); otherwise N = 2*floor(n^{2-eps}/2), the literal
    asymptotic prescription.  Either way N must exceed 2n.
    """
    if n < 1:
        raise NetParameterError(f"degree must be >= 1, got {n}")
    if not 0.0 < eps < 1.0:
        raise NetParameterError(f"eps must lie in (0, 1), got {eps}")
    target = n ** (2.0 - eps)
    if target <= 2 * n:
        raise NetParameterError(
            f"net too coarse: n^(2-eps) = {target:.3f} <= 2n = {2 * n}"
        )
    if round_to_pow2:
        N = 1 << max(1, math.ceil(math.log2(target)))
    else:
        N = 2 * int(target / 2.0)
    return Net(n=n, eps=eps, N=N)


def net_from_size(n: int, N: int) -> Net:
    """Net with an explicitly chosen even size N > 2n.

    The density exponent is back-computed (largest eps consistent with N,
    nudged inside (0,1)); used by benchmarks and tests that pin N.
    """
    if n < 1:
        raise NetParameterError(f"degree must be >= 1, got {n}")
    if N % 2 or N <= 2 * n:
        raise NetParameterError(f"need even N > 2n, got N={N}, n={n}")
    if n == 1:
        eps = 0.5
    else:
        eps = 2.0 - math.log(N) / math.log(n) + 1e-12
        eps = min(max(eps, 1e-12), 1.0 - 1e-12)
    return Net(n=n, eps=eps, N=N)


def _fft_values(coeffs: np.ndarray, n: int, N: int, order: int) -> np.ndarray:
    """Inverse DFT (no 1/N factor) of the slotted coefficient spectrum,
    reindexed so entry i corresponds to net index alpha = i - N/2."""
    j = np.arange(-n, n + 1)
    w = coeffs / math.sqrt(2 * n + 1)
    if order:
        w = w * (1j * j) ** order
    spectrum = np.zeros(N, dtype=np.complex128)
    spectrum[j % N] = w
    out = np.fft.ifft(spectrum, norm="forward")
    return np.fft.fftshift(out)


def evaluate_on_net(p: TrigPolynomial, net: Net, order: int = 0) -> np.ndarray:
    """All net values of P (order 0) or P' (order 1) via one FFT.

    Entry i of the result is evaluate(p, net.x[i], order) for
    alpha = i - N/2, to rounding.
    """
    if order not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {order}")
    if net.N <= 2 * p.n:
        raise NetParameterError(
            f"slot collision: N={net.N} <= 2n={2 * p.n}"
        )
    return _fft_values(p.coeffs, p.n, net.N, order)


def direct_net_evaluation(
    p: TrigPolynomial, net: Net, order: int = 0, chunk: int = 4096
) -> np.ndarray:
    """Direct-summation sweep over the whole net (benchmark baseline).

    Chunked to keep the (points x coefficients) phase matrix small; the
    result matches evaluate_on_net to rounding and costs ~2nN flops
    against the transform's N log N.
    """
    out = np.empty(net.N, dtype=np.complex128)
    xs = net.x
    for lo in range(0, net.N, chunk):
        hi = min(lo + chunk, net.N)
        out[lo:hi] = evaluate(p, xs[lo:hi], order)
    return out
