"""Coefficient models and reproducible per-trial random streams.

Three coefficient families feed the pipeline:

``ComplexGaussian``
    Independent standard complex Gaussians (real and imaginary parts each
    N(0, 1/2), so E|c|^2 = 1).
``RealGaussian``
    Independent real N(0, 1) coefficients.
``CramerPerturbed``
    Real coefficients xi_j + delta * X_j with X_j standard Gaussian and
    xi_j drawn from a symmetric non-Gaussian base law rescaled to variance
    1 - delta^2, keeping the total variance exactly 1.  The base must have
    a characteristic function whose modulus stays bounded away from 1 at
    infinity; the two offered bases (symmetric uniform, Laplace) do, while
    lattice laws such as Rademacher do not and are deliberately absent.

Trial streams are Philox counter streams keyed directly by
(master_seed, trial_index): a pure function of the pair, independent of
draw order and worker placement, so any trial reproduces bit-identically
anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "InvalidModelError",
    "CoefficientModel",
    "RngSpec",
    "derive_trial_stream",
    "sample_coefficients",
]

_KINDS = ("ComplexGaussian", "RealGaussian", "CramerPerturbed")
_BASES = ("UniformSymmetric", "Laplace")


class InvalidModelError(ValueError):
    """Coefficient-model parameter outside its legal domain."""


@dataclass(frozen=True)
class CoefficientModel:
    """Which coefficient family to draw from.

    delta (Gaussian-component scale of the Cramer model) may be None,
    meaning "resolve to n**-0.5 when the degree is known"; base picks the
    non-Gaussian law.  Both fields are ignored by the Gaussian kinds.
    """

    kind: str = "ComplexGaussian"
    delta: float | None = None
    base: str = "UniformSymmetric"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidModelError(f"unknown coefficient model {self.kind!r}")
        if self.base not in _BASES:
            raise InvalidModelError(f"unknown Cramer base {self.base!r}")
        if self.delta is not None and not 0.0 < float(self.delta) < 1.0:
            raise InvalidModelError(
                f"Cramer delta must lie in (0, 1), got {self.delta}"
            )


@dataclass(frozen=True)
class RngSpec:
    """Address of one trial's random stream."""

    master_seed: int
    trial_index: int

    def __post_init__(self):
        if self.trial_index < 0:
            raise ValueError("trial_index must be non-negative")


def derive_trial_stream(spec: RngSpec) -> np.random.Generator:
    """Generator for one (master_seed, trial_index) pair.

    The Philox key is built from the pair itself, so the stream carries no
    hidden state: same pair, same bits, on any worker in any order.
    """
    key = np.array(
        [spec.master_seed % 2**64, spec.trial_index % 2**64],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def resolve_delta(model: CoefficientModel, n: int) -> float:
    """The effective Cramer delta for degree n (default n**-0.5)."""
    delta = model.delta if model.delta is not None else 1.0 / np.sqrt(n)
    if not 0.0 < delta < 1.0:
        raise InvalidModelError(
            f"Cramer delta must lie in (0, 1), got {delta} (n={n})"
        )
    return float(delta)


def sample_coefficients(
    model: CoefficientModel, n: int, stream: np.random.Generator
) -> np.ndarray:
    """Draw the 2n+1 coefficients, slot j+n holding index j = -n..n.

    Always returns complex128; the real-valued models have exactly zero
    imaginary part.  Per-coefficient variance is 1 under every model.
    """
    if n < 1:
        raise ValueError(f"degree must be >= 1, got {n}")
    m = 2 * n + 1
    if model.kind == "ComplexGaussian":
        parts = stream.standard_normal((2, m))
        return (parts[0] + 1j * parts[1]) / np.sqrt(2.0)
    if model.kind == "RealGaussian":
        return stream.standard_normal(m).astype(np.complex128)
    delta = resolve_delta(model, n)
    xi_var = 1.0 - delta * delta
    if model.base == "UniformSymmetric":
        half = np.sqrt(3.0 * xi_var)  # Var U(-a,a) = a^2/3
        xi = stream.uniform(-half, half, m)
    else:
        scale = np.sqrt(xi_var / 2.0)  # Var Laplace(b) = 2 b^2
        xi = stream.laplace(0.0, scale, m)
    return (xi + delta * stream.standard_normal(m)).astype(np.complex128)
