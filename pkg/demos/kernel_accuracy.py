"""Closed-form covariance kernel against brute-force sums.

The kernel and its first two derivatives have closed forms away from the
origin and series expansions near it.  This script prints the worst
disagreement with direct summation in normalized units (slopes scale with
sigma_n, curvatures with sigma_n^2), plus the values on both sides of the
branch seam at 1/(4n).
"""
import math

import numpy as np

from trigmin.poly import kernel, sigma_n

for n in (8, 64, 512):
    xs = np.linspace(-math.pi, math.pi, 4001)
    kv = kernel(n, xs)
    j = np.arange(-n, n + 1, dtype=float)
    phase = np.outer(xs, j)
    norm = 1.0 / (2 * n + 1)
    r = np.cos(phase).sum(axis=1) * norm
    r1 = -(np.sin(phase) * j).sum(axis=1) * norm
    r2 = -(np.cos(phase) * j * j).sum(axis=1) * norm
    s = sigma_n(n)
    e0 = np.max(np.abs(kv.r - r))
    e1 = np.max(np.abs(kv.r1 - r1)) / s
    e2 = np.max(np.abs(kv.r2 - r2)) / s**2
    print(f"n={n:4d}  |dr|={e0:.2e}  |dr1|/sigma={e1:.2e}  |dr2|/sigma^2={e2:.2e}")

print("\nbranch seam at x = 1/(4n), n=256:")
n = 256
seam = 1.0 / (4 * n)
for x in (seam * (1 - 1e-9), seam * (1 + 1e-9)):
    kv = kernel(n, x)
    print(f"  x={x:.12f}  r={kv.r:.15f}  r2={kv.r2:.6f}")

kv0 = kernel(n, 0.0)
print(f"\nat the origin: r={kv0.r}  r1={kv0.r1}  r2={kv0.r2:.4f}")
print(f"-sigma_n^2 =              {-sigma_n(n)**2:.4f}")
