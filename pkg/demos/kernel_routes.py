"""Three routes to the same fixed-length kernel.

The transition amplitude over intrinsic length T has a closed Gaussian form,
an exact discretized-path collapse (independent of the number of segments
and their spacing), and a euclidean Monte Carlo estimator over pinned bridge
paths.  This script evaluates all three at one point and shows the collapse
N-independence and the Monte Carlo error scaling.
"""

import numpy as np

from worldlineqm import FourVector, KernelParams, kernel_closed, kernel_discretized, kernel_mc

params = KernelParams(mass=1.0, total_length=1.0, dimension=2, mode="euclidean")
x0 = FourVector((0.0, 0.0))
x = FourVector((0.6, -0.3))

closed = kernel_closed(x - x0, params)
print(f"closed form             K = {closed.real:.12f}")

print("\ndiscretized collapse (equal and random segment spacings):")
rng = np.random.default_rng(1)
for n in (1, 2, 4, 8, 16):
    uniform = kernel_discretized(x, x0, np.full(n, 1.0 / n), params)
    seg = rng.uniform(0.05, 1.0, size=n)
    seg /= seg.sum()
    ragged = kernel_discretized(x, x0, seg, params)
    print(f"  N={n:2d}  uniform rel err {abs(uniform-closed)/abs(closed):.2e}"
          f"   random rel err {abs(ragged-closed)/abs(closed):.2e}")

print("\nMonte Carlo over pinned bridges (mass factor by thinning):")
for samples in (10_000, 40_000, 160_000):
    res = kernel_mc(x, x0, params, n_segments=8, samples=samples, seed=5)
    pull = abs(res.estimate - closed) / res.stderr
    print(f"  {samples:7d} samples: {res.estimate.real:.6f} +- {res.stderr:.2e}"
          f"   pull {pull:.2f} sigma")

print("\nmassless bridge normalization is exact (zero variance):")
light = KernelParams(mass=1e-300, total_length=1.0, dimension=2, mode="euclidean")
res = kernel_mc(x, x0, light, n_segments=8, samples=2000, seed=1)
print(f"  estimate {res.estimate.real:.12f}, stderr {res.stderr}")
