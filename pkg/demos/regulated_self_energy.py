"""Weight-function regularization of the one-loop self-energy.

The unregulated euclidean bubble converges in D=2 (to pi at zero momentum
with unit masses) but grows logarithmically with the cutoff in D=4.  A
thresholded-Gaussian weight over path lengths regulates it: the regulated
value is cutoff-stable, two independent evaluation routes agree, and the
spectral density satisfies the continuous Pauli-Villars cancellation
conditions.  As the threshold shrinks the divergence re-emerges as a clean
log(1/delta) growth.
"""

import numpy as np

from worldlineqm.geometry import FourVector
from worldlineqm.interaction import self_energy_unregulated
from worldlineqm.regularization import (
    RegulatorSpec,
    divergence_scan,
    pv_conditions,
    self_energy_regulated,
)

p2 = FourVector((0.0, 0.0))
p4 = FourVector((0.0, 0.0, 0.0, 0.0))

print("unregulated D=2 bubble at p=0 (exact value pi):")
res = self_energy_unregulated(p2, 1.0, 1.0, 2, np.inf)
print(f"  {res.value.real:.10f}   (pi = {np.pi:.10f})")

print("\nunregulated D=4 cutoff scan (increments -> 2 pi^2 ln 2 = "
      f"{2 * np.pi ** 2 * np.log(2):.4f}):")
prev = None
for cutoff in (100.0, 200.0, 400.0, 800.0):
    value = self_energy_unregulated(p4, 1.0, 1.0, 4, cutoff).value.real
    inc = "" if prev is None else f"   increment {value - prev:.4f}"
    print(f"  cutoff {cutoff:6.0f}: {value:.4f}{inc}")
    prev = value

spec = RegulatorSpec(10.0, 0.01, 1.0)
print(f"\nregulated D=4 (dlam={spec.correlation_length}, delta={spec.threshold}):")
for cutoff in (60.0, 120.0, 240.0):
    r = self_energy_regulated(p4, 1.0, 1.0, 4, spec, "lambda", cutoff=cutoff)
    print(f"  cutoff {cutoff:5.0f}: {r.value.real:.8f}")

lam = self_energy_regulated(p2, 1.0, 1.0, 2, spec, "lambda")
ms = self_energy_regulated(p2, 1.0, 1.0, 2, spec, "mass-spectrum")
print(f"\nD=2 dual routes: lambda {lam.value.real:.6f}, "
      f"mass-spectrum {ms.value.real:.6f}")

report = pv_conditions(spec)
print(f"cancellation conditions: F~(0) = {report.f_tilde_at_zero}, "
      f"F~'(0) = {report.f_tilde_slope_at_zero}, pass = {report.passed}")

print("\nthreshold scan, D=4 (log(1/delta) growth):")
scan = divergence_scan(p4, 1.0, 1.0, 4, [0.02 / 2 ** k for k in range(5)],
                       correlation_length=1e3)
for row in scan.rows:
    print(f"  delta {row.parameter:.5f}: {row.value.real:.4f}")
print(f"fitted slope {scan.slope:.4f} (R^2 = {scan.r_squared:.5f}); "
      "the D=2 scan instead converges")
