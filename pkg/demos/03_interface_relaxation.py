"""Time evolution of the interface: relaxation and fingering.

Integrates the nonlocal evolution in both regimes and compares the
measured exponential rates against the flat-state eigenvalues.
Run directly: python demos/03_interface_relaxation.py
"""

import numpy as np

from stokes2p import (
    EvolutionState,
    InterfaceProfile,
    PeriodicGrid,
    PhysParams,
    StepperConfig,
    decay_rate_fit,
    integrate,
)

grid = PeriodicGrid(64)

print("=" * 70)
print("1. Stable regime: a small bump relaxes exponentially")
print("=" * 70)
params = PhysParams.from_theta(mu=1.0, sigma=1.0, theta=0.0)
state = EvolutionState(0.0, InterfaceProfile(grid, 1e-4 * np.cos(grid.nodes)), params)
records = []
integrate(state, StepperConfig(scheme="imex-euler", dt=0.02, t_end=8.0),
          sink=records.append)
print(f"   {'t':>6} {'amplitude':>12}")
for rec in records[::80]:
    print(f"   {rec['t']:>6.2f} {rec['linf']:>12.4e}")
fit = decay_rate_fit(records)
print(f"   fitted decay rate {fit.rate:.5f}  (mode-1 eigenvalue magnitude: 0.25)")

print()
print("=" * 70)
print("2. Mean and vertical shifts are conserved")
print("=" * 70)
f0 = InterfaceProfile(grid, 0.02 * np.cos(grid.nodes) + 0.3)
state = EvolutionState(0.0, f0, params)
final = integrate(state, StepperConfig(scheme="imex-euler", dt=0.02, t_end=4.0))
print(f"   initial mean {f0.mean:.12f}")
print(f"   final   mean {final.profile.mean:.12f} after {final.step_count} steps")

print()
print("=" * 70)
print("3. Unstable regime: heavy fluid on top, the bump grows")
print("=" * 70)
params = PhysParams.from_theta(mu=1.0, sigma=1.0, theta=-2.0)
print(f"   sigma + theta = {params.sigma + params.theta:g} < 0 -> {params.regime}")
state = EvolutionState(0.0, InterfaceProfile(grid, 1e-8 * np.cos(grid.nodes)), params)
records = []
integrate(state, StepperConfig(scheme="imex-euler", dt=0.02, t_end=40.0,
                               blowup_factor=1e6),
          sink=records.append)
print(f"   {'t':>6} {'amplitude':>12}")
for rec in records[::400]:
    print(f"   {rec['t']:>6.2f} {rec['linf']:>12.4e}")
fit = decay_rate_fit(records, kind=("mode", 1), amp_window=(1e-7, 1e-3))
print(f"   fitted growth rate {-fit.rate:.5f}  (mode-1 eigenvalue: +0.25)")
print("   only mode 1 is unstable here; higher modes are damped by tension")

print()
print("=" * 70)
print("4. Scheme cross-check: implicit-explicit Euler vs explicit RK4")
print("=" * 70)
params = PhysParams.from_theta(mu=1.0, sigma=1.0, theta=0.5)
f0 = InterfaceProfile(grid, 0.05 * np.cos(grid.nodes) + 0.02 * np.sin(2 * grid.nodes))
for dt in (0.02, 0.01):
    a = integrate(EvolutionState(0.0, f0, params),
                  StepperConfig(scheme="imex-euler", dt=dt, t_end=0.5))
    b = integrate(EvolutionState(0.0, f0, params),
                  StepperConfig(scheme="rk4-explicit", dt=dt, t_end=0.5))
    diff = np.max(np.abs(a.profile.values - b.profile.values))
    print(f"   dt={dt:g}: max difference {diff:.3e} (halves with dt: first-order scheme)")
