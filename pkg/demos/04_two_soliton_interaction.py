"""The two-soliton benchmark: overtaking collision with exact bookkeeping.

Integrates the benchmark with the projected RK4 scheme and prints a
drift table plus the peak trajectory: the taller, faster soliton catches
the shorter one near t=80, the two form a single connected hump, and
they separate with their height order exchanged.  Writes the run outputs
(CSV) to demos/out/two_soliton.

About half a minute of compute at the full benchmark resolution.
"""

from pathlib import Path

import numpy as np

from kdvflow.functionals import FunctionalKind
from kdvflow.harness import RunConfig, run
from kdvflow.integrators import Scheme, SolverSettings
from kdvflow.kdv import find_peaks, peak_overlap, two_soliton_problem
from kdvflow.spectral import GridField

SNAP_TIMES = (0.0, 60.0, 80.0, 120.0)

setup = two_soliton_problem(t_end=120.0)
config = RunConfig(
    problem=setup,
    scheme=Scheme.PROJECTED_RK,
    tableau="rk4",
    invariants=(FunctionalKind.MASS, FunctionalKind.MOMENTUM, FunctionalKind.ENERGY),
    settings=SolverSettings(fp_tol=1e-12),
    snapshots=SNAP_TIMES,
)

out = Path(__file__).parent / "out" / "two_soliton"
print(f"integrating t in [0, {setup.t_end:g}] at h={setup.h}, N={setup.N} ...")
report = run(config, out_dir=out)
print(f"done in {report.wall_time_s:.1f}s; outputs in {out}")

print("\nmax relative drift over the whole run:")
for name, value in report.max_rel_drift.items():
    print(f"  {name:8s} {value:.2e}")

print("\npeak trajectory from the snapshots (height-ranked):")
for t in SNAP_TIMES:
    data = np.loadtxt(out / f"snapshot_{t:g}.csv", delimiter=",", skiprows=1)
    g = GridField(setup.basis(), data[:, 1])
    ranked = sorted(find_peaks(g, 0.1), key=lambda ph: ph[1], reverse=True)
    desc = ", ".join(f"x={pos:+7.2f} h={height:.3f}" for pos, height in ranked)
    print(f"  t={t:6.1f}: {len(ranked)} peak(s): {desc}; "
          f"overlap {peak_overlap(g, 0.1):.3f}")

print("\nthe overlap measure rises towards 1 while the solitons ride the same")
print("hump and falls back once they separate; the height ranking at t=120")
print("is the reverse of t=0")
