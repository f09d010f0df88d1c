"""Plot the CSV outputs of a run directory (optional extra; needs matplotlib).

Usage: python demos/plot_run.py <run-directory> [out.png]

Left panel: solution snapshots; right panel: relative invariant drifts
over time on a log scale.
"""

import sys
from pathlib import Path

import numpy as np

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit("matplotlib is not installed; install the 'plot' extra")


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__)
        return 2
    run_dir = Path(sys.argv[1])
    out_png = Path(sys.argv[2]) if len(sys.argv) > 2 else run_dir / "run.png"

    fig, (ax_u, ax_d) = plt.subplots(1, 2, figsize=(11, 4))

    for snap in sorted(run_dir.glob("snapshot_*.csv")):
        data = np.loadtxt(snap, delimiter=",", skiprows=1)
        label = snap.stem.replace("snapshot_", "t=")
        ax_u.plot(data[:, 0], data[:, 1], label=label, lw=1.0)
    ax_u.set_xlabel("x")
    ax_u.set_ylabel("u")
    ax_u.legend(fontsize=8)
    ax_u.set_title("snapshots")

    inv = np.genfromtxt(run_dir / "invariants.csv", delimiter=",", names=True)
    for name in ("rel_drift_mass", "rel_drift_momentum", "rel_drift_energy"):
        ax_d.semilogy(inv["t"], np.maximum(inv[name], 1e-18), label=name, lw=1.0)
    ax_d.set_xlabel("t")
    ax_d.legend(fontsize=8)
    ax_d.set_title("relative invariant drift")

    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    print(f"wrote {out_png}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
