"""Convergence orders of the three schemes.

Runs step-size sweeps against fine-step references.  On a pure
dispersion problem with mid-band initial modes the plain and projected
RK4 errors sit comfortably above roundoff and show textbook fourth
order; the conservative AVF step shows second order.  The projection
changes the error only at higher order, so projected and plain orders
coincide.
"""

import numpy as np

from kdvflow.functionals import KdvParams
from kdvflow.harness import RunConfig, convergence_study
from kdvflow.integrators import Scheme
from kdvflow.kdv import ProblemSetup

# energetic mid-band modes: visible time error, exactly representable state
coeffs = np.zeros(33)
coeffs[19:27] = 0.5
problem = ProblemSetup(
    params=KdvParams(alpha=0.0, nu=-1.0),
    l=40.0,
    N=16,
    h=0.1,
    t_end=2.0,
    initial=tuple(coeffs),
)

for scheme, label in (
    (Scheme.PLAIN_RK, "plain RK4"),
    (Scheme.PROJECTED_RK, "projected RK4"),
    (Scheme.AVF, "AVF"),
):
    rows = convergence_study(
        RunConfig(problem=problem, scheme=scheme),
        steps=[0.2, 0.1, 0.05, 0.025],
        reference_h=2e-3,
    )
    print(f"\n{label}:")
    print("       h        error     order")
    for h, err, order in rows:
        order_s = "   -  " if np.isnan(order) else f"{order:6.3f}"
        print(f"  {h:8.4f}  {err:.3e}  {order_s}")
