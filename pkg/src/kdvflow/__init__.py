"""Invariant-preserving time integration for the KdV equation.

A small numpy library built around three pieces:

* an orthonormal trigonometric basis on [-l, l] with exact-degree
  quadrature and an implicitly applied skew differentiation operator
  (:mod:`kdvflow.spectral`);
* the mass, momentum and energy functionals of the KdV flow together
  with their variational derivatives and two-point discrete variational
  derivatives (:mod:`kdvflow.functionals`, :mod:`kdvflow.projection`);
* time steppers that preserve invariants: a conservative
  average-vector-field step and a projected Runge-Kutta step that keeps
  any selection of the three invariants constant to solver tolerance
  (:mod:`kdvflow.integrators`).

:mod:`kdvflow.kdv` supplies the two-soliton benchmark and soliton
diagnostics, and :mod:`kdvflow.harness` the config-driven run,
convergence-study and comparison drivers behind the ``kdvflow`` CLI.
"""

__version__ = "0.1.0"

from .spectral import (  # noqa: E402,F401
    BasisSpec,
    GridField,
    SpectralField,
    analyze,
    apply_derivative,
    basis_eval,
    inner_product,
    synthesize,
)
from .functionals import (  # noqa: F401
    FunctionalKind,
    KdvParams,
    dvd_avf,
    dvd_quotient,
    evaluate,
    variational_derivative,
)
from .projection import (  # noqa: F401
    ProjectionFrame,
    RankDeficiencyError,
    build_frame,
    project_tangent,
    project_via_gram,
)
from .integrators import (  # noqa: F401
    ButcherTableau,
    Scheme,
    SolverSettings,
    StepDiagnostics,
    StepFailureError,
    avf_step,
    integrate,
    kdv_rhs,
    projection_step,
    rk_step,
)
from .kdv import (  # noqa: F401
    ProblemSetup,
    TwoSolitonParams,
    find_peaks,
    initial_state,
    project_initial,
    two_soliton_initial,
    two_soliton_problem,
)
from .harness import (  # noqa: F401
    ConfigError,
    RunConfig,
    RunReport,
    StudyError,
    compare,
    convergence_study,
    load_config,
    parse_config,
    run,
)
