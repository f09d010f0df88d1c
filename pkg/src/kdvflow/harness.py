"""Simulation driver: configuration, runs, convergence studies, comparisons.

Configuration files are plain text ``key = value`` lines with dotted
sections, for example::

    problem.alpha = -1
    problem.nu = -1
    problem.l = 40
    problem.N = 64
    problem.h = 0.005
    problem.t_end = 10
    problem.k1 = 0.4
    problem.k2 = 0.6
    problem.x1 = 4
    problem.x2 = 15
    scheme = projected-rk
    tableau = rk4
    invariants = mass, momentum, energy
    solver.fp_tol = 1e-12
    solver.fp_max_iters = 100
    snapshots = 0, 10

Output files use decimal scientific notation with 17 significant digits
so binary64 values round-trip exactly, contain no timestamps, and have a
fixed column schema:

* ``invariants.csv``: t, mass, momentum, energy, rel_drift_mass,
  rel_drift_momentum, rel_drift_energy, fp_iters, rank.  Relative drift
  is |H(t) - H(0)| / (1 + |H(0)|).
* ``snapshot_<t>.csv``: x, u on the 8N-node plotting grid, taken at the
  step nearest to the requested time.
* ``convergence.csv``: h, error, order (order blank on the first row).
* ``comparison.csv``: t followed by the three drift columns per run.
* ``report.txt``: human-readable summary (may include wall time).
* ``config.resolved``: the exact resolved configuration echo.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .functionals import FunctionalKind, KdvParams
from .integrators import (
    Scheme,
    SolverSettings,
    StepDiagnostics,
    TABLEAUX,
    integrate,
)
from .kdv import (
    ProblemSetup,
    TwoSolitonParams,
    initial_state,
    two_soliton_initial,
)
from .spectral import SpectralField, synthesize

__all__ = [
    "ConfigError",
    "StudyError",
    "RunConfig",
    "RunReport",
    "parse_config",
    "load_config",
    "config_echo",
    "run",
    "convergence_study",
    "compare",
]

log = logging.getLogger(__name__)

FMT = "%.16e"  # 17 significant digits: exact binary64 round-trip


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


class StudyError(RuntimeError):
    """A convergence study member run failed."""

    def __init__(self, message: str, failing_h: float):
        super().__init__(message)
        self.failing_h = failing_h


@dataclass(frozen=True)
class RunConfig:
    problem: ProblemSetup
    scheme: Scheme
    tableau: str = "rk4"
    invariants: tuple[FunctionalKind, ...] = (
        FunctionalKind.MASS,
        FunctionalKind.MOMENTUM,
        FunctionalKind.ENERGY,
    )
    settings: SolverSettings = SolverSettings()
    snapshots: tuple[float, ...] = ()
    out_dir: str | None = None


@dataclass(frozen=True)
class RunReport:
    config: RunConfig
    series: tuple[StepDiagnostics, ...]
    final_state: SpectralField
    max_rel_drift: dict
    total_fp_iterations: int
    wall_time_s: float
    version: str = __version__


_PROBLEM_KEYS = {
    "problem.alpha", "problem.nu", "problem.l", "problem.N", "problem.h",
    "problem.t_end", "problem.k1", "problem.k2", "problem.x1", "problem.x2",
    "problem.initial", "problem.coeffs_file", "problem.quadrature_nodes",
    "problem.periodize", "problem.images",
}
_TOP_KEYS = {"scheme", "tableau", "invariants", "snapshots", "out_dir"}
_SOLVER_KEYS = {"solver.fp_tol", "solver.fp_max_iters", "solver.guard",
                "solver.quadrature_nodes"}
_ALL_KEYS = _PROBLEM_KEYS | _TOP_KEYS | _SOLVER_KEYS

_REQUIRED = {
    "problem.alpha", "problem.nu", "problem.l", "problem.N", "problem.h",
    "problem.t_end", "scheme",
}


def _parse_bool(raw: str, key: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def _parse_float(raw: str, key: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None


def _parse_int(raw: str, key: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None


def parse_config(text: str, base_dir: Path | None = None) -> RunConfig:
    """Parse a key = value configuration into a validated RunConfig."""
    kv: dict[str, str] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in kv:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        kv[key] = value.strip()

    missing = _REQUIRED - kv.keys()
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(sorted(missing))}")

    params = KdvParams(
        _parse_float(kv["problem.alpha"], "problem.alpha"),
        _parse_float(kv["problem.nu"], "problem.nu"),
    )
    l = _parse_float(kv["problem.l"], "problem.l")
    N = _parse_int(kv["problem.N"], "problem.N")
    h = _parse_float(kv["problem.h"], "problem.h")
    t_end = _parse_float(kv["problem.t_end"], "problem.t_end")
    if h <= 0:
        raise ConfigError("problem.h must be positive")
    if t_end < 0:
        raise ConfigError("problem.t_end must be nonnegative")

    initial_kind = kv.get("problem.initial", "two-soliton")
    if initial_kind == "two-soliton":
        try:
            initial = TwoSolitonParams(
                _parse_float(kv.get("problem.k1", "0.4"), "problem.k1"),
                _parse_float(kv.get("problem.k2", "0.6"), "problem.k2"),
                _parse_float(kv.get("problem.x1", "4"), "problem.x1"),
                _parse_float(kv.get("problem.x2", "15"), "problem.x2"),
            )
        except ValueError as err:
            raise ConfigError(str(err)) from None
    elif initial_kind == "coeffs-file":
        if "problem.coeffs_file" not in kv:
            raise ConfigError("problem.initial = coeffs-file needs problem.coeffs_file")
        path = Path(kv["problem.coeffs_file"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        try:
            coeffs = np.loadtxt(path, ndmin=1)
        except OSError as err:
            raise ConfigError(f"cannot read coefficients file: {err}") from None
        if coeffs.size != 2 * N + 1:
            raise ConfigError(
                f"coefficients file holds {coeffs.size} values, expected {2 * N + 1}"
            )
        initial = tuple(float(c) for c in coeffs)
    else:
        raise ConfigError(
            f"problem.initial must be 'two-soliton' or 'coeffs-file', got {initial_kind!r}"
        )

    quad = kv.get("problem.quadrature_nodes")
    quadrature_nodes = _parse_int(quad, "problem.quadrature_nodes") if quad else None

    try:
        problem = ProblemSetup(
            params=params,
            l=l,
            N=N,
            h=h,
            t_end=t_end,
            initial=initial,
            quadrature_nodes=quadrature_nodes,
            periodize=_parse_bool(kv.get("problem.periodize", "true"), "problem.periodize"),
            images=_parse_int(kv.get("problem.images", "3"), "problem.images"),
        )
        problem.basis()
    except ValueError as err:
        raise ConfigError(str(err)) from None

    scheme_raw = kv["scheme"]
    try:
        scheme = Scheme(scheme_raw)
    except ValueError:
        names = ", ".join(s.value for s in Scheme)
        raise ConfigError(f"scheme must be one of {names}, got {scheme_raw!r}") from None

    tableau = kv.get("tableau", "rk4")
    if tableau not in TABLEAUX:
        raise ConfigError(
            f"unknown tableau {tableau!r}; available: {', '.join(sorted(TABLEAUX))}"
        )

    inv_raw = kv.get("invariants", "mass, momentum, energy")
    invariants = []
    for item in filter(None, (s.strip() for s in inv_raw.split(","))):
        try:
            invariants.append(FunctionalKind(item))
        except ValueError:
            raise ConfigError(f"unknown invariant {item!r}") from None

    guard_raw = kv.get("solver.guard", "")
    solver_quad = kv.get("solver.quadrature_nodes", "")
    try:
        settings = SolverSettings(
            fp_tol=_parse_float(kv.get("solver.fp_tol", "1e-12"), "solver.fp_tol"),
            fp_max_iters=_parse_int(
                kv.get("solver.fp_max_iters", "100"), "solver.fp_max_iters"
            ),
            guard=_parse_float(guard_raw, "solver.guard") if guard_raw else None,
            quadrature_nodes=(
                _parse_int(solver_quad, "solver.quadrature_nodes")
                if solver_quad
                else quadrature_nodes
            ),
        )
    except ValueError as err:
        raise ConfigError(str(err)) from None

    snaps_raw = kv.get("snapshots", "")
    snapshots = tuple(
        _parse_float(s.strip(), "snapshots")
        for s in snaps_raw.split(",")
        if s.strip()
    )
    for t in snapshots:
        if not 0.0 <= t <= t_end:
            raise ConfigError(f"snapshot time {t} outside [0, {t_end}]")

    return RunConfig(
        problem=problem,
        scheme=scheme,
        tableau=tableau,
        invariants=tuple(invariants),
        settings=settings,
        snapshots=snapshots,
        out_dir=kv.get("out_dir"),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}") from None
    return parse_config(text, base_dir=path.parent)


def _problem_echo(problem: ProblemSetup) -> list[str]:
    lines = [
        f"problem.alpha = {problem.params.alpha!r}",
        f"problem.nu = {problem.params.nu!r}",
        f"problem.l = {problem.l!r}",
        f"problem.N = {problem.N}",
        f"problem.h = {problem.h!r}",
        f"problem.t_end = {problem.t_end!r}",
    ]
    if isinstance(problem.initial, TwoSolitonParams):
        tp = problem.initial
        lines += [
            "problem.initial = two-soliton",
            f"problem.k1 = {tp.k1!r}",
            f"problem.k2 = {tp.k2!r}",
            f"problem.x1 = {tp.x1!r}",
            f"problem.x2 = {tp.x2!r}",
            f"problem.periodize = {str(problem.periodize).lower()}",
            f"problem.images = {problem.images}",
        ]
    else:
        lines.append("problem.initial = coeffs-file")
        lines.append(
            "# inline coefficients: " + " ".join(FMT % c for c in problem.initial)
        )
    if problem.quadrature_nodes is not None:
        lines.append(f"problem.quadrature_nodes = {problem.quadrature_nodes}")
    return lines


def config_echo(config: RunConfig) -> str:
    """Canonical echo of the resolved configuration."""
    lines = _problem_echo(config.problem)
    lines += [
        f"scheme = {config.scheme.value}",
        f"tableau = {config.tableau}",
        "invariants = " + ", ".join(k.value for k in config.invariants),
        f"solver.fp_tol = {config.settings.fp_tol!r}",
        f"solver.fp_max_iters = {config.settings.fp_max_iters}",
    ]
    if config.settings.guard is not None:
        lines.append(f"solver.guard = {config.settings.guard!r}")
    if config.settings.quadrature_nodes is not None:
        lines.append(f"solver.quadrature_nodes = {config.settings.quadrature_nodes}")
    if config.snapshots:
        lines.append("snapshots = " + ", ".join(repr(t) for t in config.snapshots))
    return "\n".join(lines) + "\n"


def _write_invariants_csv(path: Path, series) -> None:
    rows = ["t,mass,momentum,energy,rel_drift_mass,rel_drift_momentum,"
            "rel_drift_energy,fp_iters,rank"]
    for d in series:
        rows.append(
            ",".join(
                [FMT % d.t, FMT % d.mass, FMT % d.momentum, FMT % d.energy,
                 FMT % d.rel_drift_mass, FMT % d.rel_drift_momentum,
                 FMT % d.rel_drift_energy, str(d.fp_iterations),
                 str(d.projection_rank)]
            )
        )
    path.write_text("\n".join(rows) + "\n")


def _write_snapshot_csv(path: Path, state: SpectralField) -> None:
    grid = synthesize(state, 8 * state.basis.N)
    rows = ["x,u"]
    for x, u in zip(grid.nodes(), grid.values):
        rows.append(f"{FMT % x},{FMT % u}")
    path.write_text("\n".join(rows) + "\n")


def _fmt_t(t: float) -> str:
    return f"{t:g}"


def run(config: RunConfig, out_dir=None) -> RunReport:
    """Execute one simulation; write CSV outputs when a directory is given."""
    target = out_dir if out_dir is not None else config.out_dir
    u0 = initial_state(config.problem)
    tableau = TABLEAUX[config.tableau]()
    t0 = time.perf_counter()
    records = integrate(
        config.scheme,
        tableau,
        config.problem.params,
        config.invariants,
        u0,
        config.problem.h,
        config.problem.t_end,
        config.settings,
    )
    wall = time.perf_counter() - t0
    series = tuple(diag for _, diag in records)
    max_drift = {
        "mass": max(d.rel_drift_mass for d in series),
        "momentum": max(d.rel_drift_momentum for d in series),
        "energy": max(d.rel_drift_energy for d in series),
    }
    report = RunReport(
        config=config,
        series=series,
        final_state=records[-1][0],
        max_rel_drift=max_drift,
        total_fp_iterations=sum(d.fp_iterations for d in series),
        wall_time_s=wall,
    )

    if target is not None:
        target = Path(target)
        target.mkdir(parents=True, exist_ok=True)
        (target / "config.resolved").write_text(config_echo(config))
        _write_invariants_csv(target / "invariants.csv", series)
        h = config.problem.h
        for t_snap in config.snapshots:
            idx = int(round(t_snap / h))
            state = records[idx][0]
            _write_snapshot_csv(target / f"snapshot_{_fmt_t(t_snap)}.csv", state)
        (target / "report.txt").write_text(_run_report_text(report))
    return report


def _run_report_text(report: RunReport) -> str:
    cfg = report.config
    lines = [
        f"kdvflow {report.version}",
        f"scheme = {cfg.scheme.value}, tableau = {cfg.tableau}",
        f"steps = {len(report.series) - 1}, h = {cfg.problem.h!r}, "
        f"t_end = {cfg.problem.t_end!r}",
        f"max relative drift: mass = {report.max_rel_drift['mass']:.3e}, "
        f"momentum = {report.max_rel_drift['momentum']:.3e}, "
        f"energy = {report.max_rel_drift['energy']:.3e}",
        f"total fixed-point iterations = {report.total_fp_iterations}",
        f"wall time = {report.wall_time_s:.3f} s",
    ]
    if isinstance(cfg.problem.initial, TwoSolitonParams):
        tp = cfg.problem.initial
        mism = abs(
            two_soliton_initial(tp, -cfg.problem.l)
            - two_soliton_initial(tp, cfg.problem.l)
        )
        treatment = "periodized images" if cfg.problem.periodize else "raw formula"
        lines.append(
            f"initial profile boundary mismatch = {mism:.3e} (projected from {treatment})"
        )
    return "\n".join(lines) + "\n"


def convergence_study(
    base: RunConfig,
    steps: list[float],
    reference_h: float,
    out_dir=None,
) -> list[tuple[float, float, float]]:
    """Error at t_end versus step size, against a fine-step reference run.

    The reference uses the same problem and scheme at `reference_h`.
    Errors are coefficient-space Euclidean norms; observed order between
    consecutive steps is the log2 ratio.  Returns (h, error, order) rows,
    order = nan on the first row.
    """
    if not steps:
        raise ConfigError("need at least one step size")
    if any(h <= 0 for h in steps):
        raise ConfigError("step sizes must be positive")
    if not reference_h < min(steps) / 5:
        raise ConfigError(
            f"reference step {reference_h} must be below min(steps)/5 = "
            f"{min(steps) / 5!r}"
        )

    def run_with(h: float) -> SpectralField:
        cfg = replace(base, problem=replace(base.problem, h=h), snapshots=())
        try:
            return run(cfg).final_state
        except Exception as err:
            raise StudyError(f"run at h={h} failed: {err}", failing_h=h) from err

    log.info("convergence study: reference run at h=%g", reference_h)
    reference = run_with(reference_h)
    rows: list[tuple[float, float, float]] = []
    prev_error = None
    for h in sorted(steps, reverse=True):
        err = (run_with(h) - reference).norm()
        order = math.log2(prev_error / err) if prev_error is not None else math.nan
        rows.append((h, err, order))
        log.info("h=%g error=%.6e order=%s", h, err, order)
        prev_error = err

    if out_dir is not None:
        target = Path(out_dir)
        target.mkdir(parents=True, exist_ok=True)
        (target / "config.resolved").write_text(
            config_echo(base)
            + "steps = " + ", ".join(repr(h) for h in sorted(steps, reverse=True))
            + f"\nreference_h = {reference_h!r}\n"
        )
        lines = ["h,error,order"]
        for h, err, order in rows:
            order_s = "" if math.isnan(order) else FMT % order
            lines.append(f"{FMT % h},{FMT % err},{order_s}")
        (target / "convergence.csv").write_text("\n".join(lines) + "\n")
    return rows


def compare(configs: list[RunConfig], out_dir=None) -> dict:
    """Run several schemes on one problem and align their drift series."""
    if not configs:
        raise ConfigError("need at least one configuration")
    problem_echo = _problem_echo(configs[0].problem)
    for cfg in configs[1:]:
        if _problem_echo(cfg.problem) != problem_echo:
            raise ConfigError("compared configurations must share the problem")

    labels = []
    for i, cfg in enumerate(configs):
        label = cfg.scheme.value
        if sum(1 for c in configs if c.scheme is cfg.scheme) > 1:
            label = f"{label}-{i}"
        labels.append(label)

    reports = {}
    for label, cfg in zip(labels, configs):
        sub = Path(out_dir) / label if out_dir is not None else None
        reports[label] = run(cfg, out_dir=sub)

    if out_dir is not None:
        target = Path(out_dir)
        target.mkdir(parents=True, exist_ok=True)
        header = ["t"]
        for label in labels:
            header += [
                f"{label}.rel_drift_mass",
                f"{label}.rel_drift_momentum",
                f"{label}.rel_drift_energy",
            ]
        lines = [",".join(header)]
        n = len(reports[labels[0]].series)
        for k in range(n):
            row = [FMT % reports[labels[0]].series[k].t]
            for label in labels:
                d = reports[label].series[k]
                row += [FMT % d.rel_drift_mass, FMT % d.rel_drift_momentum,
                        FMT % d.rel_drift_energy]
            lines.append(",".join(row))
        (target / "comparison.csv").write_text("\n".join(lines) + "\n")
        summary = []
        for label in labels:
            r = reports[label]
            summary.append(
                f"{label}: max rel drift mass {r.max_rel_drift['mass']:.3e}, "
                f"momentum {r.max_rel_drift['momentum']:.3e}, "
                f"energy {r.max_rel_drift['energy']:.3e}"
            )
        (target / "report.txt").write_text("\n".join(summary) + "\n")
    return reports
