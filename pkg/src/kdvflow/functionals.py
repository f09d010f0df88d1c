"""The three conserved functionals of the KdV flow and their gradients.

For u_t = alpha*u*u_x + nu*u_xxx on [-l, l] the conserved quantities are

    mass      integral of u,
    momentum  (1/2) integral of u^2,
    energy    integral of (alpha/6) u^3 - (nu/2) u_x^2,

with L2 variational derivatives 1, u and (alpha/2) u^2 + nu*u_xx.  All
operations return Galerkin projections into the truncated basis, using
exact-degree quadrature for the cubic terms and the coefficient dot
product (Parseval) for the quadratic ones.

A discrete variational derivative of H is a two-point field g(u, v) with
H[u] - H[v] = <g(u, v), u - v> and g(u, u) equal to the variational
derivative.  Two constructions are provided: the average-vector-field
form (an average of the variational derivative along the segment from v
to u, here written out in closed form) and the pointwise quotient of the
energy densities, which is grid-valued and needs a guard where u and v
nearly coincide.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .spectral import (
    BasisSpec,
    GridField,
    SpectralField,
    analyze,
    apply_derivative,
    default_node_count,
    synthesize,
)

__all__ = [
    "KdvParams",
    "FunctionalKind",
    "evaluate",
    "variational_derivative",
    "dvd_avf",
    "dvd_quotient",
    "mass_direction",
]


@dataclass(frozen=True)
class KdvParams:
    """Nonlinearity and dispersion coefficients of u_t = alpha*u*u_x + nu*u_xxx."""

    alpha: float
    nu: float

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.nu)):
            raise ValueError("alpha and nu must be finite")


class FunctionalKind(Enum):
    MASS = "mass"
    MOMENTUM = "momentum"
    ENERGY = "energy"


def mass_direction(spec: BasisSpec) -> SpectralField:
    """Coefficients of the constant function 1, i.e. sqrt(2l) * e0."""
    c = np.zeros(spec.dim)
    c[0] = np.sqrt(2.0 * spec.l)
    return SpectralField(spec, c)


def _nodes(u: SpectralField, M: int | None) -> int:
    return default_node_count(u.basis.N) if M is None else M


def evaluate(
    kind: FunctionalKind, p: KdvParams, u: SpectralField, M: int | None = None
) -> float:
    """Value of the selected functional at u."""
    if kind is FunctionalKind.MASS:
        return float(np.sqrt(2.0 * u.basis.l) * u.coeffs[0])
    if kind is FunctionalKind.MOMENTUM:
        return 0.5 * float(u.coeffs @ u.coeffs)
    if kind is FunctionalKind.ENERGY:
        M = _nodes(u, M)
        U = synthesize(u, M).values
        cubic = (p.alpha / 6.0) * (2.0 * u.basis.l / M) * float(np.sum(U**3))
        ux = apply_derivative(u).coeffs
        return cubic - 0.5 * p.nu * float(ux @ ux)
    raise ValueError(f"unknown functional kind {kind!r}")


def variational_derivative(
    kind: FunctionalKind, p: KdvParams, u: SpectralField, M: int | None = None
) -> SpectralField:
    """L2 gradient of the functional, projected into the truncated basis."""
    if kind is FunctionalKind.MASS:
        return mass_direction(u.basis)
    if kind is FunctionalKind.MOMENTUM:
        return u
    if kind is FunctionalKind.ENERGY:
        U = synthesize(u, _nodes(u, M))
        quadratic = analyze((0.5 * p.alpha) * U * U)
        return quadratic + p.nu * apply_derivative(u, 2)
    raise ValueError(f"unknown functional kind {kind!r}")


def dvd_avf(
    kind: FunctionalKind,
    p: KdvParams,
    u: SpectralField,
    v: SpectralField,
    M: int | None = None,
) -> SpectralField:
    """Average-vector-field discrete variational derivative at the pair (u, v).

    Symmetric in (u, v); satisfies the two-point identity exactly on the
    truncated space and reduces to the variational derivative at u = v.
    """
    u._check_compatible(v)
    if kind is FunctionalKind.MASS:
        return mass_direction(u.basis)
    if kind is FunctionalKind.MOMENTUM:
        return 0.5 * (u + v)
    if kind is FunctionalKind.ENERGY:
        M = _nodes(u, M)
        U = synthesize(u, M).values
        V = synthesize(v, M).values
        # (U^2 + UV + V^2) written as (U+V)^2 - UV so the expression is
        # symmetric in floating point, not just algebraically
        S = U + V
        quad = analyze(GridField(u.basis, (p.alpha / 6.0) * (S * S - U * V)))
        return quad + (0.5 * p.nu) * apply_derivative(u + v, 2)
    raise ValueError(f"unknown functional kind {kind!r}")


def dvd_quotient(
    p: KdvParams,
    u: SpectralField,
    v: SpectralField,
    guard: float | None = None,
    M: int | None = None,
) -> GridField:
    """Pointwise quotient discrete variational derivative of the energy.

    Divides the difference of energy densities by u - v node by node.
    Where |u - v| falls below the guard the average-vector-field value is
    substituted, which makes the result well defined but, unlike the AVF
    form, not exactly conservative.  Experimental; the production schemes
    use :func:`dvd_avf`.
    """
    u._check_compatible(v)
    M = _nodes(u, M)
    U = synthesize(u, M).values
    V = synthesize(v, M).values
    if guard is None:
        guard = 1e-10 * (1.0 + float(np.max(np.abs(U))))
    if guard <= 0:
        raise ValueError("guard must be positive")
    Ux = synthesize(apply_derivative(u), M).values
    Vx = synthesize(apply_derivative(v), M).values

    S = U + V
    cubic = (p.alpha / 6.0) * (S * S - U * V)
    diff = U - V
    safe = np.abs(diff) >= guard
    quotient = np.zeros_like(U)
    np.divide(Ux**2 - Vx**2, diff, out=quotient, where=safe)
    out = cubic - 0.5 * p.nu * quotient

    if not np.all(safe):
        Uxx = synthesize(apply_derivative(u, 2), M).values
        Vxx = synthesize(apply_derivative(v, 2), M).values
        avf = cubic + 0.5 * p.nu * (Uxx + Vxx)
        out = np.where(safe, out, avf)
    return GridField(u.basis, out)
