"""Orthogonal projection onto the discrete tangent space.

The invariant-preserving step constrains the update to be orthogonal to
the span of the discrete variational derivatives of the selected
functionals.  Two routes compute that projection: an orthonormal frame
built by modified Gram-Schmidt (the production path, robust to nearly
dependent inputs through rank dropping) and the dense normal-equations
projector P = G (G^T G)^{-1} G^T (retained as an independent
cross-check).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import BasisSpec, SpectralField

__all__ = [
    "ProjectionFrame",
    "RankDeficiencyError",
    "build_frame",
    "project_tangent",
    "project_onto_span",
    "project_via_gram",
    "DEFAULT_DROP_TOL",
]

DEFAULT_DROP_TOL = 1e-10


class RankDeficiencyError(ValueError):
    """Raised when the normal-equations route meets nearly dependent inputs."""


@dataclass(frozen=True)
class ProjectionFrame:
    """Orthonormal directions spanning the retained input subspace.

    `dropped` records the indices of inputs discarded as numerically
    dependent; the projector stays well defined with the retained rank.
    """

    basis: BasisSpec
    directions: tuple[SpectralField, ...]
    dropped: tuple[int, ...] = ()

    @property
    def retained_rank(self) -> int:
        return len(self.directions)


def build_frame(
    inputs: list[SpectralField], drop_tol: float = DEFAULT_DROP_TOL
) -> ProjectionFrame:
    """Orthonormalize the inputs by modified Gram-Schmidt.

    One reorthogonalization pass keeps the frame orthonormal to roundoff.
    An input whose residual after orthogonalization is below drop_tol
    times its own norm is dropped and recorded.
    """
    if not inputs:
        raise ValueError("need at least one input direction")
    if drop_tol <= 0:
        raise ValueError("drop_tol must be positive")
    basis = inputs[0].basis
    directions: list[np.ndarray] = []
    dropped: list[int] = []
    for idx, field in enumerate(inputs):
        if field.basis != basis:
            raise ValueError("inputs live on different bases")
        w = np.array(field.coeffs)
        n0 = np.linalg.norm(w)
        for _ in range(2):
            for b in directions:
                w -= (w @ b) * b
        nw = np.linalg.norm(w)
        if n0 == 0.0 or nw < drop_tol * n0:
            dropped.append(idx)
            continue
        directions.append(w / nw)
    return ProjectionFrame(
        basis,
        tuple(SpectralField(basis, b) for b in directions),
        tuple(dropped),
    )


def project_onto_span(frame: ProjectionFrame, v: SpectralField) -> SpectralField:
    """Component of v inside the frame's span."""
    if v.basis != frame.basis:
        raise ValueError("field and frame live on different bases")
    out = np.zeros_like(v.coeffs)
    for w in frame.directions:
        out += (v.coeffs @ w.coeffs) * w.coeffs
    return SpectralField(frame.basis, out)


def project_tangent(frame: ProjectionFrame, v: SpectralField) -> SpectralField:
    """Component of v orthogonal to every frame direction."""
    if v.basis != frame.basis:
        raise ValueError("field and frame live on different bases")
    out = np.array(v.coeffs)
    for w in frame.directions:
        out -= (out @ w.coeffs) * w.coeffs
    return SpectralField(frame.basis, out)


def project_via_gram(
    inputs: list[SpectralField], v: SpectralField, cond_limit: float = 1e12
) -> SpectralField:
    """Projection of v onto span(inputs) through the normal equations.

    Requires numerically full-rank inputs; a Gram-matrix condition
    estimate above `cond_limit` raises :class:`RankDeficiencyError`
    (use :func:`build_frame`, which drops dependent directions, instead).
    """
    if not inputs:
        raise ValueError("need at least one input direction")
    G = np.column_stack([f.coeffs for f in inputs])
    gram = G.T @ G
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > cond_limit:
        raise RankDeficiencyError(
            f"Gram matrix condition estimate {cond:.3e} exceeds {cond_limit:.1e}; "
            "inputs are numerically rank-deficient (build_frame handles this)"
        )
    coeffs = np.linalg.solve(gram, G.T @ v.coeffs)
    return SpectralField(v.basis, G @ coeffs)
