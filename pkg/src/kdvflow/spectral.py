"""Orthonormal trigonometric basis on [-l, l] and its discrete operators.

The basis interleaves one constant mode with sine/cosine pairs,

    w_0(x)      = sqrt(1/(2l)),
    w_{2j-1}(x) = sqrt(1/l) * sin(j*pi*(x+l)/l),
    w_{2j}(x)   = sqrt(1/l) * cos(j*pi*(x+l)/l),      j = 1..N,

orthonormal in L2[-l, l].  A function in the span is held either as a
coefficient vector (:class:`SpectralField`) or as samples on a uniform
periodic grid (:class:`GridField`).  Uniform-weight quadrature on M nodes
integrates trigonometric polynomials of frequency < M exactly, so every
transform here is exact on the span as long as the node count respects the
degree of the integrand; the default M = 4(N+1) keeps even triple products
(frequency 3N) exact.

Differentiation acts blockwise: with d_j = j*pi/l, the pair
(w_{2j-1}, w_{2j}) satisfies d/dx (sin_j, cos_j) = d_j * (cos_j, -sin_j),
so the coefficient-space derivative operator is the transpose of the
block-diagonal skew matrix made of 2x2 rotations-generators d_j * J,
J = [[0, 1], [-1, 0]], with a zero first row and column for the constant
mode.  It is applied implicitly in O(dim); a dense materialization exists
for cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "BasisSpec",
    "SpectralField",
    "GridField",
    "basis_eval",
    "synthesize",
    "analyze",
    "apply_derivative",
    "inner_product",
    "derivative_matrix",
    "default_node_count",
    "zero_field",
    "unit_field",
    "from_coeffs",
]


@dataclass(frozen=True)
class BasisSpec:
    """Domain half-width l and frequency cutoff N of the truncated basis."""

    l: float
    N: int

    def __post_init__(self):
        if not (np.isfinite(self.l) and self.l > 0):
            raise ValueError(f"half-width l must be positive and finite, got {self.l}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"cutoff N must be an integer >= 1, got {self.N}")
        object.__setattr__(self, "l", float(self.l))
        object.__setattr__(self, "N", int(self.N))

    @property
    def dim(self) -> int:
        return 2 * self.N + 1

    def nodes(self, M: int) -> np.ndarray:
        """Uniform periodic grid x_m = -l + 2l*m/M, m = 0..M-1."""
        return -self.l + 2.0 * self.l * np.arange(M) / M

    def frequencies(self) -> np.ndarray:
        """Angular frequencies d_j = j*pi/l for j = 1..N."""
        return np.pi / self.l * np.arange(1, self.N + 1)


def default_node_count(N: int) -> int:
    """Node count making quadrature exact for cubic products (degree 3N)."""
    return 4 * (N + 1)


def _min_node_count(N: int) -> int:
    return 3 * N + 2


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Coefficient vector of length 2N+1 against the orthonormal basis."""

    basis: BasisSpec
    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float)
        if arr.shape != (self.basis.dim,):
            raise ValueError(
                f"expected {self.basis.dim} coefficients, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    def _check_compatible(self, other: "SpectralField"):
        if self.basis != other.basis:
            raise ValueError("fields live on different bases")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.basis, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.basis, self.coeffs - other.coeffs)

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.basis, -self.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.basis, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def dot(self, other: "SpectralField") -> float:
        """Euclidean coefficient dot product (equals the L2 pairing)."""
        self._check_compatible(other)
        return float(self.coeffs @ other.coeffs)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


@dataclass(frozen=True, eq=False)
class GridField:
    """Samples on the uniform periodic grid of M nodes."""

    basis: BasisSpec
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 1:
            raise ValueError("grid values must be one-dimensional")
        if arr.size < _min_node_count(self.basis.N):
            raise ValueError(
                f"node count {arr.size} too small; need at least "
                f"{_min_node_count(self.basis.N)} for N={self.basis.N}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def M(self) -> int:
        return self.values.size

    def nodes(self) -> np.ndarray:
        return self.basis.nodes(self.M)

    def _check_compatible(self, other: "GridField"):
        if self.basis != other.basis or self.M != other.M:
            raise ValueError("grids are incompatible (basis or node count differ)")

    def __add__(self, other: "GridField") -> "GridField":
        self._check_compatible(other)
        return GridField(self.basis, self.values + other.values)

    def __sub__(self, other: "GridField") -> "GridField":
        self._check_compatible(other)
        return GridField(self.basis, self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, GridField):
            self._check_compatible(other)
            return GridField(self.basis, self.values * other.values)
        return GridField(self.basis, self.values * float(other))

    __rmul__ = __mul__


def zero_field(spec: BasisSpec) -> SpectralField:
    return SpectralField(spec, np.zeros(spec.dim))


def unit_field(spec: BasisSpec, j: int) -> SpectralField:
    """Coefficient unit vector e_j."""
    if not 0 <= j < spec.dim:
        raise IndexError(f"basis index {j} out of range 0..{spec.dim - 1}")
    c = np.zeros(spec.dim)
    c[j] = 1.0
    return SpectralField(spec, c)


def from_coeffs(spec: BasisSpec, coeffs) -> SpectralField:
    return SpectralField(spec, np.asarray(coeffs, dtype=float))


def basis_eval(spec: BasisSpec, j: int, x):
    """Evaluate the j-th basis function at position(s) x."""
    if not 0 <= j < spec.dim:
        raise IndexError(f"basis index {j} out of range 0..{spec.dim - 1}")
    x = np.asarray(x, dtype=float)
    if j == 0:
        out = np.full_like(x, np.sqrt(1.0 / (2.0 * spec.l)))
    else:
        m = (j + 1) // 2
        theta = m * np.pi * (x + spec.l) / spec.l
        trig = np.sin(theta) if j % 2 == 1 else np.cos(theta)
        out = np.sqrt(1.0 / spec.l) * trig
    return out if out.ndim else float(out)


@lru_cache(maxsize=None)
def _synthesis_matrix(spec: BasisSpec, M: int) -> np.ndarray:
    """S[m, j] = w_j(x_m); cached per (basis, node count)."""
    x = spec.nodes(M)
    S = np.empty((M, spec.dim))
    S[:, 0] = np.sqrt(1.0 / (2.0 * spec.l))
    theta = np.pi * np.outer(x + spec.l, np.arange(1, spec.N + 1)) / spec.l
    S[:, 1::2] = np.sqrt(1.0 / spec.l) * np.sin(theta)
    S[:, 2::2] = np.sqrt(1.0 / spec.l) * np.cos(theta)
    S.flags.writeable = False
    return S


def synthesize(u: SpectralField, M: int | None = None) -> GridField:
    """Evaluate the field on the uniform grid of M nodes."""
    if M is None:
        M = default_node_count(u.basis.N)
    if M < _min_node_count(u.basis.N):
        raise ValueError(
            f"node count {M} too small; need at least {_min_node_count(u.basis.N)}"
        )
    S = _synthesis_matrix(u.basis, M)
    return GridField(u.basis, S @ u.coeffs)


def analyze(g: GridField) -> SpectralField:
    """Quadrature projection of grid samples onto the basis.

    Exact whenever the samples come from a trigonometric polynomial of
    frequency < M - N.
    """
    S = _synthesis_matrix(g.basis, g.M)
    w = 2.0 * g.basis.l / g.M
    return SpectralField(g.basis, w * (S.T @ g.values))


def inner_product(f: GridField, g: GridField) -> float:
    """Uniform-weight quadrature of the pointwise product."""
    f._check_compatible(g)
    w = 2.0 * f.basis.l / f.M
    return float(w * (f.values @ g.values))


def _apply_derivative_once(spec: BasisSpec, c: np.ndarray) -> np.ndarray:
    # transpose of the block skew matrix: sin_j <- -d_j cos_j, cos_j <- d_j sin_j
    d = spec.frequencies()
    out = np.zeros_like(c)
    out[1::2] = -d * c[2::2]
    out[2::2] = d * c[1::2]
    return out


def apply_derivative(u: SpectralField, order: int = 1) -> SpectralField:
    """Coefficient vector of the order-th spatial derivative."""
    if order < 0:
        raise ValueError("derivative order must be >= 0")
    c = np.array(u.coeffs)
    for _ in range(order):
        c = _apply_derivative_once(u.basis, c)
    return SpectralField(u.basis, c)


def derivative_matrix(spec: BasisSpec, transpose: bool = False) -> np.ndarray:
    """Dense block matrix mapping basis values to their derivatives.

    Intended for test cross-checks only; production code applies the
    operator implicitly.  With `transpose=True` returns the coefficient
    operator used by :func:`apply_derivative`.
    """
    D = np.zeros((spec.dim, spec.dim))
    for j, d in enumerate(spec.frequencies(), start=1):
        s, c = 2 * j - 1, 2 * j
        D[s, c] = d
        D[c, s] = -d
    return D.T if transpose else D
