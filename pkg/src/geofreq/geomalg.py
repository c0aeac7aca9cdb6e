"""Clifford-algebra vector operations and the geometric frequency of a velocity sample.

The geometric frequency of a velocity vector u with time derivative u' is the
multivector u u' / |u|^2, split into a symmetric radial rate

    rho = (u . u') / |u|^2          [1/s]

and an antisymmetric rotation rate

    omega = (u ^ u') / |u|^2        [rad/s, a bivector]

In two dimensions the bivector has a single signed coefficient on e1^e2 and the
pair (rho, theta') behaves exactly like a complex number, the *complex
frequency*.  rho and |omega| are invariant under isometries (rotations) of the
coordinate frame but not under scalings; that distinction is what the modal
machinery in :mod:`geofreq.modal` exploits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Bivector",
    "Multivector2",
    "GeomFreqSample",
    "degeneracy_threshold",
    "inner",
    "wedge",
    "geometric_product_2d",
    "geometric_frequency",
    "complex_frequency",
]


def degeneracy_threshold(du_norm: float) -> float:
    """Smallest |u| treated as non-degenerate when dividing by |u|^2.

    Scales with |u'| so that samples where the trajectory has essentially
    stopped (equilibrium reached to machine precision) are flagged instead of
    producing huge garbage ratios.
    """
    return 1e-12 * (1.0 + du_norm)


def _as_vector(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite components")
    return v


def _check_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")


def _pair_index(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-major (i, j) index pairs with i < j for the strict upper triangle."""
    iu = np.triu_indices(n, k=1)
    return iu[0], iu[1]


class Bivector:
    """Antisymmetric grade-2 element of R^n, n >= 2.

    Only the strict upper triangle is stored, row-major by (i, j) with i < j.
    In 2-D the single coefficient is the signed e1^e2 component; positive for
    counter-clockwise rotation (from e1 toward e2).
    """

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: int, coeffs) -> None:
        if dim < 2:
            raise ValueError("bivectors need dimension >= 2")
        coeffs = np.asarray(coeffs, dtype=float)
        expected = dim * (dim - 1) // 2
        if coeffs.shape != (expected,):
            raise ValueError(f"expected {expected} coefficients for dim {dim}")
        self.dim = dim
        self.coeffs = coeffs

    @property
    def norm(self) -> float:
        """sqrt(sum of squared strict-upper-triangle coefficients)."""
        return float(np.sqrt(np.dot(self.coeffs, self.coeffs)))

    def coefficient(self, i: int, j: int) -> float:
        """Signed coefficient on e_i ^ e_j (0-based indices, any order)."""
        if i == j:
            return 0.0
        sign = 1.0
        if i > j:
            i, j, sign = j, i, -1.0
        rows, cols = _pair_index(self.dim)
        (k,) = np.nonzero((rows == i) & (cols == j))[0]
        return sign * float(self.coeffs[k])

    def as_matrix(self) -> np.ndarray:
        """Full antisymmetric matrix with b[i, j] = -b[j, i]."""
        m = np.zeros((self.dim, self.dim))
        rows, cols = _pair_index(self.dim)
        m[rows, cols] = self.coeffs
        m[cols, rows] = -self.coeffs
        return m

    def __neg__(self) -> "Bivector":
        return Bivector(self.dim, -self.coeffs)

    def __repr__(self) -> str:
        return f"Bivector(dim={self.dim}, coeffs={self.coeffs!r})"


@dataclass(frozen=True)
class Multivector2:
    """Scalar + e1^e2 pair, the 2-D geometric product result.

    Isomorphic to the complex number ``scalar + bivector*j``.  Degenerate
    frequency samples are represented with NaN entries; check :meth:`is_valid`.
    """

    scalar: float
    bivector: float

    def is_valid(self) -> bool:
        return bool(np.isfinite(self.scalar) and np.isfinite(self.bivector))

    def as_complex(self) -> complex:
        return complex(self.scalar, self.bivector)


@dataclass(frozen=True)
class GeomFreqSample:
    """One geometric-frequency sample: radial rate, rotation bivector, validity.

    ``omega`` is None in one dimension, where the antisymmetric part is
    identically zero.  ``valid`` is False when |u| fell below the degeneracy
    threshold; rho and omega_norm are NaN in that case, never fabricated.
    """

    rho: float
    omega: Bivector | None
    omega_norm: float
    valid: bool


def inner(x, y) -> float:
    """Euclidean inner product sum_i x_i y_i."""
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    _check_same_dim(xv, yv)
    return float(np.dot(xv, yv))


def wedge(x, y) -> Bivector:
    """Wedge product x ^ y: antisymmetrized outer product, as a Bivector.

    Coefficient on e_i ^ e_j (i < j) is x_i y_j - x_j y_i.  Undefined in R^1.
    """
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    _check_same_dim(xv, yv)
    n = xv.size
    if n < 2:
        raise ValueError("wedge product is undefined in R^1")
    rows, cols = _pair_index(n)
    coeffs = xv[rows] * yv[cols] - xv[cols] * yv[rows]
    return Bivector(n, coeffs)


def geometric_product_2d(x, y) -> Multivector2:
    """Geometric product of two 2-D vectors: inner part plus wedge part."""
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    _check_same_dim(xv, yv)
    if xv.size != 2:
        raise ValueError("geometric_product_2d expects 2-D vectors")
    scalar = float(xv[0] * yv[0] + xv[1] * yv[1])
    biv = float(xv[0] * yv[1] - xv[1] * yv[0])
    return Multivector2(scalar, biv)


def geometric_frequency(u, du) -> GeomFreqSample:
    """Geometric frequency of a velocity sample (u, u').

    rho = (u . u')/|u|^2 and omega = (u ^ u')/|u|^2.  If |u| is below the
    degeneracy threshold the sample is flagged invalid with NaN entries
    (near an equilibrium both u and u' vanish and the ratio is meaningless).
    """
    uv = _as_vector(u, "u")
    duv = _as_vector(du, "du")
    _check_same_dim(uv, duv)
    n = uv.size
    n2 = float(np.dot(uv, uv))
    if np.sqrt(n2) < degeneracy_threshold(float(np.linalg.norm(duv))):
        return GeomFreqSample(float("nan"), None, float("nan"), False)
    rho = float(np.dot(uv, duv)) / n2
    if n == 1:
        return GeomFreqSample(rho, None, 0.0, True)
    omega = wedge(uv, duv)
    omega = Bivector(n, omega.coeffs / n2)
    return GeomFreqSample(rho, omega, omega.norm, True)


def complex_frequency(u, du) -> Multivector2:
    """Complex frequency of a 2-D velocity sample.

    Scalar part |u|'/|u| = (u1 u1' + u2 u2')/|u|^2, bivector part
    theta' = (u1 u2' - u2 u1')/|u|^2.  Agrees with geometric_frequency
    restricted to two dimensions.  Degenerate |u| yields a NaN multivector.
    """
    uv = _as_vector(u, "u")
    duv = _as_vector(du, "du")
    _check_same_dim(uv, duv)
    if uv.size != 2:
        raise ValueError("complex_frequency expects 2-D vectors")
    n2 = float(uv[0] * uv[0] + uv[1] * uv[1])
    if np.sqrt(n2) < degeneracy_threshold(float(np.linalg.norm(duv))):
        return Multivector2(float("nan"), float("nan"))
    rho = float(uv[0] * duv[0] + uv[1] * duv[1]) / n2
    theta_dot = float(uv[0] * duv[1] - uv[1] * duv[0]) / n2
    return Multivector2(rho, theta_dot)


def batch_geometric_frequency(U: np.ndarray, dU: np.ndarray):
    """Vectorized geometric frequency along a trajectory.

    Parameters
    ----------
    U, dU : (n_samples, dim) arrays of velocities and their derivatives.

    Returns
    -------
    rho, omega_norm : (n_samples,) arrays, NaN where degenerate.
    valid : boolean (n_samples,) array.
    omega2 : signed e1^e2 coefficient array when dim == 2, else None.
    """
    U = np.asarray(U, dtype=float)
    dU = np.asarray(dU, dtype=float)
    if U.ndim != 2 or U.shape != dU.shape:
        raise ValueError("U and dU must be matching (n_samples, dim) arrays")
    n2 = np.einsum("ij,ij->i", U, U)
    unorm = np.sqrt(n2)
    dunorm = np.sqrt(np.einsum("ij,ij->i", dU, dU))
    valid = unorm >= 1e-12 * (1.0 + dunorm)
    safe = np.where(valid, n2, 1.0)
    rho = np.where(valid, np.einsum("ij,ij->i", U, dU) / safe, np.nan)
    dim = U.shape[1]
    if dim == 1:
        return rho, np.where(valid, 0.0, np.nan), valid, None
    rows, cols = _pair_index(dim)
    wsq = np.zeros(U.shape[0])
    omega2 = None
    for i, j in zip(rows, cols):
        cij = U[:, i] * dU[:, j] - U[:, j] * dU[:, i]
        wsq += cij * cij
        if dim == 2:
            omega2 = np.where(valid, cij / safe, np.nan)
    omega_norm = np.where(valid, np.sqrt(wsq) / safe, np.nan)
    return rho, omega_norm, valid, omega2
