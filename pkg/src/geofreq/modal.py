"""Eigenstructure classification and the real block-modal decomposition A = W^-1 G W.

For a diagonalizable real matrix A with r real eigenvalues mu_i and s conjugate
pairs alpha_k +/- beta_k j (r + 2s = n), there is a real invertible W such that

    W A = G W,
    G = blockdiag(mu_1, ..., mu_r, [[a_1, -b_1], [b_1, a_1]], ...).

Rows of W are the real left eigenvectors followed by, for each pair, the real
and imaginary parts of the beta > 0 left eigenvector.  In the transformed
velocity coordinates zeta = W u each block evolves independently and its
complex frequency is exactly the block's eigenvalue: the eigenvalues of A are
the complex frequencies of this (generally non-isometric) transformation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geomalg import Multivector2, complex_frequency, degeneracy_threshold

__all__ = [
    "NonDiagonalizableError",
    "CMatrix2",
    "phi",
    "BlockDesc",
    "Spectrum",
    "RealModalForm",
    "classify_spectrum",
    "real_modal_form",
    "dq_split",
    "block_complex_frequency",
    "verify_xi_dynamics",
]

#: eigenvector-matrix condition number above which A is declared defective
DEFECT_COND_LIMIT = 1.0 / np.sqrt(np.finfo(float).eps)

#: absolute tolerance for matching an eigenvalue with its conjugate
PAIRING_TOL = 1e-8

#: condition number of W above which a warning is attached to the result
ILL_CONDITIONED_W = 1e12


class NonDiagonalizableError(ValueError):
    """Raised when a state matrix has an eigenvalue whose geometric
    multiplicity is smaller than its algebraic multiplicity."""

    def __init__(self, message: str, eigenvalue: complex | None = None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


@dataclass(frozen=True)
class CMatrix2:
    """The 2x2 real matrix [[a, -b], [b, a]] representing a + b*j."""

    a: float
    b: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, -self.b], [self.b, self.a]])

    @property
    def det(self) -> float:
        """Equals |a + b*j|^2."""
        return self.a * self.a + self.b * self.b


def phi(a: float, b: float) -> CMatrix2:
    """Field isomorphism C -> M2(R), a + b*j -> [[a, -b], [b, a]]."""
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("phi requires finite inputs")
    return CMatrix2(float(a), float(b))


@dataclass(frozen=True)
class BlockDesc:
    """One diagonal block of G.

    ``kind`` is "real" (size 1, eigenvalue ``mu``) or "pair" (size 2,
    eigenvalues ``alpha`` +/- ``beta`` j with beta > 0).  ``offset`` is the
    block's starting row/column in G.
    """

    kind: str
    offset: int
    size: int
    alpha: float
    beta: float = 0.0

    @property
    def mu(self) -> float:
        return self.alpha

    def matrix(self) -> np.ndarray:
        if self.kind == "real":
            return np.array([[self.alpha]])
        return np.array([[self.alpha, -self.beta], [self.beta, self.alpha]])


@dataclass(frozen=True)
class Spectrum:
    """Classified eigenstructure of a diagonalizable real matrix.

    ``real_eigs`` holds the r real eigenvalues (descending).  ``pairs`` is an
    (s, 2) array of (alpha_k, beta_k) with beta_k > 0, sorted by alpha then
    beta descending; the conjugate member is implicit.  ``right_eigvecs``
    columns and ``left_eigvecs`` rows are aligned with that ordering (one
    canonical vector per real eigenvalue and per pair) and biorthogonal:
    left[i] . right[:, j] = delta_ij.
    """

    n: int
    real_eigs: np.ndarray
    pairs: np.ndarray
    right_eigvecs: np.ndarray
    left_eigvecs: np.ndarray
    # full internal decomposition (all n modes, conjugates explicit), used by
    # the W construction and the xi-dynamics check
    _lam_full: np.ndarray = field(repr=False, default=None)
    _left_full: np.ndarray = field(repr=False, default=None)
    _right_full: np.ndarray = field(repr=False, default=None)

    @property
    def r(self) -> int:
        return len(self.real_eigs)

    @property
    def s(self) -> int:
        return len(self.pairs)

    def eigenvalues(self) -> np.ndarray:
        """All n eigenvalues in block order, conjugate pairs adjacent
        (beta > 0 member first)."""
        return self._lam_full.copy()


@dataclass(frozen=True)
class RealModalForm:
    """The (W, G) pair with block layout metadata.

    Satisfies W A = G W with G block-diagonal per ``blocks``.  ``residual`` is
    ||W A - G W||_F / ||A||_F.  ``warnings`` carries an ill-conditioning note
    when cond(W) > 1e12.
    """

    W: np.ndarray
    G: np.ndarray
    blocks: tuple[BlockDesc, ...]
    cond_w: float
    residual: float
    warnings: tuple[str, ...] = ()


def _phase_normalize(v: np.ndarray) -> np.ndarray:
    """Unit 2-norm, then rotate so the largest-magnitude component is real
    and positive (lowest index wins ties).  Makes eigenvectors reproducible
    across runs and platforms."""
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v)))
    pivot = v[k]
    if np.abs(pivot) == 0.0:
        return v
    return v * (np.conj(pivot) / np.abs(pivot))


def classify_spectrum(A) -> Spectrum:
    """Eigen-decompose A and classify its spectrum into reals and beta > 0 pairs.

    Raises NonDiagonalizableError when the eigenvector matrix is numerically
    singular (condition number above 1/sqrt(machine eps)), which is how a
    defective eigenvalue manifests in floating point.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be a square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("A contains non-finite entries")
    n = A.shape[0]
    lam, R = np.linalg.eig(A)

    cond = np.linalg.cond(R)
    if not np.isfinite(cond) or cond > DEFECT_COND_LIMIT:
        worst = lam[int(np.argmin(np.abs(lam.imag)))]
        raise NonDiagonalizableError(
            f"matrix is not diagonalizable: eigenvector matrix condition "
            f"number {cond:.3e} exceeds {DEFECT_COND_LIMIT:.3e} "
            f"(defective eigenvalue near {worst:.6g})",
            eigenvalue=complex(worst),
        )

    tol_real = 1e-9 * (1.0 + np.linalg.norm(A))
    real_idx = [i for i in range(n) if abs(lam[i].imag) <= tol_real]
    cplx_idx = [i for i in range(n) if i not in real_idx]

    # pair each beta > 0 eigenvalue with its conjugate
    plus = sorted((i for i in cplx_idx if lam[i].imag > 0), key=lambda i: i)
    used = set()
    pair_map = []
    for i in plus:
        partner = None
        for j in cplx_idx:
            if j in used or j in plus:
                continue
            if abs(lam[j] - np.conj(lam[i])) < PAIRING_TOL:
                partner = j
                break
        if partner is None:
            raise NonDiagonalizableError(
                f"no conjugate partner found for eigenvalue {lam[i]:.6g}",
                eigenvalue=complex(lam[i]),
            )
        used.add(partner)
        pair_map.append((i, partner))
    if len(real_idx) + 2 * len(pair_map) != n:
        raise NonDiagonalizableError("spectrum classification failed: r + 2s != n")

    # deterministic ordering
    real_idx.sort(key=lambda i: -lam[i].real)
    pair_map.sort(key=lambda ij: (-lam[ij[0]].real, -lam[ij[0]].imag))

    # canonical eigenvector columns; real eigenvectors are stored exactly real
    cols = []
    lam_full = []
    for i in real_idx:
        v = _phase_normalize(R[:, i]).real
        v = v / np.linalg.norm(v)
        cols.append(v.astype(complex))
        lam_full.append(complex(lam[i].real))
    for i, j in pair_map:
        v = _phase_normalize(R[:, i])
        cols.append(v)
        cols.append(np.conj(v))
        lam_full.append(complex(lam[i]))
        lam_full.append(complex(np.conj(lam[i])))

    right_full = np.column_stack(cols)
    left_full = np.linalg.inv(right_full)
    lam_full = np.array(lam_full)

    r = len(real_idx)
    canon = list(range(r)) + [r + 2 * k for k in range(len(pair_map))]
    real_eigs = lam_full[:r].real.copy()
    pairs = np.array(
        [[lam_full[r + 2 * k].real, lam_full[r + 2 * k].imag] for k in range(len(pair_map))]
    ).reshape(len(pair_map), 2)

    return Spectrum(
        n=n,
        real_eigs=real_eigs,
        pairs=pairs,
        right_eigvecs=right_full[:, canon].copy(),
        left_eigvecs=left_full[canon, :].copy(),
        _lam_full=lam_full,
        _left_full=left_full,
        _right_full=right_full,
    )


def _blocks_from_spectrum(spec: Spectrum) -> tuple[BlockDesc, ...]:
    blocks = []
    off = 0
    for mu in spec.real_eigs:
        blocks.append(BlockDesc("real", off, 1, float(mu)))
        off += 1
    for alpha, beta in spec.pairs:
        blocks.append(BlockDesc("pair", off, 2, float(alpha), float(beta)))
        off += 2
    return tuple(blocks)


def real_modal_form(A) -> RealModalForm:
    """Build the real similarity W A = G W from the left eigenvectors of A.

    W rows: real left eigenvectors first, then Re and Im of the beta > 0 left
    eigenvector of each conjugate pair.  G carries 1x1 blocks [mu_i] followed
    by 2x2 blocks [[alpha, -beta], [beta, alpha]] in the Spectrum ordering.
    """
    A = np.asarray(A, dtype=float)
    spec = classify_spectrum(A)
    n = spec.n
    blocks = _blocks_from_spectrum(spec)

    W = np.zeros((n, n))
    G = np.zeros((n, n))
    row = 0
    for b in blocks:
        if b.kind == "real":
            W[row] = spec._left_full[row].real
            G[row, row] = b.alpha
            row += 1
        else:
            lk = spec._left_full[row]
            W[row] = lk.real
            W[row + 1] = lk.imag
            G[row : row + 2, row : row + 2] = b.matrix()
            row += 2

    cond_w = float(np.linalg.cond(W))
    denom = np.linalg.norm(A)
    residual = float(np.linalg.norm(W @ A - G @ W) / (denom if denom > 0 else 1.0))
    warnings = ()
    if cond_w > ILL_CONDITIONED_W:
        warnings = (f"W is ill-conditioned: cond(W) = {cond_w:.3e} > 1e12",)
    return RealModalForm(W=W, G=G, blocks=blocks, cond_w=cond_w, residual=residual, warnings=warnings)


def dq_split(G_block) -> tuple[np.ndarray, np.ndarray]:
    """Split a canonical 2x2 pair block into decay and rotation generators.

    D = (G + G^T)/2 = alpha*I carries the radial decay, Q = G - D =
    [[0, -beta], [beta, 0]] the rotation; D + Q = G exactly.  Inputs that are
    not of the form [[alpha, -beta], [beta, alpha]] are rejected.
    """
    G = np.asarray(G_block, dtype=float)
    if G.shape != (2, 2):
        raise ValueError("dq_split expects a 2x2 block")
    tol = 1e-9 * (1.0 + np.abs(G).max())
    if abs(G[0, 0] - G[1, 1]) > tol or abs(G[0, 1] + G[1, 0]) > tol:
        raise ValueError("block is not of the canonical form [[a, -b], [b, a]]")
    D = 0.5 * (G + G.T)
    Q = G - D
    return D, Q


def block_complex_frequency(block: BlockDesc, zeta, dzeta) -> Multivector2:
    """Complex frequency of one transformed modal block sample.

    For a 1x1 block this is (zeta'/zeta, 0); for a 2x2 block it is the plain
    2-D complex frequency.  When dzeta = G_block . zeta the result equals the
    block's (mu, 0) or (alpha, beta) up to roundoff, for any nonzero zeta.
    Degenerate |zeta| yields a NaN multivector.
    """
    z = np.atleast_1d(np.asarray(zeta, dtype=float))
    dz = np.atleast_1d(np.asarray(dzeta, dtype=float))
    if z.shape != (block.size,) or dz.shape != (block.size,):
        raise ValueError(f"zeta must match block size {block.size}")
    if block.kind == "real":
        if abs(z[0]) < degeneracy_threshold(abs(dz[0])):
            return Multivector2(float("nan"), float("nan"))
        return Multivector2(float(dz[0] / z[0]), 0.0)
    return complex_frequency(z, dz)


def verify_xi_dynamics(A, trajectory) -> float:
    """Check the mode-coordinate dynamics xi' = Lambda xi along a trajectory.

    xi = U u where rows of U are the (full) left eigenvectors of A, and
    xi' = U u'.  Returns the maximum over samples of
    ||xi' - Lambda xi|| / (1 + ||Lambda xi||).  The trajectory must satisfy
    u' = A u (velocities/accelerations as produced by dynsys.integrate).
    """
    A = np.asarray(A, dtype=float)
    spec = classify_spectrum(A)
    U = np.asarray(trajectory.velocities, dtype=float)
    dU = np.asarray(trajectory.accelerations, dtype=float)
    xi = U @ spec._left_full.T
    dxi = dU @ spec._left_full.T
    target = xi * spec._lam_full[None, :]
    num = np.linalg.norm(dxi - target, axis=1)
    den = 1.0 + np.linalg.norm(target, axis=1)
    return float(np.max(num / den))
