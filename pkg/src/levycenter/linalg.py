"""Small-dimension dense linear algebra.

Matrix exponentials, tolerance-based null spaces, orthogonal range/null
decompositions, projections, and the group-averaging construction of a
conjugator that turns a finite matrix group into an orthogonal one.  All
routines are pure functions on float64 arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .validation import as_operator, as_vector

#: Relative singular-value threshold used for rank decisions.
DEFAULT_RANK_TOL = 1e-9


@dataclass(frozen=True)
class Subspace:
    """A linear subspace given by an orthonormal basis.

    ``basis`` has shape (d, k) with orthonormal columns; k may be 0 for the
    trivial subspace.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2:
            raise ValueError(f"basis must be a (d, k) array, got shape {b.shape}")
        if b.shape[1] > 0:
            gram = b.T @ b
            if not np.allclose(gram, np.eye(b.shape[1]), atol=1e-12):
                raise ValueError("basis columns are not orthonormal within 1e-12")
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        """The orthogonal projection matrix onto this subspace."""
        return self.basis @ self.basis.T

    def project(self, v) -> np.ndarray:
        v = as_vector(v, self.ambient_dim)
        if self.dim == 0:
            return np.zeros(self.ambient_dim)
        return self.basis @ (self.basis.T @ v)

    def distance(self, v) -> float:
        """Euclidean distance from ``v`` to the subspace."""
        v = as_vector(v, self.ambient_dim)
        return float(np.linalg.norm(v - self.project(v)))

    def contains(self, v, tol: float = 1e-9) -> bool:
        return self.distance(v) <= tol

    @staticmethod
    def full(dim: int) -> "Subspace":
        return Subspace(np.eye(dim))

    @staticmethod
    def trivial(dim: int) -> "Subspace":
        return Subspace(np.zeros((dim, 0)))

    @staticmethod
    def span(vectors, tol: float = DEFAULT_RANK_TOL) -> "Subspace":
        """Orthonormal basis of the span of the given row vectors (SVD)."""
        rows = np.atleast_2d(np.asarray(vectors, dtype=float))
        if rows.size == 0:
            raise ValueError("span() needs the ambient dimension; pass a (0, d) array")
        u, s, vh = np.linalg.svd(rows, full_matrices=False)
        if s.size == 0 or s[0] == 0.0:
            return Subspace.trivial(rows.shape[1])
        rank = int(np.sum(s > tol * s[0]))
        return Subspace(vh[:rank].T)


def mat_exp(B, t: float = 1.0) -> np.ndarray:
    """Compute exp(t*B) for a square matrix B.

    Uses Pade scaling-and-squaring; raises OverflowError when the result
    leaves the floating-point range.
    """
    B = as_operator(B)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    E = scipy.linalg.expm(t * B)
    if not np.all(np.isfinite(E)):
        raise OverflowError("exp overflow")
    return E


def null_space(T, tol: float = DEFAULT_RANK_TOL) -> Subspace:
    """Orthonormal basis of the (numerical) null space of T.

    Right singular vectors whose singular value is at most ``tol`` times the
    largest one.  The zero matrix yields the full space.
    """
    T = as_operator(T)
    if tol <= 0:
        raise ValueError("tol must be positive")
    u, s, vh = np.linalg.svd(T)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return Subspace.full(T.shape[0])
    mask = s <= tol * smax
    return Subspace(vh[mask].T)


def range_decompose(T, v, tol: float = DEFAULT_RANK_TOL):
    """Decide whether v lies in the range of T and solve T x = v if so.

    The ambient space splits orthogonally into the null space of T* and the
    range of T; ``v`` is accepted as in-range when its component in the
    former has norm at most ``tol * ||v||``.  On success the minimum-norm
    least-squares solution is returned.

    Returns (in_range, solution or None).
    """
    T = as_operator(T)
    v = as_vector(v, T.shape[0])
    if tol <= 0:
        raise ValueError("tol must be positive")
    vnorm = np.linalg.norm(v)
    if vnorm == 0.0:
        return True, np.zeros(T.shape[1])
    u, s, vh = np.linalg.svd(T)
    smax = s[0] if s.size else 0.0
    keep = s > (DEFAULT_RANK_TOL * smax if smax > 0 else 0.0)
    # left singular vectors with kept singular values span the range of T;
    # whatever of v falls on the remaining ones lies in N(T*)
    coeffs = u.T @ v
    out_of_range = float(np.linalg.norm(coeffs[~keep]))
    if out_of_range > tol * vnorm:
        return False, None
    x = vh[keep].T @ (coeffs[keep] / s[keep])
    return True, x


def orthogonal_project(W: Subspace, v) -> np.ndarray:
    """Project v orthogonally onto the subspace W."""
    return W.project(v)


def is_group(ops, tol: float = 1e-9) -> bool:
    """Check closure under products and invertibility of a finite set of matrices."""
    mats = [as_operator(S) for S in ops]
    if not mats:
        return False
    d = mats[0].shape[0]
    for S in mats:
        if S.shape[0] != d:
            return False
        if np.linalg.cond(S) > 1e12:
            return False
    for S in mats:
        for R in mats:
            prod = S @ R
            if min(np.max(np.abs(prod - Q)) for Q in mats) > tol:
                return False
    return True


def orthogonalize_group(ops, tol: float = 1e-9) -> np.ndarray:
    """Conjugator T making every element of a finite matrix group orthogonal.

    T is the symmetric PSD square root of the Gram average
    (1/|G|) sum_S S^T S; for each S in the group, T S T^{-1} is orthogonal
    because the Gram average is invariant under right translation by group
    elements.
    """
    mats = [as_operator(S) for S in ops]
    if not is_group(mats, tol=tol):
        raise ValueError("not a group")
    d = mats[0].shape[0]
    gram = sum(S.T @ S for S in mats) / len(mats)
    w, Q = np.linalg.eigh(gram)
    if np.min(w) <= 0:
        raise ValueError("not a group")  # Gram average of invertibles is PD
    return Q @ np.diag(np.sqrt(w)) @ Q.T


def symmetric_sqrt(M) -> np.ndarray:
    """Symmetric PSD square root of a symmetric PSD matrix."""
    M = as_operator(M)
    w, Q = np.linalg.eigh(0.5 * (M + M.T))
    w = np.clip(w, 0.0, None)
    return Q @ np.diag(np.sqrt(w)) @ Q.T
