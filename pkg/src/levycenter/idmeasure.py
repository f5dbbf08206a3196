"""Infinitely divisible measures as triplets with finite atomic jump parts.

A measure is stored as ``[shift, cov, atoms]``: a drift vector, a Gaussian
covariance operator, and a finite list of weighted jump atoms playing the
role of the spectral jump measure.  All algebra (pushforward, convolution,
convolution powers) is exact on this representation, which is what makes
the strictness checks in the rest of the package decidable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import Subspace
from .validation import as_operator, as_vector

#: Absolute distance below which two atom locations are considered identical.
MERGE_TOL = 1e-12

#: Default tolerance for triplet comparisons.
TRIPLET_TOL = 1e-10

#: Relative slack used next to absolute tolerances when comparing large
#: components (orbit materializations produce weights and points spanning
#: many orders of magnitude; exact algebra still agrees to machine precision
#: in the relative sense).
REL_SLACK = 1e-12


@dataclass(frozen=True)
class LevyAtoms:
    """Finite list of weighted atoms on V minus the origin.

    ``points`` has shape (n, d), ``weights`` shape (n,); weights are strictly
    positive and no point is the origin.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if pts.ndim != 2:
            raise ValueError(f"points must be (n, d), got shape {pts.shape}")
        if w.shape != (pts.shape[0],):
            raise ValueError("weights must match the number of points")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(w))):
            raise ValueError("atoms contain non-finite values")
        if np.any(w <= 0):
            raise ValueError("atom weights must be positive")
        if pts.shape[0] and np.any(np.linalg.norm(pts, axis=1) == 0.0):
            raise ValueError("atoms must avoid the origin")
        object.__setattr__(self, "points", pts.copy())
        object.__setattr__(self, "weights", w.copy())

    @staticmethod
    def empty(dim: int) -> "LevyAtoms":
        return LevyAtoms(np.zeros((0, dim)), np.zeros(0))

    @staticmethod
    def from_pairs(pairs, dim: int | None = None) -> "LevyAtoms":
        pairs = list(pairs)
        if not pairs:
            if dim is None:
                raise ValueError("dim required for an empty atom list")
            return LevyAtoms.empty(dim)
        pts = np.array([as_vector(p) for p, _ in pairs])
        w = np.array([float(x) for _, x in pairs])
        return LevyAtoms(pts, w)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def mass_weights(self) -> np.ndarray:
        """Integrability masses w * |v|^2 / (1 + |v|^2) per atom."""
        sq = np.sum(self.points**2, axis=1)
        return self.weights * sq / (1.0 + sq)

    def total_mass(self) -> float:
        return float(np.sum(self.mass_weights()))

    def scaled(self, a: float) -> "LevyAtoms":
        return LevyAtoms(self.points, a * self.weights)

    def mapped(self, A) -> "LevyAtoms":
        """Image atoms under a linear map; atoms sent to the origin are dropped.

        Dropping is exact: an atom at the origin contributes nothing to the
        characteristic exponent or to the pushforward shift correction.
        """
        A = as_operator(A, self.dim)
        pts = self.points @ A.T
        keep = np.linalg.norm(pts, axis=1) > 0.0
        return LevyAtoms(pts[keep], self.weights[keep])

    def merged(self, other: "LevyAtoms") -> "LevyAtoms":
        """Concatenate two atom lists, summing weights of coincident points."""
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        pts = np.vstack([self.points, other.points])
        w = np.concatenate([self.weights, other.weights])
        return _merge_close(pts, w)

    def canonical(self) -> "LevyAtoms":
        """Atoms sorted lexicographically by location (deterministic order)."""
        if self.n == 0:
            return self
        order = np.lexsort(self.points.T[::-1])
        return LevyAtoms(self.points[order], self.weights[order])


def _merge_close(pts: np.ndarray, w: np.ndarray) -> LevyAtoms:
    if pts.shape[0] == 0:
        return LevyAtoms(pts, w)
    reps: list[np.ndarray] = []
    acc: list[float] = []
    for p, wi in zip(pts, w):
        hit = False
        for j, r in enumerate(reps):
            if np.max(np.abs(p - r)) <= MERGE_TOL * (1.0 + np.linalg.norm(r)):
                acc[j] += wi
                hit = True
                break
        if not hit:
            reps.append(p)
            acc.append(wi)
    return LevyAtoms(np.array(reps), np.array(acc)).canonical()


@dataclass(frozen=True)
class IdMeasure:
    """Infinitely divisible measure ``[shift, cov, atoms]``."""

    shift: np.ndarray
    cov: np.ndarray
    atoms: LevyAtoms

    def __post_init__(self):
        m = as_vector(self.shift)
        D = as_operator(self.cov, m.shape[0])
        if self.atoms.dim != m.shape[0]:
            raise ValueError("atom dimension does not match the shift")
        if np.max(np.abs(D - D.T), initial=0.0) > 1e-12:
            raise ValueError("covariance must be symmetric within 1e-12")
        if np.linalg.eigvalsh(0.5 * (D + D.T)).min() < -1e-10:
            raise ValueError("covariance must be positive semidefinite")
        object.__setattr__(self, "shift", m.copy())
        object.__setattr__(self, "cov", D.copy())

    @property
    def dim(self) -> int:
        return self.shift.shape[0]

    def canonical(self) -> "IdMeasure":
        return IdMeasure(self.shift, self.cov, self.atoms.canonical())


def dirac(h) -> IdMeasure:
    """Point mass at h."""
    h = as_vector(h)
    d = h.shape[0]
    return IdMeasure(h, np.zeros((d, d)), LevyAtoms.empty(d))


def gaussian(shift, cov) -> IdMeasure:
    cov = as_operator(cov)
    return IdMeasure(as_vector(shift, cov.shape[0]), cov, LevyAtoms.empty(cov.shape[0]))


def lk_exponent(mu: IdMeasure, u):
    """Characteristic exponent log phi(u); vectorized over rows of ``u``.

    The jump compensator uses the bounded centering v / (1 + |v|^2), so the
    exponent of a convolution power scales linearly and no branch ambiguity
    arises when exponentiating.
    """
    U = np.atleast_2d(np.asarray(u, dtype=float))
    if U.shape[1] != mu.dim:
        raise ValueError("frequency dimension mismatch")
    out = 1j * (U @ mu.shift)
    out = out - 0.5 * np.einsum("md,de,me->m", U, mu.cov, U)
    if mu.atoms.n:
        pts = mu.atoms.points
        sq = np.sum(pts**2, axis=1)
        phases = U @ pts.T  # (m, n)
        comp = np.exp(1j * phases) - 1.0 - 1j * phases / (1.0 + sq)[None, :]
        out = out + comp @ mu.atoms.weights
    if np.asarray(u).ndim == 1:
        return complex(out[0])
    return out


def charfn(mu: IdMeasure, u):
    """Characteristic function phi(u) = exp(lk_exponent(mu, u))."""
    val = np.exp(lk_exponent(mu, u))
    return val


def pushforward(A, mu: IdMeasure) -> IdMeasure:
    """Image measure under the linear map A.

    The triplet maps to ``[m', A cov A^T, A atoms]`` where the shift picks up
    the compensator correction

        m' = A m + sum_v w * (|v|^2 - |Av|^2) / ((1+|Av|^2)(1+|v|^2)) * Av,

    which is exactly what makes charfn(pushforward(A, mu), u) equal to
    charfn(mu, A^T u).
    """
    A = as_operator(A, mu.dim)
    m1 = A @ mu.shift + shift_correction_sum(A, mu.atoms)
    return IdMeasure(m1, A @ mu.cov @ A.T, mu.atoms.mapped(A))


def shift_correction_sum(A: np.ndarray, atoms: LevyAtoms) -> np.ndarray:
    """sum_v w * (|v|^2 - |Av|^2)/((1+|Av|^2)(1+|v|^2)) * Av over the atoms."""
    if atoms.n == 0:
        return np.zeros(A.shape[0])
    pts = atoms.points
    img = pts @ A.T
    sq = np.sum(pts**2, axis=1)
    sq_img = np.sum(img**2, axis=1)
    coeff = atoms.weights * (sq - sq_img) / ((1.0 + sq_img) * (1.0 + sq))
    return coeff @ img


def convolve(mu: IdMeasure, nu: IdMeasure) -> IdMeasure:
    if mu.dim != nu.dim:
        raise ValueError("dimension mismatch")
    return IdMeasure(mu.shift + nu.shift, mu.cov + nu.cov, mu.atoms.merged(nu.atoms))


def conv_power(mu: IdMeasure, a: float) -> IdMeasure:
    """Convolution power mu^a for a > 0 (all triplet components scale by a)."""
    if not (a > 0):
        raise ValueError("power must be positive")
    return IdMeasure(a * mu.shift, a * mu.cov, mu.atoms.scaled(a))


def shifted(mu: IdMeasure, h) -> IdMeasure:
    """mu convolved with the point mass at h."""
    return IdMeasure(mu.shift + as_vector(h, mu.dim), mu.cov, mu.atoms)


def ssupp(mu: IdMeasure, tol: float = 1e-9):
    """Supporting subspace of mu and the shift recentring mu onto it.

    Returns ``(W, h0)`` where W is spanned by the Gaussian range together
    with the atom locations, and ``mu * dirac(h0)`` is concentrated (and
    full) on W.  Directions are compared scale-free, so a tiny but genuine
    Gaussian direction still counts.
    """
    rows = []
    w, Q = np.linalg.eigh(0.5 * (mu.cov + mu.cov.T))
    wmax = float(np.max(np.abs(w), initial=0.0))
    for lam, q in zip(w, Q.T):
        if wmax > 0 and lam > tol * wmax:
            rows.append(q)
    for p in mu.atoms.points:
        rows.append(p / np.linalg.norm(p))
    if not rows:
        W = Subspace.trivial(mu.dim)
    else:
        W = Subspace.span(np.array(rows), tol=tol)
    h0 = -(mu.shift - W.project(mu.shift))
    return W, h0


@dataclass
class TripletDiff:
    """Componentwise comparison of two canonical triplets."""

    shift_dev: float
    cov_dev: float
    matched_point_dev: float
    matched_weight_dev: float
    unmatched_mass_left: float
    unmatched_mass_right: float
    unmatched_left: LevyAtoms = field(repr=False)
    unmatched_right: LevyAtoms = field(repr=False)

    def max_dev(self) -> float:
        return max(
            self.shift_dev,
            self.cov_dev,
            self.matched_point_dev,
            self.matched_weight_dev,
            self.unmatched_mass_left,
            self.unmatched_mass_right,
        )


def triplet_diff(mu: IdMeasure, nu: IdMeasure, tol: float = TRIPLET_TOL) -> TripletDiff:
    """Match the two atom lists and report deviations component by component.

    Atoms pair up when their locations agree within ``tol`` (plus relative
    slack for large points) and their weights agree in the same mixed
    absolute/relative sense; leftovers are reported with their integrability
    mass, so boundary atoms of truncated orbit expansions show up as a small
    unmatched mass rather than as a hard mismatch.
    """
    if mu.dim != nu.dim:
        raise ValueError("dimension mismatch")
    a = mu.atoms.canonical()
    b = nu.atoms.canonical()
    used = np.zeros(b.n, dtype=bool)
    pt_dev = 0.0
    w_dev = 0.0
    left_unmatched = []
    for i in range(a.n):
        p, wi = a.points[i], a.weights[i]
        scale_p = tol * (1.0 + np.linalg.norm(p)) + REL_SLACK * np.linalg.norm(p)
        best, best_dist = -1, np.inf
        for j in range(b.n):
            if used[j]:
                continue
            dist = np.linalg.norm(p - b.points[j])
            if dist < best_dist:
                best, best_dist = j, dist
        wj = b.weights[best] if best >= 0 else np.nan
        if (
            best >= 0
            and best_dist <= scale_p
            and abs(wi - wj) <= tol * (1.0 + abs(wi)) + REL_SLACK * abs(wi)
        ):
            used[best] = True
            pt_dev = max(pt_dev, best_dist / (1.0 + np.linalg.norm(p)))
            w_dev = max(w_dev, abs(wi - wj) / (1.0 + abs(wi)))
        else:
            left_unmatched.append(i)
    left = LevyAtoms(a.points[left_unmatched], a.weights[left_unmatched]) if left_unmatched else LevyAtoms.empty(a.dim)
    right = LevyAtoms(b.points[~used], b.weights[~used]) if not np.all(used) else LevyAtoms.empty(b.dim)
    return TripletDiff(
        shift_dev=float(np.max(np.abs(mu.shift - nu.shift), initial=0.0)),
        cov_dev=float(np.max(np.abs(mu.cov - nu.cov), initial=0.0)),
        matched_point_dev=pt_dev,
        matched_weight_dev=w_dev,
        unmatched_mass_left=left.total_mass(),
        unmatched_mass_right=right.total_mass(),
        unmatched_left=left,
        unmatched_right=right,
    )


def triplet_close(mu: IdMeasure, nu: IdMeasure, tol: float = TRIPLET_TOL) -> bool:
    """Decidable surrogate for equality of measures, see :func:`triplet_diff`."""
    d = triplet_diff(mu, nu, tol=tol)
    return (
        d.shift_dev <= tol * (1.0 + float(np.linalg.norm(mu.shift)))
        and d.cov_dev <= tol * (1.0 + float(np.max(np.abs(mu.cov), initial=0.0)))
        and d.unmatched_mass_left <= tol
        and d.unmatched_mass_right <= tol
    )
