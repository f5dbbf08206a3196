"""Symmetry groups of infinitely divisible measures and universal centering.

An operator S is a symmetry of mu when mu equals the image measure S(mu)
convolved with some point mass.  The centering routine produces a single
shift making mu literally invariant under every member of a finite
symmetry group at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import frequency_grid
from .idmeasure import IdMeasure, charfn, pushforward, shifted, triplet_diff
from .linalg import Subspace, orthogonalize_group
from .validation import as_operator, as_vector

#: Hard cap when closing a generated group.
GROUP_CLOSURE_CAP = 4096


@dataclass(frozen=True)
class SymmetryGroup:
    """A finite group of verified symmetries with their witness shifts.

    ``shifts[i]`` is the vector h with mu = elements[i](mu) * dirac(h) for
    the measure the group was issued against.
    """

    elements: tuple
    shifts: tuple
    tol: float = 1e-9

    def __post_init__(self):
        if len(self.elements) != len(self.shifts):
            raise ValueError("one shift per element required")
        if not self.elements:
            raise ValueError("a symmetry group contains at least the identity")
        d = self.elements[0].shape[0]
        object.__setattr__(self, "elements", tuple(as_operator(S, d) for S in self.elements))
        object.__setattr__(self, "shifts", tuple(as_vector(h, d) for h in self.shifts))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(zip(self.elements, self.shifts))


def verify_symmetry(mu: IdMeasure, S, tol: float = 1e-10):
    """Decide whether S is a symmetry of mu and extract its shift.

    S qualifies iff the image measure has the same Gaussian part and the
    same jump atoms; the shift is then the drift mismatch.  Returns
    ``(True, h)`` or ``(False, None)``.
    """
    S = as_operator(S, mu.dim)
    image = pushforward(S, mu)
    diff = triplet_diff(mu, image, tol=tol)
    cov_scale = 1.0 + float(np.max(np.abs(mu.cov), initial=0.0))
    if diff.cov_dev > tol * cov_scale:
        return False, None
    if diff.unmatched_mass_left > tol or diff.unmatched_mass_right > tol:
        return False, None
    h = mu.shift - image.shift
    # the triplet identity implies the characteristic-function identity;
    # evaluate it anyway as a guard against tolerance artifacts
    grid = frequency_grid(mu.dim)
    dev = np.max(np.abs(charfn(mu, grid) - charfn(shifted(image, h), grid)))
    if dev > 1e-8:
        return False, None
    return True, h


def symmetry_group(mu: IdMeasure, operators, tol: float = 1e-9, close: bool = True) -> SymmetryGroup:
    """Build a verified symmetry group from candidate operators.

    The identity is always included; with ``close=True`` the list is closed
    under products (capped at GROUP_CLOSURE_CAP elements).  Raises if any
    candidate, or any product of candidates, fails the symmetry test.
    """
    d = mu.dim
    mats = [as_operator(S, d) for S in operators]
    # candidates are verified before any closure work so that a non-symmetry
    # fails fast instead of generating an unbounded product set
    for S in mats:
        ok, _ = verify_symmetry(mu, S, tol=min(tol, 1e-9))
        if not ok:
            raise ValueError("not symmetries")
    elements = [np.eye(d)]
    for S in mats:
        if not any(np.allclose(S, E, atol=1e-12) for E in elements):
            elements.append(S)
    if close:
        frontier = list(elements)
        while frontier:
            S = frontier.pop()
            for R in list(elements):
                for prod in (S @ R, R @ S):
                    if not any(np.allclose(prod, E, atol=1e-9) for E in elements):
                        elements.append(prod)
                        frontier.append(prod)
                        if len(elements) > GROUP_CLOSURE_CAP:
                            raise ValueError(
                                f"group closure exceeded {GROUP_CLOSURE_CAP} elements"
                            )
    shifts = []
    for S in elements:
        ok, h = verify_symmetry(mu, S, tol=min(tol, 1e-9))
        if not ok:
            raise ValueError("not symmetries")
        shifts.append(h)
    return SymmetryGroup(tuple(elements), tuple(shifts), tol=tol)


def fixed_space(G: SymmetryGroup, tol: float = 1e-9) -> Subspace:
    """Common fixed vectors of all group elements, {v : S v = v for all S}."""
    d = G.dim
    stacked = np.vstack([S - np.eye(d) for S in G.elements])
    u, s, vh = np.linalg.svd(stacked)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return Subspace.full(d)
    mask = s <= tol * smax
    # rows of vh beyond the number of singular values never exist here since
    # stacked has at least d rows
    return Subspace(vh[mask].T)


def universal_center(
    mu: IdMeasure,
    G: SymmetryGroup,
    verify_tol: float = 1e-9,
    conjugator: np.ndarray | None = None,
) -> np.ndarray:
    """Shift h' such that mu * dirac(h') is invariant under every S in G.

    The computation restricts the group to the supporting subspace W of mu,
    conjugates it there into the orthogonal group (group-averaged Gram root,
    unless an explicit ``conjugator`` on W-coordinates is supplied), and
    evaluates

        h' = -(shift + sum_v w * (|v|^2 - |Tv|^2)/((1+|Tv|^2)(1+|v|^2)) * v)

    over the atoms.  The invariance of the centered measure is verified on
    the fixed frequency grid before returning.
    """
    from .idmeasure import ssupp  # local import to keep module load order flat

    for S, _ in G:
        ok, _h = verify_symmetry(mu, S)
        if not ok:
            raise ValueError("not symmetries")
    W, _h0 = ssupp(mu)
    if W.dim == 0:
        h_prime = -mu.shift
    else:
        Q = W.basis
        restricted = []
        for S, _ in G:
            img = S @ Q
            leak = np.linalg.norm(img - Q @ (Q.T @ img))
            if leak > 1e-8 * (1.0 + np.linalg.norm(S)):
                raise ValueError("restriction invalid: a group element does not map the supporting subspace into itself")
            restricted.append(Q.T @ S @ Q)
        T = conjugator if conjugator is not None else orthogonalize_group(restricted)
        if T.shape != (W.dim, W.dim):
            raise ValueError("conjugator must act on supporting-subspace coordinates")
        correction = np.zeros(mu.dim)
        if mu.atoms.n:
            pts = mu.atoms.points
            coords = pts @ Q  # W-coordinates of the atoms
            sq = np.sum(pts**2, axis=1)
            sq_t = np.sum((coords @ T.T) ** 2, axis=1)
            coeff = mu.atoms.weights * (sq - sq_t) / ((1.0 + sq_t) * (1.0 + sq))
            correction = coeff @ pts
        h_prime = -(mu.shift + correction)
    centered = shifted(mu, h_prime)
    grid = frequency_grid(mu.dim)
    base = charfn(centered, grid)
    for S, _ in G:
        dev = np.max(np.abs(base - charfn(pushforward(S, centered), grid)))
        if dev > verify_tol:
            raise RuntimeError(
                f"centering verification failed: charfn deviation {dev:.3e} exceeds {verify_tol:.1e}"
            )
    return h_prime


def centering_deviation(mu: IdMeasure, G: SymmetryGroup, h) -> float:
    """Max charfn deviation over the grid between mu*dirac(h) and its images."""
    centered = shifted(mu, as_vector(h, mu.dim))
    grid = frequency_grid(mu.dim)
    base = charfn(centered, grid)
    dev = 0.0
    for S, _ in G:
        dev = max(dev, float(np.max(np.abs(base - charfn(pushforward(S, centered), grid)))))
    return dev
