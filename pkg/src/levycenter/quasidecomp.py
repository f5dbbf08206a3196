"""Quasi-decomposability structure and strictness centering.

A measure is (a, A)-quasi-decomposable when its a-th convolution power
equals its image under A up to a point mass; the shift of that point mass
is the obstruction to *strict* quasi-decomposability.  This module detects
witnesses, extracts the shift two independent ways, decides whether a
single recentering removes it (the shift must be orthogonal to the
a-eigenspace of the adjoint), and mirrors the same machinery for the
continuous one-parameter (operator-stable) case via the scaling shift flow
and its derivative at the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import quad_vec

from .grids import frequency_grid
from .idmeasure import (
    IdMeasure,
    LevyAtoms,
    charfn,
    conv_power,
    pushforward,
    shift_correction_sum,
    shifted,
    triplet_close,
    triplet_diff,
)
from .levyrep import MixingLevy, OrbitLevy, drift_derivative, mixing_integrate
from .linalg import Subspace, mat_exp, null_space, range_decompose
from .symmetry import SymmetryGroup, fixed_space
from .validation import as_operator, as_vector

#: Orthogonality decision: |(h, w)| <= max(ORTHO_RTOL * |h|, ORTHO_FLOOR).
ORTHO_RTOL = 1e-8
ORTHO_FLOOR = 1e-12

#: Default tolerance for triplet comparisons in witness detection.
WITNESS_TOL = 1e-9

#: Default tolerance for strictness verification after centering.
VERIFY_TOL = 1e-8


@dataclass(frozen=True)
class QdWitness:
    """A verified pair (power, op) together with its shift.

    The defining identity is ``mu^power = op(mu) * dirac(shift)`` for the
    measure the witness was issued against.
    """

    power: float
    op: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        A = as_operator(self.op)
        object.__setattr__(self, "op", A.copy())
        object.__setattr__(self, "shift", as_vector(self.shift, A.shape[0]).copy())
        if not (self.power > 0.0) or self.power == 1.0:
            raise ValueError("power must be positive and different from 1")


@dataclass(frozen=True)
class CenteringResult:
    """Outcome of a strictness-centering attempt.

    ``certificate`` is one of ``solved_shift_equation`` (direct solve),
    ``criterion_discrete`` / ``criterion_continuous`` (decided through a
    seed representation), or ``obstruction``; in the last case
    ``obstruction`` holds a unit vector w in the offending adjoint
    eigenspace with ``pairing = (shift, w)`` responsible for the failure.
    """

    exists: bool
    hhat: np.ndarray | None
    certificate: str
    obstruction: np.ndarray | None = None
    pairing: float | None = None
    details: dict = field(default_factory=dict)


def check_qd(mu: IdMeasure, a: float, A, tol: float = WITNESS_TOL) -> QdWitness | None:
    """Test (a, A)-quasi-decomposability of mu and issue a witness.

    Requires ``a * cov = A cov A^T`` and equality of ``a * atoms`` with the
    image atoms of A as canonical triplets; the witness shift is then read
    off from the pushforward drift.
    """
    if not (a > 0.0) or a == 1.0:
        raise ValueError("a must be positive and different from 1")
    A = as_operator(A, mu.dim)
    image = pushforward(A, mu)
    lhs = conv_power(mu, a)
    cov_dev = np.max(np.abs(lhs.cov - image.cov), initial=0.0)
    if cov_dev > tol * (1.0 + np.max(np.abs(lhs.cov), initial=0.0)):
        return None
    d = triplet_diff(
        IdMeasure(np.zeros(mu.dim), lhs.cov, lhs.atoms),
        IdMeasure(np.zeros(mu.dim), image.cov, image.atoms),
        tol=tol,
    )
    if d.unmatched_mass_left > tol or d.unmatched_mass_right > tol:
        return None
    h = a * mu.shift - image.shift
    witness = QdWitness(a, A, h)
    if not triplet_close(lhs, shifted(image, h), tol=tol):
        return None
    return witness


def qd_shift_formula(mu: IdMeasure, a: float, A) -> np.ndarray:
    """Shift of a quasi-decomposability witness computed in closed form:

        h = a m - A m - sum_v w (|v|^2-|Av|^2)/((1+|Av|^2)(1+|v|^2)) Av.

    Must agree with the pushforward-based shift of :func:`check_qd`; the two
    derivations are kept separate deliberately.
    """
    A = as_operator(A, mu.dim)
    return a * mu.shift - A @ mu.shift - shift_correction_sum(A, mu.atoms)


def _orthogonal_pairings(W: Subspace, h: np.ndarray):
    """Pairings of h against a null-space basis plus the decision threshold."""
    if W.dim == 0:
        return np.zeros(0), max(ORTHO_RTOL * float(np.linalg.norm(h)), ORTHO_FLOOR)
    return W.basis.T @ h, max(ORTHO_RTOL * float(np.linalg.norm(h)), ORTHO_FLOOR)


def center_qd(
    mu: IdMeasure,
    witness: QdWitness,
    rank_tol: float = 1e-9,
    verify_tol: float = VERIFY_TOL,
    verify: bool = True,
) -> CenteringResult:
    """Decide strictness centering for a witness and construct the shift.

    Centering exists iff the witness shift is orthogonal to the null space
    of ``(op^T - power I)``; the centering vector solves
    ``(op - power I) hhat = shift`` (minimum norm).  On success, strictness
    of the recentered measure is verified on triplets and on the frequency
    grid.
    """
    a, A, h = witness.power, witness.op, witness.shift
    W1 = null_space(A.T - a * np.eye(mu.dim), tol=rank_tol)
    pairings, thresh = _orthogonal_pairings(W1, h)
    if pairings.size and np.max(np.abs(pairings)) > thresh:
        j = int(np.argmax(np.abs(pairings)))
        return CenteringResult(
            exists=False,
            hhat=None,
            certificate="obstruction",
            obstruction=W1.basis[:, j],
            pairing=float(pairings[j]),
            details={"threshold": thresh},
        )
    in_range, hhat = range_decompose(A - a * np.eye(mu.dim), h, tol=max(10 * ORTHO_RTOL, 1e-6))
    if not in_range:
        # the orthogonality test is the decision; a range failure here means
        # the input sits exactly on the tolerance boundary
        raise RuntimeError("inconsistent witness: shift passed orthogonality but is not resolvable")
    details = {"threshold": thresh}
    if verify:
        nu = shifted(mu, hhat)
        lhs, rhs = conv_power(nu, a), pushforward(A, nu)
        if not triplet_close(lhs, rhs, tol=verify_tol):
            raise RuntimeError("strictness verification failed on triplets")
        grid = frequency_grid(mu.dim)
        dev = float(np.max(np.abs(charfn(lhs, grid) - charfn(rhs, grid))))
        if dev > verify_tol:
            raise RuntimeError("strictness verification failed on the frequency grid")
        details["charfn_dev"] = dev
        details["triplet_dev"] = triplet_diff(lhs, rhs, tol=verify_tol).max_dev()
    return CenteringResult(True, hhat, "solved_shift_equation", details=details)


def lift_centering(mu: IdMeasure, G: SymmetryGroup, h0, operators=()) -> np.ndarray:
    """Project a single-operator centering onto the group's fixed space.

    If ``h0`` centers mu for one witness operator and mu is universally
    centered with respect to G, the projection onto the fixed space of G
    centers mu for every operator witnessing the same power.  Optional
    ``operators`` are alternative witnesses; they must act identically on
    the result.
    """
    h0 = as_vector(h0, mu.dim)
    P = fixed_space(G).projector()
    hhat = P @ h0
    mats = [as_operator(A, mu.dim) for A in operators]
    for i in range(1, len(mats)):
        dev = np.max(np.abs(mats[i] @ hhat - mats[0] @ hhat))
        if dev > 1e-9 * (1.0 + np.linalg.norm(hhat)):
            raise ValueError("fixed space violated: witness operators disagree on the centering")
    return hhat


def discrete_iterate(h1, c: float, A, n: int) -> np.ndarray:
    """Shift at orbit level n from the level-one shift.

    For n > 0 applies the geometric operator polynomial
    p_n(c, A) = c^{n-1} I + c^{n-2} A + ... + A^{n-1}; for n < 0 the pair
    (1/c, A^{-1}) is used with the level minus-one shift h_{-1} = -(cA)^{-1} h1.
    """
    h1 = as_vector(h1)
    A = as_operator(A, h1.shape[0])
    if n == 0:
        raise ValueError("n must be nonzero")
    if n > 0:
        return _poly_apply(c, A, n, h1)
    if np.linalg.cond(A) > 1e12:
        raise ValueError("singular: negative levels need an invertible operator")
    h_m1 = -np.linalg.solve(c * A, h1)
    return _poly_apply(1.0 / c, np.linalg.inv(A), -n, h_m1)


def _poly_apply(b: float, A: np.ndarray, n: int, v: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(v)
    power = v.copy()
    for k in range(n):
        acc = acc + b ** (n - 1 - k) * power
        power = A @ power
    return acc


def centering_propagates(mu: IdMeasure, c: float, A, h1, n: int) -> bool:
    """Cross-check that solvability at orbit level n forces it at level one.

    Returns the truth of the implication
    ``h_n orthogonal to N(A^{*n} - c^n I)  =>  h_1 orthogonal to N(A^* - cI)``;
    by the geometric-polynomial pairing this must always hold.
    """
    A = as_operator(A, mu.dim)
    h1 = as_vector(h1, mu.dim)
    hn = discrete_iterate(h1, c, A, n)
    An = np.linalg.matrix_power(A, n)
    cn = c**n
    Wn = null_space(An.T - cn * np.eye(mu.dim))
    W1 = null_space(A.T - c * np.eye(mu.dim))
    pn, tn = _orthogonal_pairings(Wn, hn)
    p1, t1 = _orthogonal_pairings(W1, h1)
    ok_n = pn.size == 0 or np.max(np.abs(pn)) <= tn
    ok_1 = p1.size == 0 or np.max(np.abs(p1)) <= t1
    return (not ok_n) or ok_1


# ---------------------------------------------------------------------------
# continuous case


def shift_rate(shift, jumps, B, tol: float = 1e-10) -> np.ndarray:
    """Derivative at the identity of the scaling shift function:

        (I - B) m + int 2(Bu, u)/(1 + |u|^2)^2 u  d(jumps).

    ``jumps`` is either a finite atom list (summed exactly) or a
    :class:`MixingLevy` representation (integrated radially).
    """
    B = as_operator(B)
    m = as_vector(shift, B.shape[0])
    base = m - B @ m
    if isinstance(jumps, LevyAtoms):
        if jumps.n == 0:
            return base
        pts = jumps.points
        sq = np.sum(pts**2, axis=1)
        rate = np.einsum("nd,nd->n", pts @ B.T, pts)
        return base + (jumps.weights * 2.0 * rate / (1.0 + sq) ** 2) @ pts
    if isinstance(jumps, MixingLevy):
        if not np.allclose(jumps.exponent, B, atol=1e-12):
            raise ValueError("the representation exponent must match B")
        return base + mixing_integrate(jumps, drift_derivative(B), tol=tol)
    raise TypeError("jumps must be LevyAtoms or MixingLevy")


@dataclass(frozen=True)
class ShiftFlow:
    """The scaling shift function of a one-parameter decomposable family.

    ``rate`` is the derivative of the shift function at log-scale zero; the
    whole function is recovered from it by :func:`shift_flow`.  ``source``
    records how the rate was obtained (atoms, mixing representation, or
    supplied directly).
    """

    exponent: np.ndarray
    rate: np.ndarray
    base_shift: np.ndarray | None = None
    source: str = "direct"

    def __post_init__(self):
        B = as_operator(self.exponent)
        object.__setattr__(self, "exponent", B.copy())
        object.__setattr__(self, "rate", as_vector(self.rate, B.shape[0]).copy())


def make_shift_flow(shift, jumps, B, tol: float = 1e-10) -> ShiftFlow:
    src = "atoms" if isinstance(jumps, LevyAtoms) else "mixing"
    return ShiftFlow(B, shift_rate(shift, jumps, B, tol=tol), base_shift=as_vector(shift), source=src)


def shift_flow(flow: ShiftFlow, t: float) -> np.ndarray:
    """Evaluate the scaling shift function at log-scale t:

        f(t) = e^t int_0^t exp(s(B - I)) rate ds.

    When (B - I) is invertible this collapses to
    ``exp(tB) v1 - e^t v1`` with ``v1 = (B - I)^{-1} rate``; otherwise the
    integral is evaluated by adaptive quadrature (no spectral restriction).
    """
    B, v0 = flow.exponent, flow.rate
    d = B.shape[0]
    if abs(t) > 50.0 / (1.0 + np.linalg.norm(B, 2)):
        raise ValueError("t out of the supported range")
    if t == 0.0:
        return np.zeros(d)
    BmI = B - np.eye(d)
    svals = np.linalg.svd(BmI, compute_uv=False)
    if svals[-1] > 1e-9 * max(1.0, float(np.linalg.norm(B, 2))):
        v1 = np.linalg.solve(BmI, v0)
        return mat_exp(B, t) @ v1 - math.exp(t) * v1
    lo, hi, sign = (0.0, t, 1.0) if t > 0 else (t, 0.0, -1.0)
    res, _err = quad_vec(lambda s: mat_exp(BmI, s) @ v0, lo, hi, epsabs=1e-13, epsrel=1e-12)
    return math.exp(t) * sign * res


def center_stable(
    flow: ShiftFlow,
    rank_tol: float = 1e-9,
    verify_tol: float = VERIFY_TOL,
) -> CenteringResult:
    """Decide strictness centering for the continuous case.

    Centering exists iff the rate vector is orthogonal to the null space of
    ``(B^T - I)``; the centering ``v1`` solves ``(B - I) v1 = rate`` and is
    verified against the shift-flow values at scales 1/2, 2, and e.  On
    failure the obstruction vector comes with the linear-growth certificate
    ``(f(t), w) = t e^t (rate, w)`` evaluated at t = 1.
    """
    B, v0 = flow.exponent, flow.rate
    d = B.shape[0]
    W2 = null_space(B.T - np.eye(d), tol=rank_tol)
    pairings, thresh = _orthogonal_pairings(W2, v0)
    if pairings.size and np.max(np.abs(pairings)) > thresh:
        j = int(np.argmax(np.abs(pairings)))
        w = W2.basis[:, j]
        cert = {
            "flow_pairing_at_1": float(shift_flow(flow, 1.0) @ w),
            "predicted_linear_growth": float(math.e * (v0 @ w)),
            "threshold": thresh,
        }
        return CenteringResult(False, None, "obstruction", obstruction=w, pairing=float(pairings[j]), details=cert)
    in_range, v1 = range_decompose(B - np.eye(d), v0, tol=max(10 * ORTHO_RTOL, 1e-6))
    if not in_range:
        raise RuntimeError("inconsistent flow: rate passed orthogonality but is not resolvable")
    dev = 0.0
    for t in (0.5, 2.0, math.e):
        lt = math.log(t)
        direct = mat_exp(B, lt) @ v1 - t * v1
        dev = max(dev, float(np.max(np.abs(direct - shift_flow(flow, lt)))))
    if dev > verify_tol:
        raise RuntimeError("centering verification failed against the shift flow")
    return CenteringResult(True, v1, "solved_shift_equation", details={"flow_dev": dev, "threshold": thresh})


# ---------------------------------------------------------------------------
# seed criteria


def criterion(rep, tol: float = 1e-9):
    """Seed-moment criterion for the existence of a strictness centering.

    Pairs the seed first moment against an orthonormal basis of the
    relevant adjoint eigenspace (the a-eigenspace of op^T in the discrete
    case, the fixed space of exponent^T in the continuous case).  The
    centering exists iff every pairing vanishes within ``tol`` times the
    total seed weight.

    Returns ``(satisfied, obstructions)`` with one (vector, value) pair per
    failed basis direction.
    """
    W = _criterion_space(rep)
    sw = float(np.sum(rep.seeds.weights))
    moment = seed_first_moment(rep)
    obstructions = []
    for j in range(W.dim):
        w = W.basis[:, j]
        val = float(moment @ w)
        if abs(val) > tol * max(sw, 1e-300):
            obstructions.append((w, val))
    return len(obstructions) == 0, obstructions


def _criterion_space(rep) -> Subspace:
    if isinstance(rep, OrbitLevy):
        return null_space(rep.op.T - rep.power * np.eye(rep.dim))
    if isinstance(rep, MixingLevy):
        return null_space(rep.exponent.T - np.eye(rep.dim))
    raise TypeError("expected OrbitLevy or MixingLevy")


def seed_first_moment(rep) -> np.ndarray:
    """First moment of the seed measure, sum_s w_s u_s."""
    return rep.seeds.weights @ rep.seeds.points


def criterion_ordinary(rep, mode: str, tol: float = 1e-9) -> bool:
    """Specialized criterion for scalar scaling operators.

    ``mode='semistable'`` requires op = a I (seed set is the annulus
    a < |v| <= 1), ``mode='stable'`` requires exponent = I (seed set is the
    unit sphere); in both cases the criterion reduces to the vanishing of
    the plain seed first moment.
    """
    if mode == "semistable":
        if not isinstance(rep, OrbitLevy) or not np.allclose(
            rep.op, rep.power * np.eye(rep.dim), atol=1e-12
        ):
            raise ValueError("wrong mode: operator is not a times the identity")
    elif mode == "stable":
        if not isinstance(rep, MixingLevy) or not np.allclose(
            rep.exponent, np.eye(rep.dim), atol=1e-12
        ):
            raise ValueError("wrong mode: exponent is not the identity")
    else:
        raise ValueError("mode must be 'semistable' or 'stable'")
    sw = float(np.sum(rep.seeds.weights))
    moment = seed_first_moment(rep)
    return bool(np.max(np.abs(moment), initial=0.0) <= tol * max(sw, 1e-300))


def witness_reciprocal(witness: QdWitness) -> QdWitness:
    """The witness for the reciprocal power: (1/a, A^{-1}, -A^{-1} h / a)."""
    Ainv = np.linalg.inv(witness.op)
    return QdWitness(1.0 / witness.power, Ainv, -(Ainv @ witness.shift) / witness.power)


def with_certificate(result: CenteringResult, certificate: str) -> CenteringResult:
    """Relabel how a result was obtained (used by pipeline front ends)."""
    return replace(result, certificate=certificate)
