"""Semi-analytic jump-measure representations.

Two ways to describe an infinite jump measure by finitely many seeds:

* :class:`OrbitLevy` -- the discrete (semistable) case.  Seeds live on the
  annulus ``{|v| <= 1 < |A^{-1}v|}`` and the full measure is the doubly
  infinite orbit sum with weights ``a^{-n}`` along ``A^n``.
* :class:`MixingLevy` -- the continuous (stable) case.  Seeds live on the
  unit-sphere exit set of the flow ``t^B`` and the full measure integrates
  them radially along the flow with weight ``dt/t^2``.

Integration against either representation is done with certified tail
truncation: every supported integrand kind carries an explicit envelope
``C * min(|u|^2, 1)`` from which the truncation level is derived.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .idmeasure import LevyAtoms
from .linalg import Subspace, mat_exp
from .validation import as_operator, as_vector

#: Absolute seed distance to the admissible invariant subspace.
SUPPORT_TOL = 1e-9

#: Slack for the closed/open membership inequalities of the seed sets.
MEMBER_TOL = 1e-12

_DIVERGENT_CAP = 10_000


# ---------------------------------------------------------------------------
# integrand registry


@dataclass(frozen=True)
class Integrand:
    """A named integrand with a registered envelope bound.

    kind:
      * ``levy_mass``          -- |u|^2 / (1 + |u|^2), scalar.
      * ``shift_correction``   -- (|u|^2-|Au|^2)/((1+|Au|^2)(1+|u|^2)) * Au,
                                  the pushforward drift correction.
      * ``compensator_gap``    -- (1/(1+|Au|^2) - 1/(1+|u|^2)) * u, the same
                                  correction paired against u instead of Au.
      * ``drift_derivative``   -- 2(Bu,u)/(1+|u|^2)^2 * u, the derivative of
                                  the drift correction along the flow of B.
      * ``seed_pairing``       -- (u, w) integrated over the seed measure
                                  itself (the strictness criterion pairing),
                                  never orbit-expanded.
    """

    kind: str
    operator: np.ndarray | None = None
    vector: np.ndarray | None = None


def levy_mass() -> Integrand:
    return Integrand("levy_mass")


def shift_correction(A) -> Integrand:
    return Integrand("shift_correction", operator=as_operator(A))


def compensator_gap(A) -> Integrand:
    return Integrand("compensator_gap", operator=as_operator(A))


def drift_derivative(B) -> Integrand:
    return Integrand("drift_derivative", operator=as_operator(B))


def seed_pairing(w) -> Integrand:
    return Integrand("seed_pairing", vector=as_vector(w))


def _envelope_constant(f: Integrand) -> float:
    """C with |f(u)| <= C * min(|u|^2, 1); raises for unregistered kinds."""
    if f.kind == "levy_mass":
        return 1.0
    if f.kind == "shift_correction":
        na = np.linalg.norm(f.operator, 2)
        return max(na * (1.0 + na**2), 0.5 * (1.0 + na))
    if f.kind == "compensator_gap":
        na = np.linalg.norm(f.operator, 2)
        ninv = np.linalg.norm(np.linalg.inv(f.operator), 2)
        return max(1.0 + na**2, ninv**2 + 0.5)
    if f.kind == "drift_derivative":
        return 2.0 * np.linalg.norm(f.operator, 2)
    raise ValueError(f"tail bound unavailable for integrand kind {f.kind!r}")


def _evaluate(f: Integrand, pts: np.ndarray):
    """Evaluate f on rows of pts; returns shape (n,) or (n, d)."""
    sq = np.sum(pts**2, axis=1)
    if f.kind == "levy_mass":
        return sq / (1.0 + sq)
    if f.kind == "shift_correction":
        img = pts @ f.operator.T
        sq_img = np.sum(img**2, axis=1)
        return ((sq - sq_img) / ((1.0 + sq_img) * (1.0 + sq)))[:, None] * img
    if f.kind == "compensator_gap":
        img = pts @ f.operator.T
        sq_img = np.sum(img**2, axis=1)
        return (1.0 / (1.0 + sq_img) - 1.0 / (1.0 + sq))[:, None] * pts
    if f.kind == "drift_derivative":
        rate = np.einsum("nd,nd->n", pts @ f.operator.T, pts)
        return (2.0 * rate / (1.0 + sq) ** 2)[:, None] * pts
    raise ValueError(f"unknown integrand kind {f.kind!r}")


def _seed_pairing_value(seeds: LevyAtoms, w: np.ndarray) -> float:
    return float(seeds.weights @ (seeds.points @ w))


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True)
class OrbitLevy:
    """Discrete-case jump measure: seeds on Z_A swept along the orbit of A.

    ``power`` is the convolution ratio a in (0, 1); ``op`` is an invertible
    contraction.  Unless ``validate`` is false, construction enforces seed
    membership in ``Z_A = {|v| <= 1 < |A^{-1}v|}`` and the support
    constraint: seeds must lie on the invariant subspace of ``op`` whose
    spectrum satisfies |z|^2 < a (the rest of the spectrum carries no jump
    mass).
    """

    seeds: LevyAtoms
    op: np.ndarray
    power: float
    validate: bool = True

    def __post_init__(self):
        A = as_operator(self.op, self.seeds.dim)
        object.__setattr__(self, "op", A.copy())
        object.__setattr__(self, "power", float(self.power))
        if not self.validate:
            return
        if not (0.0 < self.power < 1.0):
            raise ValueError("power_range: the convolution ratio must lie in (0, 1)")
        if np.linalg.norm(A, 2) >= 1.0:
            raise ValueError("operator_contraction: the operator norm must be < 1")
        if np.linalg.cond(A) > 1e12:
            raise ValueError("operator_invertible: the operator must be invertible")
        if self.seeds.n:
            norms = np.linalg.norm(self.seeds.points, axis=1)
            if np.any(norms > 1.0 + MEMBER_TOL):
                raise ValueError("seed_norm: seeds must satisfy |v| <= 1")
            pre = np.linalg.norm(self.seeds.points @ np.linalg.inv(A).T, axis=1)
            if np.any(pre <= 1.0 - MEMBER_TOL):
                raise ValueError("seed_annulus: seeds must satisfy |A^{-1} v| > 1")
        rep = validate_spectral_support(self)
        if not rep.passed:
            raise ValueError(
                "spectral_support: seeds leave the admissible invariant subspace "
                f"(max distance {rep.max_distance:.3e})"
            )

    @property
    def dim(self) -> int:
        return self.seeds.dim


@dataclass(frozen=True)
class MixingLevy:
    """Continuous-case jump measure: unit seeds integrated along exp(t*B).

    Seeds must sit on the exit set ``L_B`` (unit norm, flowing strictly
    outward), and the spectrum of the exponent must stay in the half plane
    Re z >= 1/2 so the radial integral converges near the origin.
    """

    seeds: LevyAtoms
    exponent: np.ndarray
    validate: bool = True

    def __post_init__(self):
        B = as_operator(self.exponent, self.seeds.dim)
        object.__setattr__(self, "exponent", B.copy())
        if not self.validate:
            return
        eigs = np.linalg.eigvals(B)
        if self.seeds.n and np.min(eigs.real) < 0.5 + 1e-9:
            raise ValueError(
                "spectral_halfplane: exponent eigenvalues need real part >= 1/2"
            )
        if self.seeds.n:
            norms = np.linalg.norm(self.seeds.points, axis=1)
            if np.max(np.abs(norms - 1.0)) > MEMBER_TOL:
                raise ValueError("seed_norm: seeds must have unit norm")
            outward = np.einsum(
                "nd,nd->n", self.seeds.points @ B.T, self.seeds.points
            )
            if np.any(outward <= 0.0):
                raise ValueError("outward_derivative: seeds must flow outward at t = 1")
            for t in (2.0, 4.0, 8.0):
                flowed = self.seeds.points @ mat_exp(B, math.log(t)).T
                if np.any(np.linalg.norm(flowed, axis=1) <= 1.0):
                    raise ValueError(
                        f"radial_escape: a seed re-enters the unit ball at t = {t:g}"
                    )

    @property
    def dim(self) -> int:
        return self.seeds.dim


@dataclass(frozen=True)
class SupportReport:
    passed: bool
    max_distance: float
    subspace: Subspace


def validate_spectral_support(rep) -> SupportReport:
    """Check that all seeds lie on the admissible invariant subspace.

    For an orbit representation the subspace collects the generalized
    eigenspaces of the operator with |z|^2 < a; for a mixing representation
    those of the exponent with Re z > 1/2.  Seeds may sit at most
    SUPPORT_TOL away from it.
    """
    import scipy.linalg

    if isinstance(rep, OrbitLevy):
        A, thresh = rep.op, rep.power
        select = lambda re, im: re * re + im * im < thresh * (1.0 - 1e-12)
    elif isinstance(rep, MixingLevy):
        A = rep.exponent
        select = lambda re, im: re > 0.5
    else:
        raise TypeError("expected OrbitLevy or MixingLevy")
    _t, Z, k = scipy.linalg.schur(A, output="real", sort=select)
    X = Subspace(Z[:, :k]) if k else Subspace.trivial(A.shape[0])
    if rep.seeds.n == 0:
        return SupportReport(True, 0.0, X)
    proj = rep.seeds.points @ X.basis @ X.basis.T if k else np.zeros_like(rep.seeds.points)
    dist = float(np.max(np.linalg.norm(rep.seeds.points - proj, axis=1)))
    return SupportReport(dist <= SUPPORT_TOL, dist, X)


# ---------------------------------------------------------------------------
# integration


def orbit_integrate(rep: OrbitLevy, f: Integrand, tol: float = 1e-10):
    """Integrate f against the full orbit measure within ``tol``.

    Sums ``a^{-n} * sum_s w_s f(A^n u_s)`` over a window of orbit indices
    grown until the envelope tail bound drops below tol/4 on each side.  The
    backward tail is geometric with ratio a; the forward tail contracts at
    the certified rate |A|^2/a when that is below one and at the observed
    rate otherwise.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if f.kind == "seed_pairing":
        return _seed_pairing_value(rep.seeds, as_vector(f.vector, rep.dim))
    C = _envelope_constant(f)
    a, A = rep.power, rep.op
    W, U0 = rep.seeds.weights, rep.seeds.points
    scalar = f.kind == "levy_mass"
    total = 0.0 if scalar else np.zeros(rep.dim)
    if rep.seeds.n == 0:
        return total
    sw = float(np.sum(W))

    # backward side (n <= -1): weights a^{|n|} decay geometrically while the
    # envelope min-term is capped at 1, so C*sw*a^{N+1}/(1-a) bounds the tail
    n_back = max(8, math.ceil(math.log(tol * (1.0 - a) / (4.0 * C * sw)) / math.log(a)))
    Ainv = np.linalg.inv(A)
    pts = U0
    for kk in range(1, n_back + 1):
        pts = pts @ Ainv.T
        total = total + (a**kk) * (W @ _evaluate(f, pts))

    # forward side: seeds satisfy |u| <= 1, so the envelope stays in the
    # quadratic regime and contracts by |A|^2 per step against a gain of 1/a
    r_cert = np.linalg.norm(A, 2) ** 2 / a
    pts = U0
    n = 0
    ratios: list[float] = []
    prev_bound = None
    while True:
        total = total + (a ** (-n)) * (W @ _evaluate(f, pts))
        bound = (a ** (-n)) * C * float(W @ np.minimum(np.sum(pts**2, axis=1), 1.0))
        if prev_bound is not None and prev_bound > 0:
            ratios.append(bound / prev_bound)
        prev_bound = bound
        if n >= 8:
            if r_cert < 1.0 and bound * r_cert / (1.0 - r_cert) < tol / 4.0:
                break
            if len(ratios) >= 3:
                r_obs = max(ratios[-3:])
                if r_obs < 1.0 and bound * r_obs / (1.0 - r_obs) < tol / 4.0:
                    break
        n += 1
        if n > _DIVERGENT_CAP:
            raise RuntimeError("divergent: forward orbit tail does not contract")
        pts = pts @ A.T
    return total


def mixing_integrate(rep: MixingLevy, f: Integrand, tol: float = 1e-10):
    """Integrate f against the full radial measure within ``2 * tol``.

    Computes ``sum_s w_s int f(exp(tB) u_s) e^{-t} dt`` by adaptive
    Gauss-Kronrod quadrature on a truncated window.  The forward cutoff
    comes from the hard bound C e^{-T}; the backward cutoff starts from the
    spectral decay rate 2*min Re sp(B) - 1 and is then confirmed (and grown
    if needed) against the actual envelope values.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if f.kind == "seed_pairing":
        return _seed_pairing_value(rep.seeds, as_vector(f.vector, rep.dim))
    C = _envelope_constant(f)
    B = rep.exponent
    W, U0 = rep.seeds.weights, rep.seeds.points
    scalar = f.kind == "levy_mass"
    if rep.seeds.n == 0:
        return 0.0 if scalar else np.zeros(rep.dim)
    c_env = C * float(np.sum(W))

    t_plus = max(12.0, math.log(4.0 * c_env / tol))

    def back_log_env(T: float) -> float:
        # log of e^T * C * sum_s w_s min(|e^{-TB} u_s|^2, 1); -inf on underflow
        flowed = U0 @ mat_exp(B, -T).T
        msum = float(W @ np.minimum(np.sum(flowed**2, axis=1), 1.0))
        if msum == 0.0:
            return -math.inf
        return T + math.log(C * msum)

    rate = 2.0 * float(np.min(np.linalg.eigvals(B).real)) - 1.0
    if rate <= 1e-12:
        raise RuntimeError("divergent: exponent spectrum touches the half-line boundary")
    t_minus = max(12.0, (math.log(4.0 * c_env / tol) + 5.0) / rate)
    while True:
        lg1, lg2 = back_log_env(t_minus), back_log_env(t_minus + 4.0)
        if lg2 == -math.inf:
            break
        r_obs = (lg1 - lg2) / 4.0
        if r_obs > 0.0 and lg2 - math.log(r_obs) < math.log(tol / 4.0):
            break
        t_minus += 8.0
        if t_minus > 4000.0:
            raise RuntimeError("divergent: backward radial tail does not decay")

    def h(t: float) -> np.ndarray:
        flowed = U0 @ mat_exp(B, t).T
        val = W @ _evaluate(f, flowed)
        return np.atleast_1d(math.exp(-t) * val)

    res, _err = quad_vec(h, -t_minus, t_plus, epsabs=tol, epsrel=1e-13)
    return float(res[0]) if scalar else res


def materialize(rep: OrbitLevy, n_max: int) -> LevyAtoms:
    """Truncated orbit expansion: atoms (A^n u, a^{-n} w) for |n| <= n_max.

    Suitable for building concrete measures for cross-checks; the
    truncation defect is confined to the two boundary orbit indices.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    A, a = rep.op, rep.power
    pts = [rep.seeds.points]
    wts = [rep.seeds.weights]
    fwd = rep.seeds.points
    back = rep.seeds.points
    Ainv = np.linalg.inv(A)
    for n in range(1, n_max + 1):
        fwd = fwd @ A.T
        back = back @ Ainv.T
        pts.extend([fwd, back])
        wts.extend([rep.seeds.weights * a ** (-n), rep.seeds.weights * a**n])
    return LevyAtoms(np.vstack(pts), np.concatenate(wts)).canonical()


def radial_compensator_mass(B, u, tol: float = 1e-10) -> float:
    """Flow integral of the compensator derivative 2(Bv,v)/(1+|v|^2)^2.

    Along v = exp(tB) u this integrand is the t-derivative of
    -1/(1 + |v|^2); whenever the flow carries u from the origin out to
    infinity the integral therefore equals exactly 1, independent of B and
    u.  Computed here by quadrature as an internal consistency anchor.
    """
    B = as_operator(B)
    u = as_vector(u, B.shape[0])
    if np.linalg.norm(u) == 0.0:
        raise ValueError("u must be nonzero")
    eigs = np.linalg.eigvals(B)
    if np.min(eigs.real) <= 0.0:
        raise RuntimeError("divergent: the flow must expand in every direction")

    def phi(t: float) -> float:
        v = mat_exp(B, t) @ u
        sq = float(v @ v)
        return 2.0 * float((B @ v) @ v) / (1.0 + sq) ** 2

    def sq_norm(t: float) -> float:
        v = mat_exp(B, t) @ u
        return float(v @ v)

    T = 10.0
    while True:
        # the integrand is the t-derivative of -1/(1 + |v|^2), so the exact
        # mass beyond |t| = T is read off from the endpoint values
        head = 1.0 / (1.0 + sq_norm(T))
        tail = sq_norm(-T) / (1.0 + sq_norm(-T))
        if head + tail < tol / 4.0:
            break
        if T > 2000.0:
            raise RuntimeError("divergent: flow does not traverse the radial range")
        T += 10.0
    res, _err = quad_vec(lambda t: np.atleast_1d(phi(t)), -T, T, epsabs=tol / 2.0, epsrel=1e-13)
    return float(res[0])
