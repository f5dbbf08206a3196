"""Shared fixture builders for the test suite.

Deterministic: every builder takes an explicit Generator so that test runs
are reproducible.
"""

from __future__ import annotations

import numpy as np

from levycenter import IdMeasure, LevyAtoms, MixingLevy, OrbitLevy, materialize


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_orthogonal(gen: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(gen.normal(size=(d, d)))
    return q * np.sign(np.diag(r))


def random_psd(gen: np.random.Generator, d: int, scale: float = 1.0) -> np.ndarray:
    a = gen.normal(size=(d, d))
    return scale * (a @ a.T) / d


def random_atoms(gen: np.random.Generator, d: int, n: int, radius: float = 2.0) -> LevyAtoms:
    pts = gen.normal(size=(n, d))
    pts *= (radius * gen.uniform(0.2, 1.0, size=n) / np.linalg.norm(pts, axis=1))[:, None]
    w = gen.uniform(0.2, 2.0, size=n)
    return LevyAtoms(pts, w)


def random_measure(gen: np.random.Generator, d: int, n_atoms: int = 3, gauss: bool = True) -> IdMeasure:
    cov = random_psd(gen, d) if gauss else np.zeros((d, d))
    return IdMeasure(gen.normal(size=d), cov, random_atoms(gen, d, n_atoms))


def orbit_seed(gen: np.random.Generator, A: np.ndarray, direction=None) -> np.ndarray:
    """A point of the annulus {|v| <= 1 < |A^{-1} v|} along a given direction."""
    d = A.shape[0]
    u = np.asarray(direction, dtype=float) if direction is not None else gen.normal(size=d)
    u = u / np.linalg.norm(u)
    pre = np.linalg.norm(np.linalg.solve(A, u))
    lo, hi = 1.0 / pre, 1.0
    s = lo + 0.7 * (hi - lo)
    return s * u


def symmetric_orbit_rep(gen: np.random.Generator, A: np.ndarray, a: float, n_pairs: int = 1) -> OrbitLevy:
    """Orbit representation with exactly mirrored seed pairs (zero moment)."""
    pts, w = [], []
    for _ in range(n_pairs):
        v = orbit_seed(gen, A)
        wt = gen.uniform(0.5, 1.5)
        pts.extend([v, -v])
        w.extend([wt, wt])
    return OrbitLevy(LevyAtoms(np.array(pts), np.array(w)), A, a)


def asymmetric_orbit_rep(gen: np.random.Generator, A: np.ndarray, a: float, n_seeds: int = 2) -> OrbitLevy:
    pts = np.array([orbit_seed(gen, A) for _ in range(n_seeds)])
    w = gen.uniform(0.5, 1.5, size=n_seeds)
    return OrbitLevy(LevyAtoms(pts, w), A, a)


def contraction(gen: np.random.Generator, d: int, a: float, margin: float = 0.7) -> np.ndarray:
    """A random contraction with all of the spectrum inside |z|^2 < a.

    The default margin keeps |z|^2 / a <= 0.49 so that orbit truncations of
    depth ~30 leave boundary defects well under 1e-9 in jump mass.
    """
    return margin * np.sqrt(a) * random_orthogonal(gen, d)


def eigen_split_contraction(gen: np.random.Generator, a: float, d: int = 2) -> np.ndarray:
    """Diagonal contraction whose first eigenvalue is exactly a.

    The adjoint then has a one-dimensional a-eigenspace along the first
    axis, which is what makes the existence criterion nontrivial.
    """
    rest = np.sqrt(0.5 * a) * gen.uniform(0.4, 1.0, size=d - 1)
    return np.diag(np.concatenate([[a], rest]))


def zero_moment_orbit_rep(gen: np.random.Generator, A: np.ndarray, a: float) -> OrbitLevy:
    """Orbit representation over a diagonal operator whose seed moment has an
    exactly vanishing first coordinate without mirror symmetry."""
    v = orbit_seed(gen, A)
    if abs(v[0]) < 0.2:  # keep the cancelling coordinate well conditioned
        v[0], v[1] = v[1], v[0]
    mirrored = v * np.concatenate([[-1.0], np.ones(A.shape[0] - 1)])
    w = gen.uniform(0.5, 1.5)
    extra = orbit_seed(gen, A)
    extra[0] = 0.0
    if np.linalg.norm(extra) < 1e-9:
        extra[1] = 0.5
    pts = np.array([v, mirrored, extra / max(np.linalg.norm(extra), 1.0)])
    return OrbitLevy(LevyAtoms(pts, np.array([w, w, gen.uniform(0.5, 1.5)])), A, a)


def materialized_measure(rep: OrbitLevy, depth: int = 30, shift=None) -> IdMeasure:
    d = rep.dim
    m = np.zeros(d) if shift is None else np.asarray(shift, dtype=float)
    return IdMeasure(m, np.zeros((d, d)), materialize(rep, depth))


def stable_exponent(gen: np.random.Generator, d: int, re_lo: float = 0.6, re_hi: float = 3.0) -> np.ndarray:
    """Random exponent with eigenvalue real parts in [re_lo, re_hi]."""
    diag = np.diag(gen.uniform(re_lo, re_hi, size=d))
    q = np.eye(d) + 0.3 * gen.normal(size=(d, d))
    return q @ diag @ np.linalg.inv(q)


def mixing_seed(gen: np.random.Generator, B: np.ndarray) -> np.ndarray:
    """A unit vector flowing strictly outward under exp(t * B)."""
    from levycenter import mat_exp

    d = B.shape[0]
    flows = [mat_exp(B, np.log(t)) for t in (2.0, 4.0, 8.0)]
    for _ in range(1000):
        u = gen.normal(size=d)
        u /= np.linalg.norm(u)
        if (B @ u) @ u <= 1e-3:
            continue
        if all(np.linalg.norm(F @ u) > 1.0 + 1e-6 for F in flows):
            return u
    raise RuntimeError("could not sample an outward-flowing seed")


def close_matrices(mats: list, cap: int = 512) -> list:
    """BFS closure of a finite matrix set under products."""
    out = [np.eye(mats[0].shape[0])]
    frontier = list(mats)
    while frontier:
        S = frontier.pop()
        if any(np.allclose(S, E, atol=1e-10) for E in out):
            continue
        out.append(S)
        for R in list(out):
            frontier.extend([S @ R, R @ S])
        if len(out) > cap:
            raise RuntimeError("group too large")
    return out


def random_orthogonal_group(gen: np.random.Generator, d: int) -> list:
    """A small random finite subgroup of the orthogonal group."""
    kind = gen.integers(0, 3)
    if kind == 0:
        q = gen.normal(size=d)
        q /= np.linalg.norm(q)
        gens = [np.eye(d) - 2.0 * np.outer(q, q)]
    elif kind == 1:
        perm = gen.permutation(d)
        signs = gen.choice([-1.0, 1.0], size=d)
        gens = [np.eye(d)[perm] * signs[:, None]]
    else:
        k = int(gen.choice([2, 3, 4, 6]))
        theta = 2 * np.pi / k
        rot = np.eye(d)
        rot[:2, :2] = [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        q = random_orthogonal(gen, d)
        gens = [q @ rot @ q.T]
    return close_matrices(gens)


def invariant_measure(gen: np.random.Generator, group: list, n_atoms: int = 2) -> IdMeasure:
    """A centered measure invariant under every element of the given group."""
    d = group[0].shape[0]
    cov0 = random_psd(gen, d)
    cov = sum(S @ cov0 @ S.T for S in group) / len(group)
    pts, w = [], []
    base = random_atoms(gen, d, n_atoms)
    for p, wt in zip(base.points, base.weights):
        for S in group:
            pts.append(S @ p)
            w.append(wt)
    atoms = LevyAtoms(np.array(pts), np.array(w)).merged(LevyAtoms.empty(d))
    return IdMeasure(np.zeros(d), cov, atoms)


def nonfull_involution_fixture(gen: np.random.Generator, d: int, k: int):
    """Measure supported on a k-plane of R^d with a non-orthogonal
    two-element symmetry group acting on that plane.

    Returns (measure, involution).
    """
    basis = random_orthogonal(gen, d)[:, :k]
    signs = np.concatenate([[1.0], gen.choice([-1.0, 1.0], size=k - 1)])
    if np.all(signs > 0):
        signs[-1] = -1.0
    p = np.eye(k) + 0.4 * gen.normal(size=(k, k))
    s_plane = p @ np.diag(signs) @ np.linalg.inv(p)
    cov0 = random_psd(gen, k)
    cov_plane = cov0 + s_plane @ cov0 @ s_plane.T
    pts_plane, w = [], []
    for _ in range(2):
        y = gen.normal(size=k)
        wt = gen.uniform(0.5, 1.5)
        pts_plane.extend([y, s_plane @ y])
        w.extend([wt, wt])
    S = basis @ s_plane @ basis.T + np.eye(d) - basis @ basis.T
    mu = IdMeasure(
        gen.normal(size=d),
        basis @ cov_plane @ basis.T,
        LevyAtoms(np.array(pts_plane) @ basis.T, np.array(w)),
    )
    return mu, S


def mixing_rep(gen: np.random.Generator, B: np.ndarray, n_seeds: int = 2, symmetric: bool = False) -> MixingLevy:
    pts, w = [], []
    for _ in range(n_seeds):
        u = mixing_seed(gen, B)
        wt = gen.uniform(0.5, 1.5)
        if symmetric:
            pts.extend([u, -u])
            w.extend([wt, wt])
        else:
            pts.append(u)
            w.append(wt)
    return MixingLevy(LevyAtoms(np.array(pts), np.array(w)), B)
