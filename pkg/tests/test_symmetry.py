import numpy as np
import pytest

from levycenter import (
    IdMeasure,
    LevyAtoms,
    centering_deviation,
    charfn,
    dirac,
    fixed_space,
    frequency_grid,
    gaussian,
    orthogonalize_group,
    pushforward,
    shifted,
    ssupp,
    symmetry_group,
    universal_center,
    verify_symmetry,
)
from helpers import (
    invariant_measure,
    nonfull_involution_fixture,
    random_measure,
    random_orthogonal_group,
    rng,
)


class TestVerifySymmetry:
    def test_identity_is_always_a_symmetry(self):
        mu = random_measure(rng(0), 3)
        ok, h = verify_symmetry(mu, np.eye(3))
        assert ok
        np.testing.assert_allclose(h, 0.0, atol=1e-14)

    def test_sign_flip_on_symmetric_measure(self):
        gen = rng(1)
        pts = np.array([[1.0, 0.5], [-1.0, -0.5]])
        mu = IdMeasure(np.zeros(2), np.array([[1.0, 0.2], [0.2, 2.0]]), LevyAtoms(pts, np.array([1.0, 1.0])))
        ok, h = verify_symmetry(mu, -np.eye(2))
        assert ok
        np.testing.assert_allclose(h, 0.0, atol=1e-12)

    def test_anisotropic_scaling_is_rejected(self):
        mu = gaussian([0.0, 0.0], np.eye(2))
        ok, h = verify_symmetry(mu, np.diag([2.0, 1.0]))
        assert not ok and h is None

    def test_shift_cocycle(self):
        gen = rng(2)
        mu, S = nonfull_involution_fixture(gen, 3, 2)
        G = symmetry_group(mu, [S])
        for S1, h1 in G:
            for S2, h2 in G:
                ok, h12 = verify_symmetry(mu, S1 @ S2)
                assert ok
                np.testing.assert_allclose(h12, S1 @ h2 + h1, atol=1e-10)


class TestFixedSpace:
    def test_trivial_group(self):
        mu = random_measure(rng(3), 3)
        G = symmetry_group(mu, [])
        assert fixed_space(G).dim == 3

    def test_quarter_rotations_fix_nothing(self):
        rot = np.array([[0.0, -1.0], [1.0, 0.0]])
        mu = invariant_measure(rng(4), [np.eye(2), rot, rot @ rot, rot @ rot @ rot])
        G = symmetry_group(mu, [rot])
        assert len(G) == 4
        assert fixed_space(G).dim == 0

    def test_axis_reflection_fixes_the_axis(self):
        refl = np.diag([1.0, -1.0])
        mu = invariant_measure(rng(5), [np.eye(2), refl])
        G = symmetry_group(mu, [refl])
        W = fixed_space(G)
        assert W.dim == 1
        np.testing.assert_allclose(np.abs(W.basis[:, 0]), [1.0, 0.0], atol=1e-12)

    def test_every_basis_vector_is_fixed(self):
        gen = rng(6)
        group = random_orthogonal_group(gen, 3)
        mu = invariant_measure(gen, group)
        G = symmetry_group(mu, group)
        W = fixed_space(G)
        for S, _ in G:
            for j in range(W.dim):
                np.testing.assert_allclose(S @ W.basis[:, j], W.basis[:, j], atol=1e-12)


class TestUniversalCenter:
    def test_orthogonal_group_centered_measure_needs_no_shift(self):
        for seed in range(5):
            gen = rng(100 + seed)
            group = random_orthogonal_group(gen, 3)
            mu = invariant_measure(gen, group)
            G = symmetry_group(mu, group)
            h = universal_center(mu, G)
            assert np.linalg.norm(h) <= 1e-10

    def test_orthogonal_group_with_drift_centers_to_minus_shift(self):
        gen = rng(7)
        group = random_orthogonal_group(gen, 3)
        mu0 = invariant_measure(gen, group)
        m = gen.normal(size=3)
        mu = shifted(mu0, m)
        G = symmetry_group(mu, group)
        h = universal_center(mu, G)
        np.testing.assert_allclose(h, -m, atol=1e-10)

    def test_point_mass(self):
        mu = dirac([1.0, 2.0])
        G = symmetry_group(mu, [])
        np.testing.assert_allclose(universal_center(mu, G), [-1.0, -2.0], atol=1e-14)

    def test_skew_involution_crosschecked_by_direct_solve(self):
        gen = rng(8)
        s_plane = np.array([[1.0, 0.8], [0.0, -1.0]])
        cov0 = np.array([[0.5, 0.1], [0.1, 0.3]])
        cov = cov0 + s_plane @ cov0 @ s_plane.T
        y = np.array([0.7, 0.4])
        atoms = LevyAtoms(np.vstack([y, s_plane @ y]), np.array([1.0, 1.0]))
        mu = IdMeasure(np.array([0.3, -0.6]), cov, atoms)
        G = symmetry_group(mu, [s_plane])
        h = universal_center(mu, G)
        # independent oracle: h must solve (S - I) h = h_S for every element
        for S, h_s in G:
            np.testing.assert_allclose((S - np.eye(2)) @ h, h_s, atol=1e-9)
        assert centering_deviation(mu, G, h) <= 1e-9

    def test_nonfull_measures_center(self):
        for seed in range(5):
            gen = rng(200 + seed)
            mu, S = nonfull_involution_fixture(gen, 4, 2)
            G = symmetry_group(mu, [S])
            h = universal_center(mu, G)
            assert centering_deviation(mu, G, h) <= 1e-9

    def test_shift_witness_vanishes_after_centering(self):
        gen = rng(9)
        mu, S = nonfull_involution_fixture(gen, 3, 2)
        G = symmetry_group(mu, [S])
        h = universal_center(mu, G)
        centered = shifted(mu, h)
        for S_el, _ in G:
            ok, h_s = verify_symmetry(centered, S_el)
            assert ok
            assert np.linalg.norm(h_s) <= 1e-9

    def test_conjugator_freedom(self):
        gen = rng(10)
        mu, S = nonfull_involution_fixture(gen, 3, 2)
        G = symmetry_group(mu, [S])
        W, _ = ssupp(mu)
        Q = W.basis
        restricted = [Q.T @ El @ Q for El, _ in G]
        T = orthogonalize_group(restricted)
        # left-composition with an orthogonal map commuting with the
        # conjugated group, and positive rescaling, both stay valid
        conjugated = [T @ R @ np.linalg.inv(T) for R in restricted]
        for Qc in (-np.eye(2), conjugated[1]):
            assert np.allclose(Qc @ conjugated[1], conjugated[1] @ Qc, atol=1e-9)
            h = universal_center(mu, G, conjugator=Qc @ T)
            assert centering_deviation(mu, G, h) <= 1e-9
        h2 = universal_center(mu, G, conjugator=2.0 * T)
        assert centering_deviation(mu, G, h2) <= 1e-9

    def test_rejects_non_symmetries(self):
        mu = gaussian([0.0, 0.0], np.eye(2))
        with pytest.raises(ValueError, match="not symmetries"):
            symmetry_group(mu, [np.diag([2.0, 1.0])])


class TestGroupConstruction:
    def test_closure_generates_the_rotation_group(self):
        rot = np.array([[0.0, -1.0], [1.0, 0.0]])
        mu = invariant_measure(rng(11), [np.eye(2), rot, rot @ rot, rot @ rot @ rot])
        G = symmetry_group(mu, [rot])
        assert len(G) == 4

    def test_charfn_identity_holds_on_grid_for_members(self):
        gen = rng(12)
        mu, S = nonfull_involution_fixture(gen, 3, 2)
        G = symmetry_group(mu, [S])
        grid = frequency_grid(3)
        for S_el, h_s in G:
            lhs = charfn(mu, grid)
            rhs = charfn(shifted(pushforward(S_el, mu), h_s), grid)
            assert np.max(np.abs(lhs - rhs)) <= 1e-9
