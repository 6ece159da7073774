import numpy as np
import pytest

from multinorms.gmodules import (ModuleMatrix, Pi, PiTilde, Q_map, Retraction,
                                 augmentation, convolve,
                                 diagonal_inequality_check,
                                 diagonal_singleton_check,
                                 disjoint_test_operator, mean_from_retraction,
                                 module_action, retraction_from_mean,
                                 sign_lemma_check, star_action,
                                 verify_module_identities)
from multinorms.groups import (FiniteGroup, FiniteSupportVector, FreeGroup,
                               delta, uniform_on)

Z3 = FiniteGroup.cyclic(3)
Z4 = FiniteGroup.cyclic(4)
S3 = FiniteGroup.symmetric(3)


class TestConvolution:
    def test_point_masses(self):
        f2 = FreeGroup(2)
        out = convolve(delta(f2, (1,)), delta(f2, (2,)))
        assert out.values == {(1, 2): 1.0}

    def test_identity_element(self, rng):
        vals = {int(g): float(v) for g, v in enumerate(rng.standard_normal(4))}
        f = FiniteSupportVector(Z4, vals)
        out = convolve(delta(Z4, Z4.identity), f)
        assert out.values == pytest.approx(f.values)

    def test_uniform_idempotent(self):
        u = uniform_on(Z3, [0, 1, 2])
        out = convolve(u, u)
        for g in range(3):
            assert out(g) == pytest.approx(1 / 3)

    def test_associativity(self, rng):
        for _ in range(5):
            fs = [FiniteSupportVector(
                S3, {int(g): float(v) for g, v in enumerate(rng.standard_normal(6))})
                for _ in range(3)]
            left = convolve(convolve(fs[0], fs[1]), fs[2])
            right = convolve(fs[0], convolve(fs[1], fs[2]))
            diff = left + right.scaled(-1.0)
            assert diff.lp_norm("inf") <= 1e-12


class TestAugmentation:
    def test_delta(self):
        assert augmentation(delta(Z3, 1)) == pytest.approx(1.0)

    def test_mean_mass(self):
        assert augmentation(uniform_on(Z4, [0, 1, 2, 3])) == pytest.approx(1.0)

    def test_character_property(self, rng):
        for _ in range(5):
            f = FiniteSupportVector(
                Z4, {int(g): float(v) for g, v in enumerate(rng.standard_normal(4))})
            g = FiniteSupportVector(
                Z4, {int(h): float(v) for h, v in enumerate(rng.standard_normal(4))})
            assert augmentation(convolve(f, g)) == pytest.approx(
                augmentation(f) * augmentation(g), rel=1e-12, abs=1e-12)


class TestMatrixMaps:
    def test_pi_of_identity_delta(self):
        x = np.zeros(3)
        x[Z3.identity] = 1.0
        U = Pi(Z3, x, 2)
        assert np.array_equal(U.entries, np.eye(3))

    def test_pitilde_constant_rows(self, rng):
        x = rng.standard_normal(4)
        U = PiTilde(Z4, x, 2)
        assert np.array_equal(U.entries, np.tile(x, (4, 1)))

    def test_star_action_identity(self, rng):
        U = ModuleMatrix(Z4, rng.standard_normal((4, 4)), 2)
        out = star_action(Z4.identity, U)
        assert np.array_equal(out.entries, U.entries)

    def test_star_action_composes(self, rng):
        U = ModuleMatrix(S3, rng.standard_normal((6, 6)), 2)
        for r1 in range(6):
            for r2 in range(6):
                a = star_action(r1, star_action(r2, U))
                b = star_action(S3.mul(r1, r2), U)
                assert np.allclose(a.entries, b.entries, atol=0)

    def test_star_action_preserves_norm(self, rng):
        U = ModuleMatrix(S3, rng.standard_normal((6, 6)), 1.5)
        for r in range(6):
            assert star_action(r, U).norm() == pytest.approx(U.norm(), rel=1e-12)

    def test_pi_is_module_morphism(self, rng):
        # Pi(b * x) = b . Pi(x) for b = delta_r
        x = rng.standard_normal(6)
        for r in range(6):
            xf = FiniteSupportVector(S3, {int(g): float(v) for g, v in enumerate(x)})
            bx = convolve(delta(S3, r), xf)
            bx_arr = np.array([bx(g) for g in range(6)])
            lhs = Pi(S3, bx_arr, 2).entries
            rhs = module_action(r, Pi(S3, x, 2)).entries
            assert np.allclose(lhs, rhs, atol=1e-12)

    def test_q_pi_is_pitilde(self, rng):
        for G in (Z3, Z4, S3):
            x = rng.standard_normal(G.order)
            assert np.allclose(Q_map(Pi(G, x, 2)).entries,
                               PiTilde(G, x, 2).entries, atol=0)

    def test_q_linear(self, rng):
        U = ModuleMatrix(Z4, rng.standard_normal((4, 4)), 2)
        V = ModuleMatrix(Z4, rng.standard_normal((4, 4)), 2)
        sum_uv = ModuleMatrix(Z4, U.entries + V.entries, 2)
        assert np.allclose(Q_map(sum_uv).entries,
                           Q_map(U).entries + Q_map(V).entries, atol=0)

    def test_q_intertwines(self, rng):
        U = ModuleMatrix(S3, rng.standard_normal((6, 6)), 2)
        for r in range(6):
            assert np.allclose(Q_map(module_action(r, U)).entries,
                               star_action(r, Q_map(U)).entries, atol=0)


class TestRetraction:
    def test_uniform_z2_formula(self, rng):
        z2 = FiniteGroup.cyclic(2)
        R = retraction_from_mean(z2, np.array([0.5, 0.5]), 2)
        U = ModuleMatrix(z2, rng.standard_normal((2, 2)), 2)
        expected = 0.5 * U.entries.sum(axis=0)
        assert np.allclose(R.apply(U), expected, atol=1e-15)

    def test_splits_pitilde(self, rng):
        for G in (Z3, S3):
            R = retraction_from_mean(G, np.full(G.order, 1 / G.order), 2)
            for _ in range(5):
                x = rng.standard_normal(G.order)
                assert np.abs(R.apply(PiTilde(G, x, 2)) - x).max() <= 1e-12

    def test_morphism_on_z4(self, rng):
        R = retraction_from_mean(Z4, np.full(4, 0.25), 1.5)
        from multinorms.gmodules import _left_translate_vector
        for _ in range(20):
            U = ModuleMatrix(Z4, rng.standard_normal((4, 4)), 1.5)
            r = int(rng.integers(0, 4))
            lhs = R.apply(star_action(r, U))
            rhs = _left_translate_vector(Z4, r, R.apply(U))
            assert np.abs(lhs - rhs).max() <= 1e-12

    def test_round_trip(self, rng):
        for G in (Z3, Z4):
            lam = rng.uniform(0.1, 1.0, G.order)
            lam /= lam.sum()
            R = retraction_from_mean(G, lam, 2)
            assert np.abs(mean_from_retraction(R) - lam).max() <= 1e-12

    def test_uniform_norm_bound_is_one(self):
        R = retraction_from_mean(Z4, np.full(4, 0.25), 2)
        assert R.norm_upper == pytest.approx(1.0, abs=1e-9)

    def test_rejects_bad_mean(self):
        with pytest.raises(ValueError):
            retraction_from_mean(Z3, np.array([0.5, 0.5, 0.5]), 2)


class TestSignLemma:
    def test_single_vector(self, rng):
        F = rng.standard_normal((1, 1, 3))
        rep = sign_lemma_check(F, 2)
        assert rep["ok"]
        assert rep["C"] == pytest.approx(rep["diagonal"])

    def test_diagonal_only_equality(self, rng):
        n, m = 3, 4
        F = np.zeros((n, n, m))
        for j in range(n):
            F[j, j] = rng.standard_normal(m)
        rep = sign_lemma_check(F, 2)
        assert rep["ok"]
        assert rep["C"] == pytest.approx(rep["diagonal"], rel=1e-12)

    def test_random_instances(self, rng):
        for p in (1.0, 1.5, 2.0, 3.0):
            F = rng.standard_normal((2, 2, 3))
            rep = sign_lemma_check(F, p)
            assert rep["ok"]

    def test_guard(self):
        with pytest.raises(ValueError):
            sign_lemma_check(np.zeros((13, 13, 2)), 2)


class TestDiagonalInequality:
    def test_zero_operator(self):
        R = retraction_from_mean(Z4, np.full(4, 0.25), 2)
        U = ModuleMatrix(Z4, np.zeros((4, 4)), 2)
        rep = diagonal_singleton_check(R, U)
        assert rep["ok"] and rep["lhs"] == pytest.approx(0.0)

    def test_single_block(self, rng):
        R = retraction_from_mean(Z4, np.full(4, 0.25), 2)
        U = ModuleMatrix(Z4, rng.standard_normal((4, 4)), 2)
        rep = diagonal_inequality_check(R, U, np.zeros(4, dtype=int),
                                        np.zeros(4, dtype=int))
        assert rep["ok"]

    def test_uniform_mean_singletons(self, rng):
        R = retraction_from_mean(Z4, np.full(4, 0.25), 2)
        for _ in range(10):
            U = ModuleMatrix(Z4, rng.standard_normal((4, 4)), 2)
            rep = diagonal_singleton_check(R, U)
            assert rep["ok"]

    def test_random_partitions(self, rng):
        R = retraction_from_mean(S3, np.full(6, 1 / 6), 1.5)
        for _ in range(5):
            U = ModuleMatrix(S3, rng.standard_normal((6, 6)), 1.5)
            X = rng.integers(0, 3, size=6)
            rep = diagonal_inequality_check(R, U, X, X)
            assert rep["ok"]


class TestDisjointOperator:
    def test_single_term_contraction(self, rng):
        U = ModuleMatrix(Z4, rng.standard_normal((4, 4)), 2)
        x = np.array([1.0, 0, 0, 0])
        f = np.array([0, 1.0, 0, 0])
        T, rep = disjoint_test_operator([x], [f], U)
        assert rep["ok"]
        assert rep["bound"] == pytest.approx(U.norm())

    def test_identity_deltas(self):
        U = ModuleMatrix(Z4, np.eye(4), 2)
        xs = [np.eye(4)[i] for i in range(2)]
        fs = [np.eye(4)[i + 2] for i in range(2)]
        T, rep = disjoint_test_operator(xs, fs, U)
        assert rep["ok"]
        assert T.norm() <= 1 + 1e-12

    def test_empty(self):
        U = ModuleMatrix(Z3, np.zeros((3, 3)), 2)
        T, rep = disjoint_test_operator([], [], U)
        assert rep["ok"] and T.norm() == 0.0

    def test_rejects_overlap(self, rng):
        U = ModuleMatrix(Z4, rng.standard_normal((4, 4)), 2)
        x = np.array([1.0, 0, 0, 0])
        with pytest.raises(ValueError):
            disjoint_test_operator([x, x], [np.eye(4)[1], np.eye(4)[2]], U)


class TestFullSuite:
    @pytest.mark.parametrize("G", [Z3, S3], ids=["Z3", "S3"])
    def test_identities(self, G):
        report = verify_module_identities(G, 2, trials=10)
        assert report["ok"], report
        assert report["max_residual"] <= 1e-12
        assert report["Cpp_upper"] == pytest.approx(1.0, abs=1e-9)
