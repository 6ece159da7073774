import itertools
import math

import numpy as np
import pytest

from multinorms import DEFAULT_CONFIG, mu, mu_pointwise_sup, mu_upper
from multinorms.spaces import DiscreteSpace, Exponent, MultiVector
from multinorms.weaksum import dual_ball_norm, holder_interpolation_check, pairings

from conftest import mv, oracle_mu_grid, oracle_mu_signs, oracle_spectral, unit_space


def check_witness(result, x, p, r):
    """Witness feasibility and value reproduction (certificate contract)."""
    feas = dual_ball_norm(result.witness, Exponent(r), x.space.weights)
    assert feas <= 1 + 1e-12
    got = np.abs(pairings(x, result.witness))
    val = float((got ** float(p)).sum() ** (1 / float(p)))
    assert val == pytest.approx(result.value, abs=1e-9)
    assert result.value <= result.upper_bound + 1e-12


class TestClosedRoutes:
    def test_sup_ambient_row_formula(self):
        # dual of l1: lambdas live in the sup-norm space
        lam = mv([[1.0, 0.0], [0.0, 1.0]])
        res = mu(1, lam, "inf")
        assert res.value == pytest.approx(1.0, abs=1e-12)
        assert res.gap == 0.0
        check_witness(res, lam, 1, "inf")

    def test_identity_spectral(self):
        x = mv([[1.0, 0.0], [0.0, 1.0]])
        res = mu(2, x, 2)
        assert res.value == pytest.approx(1.0, abs=1e-12)
        assert res.method == "closed_form"
        check_witness(res, x, 2, 2)

    def test_single_vector_is_plain_norm(self, rng):
        for r in (1, 1.5, 2, 3, "inf"):
            vals = rng.standard_normal(4)
            w = rng.uniform(0.5, 2.0, 4)
            sp = DiscreteSpace(tuple(range(4)), w)
            x = MultiVector(sp, vals[None, :])
            from multinorms.spaces import lp_norm_values
            res = mu(1.7, x, r)
            assert res.value == pytest.approx(lp_norm_values(vals, Exponent(r), w), rel=1e-12)
            check_witness(res, x, 1.7, r)

    def test_rejects_p_inf(self):
        x = mv([[1.0, 0.0]])
        with pytest.raises(ValueError):
            mu("inf", x, 2)

    def test_l1_ambient_sign_enumeration(self, rng):
        x = mv(rng.standard_normal((3, 4)))
        res = mu(2, x, 1)
        assert res.method == "brute_extreme"
        assert res.value == pytest.approx(oracle_mu_signs(x, 2.0), rel=1e-12)
        check_witness(res, x, 2, 1)


class TestPointwiseSup:
    def test_disjoint_indicators(self):
        assert mu_pointwise_sup(mv([[1.0, 0.0], [0.0, 1.0]])) == pytest.approx(1.0)

    def test_overlapping(self):
        assert mu_pointwise_sup(mv([[1.0, 1.0], [1.0, 1.0]])) == pytest.approx(2.0)

    def test_single(self, rng):
        vals = rng.standard_normal(5)
        assert mu_pointwise_sup(mv(vals[None, :])) == pytest.approx(np.abs(vals).max())


class TestOracleAgreement:
    @pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
    @pytest.mark.parametrize("r", [1.0, 2.0, 3.0])
    def test_grid_oracle(self, p, r, rng):
        for _ in range(3):
            n, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            x = mv(rng.standard_normal((n, m)))
            res = mu(p, x, r)
            grid = oracle_mu_grid(x, p, r, density=17)
            # the grid explores a subset of the ball: oracle <= value <= upper
            assert grid <= res.value * (1 + 1e-9) + 1e-12
            assert res.value <= res.upper_bound + 1e-12
            assert res.value >= grid * (1 - 1e-3) - 1e-9
            check_witness(res, x, p, r)

    def test_spectral_oracle_random(self, rng):
        for _ in range(5):
            x = mv(rng.standard_normal((3, 3)))
            res = mu(2, x, 2)
            assert res.value == pytest.approx(oracle_spectral(x.columns), rel=1e-10)

    def test_monotone_in_p(self, rng):
        for _ in range(5):
            x = mv(rng.standard_normal((3, 3)))
            vals = [mu(p, x, 2).value for p in (1.0, 1.5, 2.0, 3.0, 6.0)]
            for a, b in zip(vals, vals[1:]):
                assert b <= a + 1e-8

    def test_operator_norm_identity(self, rng):
        # mu equals the matrix p' -> r norm where both routes are exact
        x = mv(rng.standard_normal((2, 3)))
        res = mu(2, x, 2)
        assert res.value == pytest.approx(oracle_spectral(x.columns), rel=1e-11)
        lam = mv(rng.standard_normal((2, 3)))
        res1 = mu(1, lam, "inf")
        cols = np.abs(lam.columns).sum(axis=0)
        assert res1.value == pytest.approx(cols.max(), rel=1e-12)

    def test_mu_upper_sound(self, rng):
        for p in (1.0, 1.5, 2.0):
            for r in (1.0, 2.0, 3.0):
                x = mv(rng.standard_normal((2, 3)))
                res = mu(p, x, r)
                up = mu_upper(p, x, r)
                assert res.value <= up + 1e-10

    def test_weighted_matches_rescaled(self, rng):
        # weights fold into the pairing: mu over (w) equals mu of the
        # weight-rescaled matrix on the unweighted space
        w = rng.uniform(0.5, 2.0, 3)
        cols = rng.standard_normal((2, 3))
        p, r = 2.0, 3.0
        x_w = mv(cols, weights=w)
        scaled = cols * w[None, :] ** (1 / r)
        x_u = mv(scaled)
        a = mu(p, x_w, r)
        b = mu(p, x_u, r)
        assert a.value == pytest.approx(b.value, rel=1e-6)


class TestInterpolation:
    def test_all_ones_alpha(self, rng):
        x = mv(rng.standard_normal((3, 3)))
        report = holder_interpolation_check(1, 2, 2, np.ones(3), x, 2)
        assert report["ok"]
        assert report["alpha_norm"] == pytest.approx(3 ** 0.5)

    def test_zero_alpha(self):
        x = mv([[1.0, 0.0], [0.0, 1.0]])
        report = holder_interpolation_check(2, 2, 2, np.zeros(2), x, 2)
        assert report["ok"]
        assert report["lhs_value"] == pytest.approx(0.0, abs=1e-12)

    def test_random_alpha_three_points(self, rng):
        x = mv(rng.standard_normal((3, 3)))
        alpha = rng.uniform(-1, 1, 3)
        report = holder_interpolation_check(1, 2, 2, alpha, x, 2)
        assert report["ok"]

    def test_rejects_nonconjugate(self):
        x = mv([[1.0, 0.0]])
        with pytest.raises(ValueError):
            holder_interpolation_check(1, 2, 3, np.ones(1), x, 2)
