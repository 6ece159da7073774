import numpy as np
import pytest

from multinorms.multinorm import MaxMultinormEngine, WeakPQEngine
from multinorms.operators import (LinOp, amplification_norm, mb_norm,
                                  mb_set_constant, op_norm, rank_one)
from multinorms.spaces import DiscreteSpace, Exponent, Vector, lp_norm_values

from conftest import oracle_spectral, unit_space


def make_op(mat, r=2, t=2, dom=None, cod=None):
    mat = np.asarray(mat, dtype=float)
    dom = dom or unit_space(mat.shape[1])
    cod = cod or unit_space(mat.shape[0])
    return LinOp.create(mat, dom, r, cod, t)


class TestOpNorm:
    def test_identity_l2(self):
        T = make_op(np.eye(3))
        res = op_norm(T)
        assert res.value == pytest.approx(1.0, abs=1e-12)
        assert res.gap == 0.0

    def test_rank_one_norm(self, rng):
        x = Vector(unit_space(3), rng.standard_normal(3))
        lam = Vector(unit_space(4), rng.standard_normal(4))
        for (r, t) in ((2, 2), (1.5, 3)):
            T = rank_one(x, lam, r, t)
            expected = (lp_norm_values(x.values, Exponent(t))
                        * lp_norm_values(lam.values, Exponent(r).conjugate()))
            res = op_norm(T)
            assert res.value == pytest.approx(expected, rel=1e-6)
            assert res.upper_bound >= expected - 1e-9

    def test_l1_domain_exact_column_route(self, rng):
        mat = rng.standard_normal((3, 4))
        T = make_op(mat, r=1, t=2)
        res = op_norm(T)
        expected = max(np.linalg.norm(mat[:, j]) for j in range(4))
        assert res.value == pytest.approx(expected, rel=1e-12)
        assert res.method == "closed_form"

    def test_sup_codomain_exact_row_route(self, rng):
        mat = rng.standard_normal((3, 4))
        T = make_op(mat, r=2, t="inf")
        res = op_norm(T)
        expected = max(np.linalg.norm(mat[i, :]) for i in range(3))
        assert res.value == pytest.approx(expected, rel=1e-12)

    def test_spectral_matches_oracle(self, rng):
        mat = rng.standard_normal((4, 4))
        res = op_norm(make_op(mat))
        assert res.value == pytest.approx(oracle_spectral(mat), rel=1e-10)

    def test_weighted_folding(self, rng):
        # norm from l1(w) -> l1(w') equals max over columns of w'|col| / w
        wd = rng.uniform(0.5, 2.0, 3)
        wc = rng.uniform(0.5, 2.0, 2)
        mat = rng.standard_normal((2, 3))
        dom = DiscreteSpace((0, 1, 2), wd)
        cod = DiscreteSpace((0, 1), wc)
        T = LinOp.create(mat, dom, 1, cod, 1)
        res = op_norm(T)
        expected = max((wc * np.abs(mat[:, j])).sum() / wd[j] for j in range(3))
        assert res.value == pytest.approx(expected, rel=1e-12)


class TestAmplification:
    def test_k1_equals_op_norm(self, rng):
        mat = rng.standard_normal((3, 3))
        T = make_op(mat)
        eng = WeakPQEngine(2, 2, 2)
        amp = amplification_norm(T, 1, eng, eng)
        assert amp.result.value == pytest.approx(op_norm(T).value, rel=1e-9)

    def test_identity_any_k(self):
        T = make_op(np.eye(2))
        eng = WeakPQEngine(2, 2, 2)
        for k in (1, 2, 4):
            amp = amplification_norm(T, k, eng, eng)
            assert amp.result.value == pytest.approx(1.0, rel=1e-9)

    def test_scaled_identity(self):
        T = make_op(2.0 * np.eye(2))
        eng = WeakPQEngine(2, 2, 2)
        amp = amplification_norm(T, 3, eng, eng)
        assert amp.result.value == pytest.approx(2.0, rel=1e-9)

    def test_rejects_k0(self):
        T = make_op(np.eye(2))
        eng = WeakPQEngine(2, 2, 2)
        with pytest.raises(ValueError):
            amplification_norm(T, 0, eng, eng)


class TestMbNorm:
    def test_identity(self):
        T = make_op(np.eye(2))
        eng = WeakPQEngine(2, 2, 2)
        report = mb_norm(T, 5, eng, eng)
        assert report.result.value == pytest.approx(1.0, rel=1e-9)
        assert report.contract_checked and report.contract_ok

    def test_zero_operator(self):
        T = make_op(np.zeros((2, 2)))
        eng = WeakPQEngine(2, 2, 2)
        report = mb_norm(T, 3, eng, eng)
        assert report.result.value == pytest.approx(0.0, abs=1e-12)

    def test_random_contract_and_monotone(self, rng):
        eng = WeakPQEngine(2, 2, 2)
        for _ in range(5):
            mat = rng.standard_normal((3, 3))
            T = make_op(mat)
            report = mb_norm(T, 4, eng, eng)
            assert report.contract_ok
            sigma = oracle_spectral(mat)
            assert abs(report.result.value - sigma) <= op_norm(T).gap + 1e-8
            for a, b in zip(report.per_k, report.per_k[1:]):
                assert b >= a - 1e-12


class TestMbSetConstant:
    def test_singleton(self, rng):
        v = Vector(unit_space(3), rng.standard_normal(3))
        report = mb_set_constant([v], MaxMultinormEngine(), n_max=3)
        assert report["constant"] == pytest.approx(np.abs(v.values).sum(), rel=1e-12)
        assert report["agree"]

    def test_deltas_max_engine(self):
        sp = unit_space(2)
        B = [Vector(sp, np.array([1.0, 0.0])), Vector(sp, np.array([0.0, 1.0]))]
        report = mb_set_constant(B, MaxMultinormEngine(), n_max=3)
        assert report["constant"] == pytest.approx(2.0, abs=1e-12)
        assert report["agree"]

    def test_empty(self):
        report = mb_set_constant([], MaxMultinormEngine())
        assert report["constant"] == 0.0

    def test_image_of_contraction_stays_bounded(self, rng):
        # operators with mb norm <= 1 map multi-bounded sets into sets with
        # no larger constant
        sp = unit_space(2)
        eng = WeakPQEngine(2, 2, 2)
        B = [Vector(sp, np.array([1.0, 0.0])), Vector(sp, np.array([0.0, 1.0]))]
        mat = rng.standard_normal((2, 2))
        mat /= oracle_spectral(mat)
        T = make_op(mat)
        c_b = mb_set_constant(B, eng, n_max=2)["constant"]
        image = [Vector(sp, T.apply(v.values)) for v in B]
        c_tb = mb_set_constant(image, eng, n_max=2)["constant"]
        assert c_tb <= c_b + 1e-6
