"""Linear operators between multi-normed discrete spaces.

Amplifications act componentwise on tuples; the multi-bounded norm is the
supremum of the amplification norms.  When both sides carry a weak
(p,q)-multi-norm that supremum equals the plain operator norm, which the
``mb_norm`` report checks as a contract.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._optim import DEFAULT_CONFIG, OptConfig, opnorm, rng_for
from .multinorm import NormResult, WeakPQEngine
from .spaces import DiscreteSpace, Exponent, ExponentLike, MultiVector, Vector

__all__ = ["LinOp", "op_norm", "amplification_norm", "mb_norm", "mb_set_constant",
           "AmplificationResult", "MbNormReport", "rank_one"]


@dataclass(frozen=True)
class LinOp:
    """Matrix operator from l^r over one space to l^t over another."""

    matrix: np.ndarray
    domain_space: DiscreteSpace
    domain_exp: Exponent
    codomain_space: DiscreteSpace
    codomain_exp: Exponent

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", matrix)
        if matrix.shape != (self.codomain_space.size, self.domain_space.size):
            raise ValueError("matrix shape must be (codomain size, domain size)")

    def apply(self, values: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(values, dtype=float)

    def apply_tuple(self, x: MultiVector) -> MultiVector:
        return MultiVector(self.codomain_space, x.columns @ self.matrix.T)

    @staticmethod
    def create(matrix, domain_space, r: ExponentLike, codomain_space, t: ExponentLike):
        return LinOp(np.asarray(matrix, dtype=float), domain_space, Exponent(r),
                     codomain_space, Exponent(t))


def rank_one(x: Vector, lam: Vector, r: ExponentLike, t: ExponentLike) -> LinOp:
    """The operator y |-> <y, lam> x from l^r(lam.space) to l^t(x.space)."""
    matrix = np.outer(x.values, lam.space.weights * lam.values)
    return LinOp.create(matrix, lam.space, r, x.space, t)


def _folded_matrix(T: LinOp) -> np.ndarray:
    """Weights folded in so the plain a->b matrix norm equals the weighted one."""
    r, t = T.domain_exp, T.codomain_exp
    out_scale = (np.ones(T.codomain_space.size) if t.is_inf
                 else T.codomain_space.weights ** (1.0 / float(t)))
    in_scale = (np.ones(T.domain_space.size) if r.is_inf
                else T.domain_space.weights ** (-1.0 / float(r)))
    return out_scale[:, None] * T.matrix * in_scale[None, :]


def op_norm(T: LinOp, cfg: OptConfig = DEFAULT_CONFIG) -> NormResult:
    """Operator norm of T; exact for l1 domains, sup codomains, and 2->2."""
    res = opnorm(_folded_matrix(T), T.domain_exp, T.codomain_exp, cfg)
    return NormResult(res.value, res.upper, res.method, None)


def _op_norm_witness(T: LinOp, cfg: OptConfig) -> np.ndarray:
    """A unit-norm domain vector realizing the reported operator norm."""
    res = opnorm(_folded_matrix(T), T.domain_exp, T.codomain_exp, cfg)
    r = T.domain_exp
    scale = (np.ones(T.domain_space.size) if r.is_inf
             else T.domain_space.weights ** (-1.0 / float(r)))
    return res.witness * scale


@dataclass(frozen=True)
class AmplificationResult:
    k: int
    result: NormResult
    witness: MultiVector


def amplification_norm(T: LinOp, k: int, dom_engine, cod_engine,
                       cfg: OptConfig = DEFAULT_CONFIG,
                       warm: Optional[MultiVector] = None) -> AmplificationResult:
    """Lower certificate for the norm of the k-th amplification of T.

    Candidate tuples are rated by the ratio of the codomain engine's
    certified value on the image to the domain engine's certified upper
    bound, so the report never overstates the supremum.
    """
    if k < 1:
        raise ValueError("amplification order must be at least 1")

    def ratio(x: MultiVector):
        dom = dom_engine.evaluate(x)
        if dom.upper_bound <= 0:
            return 0.0
        cod = cod_engine.evaluate(T.apply_tuple(x))
        return cod.value / dom.upper_bound

    candidates: list[MultiVector] = []
    v = _op_norm_witness(T, cfg)
    candidates.append(MultiVector(T.domain_space, np.tile(v, (k, 1))))
    if warm is not None and warm.n == k - 1:
        padded = np.vstack([warm.columns, np.zeros((1, warm.m))])
        candidates.append(MultiVector(T.domain_space, padded))
    rng = rng_for(cfg, 1111, k, T.domain_space.size)
    for _ in range(4):
        candidates.append(MultiVector(
            T.domain_space, rng.standard_normal((k, T.domain_space.size))))

    best_val, best_x = -1.0, candidates[0]
    for x in candidates:
        val = ratio(x)
        if val > best_val:
            best_val, best_x = val, x

    # small perturbation climb around the best tuple
    for step in (0.2, 0.05):
        for _ in range(3):
            trial = MultiVector(
                T.domain_space,
                best_x.columns + step * rng.standard_normal(best_x.columns.shape))
            val = ratio(trial)
            if val > best_val:
                best_val, best_x = val, trial

    upper = np.inf
    if _same_weak_engines(dom_engine, cod_engine):
        upper = op_norm(T, cfg).upper_bound
    best_val = min(best_val, upper)
    res = NormResult(best_val, max(upper, best_val), "amplification_search", None)
    return AmplificationResult(k, res, best_x)


def _same_weak_engines(dom_engine, cod_engine) -> bool:
    return (isinstance(dom_engine, WeakPQEngine) and isinstance(cod_engine, WeakPQEngine)
            and dom_engine.p == cod_engine.p and dom_engine.q == cod_engine.q)


@dataclass
class MbNormReport:
    result: NormResult
    per_k: list
    contract_checked: bool
    contract_ok: bool
    op_norm_value: float
    op_norm_upper: float

    def as_dict(self) -> dict:
        return {
            "value": self.result.value,
            "upper_bound": self.result.upper_bound,
            "method": self.result.method,
            "per_k": self.per_k,
            "contract_checked": self.contract_checked,
            "contract_ok": self.contract_ok,
            "op_norm_value": self.op_norm_value,
            "op_norm_upper": self.op_norm_upper,
        }


def mb_norm(T: LinOp, k_max: int, dom_engine, cod_engine,
            cfg: OptConfig = DEFAULT_CONFIG, tol: float = 1e-9) -> MbNormReport:
    """Multi-bounded norm: maximum amplification norm over k <= k_max.

    Warm starts make the computed sequence nondecreasing in k (a k-tuple
    witness extends by a zero component).  When both engines are the same
    weak (p,q)-multi-norm the value must agree with the plain operator
    norm, which is asserted gap-aware.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    per_k = []
    warm = None
    best = -1.0
    for k in range(1, k_max + 1):
        amp = amplification_norm(T, k, dom_engine, cod_engine, cfg, warm=warm)
        val = max(amp.result.value, best)   # monotone by zero-padding
        per_k.append(val)
        best = val
        warm = amp.witness
    op = op_norm(T, cfg)
    checked = _same_weak_engines(dom_engine, cod_engine)
    ok = True
    upper = np.inf
    if checked:
        upper = op.upper_bound
        ok = (best >= op.value - (op.gap + tol)) and (best <= op.upper_bound + tol)
    result = NormResult(min(best, upper) if checked else best,
                        max(upper, best) if checked else np.inf,
                        "mb_amplifications", None)
    return MbNormReport(result, per_k, checked, ok, op.value, op.upper_bound)


def mb_set_constant(B: Sequence[Vector], engine, n_max: int = 4,
                    cfg: OptConfig = DEFAULT_CONFIG,
                    repetition_cap: int = 4096) -> dict:
    """Multi-boundedness constant of a finite set: sup over tuples from B.

    Permutation invariance and duplication collapse make the supremum over
    arbitrary tuples equal to the supremum over tuples of distinct
    elements, so subsets are enumerated; a capped brute-force route over
    tuples with repetition is computed for comparison.
    """
    B = list(B)
    if not B:
        return {"constant": 0.0, "subset_constant": 0.0, "repetition_constant": 0.0,
                "agree": True, "n_max": n_max}
    space = B[0].space
    arrays = [np.asarray(v.values, dtype=float) for v in B]

    subset_best = 0.0
    for size in range(1, min(n_max, len(B)) + 1):
        for combo in itertools.combinations(range(len(B)), size):
            x = MultiVector(space, np.stack([arrays[i] for i in combo]))
            subset_best = max(subset_best, engine.evaluate(x).value)

    rep_best = 0.0
    rep_count = 0
    for size in range(1, n_max + 1):
        if len(B) ** size > repetition_cap:
            break
        for combo in itertools.product(range(len(B)), repeat=size):
            x = MultiVector(space, np.stack([arrays[i] for i in combo]))
            rep_best = max(rep_best, engine.evaluate(x).value)
            rep_count += 1

    agree = rep_count == 0 or abs(subset_best - rep_best) <= 1e-9 * max(1.0, subset_best)
    return {"constant": max(subset_best, rep_best), "subset_constant": subset_best,
            "repetition_constant": rep_best, "agree": bool(agree), "n_max": n_max}
