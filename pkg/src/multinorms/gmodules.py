"""Discrete group algebra acting on lp(G), and the coretraction loop.

For a finite group G the operators from l1(G) to lp(G) are materialized
as |G| x |G| matrices U with entries U[t, s] = U(delta_t)(s).  This module
builds the canonical embeddings Pi and Pi-tilde, the averaging map Q, the
retractions induced by means, and verifies the module identities that
characterize injectivity of lp(G) exactly (to machine precision).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._optim import DEFAULT_CONFIG, OptConfig, rng_for
from .amenability import invariance_constant
from .groups import FiniteGroup, FiniteSupportVector, GroupModel, uniform_on
from .spaces import Exponent, ExponentLike, lp_norm_values

__all__ = [
    "ModuleMatrix", "Retraction", "convolve", "augmentation", "star_action",
    "module_action", "Pi", "PiTilde", "Q_map", "retraction_from_mean",
    "mean_from_retraction", "sign_lemma_check", "diagonal_inequality_check",
    "diagonal_singleton_check", "disjoint_test_operator",
    "verify_module_identities",
]


# --------------------------------------------------------------------------
# group algebra on arbitrary discrete groups (finite supports)


def convolve(f: FiniteSupportVector, g: FiniteSupportVector) -> FiniteSupportVector:
    """(f * g)(s) = sum_t f(t) g(t^{-1} s), exactly on finite supports."""
    if f.group is not g.group and type(f.group) is not type(g.group):
        raise ValueError("convolution needs vectors over the same group")
    G = f.group
    out: dict = {}
    for t, ft in f.values.items():
        for u, gu in g.values.items():
            s = G.mul(t, u)
            out[s] = out.get(s, 0.0) + ft * gu
    result = FiniteSupportVector(G, out)
    if result.lp_norm(1) > f.lp_norm(1) * g.lp_norm(1) + 1e-9:
        raise AssertionError("convolution violated the l1 submultiplicativity bound")
    return result


def augmentation(f: FiniteSupportVector) -> float:
    """Integration against counting measure; a character of the algebra."""
    return float(sum(f.values.values()))


# --------------------------------------------------------------------------
# matrices over finite groups


@dataclass
class ModuleMatrix:
    """An operator l1(G) -> lp(G) stored entrywise: entries[t, s] = U(delta_t)(s)."""

    group: FiniteGroup
    entries: np.ndarray
    p: Exponent

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float)
        n = self.group.order
        if self.entries.shape != (n, n):
            raise ValueError("entries must be |G| x |G|")
        self.p = Exponent(self.p)

    def norm(self) -> float:
        """Exact operator norm: l1 domain, so the max row lp norm."""
        pf = float(self.p)
        if self.p.is_inf:
            return float(np.abs(self.entries).max())
        return float(((np.abs(self.entries) ** pf).sum(axis=1) ** (1 / pf)).max())

    def apply(self, a: np.ndarray) -> np.ndarray:
        """U(a) for a density vector a over G."""
        return np.asarray(a, dtype=float) @ self.entries


def _inv_array(G: FiniteGroup) -> np.ndarray:
    return np.array([G.inv(t) for t in range(G.order)], dtype=int)


def star_action(r: int, U: ModuleMatrix) -> ModuleMatrix:
    """(r * U)(t, s) = U(r^{-1} t, r^{-1} s); an isometry of the matrix space."""
    G = U.group
    inv_r = G.inv(r)
    perm = G.table[inv_r, :]
    return ModuleMatrix(G, U.entries[np.ix_(perm, perm)], U.p)


def module_action(r: int, U: ModuleMatrix) -> ModuleMatrix:
    """(delta_r . U)(t, s) = U(t r, s): the algebra action a.T = T((.)a)."""
    G = U.group
    perm = G.table[:, r]
    return ModuleMatrix(G, U.entries[perm, :], U.p)


def Pi(G: FiniteGroup, x: np.ndarray, p: ExponentLike) -> ModuleMatrix:
    """Canonical embedding: Pi(x)(t, s) = x(t^{-1} s)."""
    x = np.asarray(x, dtype=float)
    inv = _inv_array(G)
    entries = x[G.table[inv, :]]
    return ModuleMatrix(G, entries, Exponent(p))


def PiTilde(G: FiniteGroup, x: np.ndarray, p: ExponentLike) -> ModuleMatrix:
    """Augmentation embedding: (Pi~ x)(t, s) = x(s), constant in t."""
    x = np.asarray(x, dtype=float)
    entries = np.tile(x, (G.order, 1))
    return ModuleMatrix(G, entries, Exponent(p))


def Q_map(U: ModuleMatrix) -> ModuleMatrix:
    """Q(U)(t, s) = U(t^{-1}, t^{-1} s); intertwines the two module actions."""
    G = U.group
    inv = _inv_array(G)
    entries = U.entries[inv[:, None], G.table[inv, :]]
    return ModuleMatrix(G, entries, U.p)


# --------------------------------------------------------------------------
# retractions


@dataclass
class Retraction:
    """A linear map from the matrix space to lp(G), rho[t, s, s0] coefficients.

    ``norm_upper`` bounds the operator norm; for mean-induced retractions
    it is the (p,p) invariance constant of the mean.
    """

    group: FiniteGroup
    p: Exponent
    rho: np.ndarray
    norm_upper: float
    source_mean: Optional[np.ndarray] = None

    def __post_init__(self):
        self.p = Exponent(self.p)
        n = self.group.order
        self.rho = np.asarray(self.rho, dtype=float)
        if self.rho.shape != (n, n, n):
            raise ValueError("rho must be |G|^3")

    def apply(self, U: ModuleMatrix) -> np.ndarray:
        return np.einsum("tso,ts->o", self.rho, U.entries)


def retraction_from_mean(G: FiniteGroup, mean, p: ExponentLike,
                         cfg: OptConfig = DEFAULT_CONFIG,
                         check: bool = True) -> Retraction:
    """R(U)(s) = sum_t (s.mean)(t) U(t, s), a module morphism splitting Pi~.

    The mean must be a probability vector over G; the norm estimate
    attached is its (p,p) invariance constant (certified upper bound).
    """
    p = Exponent(p)
    lam = _as_prob_vector(G, mean)
    n = G.order
    inv = _inv_array(G)
    # Lmat[s, t] = (s . mean)(t) = mean(s^{-1} t)
    Lmat = lam[G.table[inv, :]]
    rho = np.zeros((n, n, n))
    for s in range(n):
        rho[:, s, s] = Lmat[s, :]
    fsv = FiniteSupportVector(G, {g: float(lam[g]) for g in range(n)})
    cpp = invariance_constant(G, fsv, list(range(n)), p, p, cfg=cfg)
    R = Retraction(G, p, rho, cpp.upper_bound, source_mean=lam.copy())
    if check:
        rng = rng_for(cfg, 1212, n)
        for _ in range(4):
            x = rng.standard_normal(n)
            if np.abs(R.apply(PiTilde(G, x, p)) - x).max() > 1e-9:
                raise AssertionError("R does not split the augmentation embedding")
            U = ModuleMatrix(G, rng.standard_normal((n, n)), p)
            r = int(rng.integers(0, n))
            lhs = R.apply(star_action(r, U))
            rhs = _left_translate_vector(G, r, R.apply(U))
            if np.abs(lhs - rhs).max() > 1e-9:
                raise AssertionError("R is not a module morphism")
    return R


def _as_prob_vector(G: FiniteGroup, mean) -> np.ndarray:
    if isinstance(mean, FiniteSupportVector):
        lam = np.zeros(G.order)
        for g, v in mean.values.items():
            lam[g] = v
    else:
        lam = np.asarray(mean, dtype=float)
    if lam.shape != (G.order,):
        raise ValueError("the mean must assign a value to every group element")
    if np.any(lam < -1e-15) or abs(lam.sum() - 1.0) > 1e-12:
        raise ValueError("the mean must be a probability vector")
    return lam


def _left_translate_vector(G: FiniteGroup, r: int, x: np.ndarray) -> np.ndarray:
    """(r . x)(s) = x(r^{-1} s)."""
    perm = G.table[G.inv(r), :]
    return x[perm]


def mean_from_retraction(R: Retraction, tol: float = 1e-9) -> np.ndarray:
    """Extract the mean: <delta_t, mean> = R(delta_e (x) delta_t)(e)."""
    G = R.group
    n = G.order
    e = G.identity
    lam = np.zeros(n)
    for u in range(n):
        entries = np.zeros((n, n))
        entries[u, e] = 1.0
        lam[u] = R.apply(ModuleMatrix(G, entries, R.p))[e]
    if abs(lam.sum() - 1.0) > tol:
        raise AssertionError(f"extracted functional has mass {lam.sum()}, not 1")
    return lam


# --------------------------------------------------------------------------
# inequality checks


def sign_lemma_check(F: np.ndarray, p: ExponentLike,
                     ambient: Optional[ExponentLike] = None,
                     weights: Optional[np.ndarray] = None) -> dict:
    """Diagonal bound by exhaustive sign enumeration.

    F has shape (n, n, m): an n x n array of vectors.  C is the maximum of
    (sum_j ||sum_i d_i F[i,j]||^p)^(1/p) over sign vectors d; the diagonal
    (sum_j ||F[j,j]||^p)^(1/p) never exceeds it.
    """
    F = np.asarray(F, dtype=float)
    if F.ndim != 3 or F.shape[0] != F.shape[1]:
        raise ValueError("F must be an n x n array of vectors")
    n = F.shape[0]
    if n > 12:
        raise ValueError("sign enumeration guard: n <= 12")
    p = Exponent(p)
    ambient = p if ambient is None else Exponent(ambient)
    pf = float(p)

    def vec_norm(v: np.ndarray) -> float:
        return lp_norm_values(v, ambient, weights)

    total = 1 << n
    signs = np.ones((total, n))
    idx = np.arange(total)
    for j in range(n):
        signs[:, j] = 1.0 - 2.0 * ((idx >> j) & 1)
    combos = np.einsum("dn,njm->djm", signs, F)
    norms = np.array([[vec_norm(combos[d, j]) for j in range(n)]
                      for d in range(total)])
    values = (norms ** pf).sum(axis=1) ** (1 / pf)
    best = int(np.argmax(values))
    C = float(values[best])
    diagonal = float((np.array([vec_norm(F[j, j]) for j in range(n)]) ** pf)
                     .sum() ** (1 / pf))
    return {"C": C, "diagonal": diagonal, "ok": bool(diagonal <= C + 1e-12),
            "slack": C - diagonal, "witness_signs": signs[best].tolist()}


def _mask_output(U: ModuleMatrix, keep: np.ndarray) -> ModuleMatrix:
    """chi_Y U: zero the output variable (the s index) off the block."""
    return ModuleMatrix(U.group, U.entries * keep[None, :], U.p)


def diagonal_inequality_check(R: Retraction, U: ModuleMatrix,
                              X: Sequence[int], Y: Sequence[int],
                              tol: float = 1e-9) -> dict:
    """(sum_i ||chi_{X_i} R(chi_{Y_i} U)||_p^p)^{1/p} <= ||R|| ||U||.

    X and Y are block assignments over the group elements (equal block
    counts); the right side uses the retraction's certified norm bound.
    """
    G = R.group
    X = np.asarray(X, dtype=int)
    Y = np.asarray(Y, dtype=int)
    if X.shape != (G.order,) or Y.shape != (G.order,):
        raise ValueError("partitions must assign a block to every element")
    nblocks = max(X.max(), Y.max()) + 1
    pf = float(R.p)
    total = 0.0
    for i in range(nblocks):
        v = R.apply(_mask_output(U, (Y == i).astype(float)))
        v = np.where(X == i, v, 0.0)
        total += lp_norm_values(v, R.p) ** pf
    lhs = total ** (1 / pf)
    rhs = R.norm_upper * U.norm()
    return {"lhs": lhs, "rhs": rhs, "ok": bool(lhs <= rhs + tol),
            "slack": rhs - lhs, "blocks": int(nblocks)}


def diagonal_singleton_check(R: Retraction, U: ModuleMatrix,
                             tol: float = 1e-9) -> dict:
    """(sum_s |R(delta_s U)(s)|^p)^{1/p} <= ||U|| ||R||: singleton blocks."""
    idx = np.arange(R.group.order)
    return diagonal_inequality_check(R, U, idx, idx, tol)


def disjoint_test_operator(x_list: Sequence[np.ndarray],
                           f_list: Sequence[np.ndarray],
                           U: ModuleMatrix, tol: float = 1e-9):
    """T = sum_i x_i (x) U'(f_i) for disjointly supported x_i and f_i.

    Exact norm bound: ||T|| <= ||U|| max_i ||f_i||_{p'} ||x_i||_p (both
    sides computed exactly on the l1 domain).
    """
    G = U.group
    n = G.order
    if len(x_list) != len(f_list):
        raise ValueError("need as many x as f vectors")
    if not x_list:
        return ModuleMatrix(G, np.zeros((n, n)), U.p), \
            {"bound": 0.0, "norm": 0.0, "ok": True}
    xs = [np.asarray(x, dtype=float) for x in x_list]
    fs = [np.asarray(f, dtype=float) for f in f_list]
    for arrs, label in ((xs, "x"), (fs, "f")):
        supports = [set(np.nonzero(a)[0]) for a in arrs]
        for i in range(len(arrs)):
            for j in range(i + 1, len(arrs)):
                if supports[i] & supports[j]:
                    raise ValueError(f"the {label} vectors must have disjoint supports")
    pc = U.p.conjugate()
    entries = np.zeros((n, n))
    for x, f in zip(xs, fs):
        adj = U.entries @ f          # U'(f)(t) = <U(delta_t), f>
        entries += np.outer(adj, x)
    T = ModuleMatrix(G, entries, U.p)
    bound = U.norm() * max(lp_norm_values(f, pc) * lp_norm_values(x, U.p)
                           for x, f in zip(xs, fs))
    ok = T.norm() <= bound + tol
    if not ok:
        raise AssertionError(f"disjoint-support bound violated: {T.norm()} > {bound}")
    return T, {"bound": bound, "norm": T.norm(), "ok": bool(ok)}


# --------------------------------------------------------------------------
# the full identity suite


def verify_module_identities(G: FiniteGroup, p: ExponentLike, trials: int = 50,
                             cfg: OptConfig = DEFAULT_CONFIG,
                             mean: Optional[np.ndarray] = None) -> dict:
    """Exact verification of the coretraction correspondence on a finite group.

    Residuals (all of which should sit at machine precision): Q o Pi = Pi~,
    Q intertwines the actions, R o Pi~ = identity, R is a module morphism,
    the mean round-trip, the character property of the augmentation, and
    convolution associativity; plus the diagonal inequalities with the
    certified ||R|| bound.
    """
    p = Exponent(p)
    n = G.order
    rng = rng_for(cfg, 1313, n, trials)
    lam = _as_prob_vector(G, mean) if mean is not None else np.full(n, 1.0 / n)
    R = retraction_from_mean(G, lam, p, cfg=cfg, check=False)

    res = {k: 0.0 for k in
           ["Q_Pi_equals_PiTilde", "Q_intertwines", "R_splits_PiTilde",
            "R_morphism", "mean_round_trip", "character", "associativity"]}
    diag_ok = True
    diag_slack = np.inf

    for _ in range(trials):
        x = rng.standard_normal(n)
        U = ModuleMatrix(G, rng.standard_normal((n, n)), p)
        r = int(rng.integers(0, n))

        res["Q_Pi_equals_PiTilde"] = max(
            res["Q_Pi_equals_PiTilde"],
            float(np.abs(Q_map(Pi(G, x, p)).entries - PiTilde(G, x, p).entries).max()))
        res["Q_intertwines"] = max(
            res["Q_intertwines"],
            float(np.abs(Q_map(module_action(r, U)).entries
                         - star_action(r, Q_map(U)).entries).max()))
        res["R_splits_PiTilde"] = max(
            res["R_splits_PiTilde"],
            float(np.abs(R.apply(PiTilde(G, x, p)) - x).max()))
        res["R_morphism"] = max(
            res["R_morphism"],
            float(np.abs(R.apply(star_action(r, U))
                         - _left_translate_vector(G, r, R.apply(U))).max()))

        fa = FiniteSupportVector(G, {int(g): float(v) for g, v in
                                     enumerate(rng.standard_normal(n))})
        fb = FiniteSupportVector(G, {int(g): float(v) for g, v in
                                     enumerate(rng.standard_normal(n))})
        fc = FiniteSupportVector(G, {int(g): float(v) for g, v in
                                     enumerate(rng.standard_normal(n))})
        res["character"] = max(
            res["character"],
            abs(augmentation(convolve(fa, fb)) - augmentation(fa) * augmentation(fb)))
        left = convolve(convolve(fa, fb), fc)
        right = convolve(fa, convolve(fb, fc))
        diff = left + right.scaled(-1.0)
        res["associativity"] = max(res["associativity"], diff.lp_norm("inf"))

        check = diagonal_singleton_check(R, U)
        diag_ok = diag_ok and check["ok"]
        diag_slack = min(diag_slack, check["slack"])

    res["mean_round_trip"] = float(np.abs(mean_from_retraction(R) - lam).max())
    cpp = R.norm_upper
    return {"group": G.name, "p": str(p), "trials": trials,
            "residuals": res, "Cpp_upper": cpp,
            "diagonal_ok": bool(diag_ok), "diagonal_min_slack": diag_slack,
            "max_residual": max(res.values()),
            "ok": bool(max(res.values()) <= 1e-12 and diag_ok)}
