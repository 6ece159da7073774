"""The weak p-summing norm of a tuple of vectors in a weighted lr space.

For x = (x_1, ..., x_n) in (l^r)^n the quantity computed here is

    mu_{p,n}(x) = sup { (sum_i |<x_i, lam>|^p)^(1/p) : ||lam||_{r'} <= 1 },

the supremum of lp-norms of the pairings over the dual unit ball, which
coincides with the l^{p'} -> l^r operator norm of the column map
alpha |-> sum_i alpha_i x_i.  Weights enter only through the pairing, so
the computation is delegated to an unweighted matrix norm after the
substitution M = X diag(w^{1/r}).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._optim import DEFAULT_CONFIG, OptConfig, opnorm
from .spaces import Exponent, ExponentLike, MultiVector, lp_norm_values, scale_by

__all__ = ["MuResult", "mu", "mu_upper", "mu_pointwise_sup",
           "holder_interpolation_check", "dual_ball_norm"]


@dataclass(frozen=True)
class MuResult:
    """Certified bracket [value, upper_bound] with a dual-ball witness."""

    value: float
    upper_bound: float
    witness: np.ndarray
    method: str

    @property
    def gap(self) -> float:
        return self.upper_bound - self.value


def _weight_powers(weights: np.ndarray, e: Exponent) -> np.ndarray:
    if e.is_inf:
        return np.ones_like(weights)
    return weights ** (1.0 / float(e))


def dual_ball_norm(lam: np.ndarray, r: Exponent, weights: np.ndarray) -> float:
    """Norm of lam in the dual of the weighted l^r space (the l^{r'} norm)."""
    return lp_norm_values(lam, r.conjugate(), weights)


def pairings(x: MultiVector, lam: np.ndarray) -> np.ndarray:
    """All pairings (<x_i, lam>)_i with the weights folded in."""
    return x.columns @ (x.space.weights * np.asarray(lam, dtype=float))


def mu(p: ExponentLike, x: MultiVector, r: ExponentLike,
       cfg: OptConfig = DEFAULT_CONFIG) -> MuResult:
    """Weak p-summing norm of x viewed inside l^r over its space."""
    p = Exponent(p)
    r = Exponent(r)
    if p.is_inf:
        raise ValueError("the weak p-summing norm is defined for 1 <= p < infinity")
    weights = x.space.weights
    rconj = r.conjugate()

    if x.n == 1:
        value = lp_norm_values(x.columns[0], r, weights)
        witness = _norming_dual_vector(x.columns[0], r, weights)
        return MuResult(value, value, witness, "closed_form")

    M = x.columns * _weight_powers(weights, r)[None, :]
    res = opnorm(M, rconj, p, cfg)
    lam = _unscale_witness(res.witness, rconj, weights)
    return MuResult(res.value, res.upper, lam, res.method)


def _unscale_witness(nu: np.ndarray, rconj: Exponent, weights: np.ndarray) -> np.ndarray:
    if rconj.is_inf:
        return np.asarray(nu, dtype=float)
    return np.asarray(nu, dtype=float) / weights ** (1.0 / float(rconj))


def _norming_dual_vector(values: np.ndarray, r: Exponent, weights: np.ndarray) -> np.ndarray:
    """lam in the dual ball with <values, lam> = ||values||_r."""
    values = np.asarray(values, dtype=float)
    if not np.any(values):
        out = np.zeros_like(values)
        if r.is_inf:
            out[0] = 1.0 / weights[0]
        elif float(r) == 1.0:
            out[0] = 1.0
        else:
            out[0] = weights[0] ** (-1.0 / float(r.conjugate()))
        return out
    if r.is_inf:
        k = int(np.argmax(np.abs(values)))
        out = np.zeros_like(values)
        out[k] = np.sign(values[k]) / weights[k]
        return out
    rf = float(r)
    if rf == 1.0:
        return np.sign(values)
    nrm = lp_norm_values(values, r, weights)
    return np.sign(values) * (np.abs(values) / nrm) ** (rf - 1.0)


def make_mu_upper(weights: np.ndarray, p: ExponentLike, r: ExponentLike,
                  cfg: OptConfig = DEFAULT_CONFIG):
    """Closure computing a certified upper bound on mu_{p,n} for raw arrays.

    The route is picked once per (p, r, weights); no iterative optimization
    is run, so the closure is cheap enough for inner search loops.  Exact
    whenever a closed route exists (sup ambient, spectral, small sign
    enumeration), otherwise the minimum of the Hoelder-type bounds.
    """
    from ._optim import _holder_upper, _sign_enumeration

    p = Exponent(p)
    r = Exponent(r)
    if p.is_inf:
        raise ValueError("the weak p-summing norm is defined for 1 <= p < infinity")
    weights = np.asarray(weights, dtype=float)
    wpow = _weight_powers(weights, r)[None, :]
    a = r.conjugate()
    pf = float(p)

    if float(a) == 1.0:
        if pf == 1.0:
            return lambda cols: float(np.abs(cols * wpow).sum(axis=0).max())
        return lambda cols: float(((np.abs(cols * wpow) ** pf).sum(axis=0) ** (1 / pf)).max())
    if float(a) == 2.0 and pf == 2.0:
        return lambda cols: float(np.linalg.norm(cols * wpow, 2))

    def generic(cols: np.ndarray) -> float:
        M = cols * wpow
        if M.shape[0] == 1:
            return lp_norm_values(M[0], p)
        if not np.any(M):
            return 0.0
        if a.is_inf and M.shape[1] <= cfg.sign_enum_limit:
            val, _ = _sign_enumeration(M, p)
            return float(val)
        return _holder_upper(M, a, p)

    return generic


def mu_upper(p: ExponentLike, x: MultiVector, r: ExponentLike,
             cfg: OptConfig = DEFAULT_CONFIG) -> float:
    """Certified upper bound on mu_{p,n}(x); exact when a closed route exists."""
    r = Exponent(r)
    if x.n == 1:
        return lp_norm_values(x.columns[0], r, x.space.weights)
    return make_mu_upper(x.space.weights, p, r, cfg)(x.columns)


def mu_pointwise_sup(lam: MultiVector) -> float:
    """Weak 1-summing norm in the sup-norm setting: max_k sum_i |lam_i(k)|.

    Exact whenever the ambient norm is the uniform one (r = inf), where the
    dual ball is the weighted l1 ball and the supremum sits at an atom.
    """
    return float(np.abs(lam.columns).sum(axis=0).max())


def holder_interpolation_check(p: ExponentLike, u: ExponentLike, v: ExponentLike,
                               alpha, x: MultiVector, r: ExponentLike,
                               cfg: OptConfig = DEFAULT_CONFIG,
                               tol: float = 1e-9) -> dict:
    """Gap-aware check of mu_p(M_alpha(x)) <= ||alpha||_{pu} mu_{pv}(x)."""
    p, u, v = Exponent(p), Exponent(u), Exponent(v)
    if u.is_inf or v.is_inf or u <= 1 or v <= 1:
        raise ValueError("interpolation requires 1 < u, v < infinity")
    if u.reciprocal() + v.reciprocal() != 1:
        raise ValueError("u and v must be conjugate (1/u + 1/v = 1)")
    alpha = np.asarray(alpha, dtype=float)
    lhs = mu(p, scale_by(alpha, x), r, cfg)
    rhs_mu = mu(p * v, x, r, cfg)
    alpha_norm = lp_norm_values(alpha, p * u)
    bound = alpha_norm * rhs_mu.upper_bound
    ok = lhs.value <= bound + tol
    return {
        "ok": bool(ok),
        "lhs_value": lhs.value,
        "lhs_upper": lhs.upper_bound,
        "alpha_norm": alpha_norm,
        "rhs_mu_value": rhs_mu.value,
        "rhs_mu_upper": rhs_mu.upper_bound,
        "bound": bound,
        "slack": bound - lhs.value,
    }
