"""Internal engine: lq-over-lp matrix operator norms with certificates.

Computes sup { ||M v||_b : ||v||_a <= 1 }.  Exact routes exist for a=1
(column maximum), b=inf (row maximum), a=b=2 (spectral norm) and a=inf on
small matrices (sign-vector enumeration); everything else falls back to a
monotone power iteration with deterministic restarts.  The reported value
is always attained by the returned witness; `upper` is an analytic bound,
so the true norm lies in [value, upper].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .spaces import Exponent, lp_norm_values

__all__ = ["OptConfig", "DEFAULT_CONFIG", "OpNormResult", "opnorm", "norming_vector", "rng_for"]


@dataclass(frozen=True)
class OptConfig:
    """Knobs for every optimizer in the package; defaults are deterministic."""

    seed: int = 0
    restarts: int = 32
    max_iters: int = 300
    tol: float = 1e-13
    sign_enum_limit: int = 20
    partition_guard_bits: float = 24.0
    local_search_restarts: int = 8
    dual_refine_budget: int = 0
    ball_guard: int = 10 ** 6

    def with_seed(self, seed: int) -> "OptConfig":
        from dataclasses import replace

        return replace(self, seed=seed)


DEFAULT_CONFIG = OptConfig()


def rng_for(cfg: OptConfig, *stream: int) -> np.random.Generator:
    """Deterministic generator derived from the root seed and a stream tag."""
    return np.random.default_rng([cfg.seed & 0x7FFFFFFF, *[s & 0x7FFFFFFF for s in stream]])


@dataclass(frozen=True)
class OpNormResult:
    value: float
    upper: float
    witness: np.ndarray
    method: str

    @property
    def gap(self) -> float:
        return self.upper - self.value


def norming_vector(y: np.ndarray, e: Exponent) -> np.ndarray:
    """Unit vector v in the l^e ball with <y, v> = ||y||_{e'}.

    For e = 1 this is a signed basis vector at the largest entry, for
    e = inf the sign pattern of y.
    """
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        return y.copy()
    if not np.any(y):
        out = np.zeros_like(y)
        out[0] = 1.0
        return out
    if e.is_inf:
        return np.where(y >= 0, 1.0, -1.0)
    ef = float(e)
    if ef == 1.0:
        j = int(np.argmax(np.abs(y)))
        out = np.zeros_like(y)
        out[j] = 1.0 if y[j] >= 0 else -1.0
        return out
    ec = float(e.conjugate())
    absy = np.abs(y)
    scale = absy.max()
    base = (absy / scale) ** (ec - 1.0)
    v = np.sign(y) * base
    nrm = lp_norm_values(v, e)
    return v / nrm


def _holder_upper(M: np.ndarray, a: Exponent, b: Exponent) -> float:
    """min of column, row and interpolated-spectral bounds on ||M||_{a->b}."""
    aconj = a.conjugate()
    col = lp_norm_values(
        np.array([lp_norm_values(M[:, j], b) for j in range(M.shape[1])]), aconj)
    row = lp_norm_values(
        np.array([lp_norm_values(M[i, :], aconj) for i in range(M.shape[0])]), b)
    bounds = [col, row]
    if min(M.shape) <= 256:
        sigma = float(np.linalg.norm(M, 2)) if M.size else 0.0
        ra = a.reciprocal()
        rb = b.reciprocal()
        fin = float(M.shape[1]) ** max(0.0, 0.5 - float(ra))
        fout = float(M.shape[0]) ** max(0.0, float(rb) - 0.5)
        bounds.append(fin * sigma * fout)
    return float(min(bounds))


def _power_iteration(M: np.ndarray, a: Exponent, b: Exponent,
                     x0: np.ndarray, max_iters: int, tol: float):
    """Monotone alternating ascent for ||M||_{a->b} from a unit-a start."""
    bconj = b.conjugate()
    x = x0
    best = lp_norm_values(M @ x, b)
    best_x = x
    for _ in range(max_iters):
        y = M @ x
        fy = lp_norm_values(y, b)
        if fy == 0.0:
            break
        psi = norming_vector(y, bconj)
        z = M.T @ psi
        x_new = norming_vector(z, a)
        f_new = lp_norm_values(M @ x_new, b)
        if f_new > best:
            best, best_x = f_new, x_new
        if f_new <= fy * (1.0 + tol):
            break
        x = x_new
    return best, best_x


def _sign_enumeration(M: np.ndarray, b: Exponent, chunk: int = 1 << 14):
    """Exact max of ||M s||_b over sign vectors s (first entry pinned to +1)."""
    m = M.shape[1]
    total = 1 << max(m - 1, 0)
    best = -1.0
    best_s: Optional[np.ndarray] = None
    bf = None if b.is_inf else float(b)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        signs = np.ones((idx.size, m))
        for j in range(m - 1):
            signs[:, j + 1] = 1.0 - 2.0 * ((idx >> j) & 1)
        Y = signs @ M.T
        if b.is_inf:
            vals = np.abs(Y).max(axis=1)
        elif bf == 1.0:
            vals = np.abs(Y).sum(axis=1)
        else:
            vals = (np.abs(Y) ** bf).sum(axis=1) ** (1.0 / bf)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best = float(vals[k])
            best_s = signs[k].copy()
    return best, best_s


def opnorm(M: np.ndarray, a: Exponent, b: Exponent,
           cfg: OptConfig = DEFAULT_CONFIG) -> OpNormResult:
    """Norm of M as an operator from l^a into l^b, with witness."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError("opnorm expects a matrix")
    rows, cols = M.shape
    if M.size == 0 or not np.any(M):
        witness = np.zeros(cols)
        if cols:
            witness[0] = 1.0
        return OpNormResult(0.0, 0.0, witness, "closed_form")

    af = float(a)
    bf = float(b)

    if af == 1.0:
        col_norms = np.array([lp_norm_values(M[:, j], b) for j in range(cols)])
        j = int(np.argmax(col_norms))
        witness = np.zeros(cols)
        witness[j] = 1.0
        v = float(col_norms[j])
        return OpNormResult(v, v, witness, "closed_form")

    if b.is_inf:
        aconj = a.conjugate()
        row_norms = np.array([lp_norm_values(M[i, :], aconj) for i in range(rows)])
        i = int(np.argmax(row_norms))
        witness = norming_vector(M[i, :], a)
        v = float(row_norms[i])
        return OpNormResult(v, v, witness, "closed_form")

    if af == 2.0 and bf == 2.0:
        U, S, Vt = np.linalg.svd(M, full_matrices=False)
        v = float(S[0])
        return OpNormResult(v, v, Vt[0].copy(), "closed_form")

    if a.is_inf and cols <= cfg.sign_enum_limit:
        v, s = _sign_enumeration(M, b)
        return OpNormResult(v, v, s, "brute_extreme")

    upper = _holder_upper(M, a, b)
    starts: list[np.ndarray] = []
    col_norms = np.array([lp_norm_values(M[:, j], b) for j in range(cols)])
    for j in np.argsort(-col_norms)[:3]:
        e = np.zeros(cols)
        e[int(j)] = 1.0
        starts.append(e)
    ones = np.ones(cols)
    starts.append(ones / lp_norm_values(ones, a))
    if min(rows, cols) <= 256:
        _, _, Vt = np.linalg.svd(M, full_matrices=False)
        sv = Vt[0]
        starts.append(sv / lp_norm_values(sv, a))
    rng = rng_for(cfg, 101, rows, cols)
    for _ in range(cfg.restarts):
        g = rng.standard_normal(cols)
        starts.append(g / lp_norm_values(g, a))

    best = -1.0
    best_x = starts[0]
    for x0 in starts:
        val, x = _power_iteration(M, a, b, x0, cfg.max_iters, cfg.tol)
        if val > best:
            best, best_x = val, x
    best = min(best, upper)
    return OpNormResult(best, max(upper, best), best_x, "optimizer")
