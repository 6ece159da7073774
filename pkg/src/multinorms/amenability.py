"""Amenability diagnostics: Folner ratios and searches, multi-invariance
constants of candidate means, the layered closed form, and the two
non-amenability obstructions (non-compactness and free-group growth).

Ratios use counting measure.  Connected-set searches run in the left
Cayley graph (edges g ~ sg) over subsets containing the identity; the
ratio |FS|/|S| is invariant under right translation of S, which preserves
left-Cayley connectivity, so this canonicalization loses no generality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from ._optim import DEFAULT_CONFIG, OptConfig
from .groups import (FiniteGroup, FiniteSupportVector, FreeGroup, GroupModel,
                     LatticeGroup, ball, product_set, translate, uniform_on)
from .multinorm import NormResult, Partition, max_multinorm, partition_value, weak_pq
from .spaces import DiscreteSpace, Exponent, ExponentLike, MultiVector

__all__ = [
    "FolnerReport", "MeanCandidate", "folner_ratio", "folner_search",
    "invariance_constant", "layered_closed_form", "compactness_obstruction",
    "freegroup_obstruction", "pseudo_amenability_scan", "translates_tuple",
]


@dataclass(frozen=True)
class FolnerReport:
    F: tuple
    S: tuple
    product_size: int
    ratio: float
    family: str = "explicit"
    searched: int = 1
    bound: Optional[dict] = None

    def as_dict(self) -> dict:
        out = {"F": list(self.F), "S": list(self.S),
               "product_size": self.product_size, "ratio": self.ratio,
               "family": self.family, "searched": self.searched}
        if self.bound is not None:
            out["bound"] = self.bound
        return out


@dataclass(frozen=True)
class MeanCandidate:
    """A nonnegative unit-mass finitely supported density."""

    density: FiniteSupportVector

    def __post_init__(self):
        vals = self.density.values
        if any(v < 0 for v in vals.values()):
            raise ValueError("a mean candidate must be nonnegative")
        mass = sum(vals.values())
        if abs(mass - 1.0) > 1e-12:
            raise ValueError(f"a mean candidate must have unit mass, got {mass}")

    @property
    def group(self) -> GroupModel:
        return self.density.group


def folner_ratio(G: GroupModel, F: Iterable, S: Iterable,
                 bound: Optional[tuple] = None) -> FolnerReport:
    """|FS| / |S| by exact enumeration; optionally checks C n^{1-1/q}."""
    F = list(F)
    S = list(S)
    if not S:
        raise ValueError("the Folner ratio needs a nonempty set S")
    FS = product_set(G, F, S)
    ratio = len(FS) / len(S)
    bound_info = None
    if bound is not None:
        C, n, q = bound
        q = Exponent(q)
        limit = C * float(n) ** float(1 - q.reciprocal())
        bound_info = {"C": C, "n": n, "q": str(q), "limit": limit,
                      "satisfied": bool(ratio <= limit + 1e-12)}
    return FolnerReport(tuple(G.sorted_elements(F)), tuple(G.sorted_elements(S)),
                        len(FS), ratio, bound=bound_info)


def _left_cayley_neighbors(G: GroupModel, nodes: list) -> list:
    index = {g: i for i, g in enumerate(nodes)}
    nbrs = []
    for g in nodes:
        row = []
        for s in G.generators:
            h = G.mul(s, g)
            j = index.get(h)
            if j is not None:
                row.append(j)
        nbrs.append(sorted(set(row)))
    return nbrs


def _connected_min_ratio(G: GroupModel, F: list, radius: int, max_size: int,
                         guard: int):
    """Exhaustive minimum ratio over connected subsets containing e.

    Connectivity is in the left Cayley graph restricted to ball(radius).
    The traversal enumerates every such subset exactly once; |FS| is
    maintained incrementally through a coverage counter.
    """
    nodes = ball(G, radius, guard=guard)
    index = {g: i for i, g in enumerate(nodes)}
    root = index[G.identity]
    nbrs = _left_cayley_neighbors(G, nodes)

    universe: dict = {}
    prods = []
    for g in nodes:
        row = []
        for f in F:
            h = G.mul(f, g)
            pid = universe.setdefault(h, len(universe))
            row.append(pid)
        prods.append(tuple(row))

    counts = [0] * len(universe)
    covered = 0
    in_sub = [False] * len(nodes)
    blocked = [False] * len(nodes)
    sub: list[int] = []
    best = {"ratio": math.inf, "S": None, "key": None}
    searched = 0

    def record():
        nonlocal searched
        searched += 1
        ratio = covered / len(sub)
        if ratio < best["ratio"] - 1e-15:
            best["ratio"] = ratio
            best["S"] = [nodes[i] for i in sub]

    def add(i: int):
        nonlocal covered
        in_sub[i] = True
        sub.append(i)
        for pid in prods[i]:
            counts[pid] += 1
            if counts[pid] == 1:
                covered += 1

    def remove(i: int):
        nonlocal covered
        in_sub[i] = False
        sub.pop()
        for pid in prods[i]:
            counts[pid] -= 1
            if counts[pid] == 0:
                covered -= 1

    def extend(cands: list):
        record()
        if len(sub) >= max_size:
            return
        newly_blocked = []
        for pos, v in enumerate(cands):
            add(v)
            fresh = [w for w in nbrs[v]
                     if not in_sub[w] and not blocked[w]]
            tail = [w for w in cands[pos + 1:] if not blocked[w]]
            seen = set(tail)
            ext = tail + [w for w in fresh if w not in seen]
            extend(ext)
            remove(v)
            blocked[v] = True
            newly_blocked.append(v)
        for v in newly_blocked:
            blocked[v] = False

    add(root)
    extend([w for w in nbrs[root] if w != root])
    remove(root)
    return best["ratio"], best["S"], searched


def folner_search(G: GroupModel, F: Iterable, family: str = "balls",
                  max_radius: int = 8, max_size: int = 8, radius: int = 4,
                  max_side: int = 16,
                  cfg: OptConfig = DEFAULT_CONFIG) -> FolnerReport:
    """Minimize |FS|/|S| over a candidate family of sets S.

    Families: ``balls`` (generator balls of growing radius), ``connected``
    (every connected subset of ball(radius) containing e, up to max_size),
    ``rectangles`` (boxes prod [0, m_i), lattices only).  Ties break toward
    the first set in canonical search order.
    """
    F = list(F)
    if family == "balls":
        best = None
        searched = 0
        for rad in range(0, max_radius + 1):
            try:
                S = ball(G, rad, guard=cfg.ball_guard)
            except ValueError:
                break
            searched += 1
            rep = folner_ratio(G, F, S)
            if best is None or rep.ratio < best.ratio - 1e-15:
                best = rep
            if isinstance(G, FiniteGroup) and len(S) == G.order:
                break
        return FolnerReport(best.F, best.S, best.product_size, best.ratio,
                            family="balls", searched=searched)

    if family == "connected":
        ratio, S, searched = _connected_min_ratio(
            G, F, radius=radius, max_size=max_size, guard=cfg.ball_guard)
        rep = folner_ratio(G, F, S)
        return FolnerReport(rep.F, rep.S, rep.product_size, rep.ratio,
                            family=f"connected<= {max_size} in ball({radius})",
                            searched=searched)

    if family == "rectangles":
        if not isinstance(G, LatticeGroup):
            raise ValueError("the rectangles family needs a lattice group")
        best = None
        searched = 0
        d = G.dim
        import itertools as it
        for sides in it.product(range(1, max_side + 1), repeat=d):
            size = 1
            for s in sides:
                size *= s
            if size > cfg.ball_guard:
                continue
            S = [tuple(c) for c in it.product(*(range(s) for s in sides))]
            searched += 1
            rep = folner_ratio(G, F, S)
            if best is None or rep.ratio < best.ratio - 1e-15:
                best = rep
        return FolnerReport(best.F, best.S, best.product_size, best.ratio,
                            family=f"rectangles<= {max_side}", searched=searched)

    raise ValueError(f"unknown family {family!r}")


def translates_tuple(G: GroupModel, a: FiniteSupportVector,
                     F: Sequence) -> MultiVector:
    """The tuple (s_1.a, ..., s_n.a) on the union of supports, unit weights."""
    translated = [translate(G, s, a) for s in F]
    union: set = set()
    for t in translated:
        union.update(t.values.keys())
    points = G.sorted_elements(union)
    if not points:
        raise ValueError("all translates vanish")
    cols = np.zeros((len(F), len(points)))
    for i, t in enumerate(translated):
        for j, g in enumerate(points):
            cols[i, j] = t(g)
    space = DiscreteSpace(tuple(points), np.ones(len(points)))
    return MultiVector(space, cols)


def invariance_constant(G: GroupModel, a, F: Sequence,
                        p: ExponentLike = 1, q: ExponentLike = 1,
                        mode: str = "auto",
                        cfg: OptConfig = DEFAULT_CONFIG) -> NormResult:
    """Weak (p,q)-multi-norm of the translate tuple (s.a : s in F).

    The supremum defining the norm localizes to the union of the translate
    supports (dual vectors vanish off it), so the computation runs on that
    finite l1 space under counting measure.
    """
    if isinstance(a, MeanCandidate):
        a = a.density
    x = translates_tuple(G, a, F)
    return weak_pq(x, p, q, r=1, mode=mode, cfg=cfg)


def layered_closed_form(G: GroupModel, beta: Sequence[float],
                        nested_sets: Sequence[Iterable], F: Sequence) -> float:
    """sum_k |beta_k| |F S_k| for nested S_1 <= ... <= S_N.

    This is the exact (1,1) translate norm of f = sum beta_k chi_{S_k}
    when the coefficients share a sign (the layer representation of a
    nonnegative density); for mixed signs it is only the layer bound.
    """
    sets = [set(S) for S in nested_sets]
    if len(sets) != len(beta):
        raise ValueError("one coefficient per layer is required")
    for small, big in zip(sets, sets[1:]):
        if not small <= big:
            raise ValueError("layers must be nested (S_1 <= ... <= S_N)")
    total = 0.0
    for b, S in zip(beta, sets):
        if not S:
            raise ValueError("layers must be nonempty")
        total += abs(b) * len(product_set(G, F, S))
    return total


@dataclass
class ObstructionReport:
    kind: str
    elements: list
    c: float
    bound: float
    constant_value: float
    constant_upper: float
    ok: bool
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "elements": [repr(e) for e in self.elements],
                "c": self.c, "bound": self.bound,
                "constant_value": self.constant_value,
                "constant_upper": self.constant_upper, "ok": self.ok,
                "details": self.details}


def compactness_obstruction(G: GroupModel, a, q: ExponentLike, N: int,
                            max_radius: int = 24,
                            cfg: OptConfig = DEFAULT_CONFIG) -> ObstructionReport:
    """Lower bound N^{1/q} c for the (1,q) constant of a non-compact group.

    Finds translates with pairwise disjoint copies of the support window by
    greedy separation over the ball enumeration, then checks the bound
    against the directly computed invariance constant.
    """
    if isinstance(a, MeanCandidate):
        a = a.density
    if isinstance(G, FiniteGroup):
        raise ValueError("the non-compactness obstruction needs an infinite group")
    q = Exponent(q)
    V = set(a.values.keys())
    if not V:
        raise ValueError("the candidate mean has empty support")
    chosen: list = []
    occupied: set = set()
    radius = 0
    while len(chosen) < N and radius <= max_radius:
        for s in ball(G, radius, guard=cfg.ball_guard):
            sV = {G.mul(s, v) for v in V}
            if not (sV & occupied):
                chosen.append(s)
                occupied |= sV
                if len(chosen) == N:
                    break
        radius += 1
    if len(chosen) < N:
        raise ValueError(f"could not separate {N} translates within radius {max_radius}")
    c = sum(abs(v) for v in a.values.values())
    bound = float(N) ** float(q.reciprocal()) * c
    res = invariance_constant(G, a, chosen, p=1, q=q, cfg=cfg)
    ok = res.value >= bound - 1e-9
    return ObstructionReport("compactness", chosen, c, bound, res.value,
                             res.upper_bound, bool(ok),
                             {"q": str(q), "N": N})


def freegroup_obstruction(q: ExponentLike, n: int, radius: int = 1,
                          cfg: OptConfig = DEFAULT_CONFIG) -> ObstructionReport:
    """Growth obstruction on the free group of rank two.

    With W(x) the words starting with letter x, the sets b^i W(a) are
    pairwise disjoint, so the translate tuple (b.a, ..., b^n.a) of any
    candidate mean a has (1,q)-norm at least <chi_{W(a)}, a> n^{1/q}.
    The candidate is uniform on ball(radius); the piece of largest mass
    among {W(a), W(a^{-1}), {e}} is used (these stay disjoint under the
    b-translates).
    """
    q = Exponent(q)
    G = FreeGroup(2)
    a = uniform_on(G, ball(G, radius))

    def piece_mass(piece) -> float:
        return sum(v for g, v in a.values.items() if piece(g))

    pieces = [
        ("W(a)", lambda g: len(g) > 0 and g[0] == 1),
        ("W(a^-1)", lambda g: len(g) > 0 and g[0] == -1),
        ("{e}", lambda g: len(g) == 0),
    ]
    masses = [(name, fn, piece_mass(fn)) for name, fn, in pieces]
    name, piece_fn, c = max(masses, key=lambda t: t[2])
    if c == 0:
        raise ValueError("the candidate mean gives no mass to any usable piece")

    b = G.generator(2)
    translators = []
    g = G.identity
    for _ in range(n):
        g = G.mul(b, g)
        translators.append(g)

    # verify disjointness of the translated pieces on the support union
    translated = [translate(G, t, a) for t in translators]
    piece_supports = []
    for i, t in enumerate(translated):
        prefix = translators[i]
        inv_prefix = G.inv(prefix)
        piece_supports.append({g for g in t.values
                               if piece_fn(G.mul(inv_prefix, g))})
    for i in range(n):
        for j in range(i + 1, n):
            if piece_supports[i] & piece_supports[j]:
                raise AssertionError("translated pieces are not disjoint")

    bound = c * float(n) ** float(q.reciprocal())
    res = invariance_constant(G, a, translators, p=1, q=q, cfg=cfg)

    # structured partition: block i collects its disjoint piece; leftovers
    # go to the greedy block, which can only increase the value
    x = translates_tuple(G, a, translators)
    assign = np.argmax(np.abs(x.columns), axis=0)
    for j, g in enumerate(x.space.points):
        for i in range(n):
            if g in piece_supports[i]:
                assign[j] = i
                break
    structured = partition_value(x, 1, q, assign)
    value = max(res.value, structured)
    ok = value >= bound - 1e-9
    return ObstructionReport("free_group", translators, c, bound, value,
                             max(res.upper_bound, value), bool(ok),
                             {"q": str(q), "n": n, "piece": name,
                              "radius": radius, "structured_value": structured})


@dataclass
class ScanResult:
    group: str
    family: str
    q: str
    rows: list
    fitted_exponent: Optional[float]

    def as_dict(self) -> dict:
        return {"group": self.group, "family": self.family, "q": self.q,
                "rows": self.rows, "fitted_exponent": self.fitted_exponent}


def pseudo_amenability_scan(G: GroupModel, n_range: Sequence[int],
                            family: str = "balls", q: ExponentLike = 2,
                            cfg: OptConfig = DEFAULT_CONFIG,
                            **family_kwargs) -> ScanResult:
    """Minimum Folner ratio for canonical n-element F against C n^{1-1/q}.

    F is the prefix of the canonical ball enumeration; each row reports the
    searched family's best ratio and the reference bound with C = 1.  The
    fitted exponent is the log-log slope of ratio against n.
    """
    q = Exponent(q)
    base = ball(G, max(4, max(n_range, default=1)), guard=cfg.ball_guard)
    rows = []
    for n in n_range:
        if n < 1 or n > len(base):
            raise ValueError(f"cannot build a canonical {n}-subset")
        F = base[:n]
        rep = folner_search(G, F, family=family, cfg=cfg, **family_kwargs)
        rows.append({"n": n, "family": rep.family, "best_ratio": rep.ratio,
                     "bound": float(n) ** float(1 - q.reciprocal())})
    fitted = None
    pts = [(math.log(r["n"]), math.log(r["best_ratio"])) for r in rows
           if r["n"] > 0 and r["best_ratio"] > 0]
    if len(pts) >= 2 and len({x for x, _ in pts}) >= 2:
        xs, ys = zip(*pts)
        fitted = float(np.polyfit(xs, ys, 1)[0])
    return ScanResult(getattr(G, "name", G.kind), family, str(q), rows, fitted)
