"""Group models: finite (Cayley table), free by reduced words, and lattices.

Elements are plain hashable values: integer indices for finite groups,
tuples of nonzero signed letters for free groups (letter i and its inverse
-i), and integer tuples for lattices.  All models expose the same small
interface (mul, inv, identity, generators, canonical_key) consumed by the
ball/product-set machinery and the amenability diagnostics.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from ._optim import DEFAULT_CONFIG, OptConfig

__all__ = ["GroupModel", "FiniteGroup", "FreeGroup", "LatticeGroup",
           "FiniteSupportVector", "ball", "product_set", "translate",
           "delta", "uniform_on", "group_from_spec"]


class GroupModel:
    """Common interface; concrete models override the group law."""

    kind: str = "abstract"

    @property
    def identity(self):
        raise NotImplementedError

    def mul(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    @property
    def generators(self) -> list:
        """Generating set closed under inverses, in canonical order."""
        raise NotImplementedError

    def validate_element(self, g):
        raise NotImplementedError

    def canonical_key(self, g):
        return g

    def sorted_elements(self, elems: Iterable) -> list:
        return sorted(elems, key=self.canonical_key)


class FiniteGroup(GroupModel):
    """Finite group given by its Cayley table (a validated Latin square)."""

    kind = "finite"

    def __init__(self, table: np.ndarray, name: str = "finite",
                 generator_idxs: Optional[Sequence[int]] = None):
        table = np.asarray(table, dtype=int)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise ValueError("a Cayley table must be square")
        n = table.shape[0]
        if not ((table >= 0).all() and (table < n).all()):
            raise ValueError("table entries must be element indices")
        for axis in (0, 1):
            sorted_lines = np.sort(table, axis=axis)
            if not np.array_equal(sorted_lines,
                                  np.broadcast_to(np.arange(n), table.shape)
                                  if axis == 1 else
                                  np.broadcast_to(np.arange(n)[:, None], table.shape)):
                raise ValueError("the Cayley table is not a Latin square")
        self.table = table
        self.order = n
        self.name = name
        self._identity = self._find_identity()
        self._inverse = self._find_inverses()
        self._check_associativity()
        if generator_idxs is None:
            generator_idxs = [g for g in range(n) if g != self._identity]
            if not generator_idxs:
                generator_idxs = [self._identity]
        gens = set()
        for g in generator_idxs:
            gens.add(int(g))
            gens.add(int(self._inverse[g]))
        self._generators = sorted(gens)

    def _find_identity(self) -> int:
        n = self.order
        for e in range(n):
            if np.array_equal(self.table[e], np.arange(n)) and \
               np.array_equal(self.table[:, e], np.arange(n)):
                return e
        raise ValueError("the Cayley table has no identity element")

    def _find_inverses(self) -> np.ndarray:
        n = self.order
        inv = np.full(n, -1, dtype=int)
        for g in range(n):
            hits = np.nonzero(self.table[g] == self._identity)[0]
            if hits.size != 1 or self.table[hits[0], g] != self._identity:
                raise ValueError(f"element {g} has no two-sided inverse")
            inv[g] = hits[0]
        return inv

    def _check_associativity(self, sample_cap: int = 200):
        n = self.order
        if n <= sample_cap:
            t = self.table
            left = t[t, :]                       # left[a,b,c] = (a*b)*c
            right = t[:, t]                      # right[a,b,c] = a*(b*c)
            if not np.array_equal(left, right):
                for a, b, c in itertools.product(range(n), repeat=3):
                    if t[t[a, b], c] != t[a, t[b, c]]:
                        raise ValueError(f"associativity fails at ({a},{b},{c})")
        else:
            rng = np.random.default_rng(0)
            t = self.table
            for _ in range(2000):
                a, b, c = rng.integers(0, n, size=3)
                if t[t[a, b], c] != t[a, t[b, c]]:
                    raise ValueError(f"associativity fails at ({a},{b},{c})")

    @property
    def identity(self) -> int:
        return int(self._identity)

    def mul(self, g, h) -> int:
        self.validate_element(g)
        self.validate_element(h)
        return int(self.table[g, h])

    def inv(self, g) -> int:
        self.validate_element(g)
        return int(self._inverse[g])

    @property
    def generators(self) -> list:
        return list(self._generators)

    def validate_element(self, g):
        if not isinstance(g, (int, np.integer)) or not (0 <= g < self.order):
            raise ValueError(f"{g!r} is not an element of {self.name}")

    def elements(self) -> range:
        return range(self.order)

    @staticmethod
    def cyclic(n: int) -> "FiniteGroup":
        idx = np.arange(n)
        table = (idx[:, None] + idx[None, :]) % n
        return FiniteGroup(table, name=f"Z{n}", generator_idxs=[1 % n])

    @staticmethod
    def from_permutations(gens: Sequence[Sequence[int]], name: str = "perm") -> "FiniteGroup":
        """Closure of permutation generators; elements ordered by discovery."""
        deg = len(gens[0])
        gens = [tuple(g) for g in gens]
        for g in gens:
            if sorted(g) != list(range(deg)):
                raise ValueError(f"{g!r} is not a permutation of 0..{deg - 1}")
        ident = tuple(range(deg))
        order: Dict[tuple, int] = {ident: 0}
        frontier = [ident]
        elems = [ident]
        while frontier:
            nxt = []
            for p in frontier:
                for g in gens:
                    q = tuple(p[g[i]] for i in range(deg))
                    if q not in order:
                        order[q] = len(elems)
                        elems.append(q)
                        nxt.append(q)
            frontier = nxt
            if len(elems) > 10 ** 5:
                raise ValueError("permutation closure guard exceeded")
        n = len(elems)
        table = np.zeros((n, n), dtype=int)
        for a, pa in enumerate(elems):
            for b, pb in enumerate(elems):
                table[a, b] = order[tuple(pa[pb[i]] for i in range(deg))]
        gen_idxs = [order[g] for g in gens]
        return FiniteGroup(table, name=name, generator_idxs=gen_idxs)

    @staticmethod
    def symmetric(n: int) -> "FiniteGroup":
        if n < 2:
            return FiniteGroup(np.zeros((1, 1), dtype=int), name="S1")
        swap = tuple([1, 0] + list(range(2, n)))
        cycle = tuple(list(range(1, n)) + [0])
        return FiniteGroup.from_permutations([swap, cycle], name=f"S{n}")

    @staticmethod
    def from_csv(text: str, name: str = "finite") -> "FiniteGroup":
        rows = [[int(v) for v in row] for row in csv.reader(io.StringIO(text.strip()))
                if row]
        return FiniteGroup(np.asarray(rows, dtype=int), name=name)


def reduce_word(word: Sequence[int]) -> tuple:
    """Cancel adjacent letter/inverse pairs; idempotent."""
    out: list[int] = []
    for letter in word:
        if letter == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(int(letter))
    return tuple(out)


class FreeGroup(GroupModel):
    """Free group on k generators; elements are reduced words."""

    kind = "free"

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError("the free group needs at least one generator")
        self.rank = rank
        self.name = f"F{rank}"

    @property
    def identity(self) -> tuple:
        return ()

    def mul(self, g, h) -> tuple:
        self.validate_element(g)
        self.validate_element(h)
        return reduce_word(tuple(g) + tuple(h))

    def inv(self, g) -> tuple:
        self.validate_element(g)
        return tuple(-letter for letter in reversed(g))

    @property
    def generators(self) -> list:
        gens = []
        for i in range(1, self.rank + 1):
            gens.append((i,))
            gens.append((-i,))
        return gens

    def generator(self, i: int) -> tuple:
        """The i-th generator (1-based) as a word."""
        if not 1 <= i <= self.rank:
            raise ValueError("generator index out of range")
        return (i,)

    def validate_element(self, g):
        if not isinstance(g, tuple):
            raise ValueError(f"{g!r} is not a word of {self.name}")
        for letter in g:
            if not isinstance(letter, (int, np.integer)) or letter == 0 \
               or abs(letter) > self.rank:
                raise ValueError(f"{g!r} is not a word of {self.name}")
        if reduce_word(g) != g:
            raise ValueError(f"{g!r} is not reduced")

    def canonical_key(self, g):
        return (len(g), g)


class LatticeGroup(GroupModel):
    """The abelian group of integer d-tuples under addition."""

    kind = "lattice"

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("lattice dimension must be at least 1")
        self.dim = dim
        self.name = f"Z^{dim}"

    @property
    def identity(self) -> tuple:
        return (0,) * self.dim

    def mul(self, g, h) -> tuple:
        self.validate_element(g)
        self.validate_element(h)
        return tuple(int(a + b) for a, b in zip(g, h))

    def inv(self, g) -> tuple:
        self.validate_element(g)
        return tuple(int(-a) for a in g)

    @property
    def generators(self) -> list:
        gens = []
        for i in range(self.dim):
            e = [0] * self.dim
            e[i] = 1
            gens.append(tuple(e))
            e[i] = -1
            gens.append(tuple(e))
        return gens

    def validate_element(self, g):
        if not (isinstance(g, tuple) and len(g) == self.dim
                and all(isinstance(a, (int, np.integer)) for a in g)):
            raise ValueError(f"{g!r} is not an element of {self.name}")

    def canonical_key(self, g):
        return (sum(abs(a) for a in g), g)


def ball(G: GroupModel, radius: int, guard: int = DEFAULT_CONFIG.ball_guard) -> list:
    """All products of at most `radius` generators, canonically ordered."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    seen = {G.identity}
    frontier = [G.identity]
    for _ in range(radius):
        nxt = []
        for g in frontier:
            for s in G.generators:
                h = G.mul(g, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
                    if len(seen) > guard:
                        raise ValueError(f"ball guard exceeded ({guard} elements)")
        frontier = nxt
        if not frontier:
            break
    return G.sorted_elements(seen)


def product_set(G: GroupModel, F: Iterable, S: Iterable) -> list:
    """The set F S = {f s}, deduplicated and canonically ordered."""
    out = {G.mul(f, s) for f in F for s in S}
    return G.sorted_elements(out)


@dataclass
class FiniteSupportVector:
    """Finitely supported real function on a group, under counting measure."""

    group: GroupModel
    values: Dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for g, v in self.values.items():
            self.group.validate_element(g)
            if v != 0:
                clean[g] = float(v)
        self.values = clean

    def support(self) -> list:
        return self.group.sorted_elements(self.values.keys())

    def lp_norm(self, p) -> float:
        from .spaces import Exponent
        p = Exponent(p)
        if not self.values:
            return 0.0
        vals = np.array(list(self.values.values()))
        if p.is_inf:
            return float(np.abs(vals).max())
        pf = float(p)
        return float((np.abs(vals) ** pf).sum() ** (1 / pf))

    def __add__(self, other: "FiniteSupportVector") -> "FiniteSupportVector":
        out = dict(self.values)
        for g, v in other.values.items():
            out[g] = out.get(g, 0.0) + v
        return FiniteSupportVector(self.group, out)

    def scaled(self, c: float) -> "FiniteSupportVector":
        return FiniteSupportVector(self.group, {g: c * v for g, v in self.values.items()})

    def __call__(self, g) -> float:
        return self.values.get(g, 0.0)


def delta(G: GroupModel, g) -> FiniteSupportVector:
    G.validate_element(g)
    return FiniteSupportVector(G, {g: 1.0})


def uniform_on(G: GroupModel, elements: Iterable) -> FiniteSupportVector:
    elems = list(elements)
    if not elems:
        raise ValueError("cannot build a uniform density on the empty set")
    mass = 1.0 / len(elems)
    return FiniteSupportVector(G, {g: mass for g in elems})


def translate(G: GroupModel, s, f: FiniteSupportVector) -> FiniteSupportVector:
    """Left translate: (s.f)(t) = f(s^{-1} t); all lp norms are preserved."""
    return FiniteSupportVector(G, {G.mul(s, t): v for t, v in f.values.items()})


def group_from_spec(spec) -> GroupModel:
    """Build a group from {"kind": "free"|"lattice"|"finite", ...} or a shorthand.

    Shorthands: "z<n>" (cyclic), "s<n>" (symmetric), "free<k>", "Z" or
    "lattice<d>".
    """
    if isinstance(spec, str):
        text = spec.strip().lower()
        if text == "z":
            return LatticeGroup(1)
        if text.startswith("lattice"):
            return LatticeGroup(int(text[len("lattice"):] or 1))
        if text.startswith("free"):
            return FreeGroup(int(text[len("free"):] or 2))
        if text.startswith("z") and text[1:].isdigit():
            return FiniteGroup.cyclic(int(text[1:]))
        if text.startswith("s") and text[1:].isdigit():
            return FiniteGroup.symmetric(int(text[1:]))
        raise ValueError(f"unknown group shorthand {spec!r}")
    kind = spec.get("kind")
    if kind == "free":
        return FreeGroup(int(spec.get("rank", 2)))
    if kind == "lattice":
        return LatticeGroup(int(spec.get("dim", 1)))
    if kind == "finite":
        if "table_csv" in spec:
            return FiniteGroup.from_csv(spec["table_csv"])
        if "perm_gens" in spec:
            return FiniteGroup.from_permutations(spec["perm_gens"])
        if "cyclic" in spec:
            return FiniteGroup.cyclic(int(spec["cyclic"]))
        raise ValueError("finite group spec needs table_csv, perm_gens or cyclic")
    raise ValueError(f"unknown group kind {kind!r}")
