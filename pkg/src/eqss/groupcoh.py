"""Finite groups, G-modules, resolutions over the group ring, group cohomology.

Resolutions carry an exactness certificate: small ones are certified by Smith
normal form homology of the underlying Z-complex, large bar resolutions by
verifying the standard contracting homotopy on every basis element (which is
equally rigorous and vastly cheaper).
"""

from __future__ import annotations

import os
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import GroupMismatch, ResolutionTooShort, ResourceLimit
from .exact_linalg import (
    ZZ,
    FGModule,
    IntMatrix,
    Ring,
    _snf_diagonalize,
    presented_subquotient,
    subquotient,
)

DEFAULT_MAX_RANK = 20000
_SNF_CERT_LIMIT = 2500  # total Z-rank above which bar exactness uses the homotopy


def max_free_rank() -> int:
    """Resource ceiling for the total free rank of any constructed complex."""
    val = os.environ.get("EQSS_MAX_RANK", "")
    return int(val) if val else DEFAULT_MAX_RANK


class FiniteGroup:
    """A finite group given by its full multiplication table.

    Associativity, identity and inverses are checked at construction, so a
    malformed table fails loudly and names the offending triple.
    """

    def __init__(self, table: Sequence[Sequence[int]]):
        n = len(table)
        self.order = n
        self.table = [list(map(int, row)) for row in table]
        if any(len(row) != n for row in self.table):
            raise ValueError("multiplication table is not square")
        if any(not (0 <= x < n) for row in self.table for x in row):
            raise ValueError("table entries must be element indices")
        ident = None
        for e in range(n):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(n)):
                ident = e
                break
        if ident is None:
            raise ValueError("table has no identity element")
        self.identity = ident
        self.inverse = [None] * n
        for a in range(n):
            for b in range(n):
                if self.table[a][b] == ident and self.table[b][a] == ident:
                    self.inverse[a] = b
                    break
            if self.inverse[a] is None:
                raise ValueError(f"element {a} has no inverse")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                        raise ValueError(f"associativity fails at triple ({a},{b},{c})")
        self._res_cache: Dict[str, "Resolution"] = {}

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        return cls([[(i + j) % n for j in range(n)] for i in range(n)])

    @classmethod
    def from_permutations(cls, perms: Sequence[Tuple[int, ...]]) -> "FiniteGroup":
        """Closure of the given permutations under composition."""
        if not perms:
            raise ValueError("need at least one permutation")
        deg = len(perms[0])
        ident = tuple(range(deg))
        elems = [ident]
        seen = {ident}
        frontier = [ident]
        gens = [tuple(p) for p in perms]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    c = tuple(a[g[i]] for i in range(deg))
                    if c not in seen:
                        seen.add(c)
                        elems.append(c)
                        nxt.append(c)
            frontier = nxt
        elems.sort()
        idx = {p: i for i, p in enumerate(elems)}
        table = [[idx[tuple(a[b[i]] for i in range(deg))] for b in elems] for a in elems]
        return cls(table)

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroup":
        from itertools import permutations

        return cls.from_permutations(list(permutations(range(n))))

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def cyclic_generator(self) -> Optional[int]:
        """Smallest element of full order, or None if the group is not cyclic."""
        for a in range(self.order):
            if self.element_order(a) == self.order:
                return a
        return None

    def words_in(self, generators: Sequence[int]) -> List[List[int]]:
        """For each element, a word (list of positions into `generators`) whose
        left-to-right product is the element; BFS order, so deterministic."""
        words: List[Optional[List[int]]] = [None] * self.order
        words[self.identity] = []
        frontier = [self.identity]
        while frontier:
            nxt = []
            for a in frontier:
                for k, g in enumerate(generators):
                    b = self.mul(a, g)
                    if words[b] is None:
                        words[b] = words[a] + [k]
                        nxt.append(b)
            frontier = nxt
        if any(w is None for w in words):
            missing = [i for i, w in enumerate(words) if w is None]
            raise ValueError(f"given elements do not generate; missed {missing}")
        return words  # type: ignore[return-value]


class GModule:
    """A finitely generated module with a G-action by presentation matrices.

    The presentation is canonicalized at construction to diagonal relations
    (`moduli`, 0 meaning a free generator), with the action matrices
    transported along the change of basis.  The group law, invertibility and
    preservation of relations are all verified.
    """

    def __init__(self, group: FiniteGroup, ngens: int,
                 action_matrices: Sequence[IntMatrix],
                 relations: Optional[IntMatrix] = None, ring: Ring = ZZ):
        if len(action_matrices) != group.order:
            raise ValueError("need one action matrix per group element")
        self.group = group
        self.ring = ring
        if relations is not None and relations.cols:
            if relations.rows != ngens:
                raise ValueError("relation matrix must have one row per generator")
            diag, U, Uinv, _, _ = _snf_diagonalize(relations.a, True, False)
            moduli = [abs(d) for d in diag] + [0] * (ngens - len(diag))
            keep = [i for i, d in enumerate(moduli) if d != 1]
            acts = []
            for A in action_matrices:
                B = np.dot(np.dot(U, A.a), Uinv)
                acts.append(IntMatrix.from_array(B[np.ix_(keep, keep)].copy(), ZZ))
            self.moduli = tuple(moduli[i] for i in keep)
            self.actions = acts
        else:
            self.moduli = (0,) * ngens
            self.actions = [IntMatrix(A.a, ZZ) for A in action_matrices]
        if not ring.is_integers:
            m = ring.modulus
            self.moduli = tuple(d % m if d else 0 for d in self.moduli)
        self._normalize_actions()
        self._validate()

    @property
    def ngens(self) -> int:
        return len(self.moduli)

    def _normalize_actions(self):
        for A in self.actions:
            for i, d in enumerate(self.moduli):
                dd = d if d else (0 if self.ring.is_integers else self.ring.modulus)
                if dd:
                    for j in range(A.cols):
                        A.a[i, j] %= dd

    def _row_moduli(self) -> List[int]:
        if self.ring.is_integers:
            return list(self.moduli)
        m = self.ring.modulus
        return [d if d else m for d in self.moduli]

    def _eq_mod(self, A: IntMatrix, B: IntMatrix) -> bool:
        mods = self._row_moduli()
        for i in range(A.rows):
            d = mods[i]
            for j in range(A.cols):
                diff = A[i, j] - B[i, j]
                if (diff % d if d else diff) != 0:
                    return False
        return True

    def _validate(self):
        G = self.group
        ident = IntMatrix.identity(self.ngens, ZZ)
        if not self._eq_mod(self.actions[G.identity], ident):
            raise ValueError("action of the identity is not the identity matrix")
        for a in range(G.order):
            for b in range(G.order):
                if not self._eq_mod(self.actions[a] @ self.actions[b],
                                    self.actions[G.mul(a, b)]):
                    raise ValueError(f"action violates the group law at ({a},{b})")
        # relations preserved: d_i * (column i of any action) must vanish mod moduli
        mods = self._row_moduli()
        for g, A in enumerate(self.actions):
            for i, d in enumerate(self.moduli):
                if not d:
                    continue
                for r in range(self.ngens):
                    v = d * A[r, i]
                    if (v % mods[r] if mods[r] else v) != 0:
                        raise ValueError(f"action of {g} does not preserve relations")

    def action(self, g: int) -> IntMatrix:
        return self.actions[g]

    def fg_module(self) -> FGModule:
        if self.ring.is_integers:
            rank = sum(1 for d in self.moduli if d == 0)
            torsion = tuple(sorted(d for d in self.moduli if d > 1))
            return FGModule(self.ring, rank, torsion)
        m = self.ring.modulus
        full = [d if d else m for d in self.moduli]
        rank = sum(1 for d in full if d == m)
        torsion = tuple(sorted(d for d in full if 1 < d < m))
        return FGModule(self.ring, rank, torsion)

    @classmethod
    def trivial(cls, group: FiniteGroup, rank: int = 1, ring: Ring = ZZ) -> "GModule":
        ident = IntMatrix.identity(rank, ZZ)
        return cls(group, rank, [ident] * group.order, ring=ring)

    @classmethod
    def from_generator_actions(cls, group: FiniteGroup, ngens: int,
                               generators: Sequence[int],
                               generator_matrices: Sequence[IntMatrix],
                               relations: Optional[IntMatrix] = None,
                               ring: Ring = ZZ) -> "GModule":
        """Extend matrices given on a generating set to all of G by words."""
        words = group.words_in(generators)
        acts = []
        for g in range(group.order):
            A = IntMatrix.identity(ngens, ZZ)
            for k in words[g]:
                A = A @ generator_matrices[k]
            acts.append(A)
        return cls(group, ngens, acts, relations=relations, ring=ring)


class Resolution:
    """A free resolution of R over RG with an exactness certificate.

    Differential d_p: P_p -> P_{p-1} is stored sparsely per column as
    {(target_generator, group_element): coefficient}.  The augmentation is the
    coefficient-sum map on P_0 (both constructions have rank 1 there).
    """

    def __init__(self, group: FiniteGroup, rg_ranks: List[int],
                 diffs: List[List[Dict[Tuple[int, int], int]]],
                 kind: str, contraction=None):
        self.group = group
        self.rg_ranks = rg_ranks
        self.diffs = diffs  # diffs[p-1][j] = column j of d_p
        self.kind = kind
        self.length = len(rg_ranks) - 1
        self._hom_cache: Dict[Tuple[int, int], IntMatrix] = {}
        self._check_dd()
        self._check_augmentation()
        if contraction is not None and self.z_rank_total() > _SNF_CERT_LIMIT:
            self._certify_by_contraction(contraction)
        else:
            self._certify_by_snf()

    def z_rank(self, p: int) -> int:
        return self.group.order * self.rg_ranks[p] if 0 <= p <= self.length else 0

    def z_rank_total(self) -> int:
        return sum(self.z_rank(p) for p in range(self.length + 1))

    # -- structure checks ----------------------------------------------------

    def _column_rg(self, p: int, j: int) -> Dict[Tuple[int, int], int]:
        return self.diffs[p - 1][j]

    def _check_dd(self):
        G = self.group
        for p in range(2, self.length + 1):
            for j in range(self.rg_ranks[p]):
                acc: Dict[Tuple[int, int], int] = {}
                for (i, g), c in self._column_rg(p, j).items():
                    for (i2, h), c2 in self._column_rg(p - 1, i).items():
                        key = (i2, G.mul(g, h))
                        acc[key] = acc.get(key, 0) + c * c2
                if any(v != 0 for v in acc.values()):
                    raise ValueError(f"d o d != 0 in resolution degree {p}")
        if self.length >= 1:
            for j in range(self.rg_ranks[1]):
                s = sum(self._column_rg(1, j).values())
                if s != 0:
                    raise ValueError("augmentation o d_1 != 0")

    def _check_augmentation(self):
        if self.rg_ranks[0] != 1:
            raise ValueError("expected a rank-1 module in degree 0")

    def z_matrix(self, p: int) -> IntMatrix:
        """Underlying Z-matrix of d_p with basis (generator, group element)."""
        G = self.group
        n = G.order
        rows = self.z_rank(p - 1)
        cols = self.z_rank(p)
        M = np.zeros((rows, cols), dtype=object)
        for j in range(self.rg_ranks[p]):
            col = self._column_rg(p, j)
            for g in range(n):
                c_idx = j * n + g
                for (i, h), c in col.items():
                    M[i * n + G.mul(g, h), c_idx] += c
        return IntMatrix.from_array(M, ZZ)

    def _certify_by_snf(self):
        G = self.group
        n = G.order
        eps = IntMatrix.from_array(np.ones((1, n * self.rg_ranks[0]), dtype=object), ZZ)
        d1 = self.z_matrix(1) if self.length >= 1 else None
        h0 = subquotient(n, eps, d1, ZZ)
        if not h0.is_zero:
            raise ValueError("resolution is not exact at degree 0")
        for p in range(1, self.length):
            h = subquotient(self.z_rank(p), self.z_matrix(p), self.z_matrix(p + 1), ZZ)
            if not h.is_zero:
                raise ValueError(f"resolution is not exact at degree {p}")
        self.certificate = "snf"

    def _certify_by_contraction(self, contraction):
        """Verify d s + s d = identity on every Z-basis element.

        `contraction(p, i, g)` returns the chain s(g * b_i) in degree p+1 as a
        list of ((generator, group element), coeff).  Together with d o d = 0
        this certifies exactness in degrees 0..length-1.
        """
        G = self.group
        for p in range(0, self.length):
            for i in range(self.rg_ranks[p]):
                for g in range(G.order):
                    acc: Dict[Tuple[int, int], int] = {}
                    # d(s(x))
                    for (j, h), c in contraction(p, i, g):
                        for (i2, h2), c2 in self._column_rg(p + 1, j).items():
                            key = (i2, G.mul(h, h2))
                            acc[key] = acc.get(key, 0) + c * c2
                    # s(d(x));  for p = 0 this is s(aug(x)) = aug-section
                    if p == 0:
                        acc[(0, G.identity)] = acc.get((0, G.identity), 0) + 1
                    else:
                        for (j, h), c in self._column_rg(p, i).items():
                            for (j2, h2), c2 in contraction(p - 1, j, G.mul(g, h)):
                                key = (j2, h2)
                                acc[key] = acc.get(key, 0) + c * c2
                    acc[(i, g)] = acc.get((i, g), 0) - 1
                    if any(v != 0 for v in acc.values()):
                        raise ValueError(f"contraction identity fails in degree {p}")
        self.certificate = "contraction"

    # -- hom functor ---------------------------------------------------------

    def hom_delta(self, p: int, M: GModule) -> IntMatrix:
        """Matrix of Hom_RG(P_p, M) -> Hom_RG(P_{p+1}, M), precomposition with d_{p+1}."""
        if M.group is not self.group:
            raise GroupMismatch("module and resolution have different groups")
        if p + 1 > self.length:
            raise ResolutionTooShort(f"resolution of length {self.length} "
                                     f"cannot map out of degree {p}")
        key = (p, id(M))
        hit = self._hom_cache.get(key)
        if hit is not None and hit[0] is M:
            return hit[1]
        m = M.ngens
        rows = self.rg_ranks[p + 1] * m
        cols = self.rg_ranks[p] * m
        out = np.zeros((rows, cols), dtype=object)
        for j in range(self.rg_ranks[p + 1]):
            for (i, g), c in self._column_rg(p + 1, j).items():
                out[j * m:(j + 1) * m, i * m:(i + 1) * m] += c * M.action(g).a
        res = IntMatrix.from_array(out, M.ring)
        self._hom_cache[key] = (M, res)
        return res


def bar_resolution(G: FiniteGroup, p_max: int, contraction_only: bool = False) -> Resolution:
    """Normalized bar resolution: P_p free on p-tuples of non-identity elements."""
    if p_max < 0:
        raise ValueError("p_max must be >= 0")
    if G.order ** p_max > max_free_rank():
        raise ResourceLimit(
            f"bar resolution rank {G.order}**{p_max} exceeds the ceiling {max_free_rank()}; "
            "raise EQSS_MAX_RANK to override")
    e = G.identity
    nonid = [g for g in range(G.order) if g != e]
    bases = [list(product(nonid, repeat=p)) for p in range(p_max + 1)]
    index = [{t: k for k, t in enumerate(b)} for b in bases]
    diffs = []
    for p in range(1, p_max + 1):
        cols = []
        for t in bases[p]:
            col: Dict[Tuple[int, int], int] = {}

            def add(tt, g, c):
                if e in tt:
                    return
                key = (index[p - 1][tt], g)
                col[key] = col.get(key, 0) + c
                if col[key] == 0:
                    del col[key]

            add(t[1:], t[0], 1)
            for i in range(1, p):
                add(t[:i - 1] + (G.mul(t[i - 1], t[i]),) + t[i:][1:], e, (-1) ** i)
            add(t[:-1], e, (-1) ** p)
            cols.append(col)
        diffs.append(cols)

    def contraction(p, i, g):
        # s(g * [g_1|...|g_p]) = [g|g_1|...|g_p], zero when g is the identity
        if g == e:
            return []
        t = (g,) + bases[p][i]
        return [((index[p + 1][t], e), 1)]

    return Resolution(G, [len(b) for b in bases], diffs, "bar", contraction=contraction)


def periodic_resolution(n: int, p_max: int, group: Optional[FiniteGroup] = None) -> Resolution:
    """Rank-one resolution for a cyclic group: d alternates (t - 1) and the norm."""
    if n < 2:
        raise ValueError("cyclic order must be >= 2")
    G = group if group is not None else FiniteGroup.cyclic(n)
    t = G.cyclic_generator() if group is not None else 1
    if t is None or G.order != n:
        raise ValueError("periodic resolution needs a cyclic group of the stated order")
    e = G.identity
    diffs = []
    power = [e]
    for _ in range(n - 1):
        power.append(G.mul(power[-1], t))
    for p in range(1, p_max + 1):
        if p % 2 == 1:
            col = {(0, t): 1, (0, e): -1}
        else:
            col = {(0, g): 1 for g in power}
        diffs.append([col])
    return Resolution(G, [1] * (p_max + 1), diffs, "periodic")


def get_resolution(G: FiniteGroup, kind: str, length: int) -> Resolution:
    """Cached resolution of at least the requested length."""
    cached = G._res_cache.get(kind)
    if cached is not None and cached.length >= length:
        return cached
    if kind == "bar":
        res = bar_resolution(G, length)
    elif kind == "periodic":
        res = periodic_resolution(G.order, length, group=G)
    else:
        raise ValueError(f"unknown resolution kind {kind!r}")
    G._res_cache[kind] = res
    return res


def hom_rg(P: Resolution, M: GModule):
    """The cochain complex Hom_RG(P_*, M) for a module with free presentation."""
    from .complexes import CochainComplex

    if M.group is not P.group:
        raise GroupMismatch("module and resolution have different groups")
    if any(M.moduli):
        raise ValueError("hom_rg needs a free presentation; "
                         "group_cohomology handles torsion modules directly")
    total = sum(r * M.ngens for r in P.rg_ranks)
    if total > max_free_rank():
        raise ResourceLimit(f"hom complex rank {total} exceeds ceiling {max_free_rank()}")
    ranks = [r * M.ngens for r in P.rg_ranks]
    diffs = [P.hom_delta(p, M) for p in range(P.length)]
    return CochainComplex(M.ring, 0, ranks, diffs)


def group_cohomology(G: FiniteGroup, M: GModule, p: int,
                     resolution_kind: str = "bar") -> FGModule:
    """H^p(G; M) in canonical form; degree 0 is the invariants."""
    if M.group is not G:
        raise GroupMismatch("module is not over this group")
    if p < 0:
        return FGModule.zero(M.ring)
    P = get_resolution(G, resolution_kind, p + 1)
    return _hom_cohomology(P, M, p).module


def _hom_cohomology(P: Resolution, M: GModule, p: int):
    if p + 1 > P.length:
        raise ResolutionTooShort(
            f"H^{p} needs resolution length {p + 1}, have {P.length}")
    m = M.ngens
    mid = list(M.moduli) * P.rg_ranks[p]
    out = list(M.moduli) * P.rg_ranks[p + 1]
    d_out = P.hom_delta(p, M)
    d_in = P.hom_delta(p - 1, M) if p >= 1 else None
    return presented_subquotient(mid, d_out if d_out.rows else None, out,
                                 d_in if d_in is not None and d_in.cols else None,
                                 M.ring)


def invariants(M: GModule) -> FGModule:
    """The fixed submodule M^G, canonical form."""
    G = M.group
    k = M.ngens
    others = [g for g in range(G.order) if g != G.identity]
    if not others or k == 0:
        return M.fg_module()
    ident = IntMatrix.identity(k, ZZ)
    blocks = [(M.action(g) - ident).a for g in others]
    stacked = IntMatrix.from_array(np.vstack(blocks), ZZ)
    out_moduli = list(M.moduli) * len(others)
    sq = presented_subquotient(list(M.moduli), stacked, out_moduli, None, M.ring)
    return sq.module
