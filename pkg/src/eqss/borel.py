"""Finite skeleta of EG and of the Borel quotient X x_G EG, with cohomology.

The quotient is modeled levelwise: elements are orbit representatives chosen
as lexicographic minima, and each face map records the group element relating
the face of a representative to the chosen representative of its orbit.  That
twist is exactly the local-system data a coefficient G-module needs.
"""

from __future__ import annotations

from itertools import combinations_with_replacement, product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .complexes import CochainComplex, cohomology as complex_cohomology
from .errors import DegreeBeyondSkeleton, IrregularAction, ResourceLimit
from .exact_linalg import ZZ, FGModule, IntMatrix
from .groupcoh import FiniteGroup, GModule, max_free_rank
from .gspace import SimplicialGComplex


class SimplicialSet:
    """Levels 0..n_max of simplices with face and degeneracy maps by index."""

    def __init__(self, n_max: int, sizes: List[int],
                 faces: List[List[Tuple[int, ...]]],
                 degeneracies: List[List[Tuple[int, ...]]]):
        self.n_max = n_max
        self.sizes = sizes
        self.faces = faces          # faces[n][x] = (d_0 x, ..., d_n x), n >= 1
        self.degeneracies = degeneracies  # degeneracies[n][x] = (s_0 x, ..., s_n x), n < n_max

    def face(self, n: int, x: int, i: int) -> int:
        return self.faces[n][x][i]

    def degeneracy(self, n: int, x: int, i: int) -> int:
        return self.degeneracies[n][x][i]

    def is_degenerate(self, n: int, x: int) -> bool:
        if n == 0:
            return False
        for i in range(n):
            if self.degeneracy(n - 1, self.face(n, x, i), i) == x:
                return True
        return False

    def validate_identities(self):
        """Exhaustively check the simplicial identities on all stored levels."""
        for n in range(2, self.n_max + 1):
            for x in range(self.sizes[n]):
                for j in range(n + 1):
                    for i in range(j):
                        lhs = self.face(n - 1, self.face(n, x, j), i)
                        rhs = self.face(n - 1, self.face(n, x, i), j - 1)
                        if lhs != rhs:
                            raise AssertionError(f"d_i d_j fails at level {n}")
        for n in range(0, self.n_max):
            for x in range(self.sizes[n]):
                for j in range(n + 1):
                    sx = self.degeneracy(n, x, j)
                    for i in range(n + 2):
                        f = self.face(n + 1, sx, i)
                        if i == j or i == j + 1:
                            if f != x:
                                raise AssertionError(f"d_i s_i != id at level {n}")
                        elif i < j:
                            if f != self.degeneracy(n - 1, self.face(n, x, i), j - 1):
                                raise AssertionError("d_i s_j (i<j) fails")
                        else:
                            if f != self.degeneracy(n - 1, self.face(n, x, i - 1), j):
                                raise AssertionError("d_i s_j (i>j+1) fails")
        for n in range(0, self.n_max - 1):
            for x in range(self.sizes[n]):
                for j in range(n + 1):
                    for i in range(j + 1):
                        lhs = self.degeneracy(n + 1, self.degeneracy(n, x, j), i)
                        rhs = self.degeneracy(n + 1, self.degeneracy(n, x, i), j + 1)
                        if lhs != rhs:
                            raise AssertionError("s_i s_j fails")


def eg_skeleton(G: FiniteGroup, n_max: int):
    """Levels of EG: level n is G^{n+1}; returns (SimplicialSet, level element lists).

    Faces delete a coordinate, degeneracies repeat one; G acts freely by left
    multiplication on every coordinate.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if G.order ** (n_max + 1) > max_free_rank():
        raise ResourceLimit(f"EG skeleton level {n_max} has {G.order ** (n_max + 1)} "
                            f"simplices, over the ceiling {max_free_rank()}")
    levels = [list(product(range(G.order), repeat=n + 1)) for n in range(n_max + 1)]
    index = [{t: k for k, t in enumerate(lv)} for lv in levels]
    faces = [[]]
    for n in range(1, n_max + 1):
        faces.append([tuple(index[n - 1][t[:i] + t[i + 1:]] for i in range(n + 1))
                      for t in levels[n]])
    degens = []
    for n in range(0, n_max):
        degens.append([tuple(index[n + 1][t[:i] + (t[i],) + t[i:]] for i in range(n + 1))
                       for t in levels[n]])
    degens.append([])
    return SimplicialSet(n_max, [len(lv) for lv in levels], faces, degens), levels


def ordered_levels(X: SimplicialGComplex, n_max: int):
    """Level tuples of the simplicial set of X via a grading-compatible order."""
    grade = X.ensure_grading()
    levels = []
    for n in range(n_max + 1):
        lv = set()
        for s in X.simplices:
            ordered = tuple(sorted(s, key=lambda v: grade[v]))
            k = len(ordered)
            if k > n + 1:
                continue
            # monotone surjections [n] -> ordered: positive multiplicities
            for cuts in combinations_with_replacement(range(k), n + 1 - k):
                mult = [1] * k
                for c in cuts:
                    mult[c] += 1
                t = tuple(v for v, m in zip(ordered, mult) for _ in range(m))
                lv.add(t)
        levels.append(sorted(lv))
    return levels, grade


class BorelSpace:
    """Skeleton of (X x EG)/G with twisted face maps for local coefficients."""

    def __init__(self, X: SimplicialGComplex, G: FiniteGroup, n_max: int):
        if X.group is not G:
            raise ValueError("space is not a complex over this group")
        self.X = X
        self.group = G
        self.n_max = n_max
        eg, eg_levels = eg_skeleton(G, n_max)
        x_levels, grade = ordered_levels(X, n_max)
        self.grade = grade
        act = X.vertex_action
        self.reps: List[List[Tuple[tuple, tuple]]] = []
        self.faces: List[List[List[Tuple[int, int]]]] = [[]]
        self.degens: List[List[List[Tuple[int, int]]]] = []
        rep_index: List[Dict[Tuple[tuple, tuple], int]] = []

        def orbit_rep(xt, et):
            best = None
            best_g = None
            for g in range(G.order):
                cand = (tuple(act[g][v] for v in xt),
                        tuple(G.mul(g, e) for e in et))
                if best is None or cand < best:
                    best, best_g = cand, g
            return best, best_g

        for n in range(n_max + 1):
            seen: Dict[Tuple[tuple, tuple], int] = {}
            reps = []
            for xt in x_levels[n]:
                for et in eg_levels[n]:
                    z = (xt, et)
                    # freeness check: no nonidentity element fixes z
                    for g in range(G.order):
                        if g == G.identity:
                            continue
                        if (tuple(act[g][v] for v in xt) == xt
                                and tuple(G.mul(g, e) for e in et) == et):
                            raise IrregularAction("diagonal action is not free on a level")
                    rep, _ = orbit_rep(xt, et)
                    if rep not in seen:
                        seen[rep] = len(reps)
                        reps.append(rep)
            order = sorted(range(len(reps)), key=lambda k: reps[k])
            reps = [reps[k] for k in order]
            self.reps.append(reps)
            rep_index.append({r: k for k, r in enumerate(reps)})

        for n in range(1, n_max + 1):
            lvl = []
            for (xt, et) in self.reps[n]:
                row = []
                for i in range(n + 1):
                    fx = xt[:i] + xt[i + 1:]
                    fe = et[:i] + et[i + 1:]
                    rep, g = orbit_rep(fx, fe)
                    # d_i(z) = g^{-1} . rep, so the twist with d_i z = h . rep is h = g^{-1}
                    row.append((rep_index[n - 1][rep], G.inv(g)))
                lvl.append(row)
            self.faces.append(lvl)
        for n in range(0, n_max):
            lvl = []
            for (xt, et) in self.reps[n]:
                row = []
                for i in range(n + 1):
                    sx = xt[:i] + (xt[i],) + xt[i:]
                    se = et[:i] + (et[i],) + et[i:]
                    rep, g = orbit_rep(sx, se)
                    row.append((rep_index[n + 1][rep], G.inv(g)))
                lvl.append(row)
            self.degens.append(lvl)
        self.degens.append([])
        self._nondeg = [self._nondegenerate_indices(n) for n in range(n_max + 1)]

    def _nondegenerate_indices(self, n: int) -> List[int]:
        if n == 0:
            return list(range(len(self.reps[0])))
        out = []
        for x in range(len(self.reps[n])):
            degenerate = False
            for i in range(n):
                f, _ = self.faces[n][x][i]
                s, h = self.degens[n - 1][f][i]
                if s == x:
                    degenerate = True
                    break
            if degenerate:
                continue
            out.append(x)
        return out

    def level_size(self, n: int) -> int:
        return len(self.reps[n])

    def nondegenerate_size(self, n: int) -> int:
        return len(self._nondeg[n])

    def underlying_simplicial_set(self) -> SimplicialSet:
        faces = [[]]
        for n in range(1, self.n_max + 1):
            faces.append([tuple(f for (f, _) in row) for row in self.faces[n]])
        degens = []
        for n in range(0, self.n_max):
            degens.append([tuple(s for (s, _) in row) for row in self.degens[n]])
        degens.append([])
        return SimplicialSet(self.n_max, [self.level_size(n) for n in range(self.n_max + 1)],
                             faces, degens)


def borel_space(X: SimplicialGComplex, G: FiniteGroup, n_max: int) -> BorelSpace:
    return BorelSpace(X, G, n_max)


def borel_cochain_complex(B: BorelSpace, A: GModule, top: int,
                          normalized: bool = True) -> CochainComplex:
    """A-valued cochains on the quotient, coboundary twisted by the face twists."""
    if A.group is not B.group:
        raise ValueError("coefficients live over a different group")
    if any(A.moduli):
        raise ValueError("coefficient presentations with torsion over Z are "
                         "not supported; use a Z/m ring for cyclic stalks")
    m = A.ngens
    if normalized:
        basis = [B._nondeg[n] for n in range(top + 1)]
    else:
        basis = [list(range(B.level_size(n))) for n in range(top + 1)]
    pos = [{x: k for k, x in enumerate(b)} for b in basis]
    ranks = [len(b) * m for b in basis]
    if sum(ranks) > max_free_rank():
        raise ResourceLimit(f"Borel cochain complex rank {sum(ranks)} exceeds ceiling")
    diffs = []
    for n in range(top):
        D = np.zeros((ranks[n + 1], ranks[n]), dtype=object)
        for r, x in enumerate(basis[n + 1]):
            for i in range(n + 2):
                f, h = B.faces[n + 1][x][i]
                if f not in pos[n]:
                    continue  # degenerate face: normalized cochains vanish there
                c = pos[n][f]
                block = A.action(h).a * ((-1) ** i)
                D[r * m:(r + 1) * m, c * m:(c + 1) * m] += block
        diffs.append(IntMatrix.from_array(D, A.ring))
    return CochainComplex(A.ring, 0, ranks, diffs)


def borel_cohomology(B: BorelSpace, A: GModule, k: int,
                     normalized: bool = True) -> FGModule:
    """H^k of the Borel quotient with coefficients in the local system of A."""
    if k >= B.n_max:
        raise DegreeBeyondSkeleton(
            f"degree {k} is beyond the certified range of an n_max={B.n_max} skeleton")
    if k < 0:
        return FGModule.zero(A.ring)
    C = borel_cochain_complex(B, A, k + 1, normalized=normalized)
    return complex_cohomology(C, k)
