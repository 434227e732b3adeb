"""Finite simplicial complexes with a simplicial group action.

Provides the equivariant cochain complex with constant coefficients in a
G-module, its cohomology as a G-module, barycentric subdivision with the
induced action (which also produces the vertex grading the Borel construction
needs), and the quotient complex of a suitably free action.
"""

from __future__ import annotations

from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .complexes import CochainComplex
from .errors import IrregularAction, ResourceLimit
from .exact_linalg import ZZ, FGModule, IntMatrix, Ring
from .groupcoh import FiniteGroup, GModule, max_free_rank


def _faces_closure(simplices) -> set:
    out = set()
    for s in simplices:
        s = tuple(sorted(set(s)))
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return out


class SimplicialGComplex:
    """Vertex set 0..n-1, a face-closed simplex set, and a vertex action of G."""

    def __init__(self, n_vertices: int, simplices, group: FiniteGroup,
                 vertex_action: Sequence[Sequence[int]],
                 vertex_grade: Optional[Sequence[int]] = None):
        self.n_vertices = n_vertices
        self.group = group
        simp = {tuple(sorted(set(s))) for s in simplices}
        for s in simp:
            if any(not (0 <= v < n_vertices) for v in s):
                raise ValueError(f"simplex {s} uses an unknown vertex")
            for k in range(1, len(s)):
                for f in combinations(s, k):
                    if f not in simp:
                        raise ValueError(f"simplex set is not face-closed: missing {f}")
        self.simplices = simp
        if len(vertex_action) != group.order:
            raise ValueError("need one vertex permutation per group element")
        self.vertex_action = [tuple(map(int, p)) for p in vertex_action]
        for g, p in enumerate(self.vertex_action):
            if sorted(p) != list(range(n_vertices)):
                raise ValueError(f"action of element {g} is not a permutation")
        for g in range(group.order):
            for h in range(group.order):
                gh = group.mul(g, h)
                pg, ph = self.vertex_action[g], self.vertex_action[h]
                if any(pg[ph[v]] != self.vertex_action[gh][v] for v in range(n_vertices)):
                    raise ValueError(f"vertex action violates the group law at ({g},{h})")
        for g, p in enumerate(self.vertex_action):
            for s in simp:
                if tuple(sorted(p[v] for v in s)) not in simp:
                    raise ValueError(f"element {g} does not map simplex {s} to a simplex")
        self.vertex_grade = list(vertex_grade) if vertex_grade is not None else None
        if self.vertex_grade is not None:
            self._check_grading(self.vertex_grade)
        self._by_dim: Dict[int, List[tuple]] = {}
        for s in simp:
            self._by_dim.setdefault(len(s) - 1, []).append(s)
        for q in self._by_dim:
            self._by_dim[q].sort()

    @classmethod
    def from_maximal(cls, n_vertices: int, maximal, group: FiniteGroup,
                     vertex_action, vertex_grade=None) -> "SimplicialGComplex":
        return cls(n_vertices, _faces_closure(maximal), group, vertex_action,
                   vertex_grade=vertex_grade)

    @classmethod
    def with_trivial_action(cls, n_vertices: int, maximal) -> "SimplicialGComplex":
        G = FiniteGroup.cyclic(1)
        return cls.from_maximal(n_vertices, maximal, G, [tuple(range(n_vertices))])

    @classmethod
    def from_generator_actions(cls, n_vertices: int, maximal, group: FiniteGroup,
                               generators: Sequence[int],
                               generator_perms: Sequence[Sequence[int]],
                               vertex_grade=None) -> "SimplicialGComplex":
        words = group.words_in(generators)
        perms = []
        for g in range(group.order):
            p = list(range(n_vertices))
            for k in words[g]:
                gp = generator_perms[k]
                p = [gp[v] for v in p]
            perms.append(tuple(p))
        return cls.from_maximal(n_vertices, maximal, group, perms, vertex_grade=vertex_grade)

    # -- basic structure ------------------------------------------------------

    @property
    def dim(self) -> int:
        return max(self._by_dim) if self._by_dim else -1

    def simplices_of_dim(self, q: int) -> List[tuple]:
        return self._by_dim.get(q, [])

    def act_vertex(self, g: int, v: int) -> int:
        return self.vertex_action[g][v]

    def act_simplex(self, g: int, s: tuple) -> tuple:
        return tuple(sorted(self.vertex_action[g][v] for v in s))

    def is_regular(self) -> bool:
        """Whether any element stabilizing a simplex setwise fixes it pointwise."""
        for g in range(self.group.order):
            if g == self.group.identity:
                continue
            p = self.vertex_action[g]
            for s in self.simplices:
                if self.act_simplex(g, s) == s and any(p[v] != v for v in s):
                    return False
        return True

    def _check_grading(self, grade):
        if len(grade) != self.n_vertices:
            raise ValueError("grading must assign a value to every vertex")
        for g, p in enumerate(self.vertex_action):
            if any(grade[p[v]] != grade[v] for v in range(self.n_vertices)):
                raise ValueError("grading is not action-invariant")
        for s in self.simplices:
            if len({grade[v] for v in s}) != len(s):
                raise ValueError(f"grading not injective on simplex {s}")

    def ensure_grading(self) -> List[int]:
        """An action-invariant vertex grading injective on every simplex.

        Uses the stored grading if present; otherwise greedily colors vertex
        orbits along the co-occurrence graph.  Raises IrregularAction when two
        vertices of one orbit share a simplex (regularize/subdivide first).
        """
        if self.vertex_grade is not None:
            return list(self.vertex_grade)
        orbit_of = [None] * self.n_vertices
        orbits = []
        for v in range(self.n_vertices):
            if orbit_of[v] is None:
                orb = sorted({self.vertex_action[g][v] for g in range(self.group.order)})
                for w in orb:
                    orbit_of[w] = len(orbits)
                orbits.append(orb)
        adj = [set() for _ in orbits]
        for s in self.simplices:
            os = [orbit_of[v] for v in s]
            if len(set(os)) != len(os):
                raise IrregularAction(
                    "vertices of one orbit share a simplex; subdivide first")
            for a in os:
                for b in os:
                    if a != b:
                        adj[a].add(b)
        color = [None] * len(orbits)
        for i in range(len(orbits)):
            used = {color[j] for j in adj[i] if color[j] is not None}
            c = 0
            while c in used:
                c += 1
            color[i] = c
        return [color[orbit_of[v]] for v in range(self.n_vertices)]

    def quotient_complex(self) -> "SimplicialGComplex":
        """X/G as a complex with trivial action; needs orbits injective on simplices."""
        orbit_of = {}
        reps = []
        for v in range(self.n_vertices):
            orb = min(self.vertex_action[g][v] for g in range(self.group.order))
            if orb == v:
                orbit_of[v] = len(reps)
                reps.append(v)
        for v in range(self.n_vertices):
            m = min(self.vertex_action[g][v] for g in range(self.group.order))
            orbit_of[v] = orbit_of[m]
        quots = set()
        for s in self.simplices:
            q = tuple(sorted({orbit_of[v] for v in s}))
            if len(q) != len(s):
                raise IrregularAction("orbit map collapses a simplex; no simplicial quotient")
            quots.add(q)
        return SimplicialGComplex.with_trivial_action(len(reps), quots)


def regularize(X: SimplicialGComplex) -> SimplicialGComplex:
    """Barycentric subdivision with the induced action (twice if needed).

    The result is regular and carries the canonical vertex grading by original
    simplex dimension, so its ordered-simplicial-set conversion is always valid.
    """
    Y = _barycentric(X)
    if not Y.is_regular():
        Y = _barycentric(Y)
        if not Y.is_regular():
            raise AssertionError("double subdivision failed to regularize the action")
    return Y


def _barycentric(X: SimplicialGComplex) -> SimplicialGComplex:
    verts = sorted(X.simplices, key=lambda s: (len(s), s))
    index = {s: i for i, s in enumerate(verts)}
    flags = []

    def extend(chain, top):
        flags.append(tuple(index[s] for s in chain))
        for k in range(1, len(top)):
            for f in combinations(top, k):
                extend(chain + [f], f)

    for s in sorted(X.simplices, key=lambda t: (len(t), t)):
        extend([s], s)
    perms = []
    for g in range(X.group.order):
        perms.append(tuple(index[X.act_simplex(g, s)] for s in verts))
    grade = [len(s) - 1 for s in verts]
    return SimplicialGComplex(len(verts), set(flags), X.group, perms, vertex_grade=grade)


def _perm_sign_sorting(seq) -> int:
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv % 2 else 1


class EquivariantCochainComplex:
    """A-valued simplicial cochains with the G-action (g.c)(s) = g.c(g^{-1}s).

    Bases are oriented simplices in lexicographic vertex order; the action
    matrices carry orientation signs and are verified to satisfy the group law
    and to commute with the coboundary.
    """

    def __init__(self, X: SimplicialGComplex, A: GModule, q_max: int):
        if A.group is not X.group:
            raise ValueError("coefficients live over a different group")
        if any(A.moduli):
            raise ValueError("coefficient presentations with torsion over Z are "
                             "not supported; use a Z/m ring for cyclic stalks")
        if not X.is_regular():
            raise IrregularAction("equivariant cochains need a regular action")
        self.X = X
        self.A = A
        self.q_max = q_max
        m = A.ngens
        ranks = [len(X.simplices_of_dim(q)) * m for q in range(q_max + 1)]
        if sum(ranks) > max_free_rank():
            raise ResourceLimit(f"cochain complex rank {sum(ranks)} exceeds ceiling")
        diffs = []
        for q in range(q_max):
            lo = X.simplices_of_dim(q)
            hi = X.simplices_of_dim(q + 1)
            idx = {s: i for i, s in enumerate(lo)}
            D = np.zeros((len(hi) * m, len(lo) * m), dtype=object)
            for r, t in enumerate(hi):
                for i in range(len(t)):
                    f = t[:i] + t[i + 1:]
                    c = idx[f]
                    sgn = (-1) ** i
                    for k in range(m):
                        D[r * m + k, c * m + k] = sgn
            diffs.append(IntMatrix.from_array(D, A.ring))
        self.complex = CochainComplex(A.ring, 0, ranks, diffs)
        self.actions: List[List[IntMatrix]] = []
        for q in range(q_max + 1):
            per_g = []
            simps = X.simplices_of_dim(q)
            idx = {s: i for i, s in enumerate(simps)}
            for g in range(X.group.order):
                ginv = X.group.inv(g)
                T = np.zeros((len(simps) * m, len(simps) * m), dtype=object)
                rho = A.action(g).a
                for r, s in enumerate(simps):
                    pre = [X.vertex_action[ginv][v] for v in s]
                    sgn = _perm_sign_sorting(pre)
                    c = idx[tuple(sorted(pre))]
                    T[r * m:(r + 1) * m, c * m:(c + 1) * m] = sgn * rho
                per_g.append(IntMatrix.from_array(T, A.ring))
            self.actions.append(per_g)
        self._validate()

    def rank(self, q: int) -> int:
        return self.complex.rank(q)

    def action(self, q: int, g: int) -> IntMatrix:
        if 0 <= q <= self.q_max:
            return self.actions[q][g]
        return IntMatrix.zeros(0, 0, self.A.ring)

    def _validate(self):
        G = self.X.group
        for q in range(self.q_max + 1):
            acts = self.actions[q]
            n = self.rank(q)
            if acts[G.identity] != IntMatrix.identity(n, self.A.ring):
                raise AssertionError("identity acts nontrivially on cochains")
            for g in range(G.order):
                for h in range(G.order):
                    if acts[g] @ acts[h] != acts[G.mul(g, h)]:
                        raise AssertionError("cochain action violates the group law")
            d = self.complex.differential(q)
            if q < self.q_max:
                for g in range(G.order):
                    if d @ acts[g] != self.actions[q + 1][g] @ d:
                        raise AssertionError("cochain action does not commute with d")


def cochains(X: SimplicialGComplex, A: GModule, q_max: int) -> EquivariantCochainComplex:
    return EquivariantCochainComplex(X, A, q_max)


def cohomology_gmodule(X: SimplicialGComplex, A: GModule, q: int,
                       _cochains: Optional[EquivariantCochainComplex] = None) -> GModule:
    """H^q(X; A) in canonical form together with its induced G-action."""
    C = _cochains if _cochains is not None else cochains(X, A, max(q + 1, 1))
    if q < 0 or q > C.q_max:
        return GModule.trivial(X.group, rank=0, ring=A.ring)
    sq = C.complex.cohomology_basis(q)
    gens = sq.generator_matrix()
    mats = []
    for g in range(X.group.order):
        pushed = C.action(q, g) @ gens if gens.cols else gens
        mats.append(sq.coords(pushed) if gens.cols else IntMatrix.zeros(0, 0))
    moduli = sq.generator_moduli()
    rel = IntMatrix.diagonal([d for d in moduli], rows=len(moduli),
                             cols=len(moduli)) if any(moduli) else None
    if rel is not None:
        keep_cols = [i for i, d in enumerate(moduli) if d]
        rel = rel.take_columns(keep_cols)
    return GModule(X.group, sq.ngens, mats, relations=rel, ring=A.ring)


def simplicial_cohomology(X: SimplicialGComplex, q: int) -> FGModule:
    """Ordinary H^q(X; Z), ignoring the action."""
    A = GModule.trivial(X.group)
    C = cochains(X, A, max(q + 1, 1))
    from .complexes import cohomology as _coh

    return _coh(C.complex, q)
