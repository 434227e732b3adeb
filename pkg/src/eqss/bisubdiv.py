"""Subdivision calculus on affine bisimplicial chains, in exact rationals.

A (p, q)-bisimplex is a separately-affine map Delta^p x Delta^q -> Q^a x Q^b
whose first component depends on the first variable only.  It is stored as a
base simplex (p+1 points in Q^a) and a fiber grid ((p+1) x (q+1) points in
Q^b); the image is the set of bilinear combinations of the combined grid
points (base_i, grid_ij), so box containment is decidable on those points.

Operators: barycentric subdivision and the cone homotopy in each variable
(the second-variable pair carries the sign (-1)^p so that the two boundary
components anticommute), their combinations Sd = Sd'Sd'' and
rho = rho'Sd'' + rho'', and the retraction (tau, D) onto chains that are
small for a box cover.

One structural fact worth knowing: applying the combined homotopy rho to a
face of sigma mixes bidegrees, so tau(sigma) has components in (p, q),
(p+1, q-1) and (p-1, q+1).  Chains here therefore allow mixed-bidegree terms;
the defining identity dD + Dd = 1 - tau holds exactly in the total grading
and is what the tests pin down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import NotCovered

Point = Tuple[Fraction, ...]


def _pt(coords) -> Point:
    return tuple(Fraction(c) for c in coords)


@dataclass(frozen=True)
class AffineBisimplex:
    base: Tuple[Point, ...]                 # p+1 points in Q^a
    grid: Tuple[Tuple[Point, ...], ...]     # (p+1) x (q+1) points in Q^b

    def __post_init__(self):
        if len(self.grid) != len(self.base):
            raise ValueError("grid must have one row per base vertex")
        q1 = len(self.grid[0]) if self.grid else 0
        if any(len(row) != q1 for row in self.grid):
            raise ValueError("grid rows must have equal length")
        a = len(self.base[0]) if self.base else 0
        if any(len(pt) != a for pt in self.base):
            raise ValueError("base points must share a dimension")
        b = len(self.grid[0][0]) if self.grid and self.grid[0] else 0
        for row in self.grid:
            for pt in row:
                if len(pt) != b:
                    raise ValueError("fiber points must share a dimension")

    @classmethod
    def make(cls, base, grid) -> "AffineBisimplex":
        return cls(tuple(_pt(v) for v in base),
                   tuple(tuple(_pt(w) for w in row) for row in grid))

    @property
    def p(self) -> int:
        return len(self.base) - 1

    @property
    def q(self) -> int:
        return len(self.grid[0]) - 1

    @property
    def base_dim(self) -> int:
        return len(self.base[0])

    @property
    def fiber_dim(self) -> int:
        return len(self.grid[0][0])

    def combined_points(self) -> List[Point]:
        """The (p+1)(q+1) points (base_i, grid_ij) in Q^{a+b}."""
        return [self.base[i] + self.grid[i][j]
                for i in range(self.p + 1) for j in range(self.q + 1)]


class BiChain:
    """Formal integer combination of bisimplexes with fixed ambient dimensions.

    Terms usually share one bidegree, but mixed-bidegree chains are allowed
    (the small-chain retraction produces them); `bidegree` is None then.
    """

    __slots__ = ("terms", "adim", "bdim")

    def __init__(self, terms: Optional[Dict[AffineBisimplex, int]] = None,
                 adim: Optional[int] = None, bdim: Optional[int] = None):
        self.terms = {}
        if terms:
            for s, c in terms.items():
                if c:
                    self.terms[s] = c
        first = next(iter(self.terms), None)
        self.adim = adim if adim is not None else (first.base_dim if first else 0)
        self.bdim = bdim if bdim is not None else (first.fiber_dim if first else 0)
        for s in self.terms:
            if s.base_dim != self.adim or s.fiber_dim != self.bdim:
                raise ValueError("all terms must share ambient dimensions")

    @classmethod
    def of(cls, s: AffineBisimplex, coeff: int = 1) -> "BiChain":
        return cls({s: coeff}, s.base_dim, s.fiber_dim)

    @property
    def bidegree(self) -> Optional[Tuple[int, int]]:
        degs = {(s.p, s.q) for s in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "BiChain") -> "BiChain":
        out = dict(self.terms)
        for s, c in other.terms.items():
            out[s] = out.get(s, 0) + c
        return BiChain(out, self.adim or other.adim, self.bdim or other.bdim)

    def __sub__(self, other: "BiChain") -> "BiChain":
        out = dict(self.terms)
        for s, c in other.terms.items():
            out[s] = out.get(s, 0) - c
        return BiChain(out, self.adim or other.adim, self.bdim or other.bdim)

    def __neg__(self) -> "BiChain":
        return BiChain({s: -c for s, c in self.terms.items()}, self.adim, self.bdim)

    def scale(self, k: int) -> "BiChain":
        return BiChain({s: k * c for s, c in self.terms.items()}, self.adim, self.bdim)

    def __eq__(self, other) -> bool:
        return isinstance(other, BiChain) and self.terms == other.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self):
        return f"BiChain({len(self.terms)} terms)"


def zero_chain(adim=0, bdim=0) -> BiChain:
    return BiChain({}, adim, bdim)


# -- generic affine simplex machinery (used in either variable) --------------
# A "vertex" is any nested tuple of Fractions; averaging is structural.


def _avg(vertices):
    k = len(vertices)

    def rec(parts):
        if isinstance(parts[0], tuple):
            return tuple(rec([p[i] for p in parts]) for i in range(len(parts[0])))
        return sum(parts, Fraction(0)) / k

    return rec(list(vertices))


@lru_cache(maxsize=65536)
def _sd_simplex(vertices: tuple) -> Tuple[Tuple[tuple, int], ...]:
    """Barycentric subdivision of [v_0..v_n] as ((vertex tuple, coeff), ...)."""
    if len(vertices) == 1:
        return ((vertices, 1),)
    b = _avg(vertices)
    out: Dict[tuple, int] = {}
    for i in range(len(vertices)):
        face = vertices[:i] + vertices[i + 1:]
        sgn = (-1) ** i
        for w, c in _sd_simplex(face):
            key = (b,) + w
            out[key] = out.get(key, 0) + sgn * c
    return tuple((w, c) for w, c in out.items() if c)


@lru_cache(maxsize=65536)
def _rho_simplex(vertices: tuple) -> Tuple[Tuple[tuple, int], ...]:
    """Cone homotopy: rho(s) = b * (s - Sd s - rho(ds)); zero on points."""
    if len(vertices) == 1:
        return ()
    acc: Dict[tuple, int] = {vertices: 1}
    for w, c in _sd_simplex(vertices):
        acc[w] = acc.get(w, 0) - c
    for i in range(len(vertices)):
        face = vertices[:i] + vertices[i + 1:]
        sgn = (-1) ** i
        for w, c in _rho_simplex(face):
            acc[w] = acc.get(w, 0) - sgn * c
    b = _avg(vertices)
    return tuple(((b,) + w, c) for w, c in acc.items() if c)


def _rows(s: AffineBisimplex) -> tuple:
    return tuple((s.base[i], s.grid[i]) for i in range(s.p + 1))


def _from_rows(rows) -> AffineBisimplex:
    return AffineBisimplex(tuple(r[0] for r in rows), tuple(r[1] for r in rows))


def _cols(s: AffineBisimplex) -> tuple:
    return tuple(tuple(s.grid[i][j] for i in range(s.p + 1)) for j in range(s.q + 1))


def _from_cols(base, cols) -> AffineBisimplex:
    p1 = len(base)
    grid = tuple(tuple(col[i] for col in cols) for i in range(p1))
    return AffineBisimplex(base, grid)


def _per_term(c: BiChain, fn) -> BiChain:
    out: Dict[AffineBisimplex, int] = {}
    for s, coeff in c.terms.items():
        for t, k in fn(s):
            out[t] = out.get(t, 0) + coeff * k
    return BiChain(out, c.adim, c.bdim)


# -- the one-variable operators ----------------------------------------------


def sd_first(c: BiChain) -> BiChain:
    """Barycentric subdivision of the base simplex (fiber rows ride along)."""

    def fn(s):
        return [(_from_rows(rows), k) for rows, k in _sd_simplex(_rows(s))]

    return _per_term(c, fn)


def sd_second(c: BiChain) -> BiChain:
    """Barycentric subdivision of the fiber simplex (base held fixed)."""

    def fn(s):
        return [(_from_cols(s.base, cols), k) for cols, k in _sd_simplex(_cols(s))]

    return _per_term(c, fn)


def rho_first(c: BiChain) -> BiChain:
    """Cone homotopy in the first variable: (p, q) -> (p+1, q)."""

    def fn(s):
        return [(_from_rows(rows), k) for rows, k in _rho_simplex(_rows(s))]

    return _per_term(c, fn)


def rho_second(c: BiChain) -> BiChain:
    """Cone homotopy in the second variable with the (-1)^p sign: (p, q) -> (p, q+1)."""

    def fn(s):
        sgn = -1 if s.p % 2 else 1
        return [(_from_cols(s.base, cols), sgn * k) for cols, k in _rho_simplex(_cols(s))]

    return _per_term(c, fn)


def boundary_first(c: BiChain) -> BiChain:
    """Alternating sum of base-vertex deletions (grid rows follow)."""

    def fn(s):
        if s.p == 0:
            return []
        out = []
        for i in range(s.p + 1):
            t = AffineBisimplex(s.base[:i] + s.base[i + 1:],
                                s.grid[:i] + s.grid[i + 1:])
            out.append((t, (-1) ** i))
        return out

    return _per_term(c, fn)


def boundary_second(c: BiChain) -> BiChain:
    """(-1)^p times the alternating sum of fiber-column deletions."""

    def fn(s):
        if s.q == 0:
            return []
        psgn = -1 if s.p % 2 else 1
        out = []
        for j in range(s.q + 1):
            grid = tuple(row[:j] + row[j + 1:] for row in s.grid)
            out.append((AffineBisimplex(s.base, grid), psgn * (-1) ** j))
        return out

    return _per_term(c, fn)


def boundary(c: BiChain) -> Tuple[BiChain, BiChain]:
    """The two components (base-direction, fiber-direction) of the boundary."""
    return boundary_first(c), boundary_second(c)


def total_boundary(c: BiChain) -> BiChain:
    d1, d2 = boundary(c)
    return d1 + d2


def subdivide(c: BiChain) -> BiChain:
    """Sd = Sd' Sd'': double barycentric subdivision."""
    return sd_first(sd_second(c))


def homotopy_rho(c: BiChain) -> Tuple[BiChain, BiChain]:
    """The components (rho' Sd'' c, rho'' c) of the combined homotopy."""
    return rho_first(sd_second(c)), rho_second(c)


def rho_total(c: BiChain) -> BiChain:
    r1, r2 = homotopy_rho(c)
    return r1 + r2


# -- covers and the small-chain retraction ------------------------------------


class ConvexCover:
    """Open axis-aligned rational boxes in Q^{a+b}."""

    def __init__(self, boxes: Iterable[Tuple[Sequence, Sequence]]):
        self.boxes = []
        for lo, hi in boxes:
            lo, hi = _pt(lo), _pt(hi)
            if len(lo) != len(hi):
                raise ValueError("box corners must share a dimension")
            if any(h <= l for l, h in zip(lo, hi)):
                raise ValueError("boxes must have positive side lengths")
            self.boxes.append((lo, hi))
        if not self.boxes:
            raise ValueError("cover must contain at least one box")
        self.dim = len(self.boxes[0][0])
        if any(len(lo) != self.dim for lo, _ in self.boxes):
            raise ValueError("boxes must share a dimension")

    def contains_points(self, pts: Sequence[Point]) -> bool:
        """Whether some single box strictly contains every point."""
        for lo, hi in self.boxes:
            if all(all(l < x < h for l, x, h in zip(lo, pt, hi)) for pt in pts):
                return True
        return False

    def min_side(self) -> Fraction:
        return min(h - l for lo, hi in self.boxes for l, h in zip(lo, hi))


def is_small(s: AffineBisimplex, W: ConvexCover) -> bool:
    return W.contains_points(s.combined_points())


def chain_is_small(c: BiChain, W: ConvexCover) -> bool:
    return all(is_small(s, W) for s in c.terms)


def _diameter(s: AffineBisimplex) -> Fraction:
    pts = s.combined_points()
    out = Fraction(0)
    for k in range(len(pts[0])):
        vals = [p[k] for p in pts]
        out = max(out, max(vals) - min(vals))
    return out


def _iteration_cap(s: AffineBisimplex, W: ConvexCover) -> int:
    n = max(s.p, s.q)
    if n == 0:
        return 0
    d = _diameter(s)
    if d == 0:
        return 0
    target = W.min_side() / 2
    gamma = Fraction(n, n + 1)
    cap = math.ceil(math.log(float(target) / float(d)) / math.log(float(gamma))) if d > target else 0
    return max(4, cap + 8)


def smallness_index(s: AffineBisimplex, W: ConvexCover) -> int:
    """Least n with every term of Sd^n s inside a single box of the cover.

    Raises NotCovered once iteration passes the diameter-shrink bound: at that
    point some term vastly smaller than every box still straddles the cover,
    so the chain is not covered (or only with zero Lebesgue margin).
    """
    if W.dim != s.base_dim + s.fiber_dim:
        raise ValueError("cover dimension does not match the bisimplex")
    cap = _iteration_cap(s, W)
    c = BiChain.of(s)
    n = 0
    while True:
        if chain_is_small(c, W):
            return n
        if n >= cap:
            raise NotCovered(
                f"no smallness after {n} subdivisions (diameter bound exceeded); "
                "the cover does not cover this simplex with positive margin")
        c = subdivide(c)
        n += 1


class _RetractionMemo:
    """Per-cover memo of smallness indices and iterated subdivision chains."""

    def __init__(self, W: ConvexCover):
        self.W = W
        self.data: Dict[AffineBisimplex, Tuple[int, List[BiChain]]] = {}

    def powers(self, s: AffineBisimplex, upto: int = 0) -> Tuple[int, List[BiChain]]:
        """(n(s), [Sd^0 s, Sd^1 s, ...]) with chains up to max(n(s), upto).

        Raises NotCovered when the smallness iteration exceeds its cap.
        """
        hit = self.data.get(s)
        if hit is None:
            cap = _iteration_cap(s, self.W)
            chain = BiChain.of(s)
            chains = [chain]
            n = 0
            while not chain_is_small(chain, self.W):
                if n >= cap:
                    raise NotCovered(
                        f"no smallness after {n} subdivisions (diameter bound exceeded); "
                        "the cover does not cover this simplex with positive margin")
                chain = subdivide(chain)
                chains.append(chain)
                n += 1
            hit = (n, chains)
            self.data[s] = hit
        n, chains = hit
        while len(chains) <= upto:
            chains.append(subdivide(chains[-1]))
        return n, chains


def smallness_index(s: AffineBisimplex, W: ConvexCover) -> int:
    """Least n with every term of Sd^n s inside a single box of the cover.

    Raises NotCovered once iteration passes the diameter-shrink bound: at that
    point some term vastly smaller than every box still straddles the cover,
    so the chain is not covered (or only with zero Lebesgue margin).
    """
    if W.dim != s.base_dim + s.fiber_dim:
        raise ValueError("cover dimension does not match the bisimplex")
    return _RetractionMemo(W).powers(s)[0]


def _accumulate(acc: Dict[AffineBisimplex, int], chain: BiChain, scale: int):
    for t, k in chain.terms.items():
        acc[t] = acc.get(t, 0) + scale * k


def small_chain_retraction(c: BiChain, W: ConvexCover) -> Tuple[BiChain, Tuple[BiChain, BiChain]]:
    """The retraction tau onto small chains and its homotopy D.

    For each term: D sigma = sum_{j<n(sigma)} rho Sd^j sigma, and tau sigma is
    Sd^{n} sigma plus the face corrections of the displayed retraction formula;
    dD + Dd = 1 - tau exactly, and tau is the identity on already-small input.
    """
    memo = _RetractionMemo(W)
    tau_acc: Dict[AffineBisimplex, int] = {}
    up_acc: Dict[AffineBisimplex, int] = {}
    right_acc: Dict[AffineBisimplex, int] = {}
    for s, coeff in c.terms.items():
        n, powers = memo.powers(s)
        _accumulate(tau_acc, powers[n], coeff)
        for j in range(n):
            r1, r2 = homotopy_rho(powers[j])
            _accumulate(up_acc, r1, coeff)
            _accumulate(right_acc, r2, coeff)
        psgn = -1 if s.p % 2 else 1
        faces = []
        if s.p > 0:
            for i in range(s.p + 1):
                face = AffineBisimplex(s.base[:i] + s.base[i + 1:],
                                       s.grid[:i] + s.grid[i + 1:])
                faces.append((face, (-1) ** i))
        if s.q > 0:
            for i in range(s.q + 1):
                grid = tuple(row[:i] + row[i + 1:] for row in s.grid)
                faces.append((AffineBisimplex(s.base, grid), psgn * (-1) ** i))
        for face, sgn in faces:
            nf, fpowers = memo.powers(face, upto=max(n - 1, 0))
            for j in range(nf, n):
                _accumulate(tau_acc, rho_total(fpowers[j]), coeff * sgn)
    tau = BiChain(tau_acc, c.adim, c.bdim)
    if not chain_is_small(tau, W):
        raise AssertionError("retraction produced a non-small term")
    return tau, (BiChain(up_acc, c.adim, c.bdim), BiChain(right_acc, c.adim, c.bdim))
