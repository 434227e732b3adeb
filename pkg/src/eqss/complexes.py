"""Bounded cochain complexes of free modules and maps between them."""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence

from .exact_linalg import (
    ZZ,
    FGModule,
    IntMatrix,
    Ring,
    Subquotient,
    compose_is_zero,
    subquotient_with_basis,
)


class CochainComplex:
    """Free modules indexed by a contiguous degree range, d^n: degree n -> n+1.

    Degrees outside the range are zero.  d(n+1) @ d(n) == 0 is checked at
    construction.
    """

    def __init__(self, ring: Ring, lo: int, ranks: Sequence[int],
                 differentials: Sequence[IntMatrix]):
        if len(differentials) != max(len(ranks) - 1, 0):
            raise ValueError("need exactly len(ranks)-1 differentials")
        self.ring = ring
        self.lo = lo
        self.ranks = list(ranks)
        self._diffs = list(differentials)
        for i, d in enumerate(self._diffs):
            if d.shape != (self.ranks[i + 1], self.ranks[i]):
                raise ValueError(
                    f"differential {lo + i} has shape {d.shape}, "
                    f"expected {(self.ranks[i + 1], self.ranks[i])}")
        for i in range(len(self._diffs) - 1):
            if not compose_is_zero([(self._diffs[i + 1], self._diffs[i])], ring.modulus):
                raise ValueError(f"d o d != 0 between degrees {lo + i} and {lo + i + 2}")
        self._cohomology_cache: Dict[int, Subquotient] = {}

    @property
    def hi(self) -> int:
        return self.lo + len(self.ranks) - 1

    def rank(self, n: int) -> int:
        if self.lo <= n <= self.hi:
            return self.ranks[n - self.lo]
        return 0

    def differential(self, n: int) -> IntMatrix:
        """Matrix of d^n: degree n -> n+1 (zero-sized outside the range)."""
        i = n - self.lo
        if 0 <= i < len(self._diffs):
            return self._diffs[i]
        return IntMatrix.zeros(self.rank(n + 1), self.rank(n), self.ring)

    def cohomology_basis(self, n: int) -> Subquotient:
        if n not in self._cohomology_cache:
            amb = self.rank(n)
            dn = self.differential(n)
            dprev = self.differential(n - 1)
            self._cohomology_cache[n] = subquotient_with_basis(
                amb, dn if dn.rows else None, dprev if dprev.cols else None, self.ring)
        return self._cohomology_cache[n]

    def euler_characteristic(self) -> int:
        return sum((-1) ** (self.lo + i) * r for i, r in enumerate(self.ranks))


def cohomology(C: CochainComplex, n: int) -> FGModule:
    """Canonical form of ker d^n / im d^{n-1}; the zero module outside the range."""
    if n < C.lo or n > C.hi:
        return FGModule.zero(C.ring)
    return C.cohomology_basis(n).module


class ComplexMap:
    """Degreewise matrices commuting with the differentials (checked)."""

    def __init__(self, source: CochainComplex, target: CochainComplex,
                 components: Dict[int, IntMatrix]):
        if source.ring != target.ring:
            raise ValueError("source and target rings differ")
        self.source = source
        self.target = target
        self.components = dict(components)
        lo = min(source.lo, target.lo)
        hi = max(source.hi, target.hi)
        for n in range(lo, hi + 1):
            fn = self.component(n)
            fn1 = self.component(n + 1)
            lhs = target.differential(n) @ fn
            rhs = fn1 @ source.differential(n)
            if not source.ring.is_integers:
                lhs, rhs = IntMatrix(lhs.a, source.ring), IntMatrix(rhs.a, source.ring)
            if lhs != rhs:
                raise ValueError(f"map does not commute with d in degree {n}")

    def component(self, n: int) -> IntMatrix:
        if n in self.components:
            return self.components[n]
        return IntMatrix.zeros(self.target.rank(n), self.source.rank(n), self.source.ring)

    def compose(self, other: "ComplexMap") -> "ComplexMap":
        """self o other."""
        if other.target is not self.source and other.target.ranks != self.source.ranks:
            raise ValueError("composition mismatch")
        lo = min(other.source.lo, self.target.lo)
        hi = max(other.source.hi, self.target.hi)
        comps = {}
        for n in range(lo, hi + 1):
            m = self.component(n) @ other.component(n)
            if m.rows and m.cols:
                comps[n] = m
        return ComplexMap(other.source, self.target, comps)


def induced_map_on_cohomology(f: ComplexMap, n: int) -> IntMatrix:
    """Matrix of H^n(f) in the canonical generators chosen by cohomology()."""
    src = f.source.cohomology_basis(n) if f.source.lo <= n <= f.source.hi else None
    tgt = f.target.cohomology_basis(n) if f.target.lo <= n <= f.target.hi else None
    src_gens = src.ngens if src else 0
    tgt_gens = tgt.ngens if tgt else 0
    if src_gens == 0 or tgt_gens == 0:
        return IntMatrix.zeros(tgt_gens, src_gens, ZZ)
    pushed = f.component(n) @ src.generator_matrix()
    return tgt.coords(pushed)
