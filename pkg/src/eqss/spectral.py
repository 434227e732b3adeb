"""First-quadrant double complexes and their filtration spectral sequence.

Pages are extracted by explicit lattice arithmetic inside the total complex:

    Z_r^{pq}  = F^p Tot^{p+q}  intersect  d^{-1}(F^{p+r} Tot^{p+q+1})
    E_r^{pq}  = Z_r^{pq} / (Z_{r-1}^{p+1,q-1} + d Z_{r-1}^{p-r+1,q+r-2})

with the column filtration F^p spanned by cells of horizontal index >= p.
Every quotient is put in canonical invariant-factor form, and the d_r matrix
of a cell is computed on canonical generator representatives.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .complexes import CochainComplex, cohomology
from .exact_linalg import (
    ZZ,
    FGModule,
    IntMatrix,
    Ring,
    Subquotient,
    compose_is_zero,
    kernel_basis,
)


class DoubleComplex:
    """Cells of free rank with horizontal (p -> p+1) and vertical (q -> q+1) maps.

    The stored vertical differentials are pre-signed: d_h and d_v anticommute
    and the total differential is d_h + d_v.  Use `build` to supply unsigned
    vertical maps and have the (-1)^p sign applied for you.
    """

    def __init__(self, ring: Ring, p_max: int, q_max: int,
                 ranks: Dict[Tuple[int, int], int],
                 d_horiz: Dict[Tuple[int, int], IntMatrix],
                 d_vert: Dict[Tuple[int, int], IntMatrix]):
        if p_max < 0 or q_max < 0:
            raise ValueError("truncation bounds must be >= 0")
        self.ring = ring
        self.p_max = p_max
        self.q_max = q_max
        self._ranks = {k: int(v) for k, v in ranks.items() if v}
        self._dh = {k: m for k, m in d_horiz.items() if m.rows and m.cols}
        self._dv = {k: m for k, m in d_vert.items() if m.rows and m.cols}
        self._validate()
        self._tot: Optional[CochainComplex] = None
        self._z_cache: Dict[Tuple[int, int, int], IntMatrix] = {}
        self._dz_cache: Dict[Tuple[int, int, int], IntMatrix] = {}
        self._sq_cache: Dict[Tuple[int, int, int], Tuple[Subquotient, int]] = {}

    @classmethod
    def build(cls, ring: Ring, p_max: int, q_max: int,
              ranks: Dict[Tuple[int, int], int],
              d_horiz: Dict[Tuple[int, int], IntMatrix],
              d_vert_unsigned: Dict[Tuple[int, int], IntMatrix]) -> "DoubleComplex":
        """Construct from unsigned vertical maps, applying the (-1)^p sign."""
        signed = {}
        for (p, q), m in d_vert_unsigned.items():
            signed[(p, q)] = m if p % 2 == 0 else -m
        return cls(ring, p_max, q_max, ranks, d_horiz, signed)

    def rank(self, p: int, q: int) -> int:
        if 0 <= p <= self.p_max and 0 <= q <= self.q_max:
            return self._ranks.get((p, q), 0)
        return 0

    def d_h(self, p: int, q: int) -> IntMatrix:
        m = self._dh.get((p, q))
        if m is None:
            return IntMatrix.zeros(self.rank(p + 1, q), self.rank(p, q), self.ring)
        return m

    def d_v(self, p: int, q: int) -> IntMatrix:
        m = self._dv.get((p, q))
        if m is None:
            return IntMatrix.zeros(self.rank(p, q + 1), self.rank(p, q), self.ring)
        return m

    def _validate(self):
        mod = self.ring.modulus
        for (p, q) in list(self._ranks):
            if p < 0 or q < 0 or p > self.p_max or q > self.q_max:
                raise ValueError(f"cell ({p},{q}) outside the first-quadrant box")
        for (p, q) in sorted(set(self._ranks) | set(self._dh) | set(self._dv)):
            dh = self.d_h(p, q)
            dv = self.d_v(p, q)
            if dh.shape != (self.rank(p + 1, q), self.rank(p, q)):
                raise ValueError(f"d_h at ({p},{q}) has shape {dh.shape}")
            if dv.shape != (self.rank(p, q + 1), self.rank(p, q)):
                raise ValueError(f"d_v at ({p},{q}) has shape {dv.shape}")
            if not compose_is_zero([(self.d_h(p + 1, q), dh)], mod):
                raise ValueError(f"d_h o d_h != 0 at ({p},{q})")
            if not compose_is_zero([(self.d_v(p, q + 1), dv)], mod):
                raise ValueError(f"d_v o d_v != 0 at ({p},{q})")
            if not compose_is_zero([(self.d_v(p + 1, q), dh), (self.d_h(p, q + 1), dv)], mod):
                raise ValueError(f"d_h and d_v do not anticommute at ({p},{q})")

    # -- total complex ------------------------------------------------------

    def antidiagonal(self, n: int) -> List[Tuple[int, int, int, int]]:
        """Cells (p, q, offset, rank) with p+q == n, ascending p, inside the box."""
        out = []
        off = 0
        for p in range(max(0, n - self.q_max), min(n, self.p_max) + 1):
            r = self.rank(p, n - p)
            out.append((p, n - p, off, r))
            off += r
        return out

    def tot_rank(self, n: int) -> int:
        return sum(r for (_, _, _, r) in self.antidiagonal(n))

    def total_complex(self) -> CochainComplex:
        if self._tot is None:
            n_top = self.p_max + self.q_max
            ranks = [self.tot_rank(n) for n in range(n_top + 1)]
            diffs = []
            for n in range(n_top):
                src = self.antidiagonal(n)
                tgt = self.antidiagonal(n + 1)
                tgt_off = {(p, q): off for (p, q, off, _) in tgt}
                D = np.zeros((ranks[n + 1], ranks[n]), dtype=object)
                for (p, q, off, r) in src:
                    if not r:
                        continue
                    dh = self.d_h(p, q)
                    if dh.rows:
                        o = tgt_off[(p + 1, q)]
                        D[o:o + dh.rows, off:off + r] = dh.a
                    dv = self.d_v(p, q)
                    if dv.rows:
                        o = tgt_off[(p, q + 1)]
                        D[o:o + dv.rows, off:off + r] = dv.a
                diffs.append(IntMatrix.from_array(D, self.ring))
            self._tot = CochainComplex(self.ring, 0, ranks, diffs)
        return self._tot

    # -- filtration lattices -------------------------------------------------

    def _filt_cells(self, p: int, n: int):
        """Cells of F^p Tot^n: (p', q', offset-within-F^p, rank), ascending p'."""
        out = []
        off = 0
        for pp in range(max(p, 0, n - self.q_max), min(n, self.p_max) + 1):
            r = self.rank(pp, n - pp)
            out.append((pp, n - pp, off, r))
            off += r
        return out

    def _filt_dim(self, p: int, n: int) -> int:
        return sum(r for (_, _, _, r) in self._filt_cells(p, n))

    def _embed_filt(self, p_from: int, p_to: int, n: int, cols: IntMatrix) -> IntMatrix:
        """Re-express F^{p_from}-coordinates columns in F^{p_to} coordinates (p_to <= p_from)."""
        if p_from == p_to:
            return cols
        pad = self._filt_dim(p_to, n) - self._filt_dim(p_from, n)
        if cols.cols == 0:
            return IntMatrix.zeros(self._filt_dim(p_to, n), 0, ZZ)
        top = np.zeros((pad, cols.cols), dtype=object)
        return IntMatrix.from_array(np.vstack([top, cols.a]), ZZ)

    def _strip_key(self, p: int, n: int, s: int) -> int:
        """Clip s so that equal constraint systems share a cache key."""
        if s <= 0:
            return 0
        hi = min(self.p_max, n + 1)  # largest band that can carry a constraint row
        return max(0, min(s, hi + 1 - p))

    def _z_lattice(self, p: int, n: int, s: int) -> IntMatrix:
        """Basis (columns, in F^p coordinates) of F^p Tot^n intersect d^{-1} F^{p+s} Tot^{n+1}."""
        band_end = p + s  # the d-condition is absolute: dx in F^{band_end}
        p = max(p, 0)
        if n < 0 or p > min(n, self.p_max):
            return IntMatrix.zeros(0, 0, ZZ)
        s = self._strip_key(p, n, band_end - p)
        key = (p, n, s)
        if key in self._z_cache:
            return self._z_cache[key]
        dim = self._filt_dim(p, n)
        if s == 0:
            out = IntMatrix.identity(dim, ZZ)
        else:
            # constraint rows: components of dx in bands p..p+s-1 of Tot^{n+1}
            rows = []
            row_off = {}
            roff = 0
            for pp in range(p, p + s):
                r = self.rank(pp, n + 1 - pp)
                row_off[pp] = roff
                roff += r
            M = np.zeros((roff, dim), dtype=object)
            for (pp, qq, off, r) in self._filt_cells(p, n):
                if not r:
                    continue
                dh = self.d_h(pp, qq)
                if dh.rows and pp + 1 in row_off:
                    o = row_off[pp + 1]
                    M[o:o + dh.rows, off:off + r] = dh.a
                dv = self.d_v(pp, qq)
                if dv.rows and pp in row_off:
                    o = row_off[pp]
                    M[o:o + dv.rows, off:off + r] = dv.a
            out = kernel_basis(IntMatrix.from_array(M, self.ring))
        self._z_cache[key] = out
        return out

    def _d_of_z(self, p: int, n: int, s: int, p_target_coords: int) -> IntMatrix:
        """Columns generating d(Z_s^{p,*}) c Tot^{n+1}, in F^{p_target_coords} coordinates."""
        p_eff = max(p, 0)
        if n < 0 or p_eff > min(n, self.p_max):
            return IntMatrix.zeros(self._filt_dim(p_target_coords, n + 1), 0, ZZ)
        z = self._z_lattice(p, n, s)
        key = (p_eff, n, self._strip_key(p_eff, n, p + s - p_eff))
        if key not in self._dz_cache:
            src_cells = self._filt_cells(p_eff, n)
            tgt_cells = self._filt_cells(p_eff, n + 1)
            tgt_off = {(pp, qq): off for (pp, qq, off, _) in tgt_cells}
            dim_tgt = self._filt_dim(p_eff, n + 1)
            out = np.zeros((dim_tgt, z.cols), dtype=object)
            for (pp, qq, off, r) in src_cells:
                if not r:
                    continue
                block = z.a[off:off + r, :]
                if not np.any(block):
                    continue
                dh = self.d_h(pp, qq)
                if dh.rows:
                    o = tgt_off[(pp + 1, qq)]
                    out[o:o + dh.rows, :] += np.dot(dh.a, block)
                dv = self.d_v(pp, qq)
                if dv.rows:
                    o = tgt_off[(pp, qq + 1)]
                    out[o:o + dv.rows, :] += np.dot(dv.a, block)
            self._dz_cache[key] = IntMatrix.from_array(out, ZZ)
        cols = self._dz_cache[key]
        # d preserves filtration (mod m over Z/m), so slicing to a deeper
        # filtration only drops rows that vanish in the ring.
        pad = self._filt_dim(p_target_coords, n + 1) - self._filt_dim(p_eff, n + 1)
        if pad == 0:
            return cols
        if pad > 0:
            top = np.zeros((pad, cols.cols), dtype=object)
            return IntMatrix.from_array(np.vstack([top, cols.a]), ZZ)
        cut = -pad
        arr = cols.a
        if not self.ring.is_integers:
            arr = arr % self.ring.modulus
        if np.any(arr[:cut, :]):
            raise AssertionError("differential violated the filtration")
        return IntMatrix.from_array(arr[cut:, :].copy(), ZZ)

    def cell_subquotient(self, p: int, q: int, r: int) -> Subquotient:
        """E_r^{pq} as a canonical subquotient in F^p coordinates of Tot^{p+q}."""
        key = (p, q, r)
        if key in self._sq_cache:
            return self._sq_cache[key]
        n = p + q
        num = self._z_lattice(p, n, r)
        den1 = self._embed_filt(p + 1, p, n, self._z_lattice(p + 1, n, r - 1))
        den2 = self._d_of_z(p - r + 1, n - 1, r - 1, p)
        den = den1.hstack(den2) if den2.cols else den1
        sq = Subquotient(self.ring, self._filt_dim(p, n), num,
                         den if den.cols else None)
        self._sq_cache[key] = sq
        return sq


class SSPage:
    """One page of the spectral sequence: canonical entries plus d_r matrices."""

    def __init__(self, r: int, p_max: int, q_max: int, ring: Ring,
                 entries: Dict[Tuple[int, int], FGModule],
                 d_matrices: Dict[Tuple[int, int], IntMatrix]):
        self.r = r
        self.p_max = p_max
        self.q_max = q_max
        self.ring = ring
        self.entries = entries
        self.d_matrices = d_matrices

    def entry(self, p: int, q: int) -> FGModule:
        return self.entries.get((p, q), FGModule.zero(self.ring))

    def d(self, p: int, q: int) -> IntMatrix:
        m = self.d_matrices.get((p, q))
        if m is not None:
            return m
        tgt = self.entry(p + self.r, q - self.r + 1)
        src = self.entry(p, q)
        return IntMatrix.zeros(tgt.rank + len(tgt.torsion), src.rank + len(src.torsion), ZZ)

    def moduli(self, p: int, q: int) -> List[int]:
        """Per-generator annihilators of the entry, matching d-matrix rows/columns."""
        e = self.entry(p, q)
        facs = list(e.torsion) + [0] * e.rank
        if not self.ring.is_integers:
            facs = [d if d else self.ring.modulus for d in facs]
        return facs

    def cells(self):
        return sorted(self.entries)


def page(D: DoubleComplex, r: int,
         cells: Optional[Iterable[Tuple[int, int]]] = None) -> SSPage:
    """Page r of the filtration spectral sequence of D.

    `cells` optionally restricts computation to the given (p, q) positions
    (entries elsewhere are omitted); by default the whole box is computed and
    d_r o d_r == 0 is verified on it.
    """
    if r < 0:
        raise ValueError("page number must be >= 0")
    if cells is None:
        wanted = [(p, q) for p in range(D.p_max + 1) for q in range(D.q_max + 1)]
        verify = True
    else:
        wanted = sorted(set(cells))
        verify = False
    entries: Dict[Tuple[int, int], FGModule] = {}
    dmats: Dict[Tuple[int, int], IntMatrix] = {}
    sqs: Dict[Tuple[int, int], Subquotient] = {}
    for (p, q) in wanted:
        sq = D.cell_subquotient(p, q, r)
        sqs[(p, q)] = sq
        entries[(p, q)] = sq.module
    for (p, q) in wanted:
        src = sqs[(p, q)]
        if src.ngens == 0:
            continue
        pt, qt = p + r, q - r + 1
        if pt > D.p_max or qt < 0 or qt > D.q_max:
            continue
        tgt = sqs.get((pt, qt)) or D.cell_subquotient(pt, qt, r)
        if tgt.ngens == 0:
            continue
        n = p + q
        reps = D._embed_filt(p, 0, n, src.generator_matrix())
        pushed = _apply_total_differential(D, n, reps)
        sliced = _slice_to_filtration(D, n + 1, pt, pushed)
        dmats[(p, q)] = tgt.coords(sliced)
    pg = SSPage(r, D.p_max, D.q_max, D.ring, entries, dmats)
    if verify:
        _check_dd_zero(pg)
    return pg


def _apply_total_differential(D: DoubleComplex, n: int, cols: IntMatrix) -> IntMatrix:
    tgt_cells = D.antidiagonal(n + 1)
    tgt_off = {(pp, qq): off for (pp, qq, off, _) in tgt_cells}
    out = np.zeros((D.tot_rank(n + 1), cols.cols), dtype=object)
    for (pp, qq, off, rk) in D.antidiagonal(n):
        if not rk:
            continue
        block = cols.a[off:off + rk, :]
        if not np.any(block):
            continue
        dh = D.d_h(pp, qq)
        if dh.rows:
            o = tgt_off[(pp + 1, qq)]
            out[o:o + dh.rows, :] += np.dot(dh.a, block)
        dv = D.d_v(pp, qq)
        if dv.rows:
            o = tgt_off[(pp, qq + 1)]
            out[o:o + dv.rows, :] += np.dot(dv.a, block)
    return IntMatrix.from_array(out, ZZ)


def _slice_to_filtration(D: DoubleComplex, n: int, p: int, cols: IntMatrix) -> IntMatrix:
    cut = D.tot_rank(n) - D._filt_dim(p, n)
    arr = cols.a
    if not D.ring.is_integers:
        arr = arr % D.ring.modulus
    if np.any(arr[:cut, :]):
        raise AssertionError("d_r image escaped the target filtration")
    return IntMatrix.from_array(arr[cut:, :].copy(), ZZ)


def _check_dd_zero(pg: SSPage):
    for (p, q), m1 in pg.d_matrices.items():
        key2 = (p + pg.r, q - pg.r + 1)
        m2 = pg.d_matrices.get(key2)
        if m2 is None:
            continue
        comp = m2 @ m1
        moduli = pg.moduli(key2[0] + pg.r, key2[1] - pg.r + 1)
        for i in range(comp.rows):
            d = moduli[i]
            for j in range(comp.cols):
                v = comp[i, j] % d if d else comp[i, j]
                if v != 0:
                    raise AssertionError(f"d_{pg.r} o d_{pg.r} != 0 at ({p},{q})")


def stable_page(D: DoubleComplex) -> SSPage:
    """The page on which all differentials vanish for degree reasons (E_infinity)."""
    return page(D, D.p_max + D.q_max + 2)


def certified_total_degrees(D: DoubleComplex) -> int:
    """Largest n for which H^n(Tot) is unaffected by the box truncation in general.

    H^n needs complete antidiagonals at n and n+1, so the generic bound is
    min(p_max, q_max) - 1; callers with structural vanishing knowledge (for
    example a space of small dimension) may certify more.
    """
    return min(D.p_max, D.q_max) - 1


def associated_graded_check(D: DoubleComplex, n: int) -> dict:
    """Compare H^n(Tot) with the degree-n associated graded of the stable page.

    Ranks must agree and torsion subgroup cardinalities must agree; torsion
    isomorphism types are deliberately not compared, since extensions may be
    nontrivial.  Returns a report dict with both sides and the verdict.
    """
    if n > D.p_max + D.q_max:
        raise ValueError("degree beyond the truncation box")
    tot = D.total_complex()
    h = cohomology(tot, n)
    r_inf = D.p_max + D.q_max + 2
    diag_cells = [(p, n - p) for p in range(max(0, n - D.q_max), min(n, D.p_max) + 1)]
    pg = page(D, r_inf, cells=diag_cells)
    graded = {(p, q): pg.entry(p, q) for (p, q) in diag_cells}
    graded_rank = sum(m.rank for m in graded.values())
    graded_tors = 1
    for m in graded.values():
        graded_tors *= m.torsion_cardinality()
    verdict = (graded_rank == h.rank) and (graded_tors == h.torsion_cardinality())
    return {
        "degree": n,
        "tot_rank": h.rank,
        "tot_torsion_cardinality": h.torsion_cardinality(),
        "graded_rank": graded_rank,
        "graded_torsion_cardinality": graded_tors,
        "cells": {f"{p},{q}": str(m) for (p, q), m in sorted(graded.items())},
        "verdict": verdict,
        "truncation_affected": n > certified_total_degrees(D),
    }


def total_complex(D: DoubleComplex) -> CochainComplex:
    return D.total_complex()
