"""Exact linear algebra over Z and Z/m.

Everything here is built on numpy object arrays holding Python ints, so all
arithmetic is arbitrary precision.  The two workhorses are `smith_normal_form`
and `Subquotient`; the latter packages a numerator lattice, a denominator
sublattice and the canonical-form bookkeeping needed to express elements in
canonical generators (which is what induced maps and spectral sequence
differentials consume).

Z/m computations are lifted to Z by appending m*identity relations, so there
is a single elimination code path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ImageNotInKernel


@dataclass(frozen=True)
class Ring:
    """Z when modulus == 0, otherwise Z/modulus."""

    modulus: int = 0

    def __post_init__(self):
        if self.modulus < 0 or self.modulus == 1:
            raise ValueError("modulus must be 0 (meaning Z) or >= 2")

    @property
    def is_integers(self) -> bool:
        return self.modulus == 0

    def __str__(self):
        return "Z" if self.is_integers else f"Z/{self.modulus}"


ZZ = Ring(0)


def Zmod(m: int) -> Ring:
    return Ring(m)


def _as_object_array(entries, rows: int, cols: int) -> np.ndarray:
    a = np.empty((rows, cols), dtype=object)
    if rows and cols:
        a[:] = entries
        for i in range(rows):
            for j in range(cols):
                a[i, j] = int(a[i, j])
    return a


class IntMatrix:
    """Immutable-by-convention exact matrix over Z or Z/m.

    In Z/m mode entries are normalized into [0, m).  Internal lattice
    computations always work with integer lifts.
    """

    __slots__ = ("ring", "a")

    def __init__(self, entries, ring: Ring = ZZ, shape=None):
        if isinstance(entries, IntMatrix):
            arr = entries.a.copy()
        elif isinstance(entries, np.ndarray):
            arr = _as_object_array(entries, entries.shape[0], entries.shape[1])
        else:
            rows = list(entries)
            if shape is not None:
                r, c = shape
            else:
                r = len(rows)
                c = len(rows[0]) if r else 0
            arr = _as_object_array(rows, r, c)
        if not ring.is_integers:
            m = ring.modulus
            for i in range(arr.shape[0]):
                for j in range(arr.shape[1]):
                    arr[i, j] %= m
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "a", arr)

    @classmethod
    def from_array(cls, arr: np.ndarray, ring: Ring = ZZ) -> "IntMatrix":
        out = cls.__new__(cls)
        object.__setattr__(out, "ring", ring)
        object.__setattr__(out, "a", arr)
        if not ring.is_integers:
            m = ring.modulus
            r, c = arr.shape
            for i in range(r):
                for j in range(c):
                    arr[i, j] %= m
        return out

    @classmethod
    def zeros(cls, rows: int, cols: int, ring: Ring = ZZ) -> "IntMatrix":
        return cls.from_array(np.zeros((rows, cols), dtype=object), ring)

    @classmethod
    def identity(cls, n: int, ring: Ring = ZZ) -> "IntMatrix":
        a = np.zeros((n, n), dtype=object)
        for i in range(n):
            a[i, i] = 1
        return cls.from_array(a, ring)

    @classmethod
    def diagonal(cls, diag: Sequence[int], rows=None, cols=None, ring: Ring = ZZ) -> "IntMatrix":
        r = rows if rows is not None else len(diag)
        c = cols if cols is not None else len(diag)
        a = np.zeros((r, c), dtype=object)
        for i, d in enumerate(diag):
            a[i, i] = int(d)
        return cls.from_array(a, ring)

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self):
        return self.a.shape

    def __getitem__(self, key):
        return self.a[key]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.rows == 0 or other.cols == 0 or self.cols == 0:
            return IntMatrix.zeros(self.rows, other.cols, self.ring)
        return IntMatrix.from_array(np.dot(self.a, other.a), self.ring)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix.from_array(self.a + other.a, self.ring)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix.from_array(self.a - other.a, self.ring)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix.from_array(-self.a, self.ring)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix.from_array(self.a * int(c), self.ring)

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_array(self.a.T.copy(), self.ring)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix.from_array(np.hstack([self.a, other.a]), self.ring)

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix.from_array(np.vstack([self.a, other.a]), self.ring)

    def column(self, j: int) -> np.ndarray:
        return self.a[:, j].copy()

    def take_columns(self, idx) -> "IntMatrix":
        return IntMatrix.from_array(self.a[:, list(idx)].copy(), self.ring)

    def is_zero(self) -> bool:
        return not np.any(self.a)

    def __eq__(self, other):
        return (
            isinstance(other, IntMatrix)
            and self.ring == other.ring
            and self.shape == other.shape
            and bool(np.array_equal(self.a, other.a))
        )

    def __hash__(self):
        return hash((self.ring, self.shape, tuple(self.a.flat)))

    def tolist(self):
        return [[int(x) for x in row] for row in self.a]

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r}, ring={self.ring})"


@dataclass(frozen=True)
class FGModule:
    """Canonical form of a finitely generated module over Z or Z/m.

    Two modules over the same ring are isomorphic iff their (rank, torsion)
    coincide.  Torsion factors form a divisibility chain and exclude units;
    over Z/m the free summands are copies of Z/m and torsion factors are
    proper divisors of m.
    """

    ring: Ring
    rank: int
    torsion: tuple

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("negative rank")
        prev = None
        for d in self.torsion:
            if d <= 1:
                raise ValueError(f"torsion factor {d} <= 1")
            if prev is not None and d % prev != 0:
                raise ValueError(f"torsion {self.torsion} violates divisibility chain")
            if not self.ring.is_integers and self.ring.modulus % d != 0:
                raise ValueError(f"torsion factor {d} does not divide {self.ring.modulus}")
            prev = d

    @classmethod
    def zero(cls, ring: Ring = ZZ) -> "FGModule":
        return cls(ring, 0, ())

    @classmethod
    def free(cls, rank: int, ring: Ring = ZZ) -> "FGModule":
        return cls(ring, rank, ())

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def torsion_cardinality(self) -> int:
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def __str__(self):
        free_sym = "Z" if self.ring.is_integers else f"(Z/{self.ring.modulus})"
        parts = []
        if self.rank == 1:
            parts.append(free_sym)
        elif self.rank > 1:
            parts.append(f"{free_sym}^{self.rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def _module_from_factors(ring: Ring, factors: Iterable[int], free_extra: int = 0) -> FGModule:
    """Canonical FGModule from Z-invariant factors plus extra free summands."""
    facs = [abs(int(d)) for d in factors]
    if ring.is_integers:
        rank = free_extra + sum(1 for d in facs if d == 0)
        torsion = tuple(sorted(d for d in facs if d > 1))
        return FGModule(ring, rank, torsion)
    m = ring.modulus
    if free_extra:
        facs.extend([m] * free_extra)
    for d in facs:
        if d == 0 or m % d != 0:
            raise AssertionError(f"factor {d} invalid over Z/{m}")
    rank = sum(1 for d in facs if d == m)
    torsion = tuple(sorted(d for d in facs if 1 < d < m))
    return FGModule(ring, rank, torsion)


# ---------------------------------------------------------------------------
# Elimination kernels.  All pivot choices are deterministic: minimal absolute
# value, ties broken by smallest (row, col).
# ---------------------------------------------------------------------------


def _pivot_in(sub: np.ndarray):
    nz = np.nonzero(sub)
    if len(nz[0]) == 0:
        return None
    vals = np.abs(sub[nz])
    k = int(np.argmin(vals))
    return int(nz[0][k]), int(nz[1][k])


def _snf_diagonalize(A: np.ndarray, want_u: bool, want_v: bool):
    """Diagonalize A by unimodular row/col ops; returns (diag entries, U, Uinv, V).

    Invariants maintained: U @ A_orig @ V == current A, Uinv @ U == I.
    """
    A = A.copy()
    m, n = A.shape
    U = np.eye(m, dtype=object) if want_u else None
    Uinv = np.eye(m, dtype=object) if want_u else None
    V = np.eye(n, dtype=object) if want_v else None
    t = 0
    while t < min(m, n):
        piv = _pivot_in(A[t:, t:])
        if piv is None:
            break
        i, j = piv[0] + t, piv[1] + t
        if i != t:
            A[[t, i]] = A[[i, t]]
            if want_u:
                U[[t, i]] = U[[i, t]]
                Uinv[:, [t, i]] = Uinv[:, [i, t]]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
            if want_v:
                V[:, [t, j]] = V[:, [j, t]]
        while True:
            # clear column t below the pivot
            col = A[t + 1 :, t]
            nz = np.nonzero(col)[0]
            if len(nz):
                a = A[t, t]
                for k in nz:
                    q = col[k] // a
                    if q:
                        A[t + 1 + k] -= q * A[t]
                        if want_u:
                            U[t + 1 + k] -= q * U[t]
                            Uinv[:, t] += q * Uinv[:, t + 1 + k]
                col = A[t + 1 :, t]
                nz = np.nonzero(col)[0]
                if len(nz):
                    vals = np.abs(col[nz])
                    k = int(nz[int(np.argmin(vals))]) + t + 1
                    A[[t, k]] = A[[k, t]]
                    if want_u:
                        U[[t, k]] = U[[k, t]]
                        Uinv[:, [t, k]] = Uinv[:, [k, t]]
                    continue
            # clear row t right of the pivot
            row = A[t, t + 1 :]
            nz = np.nonzero(row)[0]
            if len(nz):
                a = A[t, t]
                for k in nz:
                    q = row[k] // a
                    if q:
                        A[:, t + 1 + k] -= q * A[:, t]
                        if want_v:
                            V[:, t + 1 + k] -= q * V[:, t]
                row = A[t, t + 1 :]
                nz = np.nonzero(row)[0]
                if len(nz):
                    vals = np.abs(row[nz])
                    k = int(nz[int(np.argmin(vals))]) + t + 1
                    A[:, [t, k]] = A[:, [k, t]]
                    if want_v:
                        V[:, [t, k]] = V[:, [k, t]]
                    continue
            break
        t += 1
    rank = t
    # enforce the divisibility chain d1 | d2 | ...
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            a, b = A[i, i], A[i + 1, i + 1]
            if b % a != 0:
                changed = True
                # fold diag entry i+1 into column i, then re-clear the 2x2 block
                A[:, i] += A[:, i + 1]
                if want_v:
                    V[:, i] += V[:, i + 1]
                while True:
                    if A[i + 1, i] != 0:
                        if abs(A[i + 1, i]) < abs(A[i, i]):
                            A[[i, i + 1]] = A[[i + 1, i]]
                            if want_u:
                                U[[i, i + 1]] = U[[i + 1, i]]
                                Uinv[:, [i, i + 1]] = Uinv[:, [i + 1, i]]
                        q = A[i + 1, i] // A[i, i]
                        if q:
                            A[i + 1] -= q * A[i]
                            if want_u:
                                U[i + 1] -= q * U[i]
                                Uinv[:, i] += q * Uinv[:, i + 1]
                        if A[i + 1, i]:
                            continue
                    if A[i, i + 1] != 0:
                        q = A[i, i + 1] // A[i, i]
                        if q:
                            A[:, i + 1] -= q * A[:, i]
                            if want_v:
                                V[:, i + 1] -= q * V[:, i]
                        if A[i, i + 1]:
                            A[:, [i, i + 1]] = A[:, [i + 1, i]]
                            if want_v:
                                V[:, [i, i + 1]] = V[:, [i + 1, i]]
                            continue
                    break
    # normalize signs
    for i in range(rank):
        if A[i, i] < 0:
            A[i] = -A[i]
            if want_u:
                U[i] = -U[i]
                Uinv[:, i] = -Uinv[:, i]
    diag = [A[i, i] for i in range(min(m, n))]
    return diag, U, Uinv, V, A


def smith_normal_form(M: IntMatrix):
    """U, D, V with U @ M @ V == D, U and V unimodular, diagonal divisibility chain.

    For Z/m matrices the computation runs on the integer lift, so the returned
    identity holds exactly over Z (hence also mod m).
    """
    diag, U, _, V, A = _snf_diagonalize(M.a, True, True)
    return (
        IntMatrix.from_array(U, ZZ),
        IntMatrix.from_array(A, ZZ),
        IntMatrix.from_array(V, ZZ),
    )


def invariant_factors(M: IntMatrix) -> list:
    diag, _, _, _, _ = _snf_diagonalize(M.a, False, False)
    return [d for d in diag if d != 0]


def rank_of_matrix(M: IntMatrix) -> int:
    """Rank over the fraction field of Z (torsion ignored)."""
    return len(invariant_factors(M))


def _column_echelon(K: np.ndarray):
    """Column echelon form by unimodular column ops: K @ V = H.

    Returns (H, V, pivots) where pivots is a list of (row, col) with strictly
    increasing rows, and H[r, j'] == 0 for every pivot (r, j) and j' > j.
    """
    m, n = K.shape
    H = K.copy()
    V = np.eye(n, dtype=object)
    pivots = []
    lead = 0
    for r in range(m):
        if lead >= n:
            break
        if not np.any(H[r, lead:]):
            continue
        while True:
            seg = H[r, lead:]
            nz = np.nonzero(seg)[0]
            vals = np.abs(seg[nz])
            j = int(nz[int(np.argmin(vals))]) + lead
            if j != lead:
                H[:, [lead, j]] = H[:, [j, lead]]
                V[:, [lead, j]] = V[:, [j, lead]]
            a = H[r, lead]
            clean = True
            for j2 in range(lead + 1, n):
                b = H[r, j2]
                if b:
                    q = b // a
                    if q:
                        H[:, j2] -= q * H[:, lead]
                        V[:, j2] -= q * V[:, lead]
                    if H[r, j2]:
                        clean = False
            if clean:
                break
        if H[r, lead] < 0:
            H[:, lead] = -H[:, lead]
            V[:, lead] = -V[:, lead]
        pivots.append((r, lead))
        lead += 1
    return H, V, pivots


def kernel_basis(M: IntMatrix) -> IntMatrix:
    """Basis (as columns) of the lattice {x : M x == 0 over the ring}.

    Over Z the kernel is saturated, so the columns are a genuine lattice
    basis.  Over Z/m the congruence kernel {x : M x == 0 mod m} is computed;
    it contains m*Z^cols and the returned columns are a basis of its lift.
    """
    A = M.a
    if not M.ring.is_integers:
        m = M.ring.modulus
        ext = np.zeros((A.shape[0], A.shape[0]), dtype=object)
        for i in range(A.shape[0]):
            ext[i, i] = m
        A = np.hstack([A, ext])
    H, V, pivots = _column_echelon(A)
    free_from = len(pivots)
    ker = V[:, free_from:]
    if not M.ring.is_integers:
        # project away the slack coordinates and re-extract a lattice basis
        ker = ker[: M.cols, :]
        H2, V2, piv2 = _column_echelon(ker)
        ker = H2[:, : len(piv2)]
    return IntMatrix.from_array(ker.copy(), ZZ)


class ColumnSolver:
    """Solves K x = b exactly for many right-hand sides against a fixed K."""

    def __init__(self, K: IntMatrix):
        self.K = K
        self.H, self.V, self.pivots = _column_echelon(K.a)

    def solve(self, B: IntMatrix) -> IntMatrix:
        """X with K @ X == B, or raises ValueError if no integer solution."""
        m, n = self.H.shape
        t = B.cols
        if B.rows != m:
            raise ValueError("shape mismatch in solve")
        R = B.a.copy()
        Y = np.zeros((n, t), dtype=object)
        for (r, j) in self.pivots:
            a = self.H[r, j]
            for c in range(t):
                b = R[r, c]
                if b % a != 0:
                    raise ValueError("no integer solution")
                y = b // a
                if y:
                    Y[j, c] = y
                    R[:, c] -= y * self.H[:, j]
        if np.any(R):
            raise ValueError("no integer solution")
        if n == 0 or t == 0:
            return IntMatrix.zeros(n, t, ZZ)
        return IntMatrix.from_array(np.dot(self.V, Y), ZZ)


def solve_exact(K: IntMatrix, B: IntMatrix) -> IntMatrix:
    return ColumnSolver(K).solve(B)


# ---------------------------------------------------------------------------
# Canonical subquotients.
# ---------------------------------------------------------------------------


class Subquotient:
    """A quotient L/D of lattices inside Z^N in canonical invariant-factor form.

    `numerator` columns must be a basis of L; `denominator_gens` columns must
    generate D <= L.  For Z/m rings m*Z^N is adjoined to the denominator and
    the numerator is expected to contain it (kernel_basis arranges this).

    Exposes the canonical FGModule, ambient representatives of its canonical
    generators, and coordinates of ambient vectors of L in those generators.
    """

    def __init__(self, ring: Ring, ambient_dim: int, numerator: IntMatrix,
                 denominator_gens: Optional[IntMatrix] = None):
        self.ring = ring
        self.ambient_dim = ambient_dim
        self.numerator = numerator
        k = numerator.cols
        dens = []
        if denominator_gens is not None and denominator_gens.cols:
            dens.append(denominator_gens.a)
        if not ring.is_integers:
            ext = np.zeros((ambient_dim, ambient_dim), dtype=object)
            for i in range(ambient_dim):
                ext[i, i] = ring.modulus
            dens.append(ext)
        if dens:
            D = IntMatrix.from_array(np.hstack(dens) if len(dens) > 1 else dens[0].copy(), ZZ)
        else:
            D = IntMatrix.zeros(ambient_dim, 0, ZZ)
        self._solver = ColumnSolver(numerator)
        try:
            E = self._solver.solve(D)
        except ValueError as exc:
            raise ImageNotInKernel(f"denominator does not lie in the numerator lattice: {exc}")
        diag, U, Uinv, _, _ = _snf_diagonalize(E.a, True, False)
        self._u = U
        self._uinv = Uinv
        moduli = list(diag) + [0] * (k - len(diag))
        self._selected = [i for i in range(k) if moduli[i] != 1]
        self._moduli = [moduli[i] for i in self._selected]
        if ring.is_integers:
            self.module = FGModule(
                ring,
                sum(1 for d in self._moduli if d == 0),
                tuple(sorted(d for d in self._moduli if d > 1)),
            )
        else:
            self.module = _module_from_factors(ring, self._moduli)

    @property
    def ngens(self) -> int:
        return len(self._selected)

    def generator_matrix(self) -> IntMatrix:
        """Ambient column vectors representing the canonical generators."""
        if self.ngens == 0 or self.numerator.cols == 0:
            return IntMatrix.zeros(self.ambient_dim, self.ngens, ZZ)
        return IntMatrix.from_array(np.dot(self.numerator.a, self._uinv[:, self._selected]), ZZ)

    def generator_moduli(self) -> list:
        """Per-generator annihilator (0 = free), matching generator_matrix columns."""
        return list(self._moduli)

    def coords(self, W: IntMatrix) -> IntMatrix:
        """Canonical coordinates of ambient columns lying in L, reduced mod moduli."""
        X = self._solver.solve(W)
        if X.rows == 0 or W.cols == 0:
            return IntMatrix.zeros(self.ngens, W.cols, ZZ)
        Y = np.dot(self._u, X.a)
        out = Y[self._selected, :] if self.ngens else np.zeros((0, W.cols), dtype=object)
        out = out.copy()
        for i, d in enumerate(self._moduli):
            if d:
                for c in range(out.shape[1]):
                    out[i, c] %= d
        return IntMatrix.from_array(out, ZZ)


def sparse_columns(M: IntMatrix):
    """Per-column {row: value} dicts, for sparse composition checks."""
    cols = [dict() for _ in range(M.cols)]
    nz = np.nonzero(M.a)
    for i, j in zip(nz[0], nz[1]):
        cols[int(j)][int(i)] = M.a[i, j]
    return cols


def compose_is_zero(terms, modulus: int = 0) -> bool:
    """Whether sum of matrix products A @ B over (A, B) in terms vanishes.

    Accumulates sparsely, so it is fast for the large, mostly-empty matrices
    produced by resolutions and total complexes.  All summands must share the
    target/source shapes.
    """
    acc = None
    ncols = None
    for A, B in terms:
        if ncols is None:
            ncols = B.cols
            acc = [dict() for _ in range(ncols)]
        a_cols = sparse_columns(A)
        b_cols = sparse_columns(B)
        for j in range(ncols):
            out = acc[j]
            for i, v in b_cols[j].items():
                for k, w in a_cols[i].items():
                    out[k] = out.get(k, 0) + v * w
    if acc is None:
        return True
    for col in acc:
        for v in col.values():
            if (v % modulus if modulus else v) != 0:
                return False
    return True


def cokernel(M: IntMatrix) -> FGModule:
    """Canonical form of Z^rows (or (Z/m)^rows) modulo the column span of M."""
    A = M.a
    if not M.ring.is_integers:
        m = M.ring.modulus
        ext = np.zeros((M.rows, M.rows), dtype=object)
        for i in range(M.rows):
            ext[i, i] = m
        A = np.hstack([A, ext]) if M.cols else ext
    diag, _, _, _, _ = _snf_diagonalize(A, False, False)
    return _module_from_factors(M.ring, diag, free_extra=M.rows - len(diag))


def subquotient(ambient_rank: int, kernel_of: Optional[IntMatrix],
                image_of: Optional[IntMatrix], ring: Ring = ZZ) -> FGModule:
    """Canonical form of ker(kernel_of) / im(image_of) inside ring^ambient_rank."""
    return subquotient_with_basis(ambient_rank, kernel_of, image_of, ring).module


def subquotient_with_basis(ambient_rank: int, kernel_of: Optional[IntMatrix],
                           image_of: Optional[IntMatrix], ring: Ring = ZZ) -> Subquotient:
    if kernel_of is not None and kernel_of.cols != ambient_rank:
        raise ValueError("kernel_of must have ambient_rank columns")
    if image_of is not None and image_of.rows != ambient_rank:
        raise ValueError("image_of must have ambient_rank rows")
    if kernel_of is not None and image_of is not None and image_of.cols:
        comp = kernel_of @ image_of
        if not ring.is_integers:
            comp = IntMatrix(comp.a, ring)
        if not comp.is_zero():
            raise ImageNotInKernel("composite kernel_of @ image_of is nonzero")
    if kernel_of is None:
        num = IntMatrix.identity(ambient_rank, ZZ)
    else:
        num = kernel_basis(IntMatrix(kernel_of.a, ring) if kernel_of.ring != ring else kernel_of)
    return Subquotient(ring, ambient_rank, num, image_of)


def presented_subquotient(mid_moduli: Sequence[int], out_map: Optional[IntMatrix],
                          out_moduli: Sequence[int], in_map: Optional[IntMatrix],
                          ring: Ring = ZZ) -> Subquotient:
    """ker/im at the middle of a three-term complex of presented modules.

    The middle module is ⊕ Z/mid_moduli[i] (0 meaning a free summand; over
    Z/m every generator is additionally killed by m).  `out_map` maps middle
    generators into a module with diagonal relations `out_moduli`; `in_map`
    lands in the middle.  Returns the Subquotient of
    {x : out_map x == 0 in the target} by (im in_map + middle relations).
    """
    k = len(mid_moduli)
    if out_map is None:
        num = IntMatrix.identity(k, ZZ)
    else:
        rel_cols = []
        for i, d in enumerate(out_moduli):
            if d:
                col = np.zeros((len(out_moduli), 1), dtype=object)
                col[i, 0] = d
                rel_cols.append(col)
        A = out_map.a
        if rel_cols:
            A = np.hstack([A] + rel_cols)
        Mk = IntMatrix.from_array(A.copy(), ZZ if ring.is_integers else ring)
        K = kernel_basis(Mk)
        num_gens = K.a[:k, :]
        H, _, piv = _column_echelon(num_gens)
        num = IntMatrix.from_array(H[:, : len(piv)].copy(), ZZ)
        num = _ensure_full_relations(num, k, mid_moduli, ring)
    dens = []
    if in_map is not None and in_map.cols:
        dens.append(in_map.a)
    for i, d in enumerate(mid_moduli):
        if d:
            col = np.zeros((k, 1), dtype=object)
            col[i, 0] = d
            dens.append(col)
    D = IntMatrix.from_array(np.hstack(dens), ZZ) if dens else None
    return Subquotient(ring, k, num, D)


def _ensure_full_relations(num: IntMatrix, k: int, mid_moduli: Sequence[int], ring: Ring) -> IntMatrix:
    """Make sure the numerator lattice contains the middle relations.

    The relations (and m*Z^k over Z/m) are always in the kernel of a
    well-defined out_map, so normally this is a no-op; it exists to surface
    ill-posed inputs loudly instead of producing a wrong module.
    """
    cols = []
    for i, d in enumerate(mid_moduli):
        if d:
            col = np.zeros((k, 1), dtype=object)
            col[i, 0] = d
            cols.append(col)
    if not ring.is_integers:
        for i in range(k):
            col = np.zeros((k, 1), dtype=object)
            col[i, 0] = ring.modulus
            cols.append(col)
    if not cols:
        return num
    probe = IntMatrix.from_array(np.hstack(cols), ZZ)
    try:
        ColumnSolver(num).solve(probe)
    except ValueError:
        raise ImageNotInKernel("middle relations are not killed by the outgoing map")
    return num
