"""The Hom(P_*, C^*(X; A)) double complex and the three-way comparison.

`build_swan` assembles the double complex of a scenario; `grothendieck_e2`
computes the grid H^p(G; H^q(X; A)) along a code path that never touches the
double complex machinery; `compare` runs the page-2, abutment and associated
graded comparisons against the Borel construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .borel import borel_cohomology, borel_space
from .complexes import cohomology
from .errors import ScenarioValidationError
from .exact_linalg import FGModule, IntMatrix
from .groupcoh import (
    FiniteGroup,
    GModule,
    _hom_cohomology,
    get_resolution,
)
from .gspace import SimplicialGComplex, cochains, cohomology_gmodule
from .spectral import DoubleComplex, page, stable_page, total_complex


@dataclass
class SwanScenario:
    group: FiniteGroup
    space: SimplicialGComplex
    coefficients: GModule
    p_max: int
    q_max: int
    resolution_kind: str = "bar"

    def __post_init__(self):
        if self.space.group is not self.group:
            raise ScenarioValidationError("space is defined over a different group")
        if self.coefficients.group is not self.group:
            raise ScenarioValidationError("coefficients are over a different group")
        if self.resolution_kind not in ("bar", "periodic"):
            raise ScenarioValidationError(f"unknown resolution kind {self.resolution_kind!r}")
        if self.resolution_kind == "periodic" and self.group.cyclic_generator() is None:
            raise ScenarioValidationError("periodic resolutions need a cyclic group")
        if self.p_max < 0 or self.q_max < 0:
            raise ScenarioValidationError("truncation bounds must be >= 0")

    def safe_cells(self):
        """Cells certified unaffected by truncation: p + q + 2 <= min(p_max, q_max)."""
        bound = min(self.p_max, self.q_max) - 2
        return [(p, q) for p in range(self.p_max + 1) for q in range(self.q_max + 1)
                if p + q <= bound]

    def certified_total_degree(self) -> int:
        """Largest n with H^n(Tot) certified exact for this scenario.

        The q-direction is complete once q_max >= dim X (higher cochain groups
        vanish identically), so only the resolution truncation matters then.
        """
        if self.q_max >= self.space.dim:
            return self.p_max - 1
        return min(self.p_max, self.q_max) - 1


def build_swan(S: SwanScenario) -> DoubleComplex:
    """Double complex with cells Hom_RG(P_p, C^q(X; A)), p the filtration degree."""
    A = S.coefficients
    C = cochains(S.space, A, S.q_max)
    P = get_resolution(S.group, S.resolution_kind, S.p_max)
    ranks: Dict[Tuple[int, int], int] = {}
    dh: Dict[Tuple[int, int], IntMatrix] = {}
    dv: Dict[Tuple[int, int], IntMatrix] = {}
    cq_modules = []
    for q in range(S.q_max + 1):
        rank_q = len(S.space.simplices_of_dim(q)) * A.ngens
        if rank_q:
            acts = [C.action(q, g) for g in range(S.group.order)]
            cq_modules.append(GModule(S.group, rank_q, acts, ring=A.ring))
        else:
            cq_modules.append(None)
    for q in range(S.q_max + 1):
        M = cq_modules[q]
        if M is None:
            continue
        for p in range(S.p_max + 1):
            ranks[(p, q)] = P.rg_ranks[p] * M.ngens
        for p in range(S.p_max):
            dh[(p, q)] = P.hom_delta(p, M)
        delta = C.complex.differential(q)
        if delta.rows:
            for p in range(S.p_max + 1):
                m = IntMatrix.zeros(P.rg_ranks[p] * delta.rows,
                                    P.rg_ranks[p] * delta.cols, A.ring)
                for i in range(P.rg_ranks[p]):
                    m.a[i * delta.rows:(i + 1) * delta.rows,
                        i * delta.cols:(i + 1) * delta.cols] = delta.a
                dv[(p, q)] = m
    return DoubleComplex.build(A.ring, S.p_max, S.q_max, ranks, dh, dv)


def grothendieck_e2(S: SwanScenario) -> Dict[Tuple[int, int], FGModule]:
    """The grid H^p(G; H^q(X; A)), computed without the double complex."""
    A = S.coefficients
    C = cochains(S.space, A, S.q_max + 1)
    P = get_resolution(S.group, S.resolution_kind, S.p_max + 1)
    grid: Dict[Tuple[int, int], FGModule] = {}
    for q in range(S.q_max + 1):
        Mq = cohomology_gmodule(S.space, A, q, _cochains=C)
        for p in range(S.p_max + 1):
            grid[(p, q)] = _hom_cohomology(P, Mq, p).module
    return grid


def hom_into_cohomology(S: SwanScenario, p: int, q: int) -> FGModule:
    """Hom_RG(P_p, H^q(X; A)) as a module: one copy of H^q per RG-generator."""
    A = S.coefficients
    Mq = cohomology_gmodule(S.space, A, q).fg_module()
    P = get_resolution(S.group, S.resolution_kind, max(p, 1))
    r = P.rg_ranks[p]
    return FGModule(A.ring, Mq.rank * r, tuple(sorted(Mq.torsion * r)))


@dataclass
class ComparisonReport:
    scenario_label: str
    swan_e2: Dict[Tuple[int, int], FGModule]
    grothendieck: Dict[Tuple[int, int], FGModule]
    cell_verdicts: Dict[Tuple[int, int], bool]
    safe_cells: list
    abutment: Dict[int, FGModule]
    borel: Dict[int, FGModule]
    degree_verdicts: Dict[int, bool]
    graded_verdicts: Dict[int, bool]
    certified_degree: int
    borel_degree_bound: int

    def all_true(self) -> bool:
        return (all(self.cell_verdicts.values())
                and all(self.degree_verdicts.values())
                and all(self.graded_verdicts.values()))


def compare(S: SwanScenario, borel_n_max: int,
            label: str = "scenario") -> ComparisonReport:
    """Page-2 vs composite-functor grid, abutment vs Borel, E_inf vs H(Tot).

    Cell verdicts demand exact canonical equality on truncation-safe cells;
    degree verdicts compare rank and torsion cardinality, which is all the
    associated graded determines.
    """
    D = build_swan(S)
    groth = grothendieck_e2(S)
    triangle = [(p, q) for p in range(S.p_max + 1) for q in range(S.q_max + 1)
                if p + q <= min(S.p_max, S.q_max)]
    e2 = page(D, 2, cells=triangle)
    safe = set(S.safe_cells())
    swan_grid = {cell: e2.entry(*cell) for cell in triangle}
    cell_verdicts = {cell: swan_grid[cell] == groth[cell]
                     for cell in triangle if cell in safe}

    n_cert = S.certified_total_degree()
    n_borel = min(n_cert, borel_n_max - 1)
    tot = total_complex(D)
    A = S.coefficients
    B = borel_space(S.space, S.group, borel_n_max)
    abutment: Dict[int, FGModule] = {}
    borel_vals: Dict[int, FGModule] = {}
    degree_verdicts: Dict[int, bool] = {}
    for n in range(0, max(n_borel, -1) + 1):
        h = cohomology(tot, n)
        hb = borel_cohomology(B, A, n)
        abutment[n] = h
        borel_vals[n] = hb
        degree_verdicts[n] = (h.rank == hb.rank
                              and h.torsion_cardinality() == hb.torsion_cardinality())
    graded_verdicts: Dict[int, bool] = {}
    from .spectral import associated_graded_check

    for n in range(0, max(n_cert, -1) + 1):
        graded_verdicts[n] = associated_graded_check(D, n)["verdict"]
    return ComparisonReport(
        scenario_label=label,
        swan_e2=swan_grid,
        grothendieck={cell: groth[cell] for cell in triangle},
        cell_verdicts=cell_verdicts,
        safe_cells=sorted(safe),
        abutment=abutment,
        borel=borel_vals,
        degree_verdicts=degree_verdicts,
        graded_verdicts=graded_verdicts,
        certified_degree=n_cert,
        borel_degree_bound=n_borel,
    )
