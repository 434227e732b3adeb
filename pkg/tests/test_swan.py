import pytest

from conftest import (
    antipodal_hexagon,
    point_space,
    polygon,
    reflection_square,
    rotation_polygon,
    sign_gmodule,
    two_point_swap,
)

from eqss.complexes import cohomology
from eqss.errors import ScenarioValidationError
from eqss.exact_linalg import ZZ, FGModule
from eqss.groupcoh import FiniteGroup, GModule, group_cohomology
from eqss.gspace import simplicial_cohomology
from eqss.spectral import page, stable_page, total_complex
from eqss.swan import SwanScenario, build_swan, compare, grothendieck_e2, hom_into_cohomology


def scenario(space, coeffs=None, p_max=4, q_max=4, kind="periodic"):
    A = coeffs if coeffs is not None else GModule.trivial(space.group)
    return SwanScenario(space.group, space, A, p_max, q_max, kind)


def test_point_scenario_is_group_cochain_row():
    G = FiniteGroup.cyclic(2)
    S = scenario(point_space(G), p_max=5, q_max=3)
    D = build_swan(S)
    assert [D.rank(p, 0) for p in range(6)] == [1] * 6
    assert all(D.rank(p, q) == 0 for p in range(6) for q in (1, 2, 3))
    tot = total_complex(D)
    expected = [(1, ()), (0, ()), (0, (2,)), (0, ()), (0, (2,))]
    for n, (rank, tors) in enumerate(expected):
        assert cohomology(tot, n) == FGModule(ZZ, rank, tors), n


def test_trivial_group_scenario_is_space_row():
    X = polygon(3)
    S = scenario(X, p_max=3, q_max=3, kind="bar")
    D = build_swan(S)
    assert D.rank(0, 0) == 3 and D.rank(0, 1) == 3
    assert all(D.rank(p, q) == 0 for p in (1, 2, 3) for q in range(4))
    tot = total_complex(D)
    assert cohomology(tot, 0) == FGModule.free(1)
    assert cohomology(tot, 1) == FGModule.free(1)


def test_hexagon_cell_ranks():
    X = antipodal_hexagon()
    S = scenario(X, p_max=3, q_max=3)
    D = build_swan(S)
    # Hom_RG(RG, C^q) has Z-rank 6 for q = 0, 1
    for p in range(4):
        assert D.rank(p, 0) == 6
        assert D.rank(p, 1) == 6
        assert D.rank(p, 2) == 0


def test_grothendieck_point():
    G = FiniteGroup.cyclic(2)
    S = scenario(point_space(G), p_max=4, q_max=2)
    grid = grothendieck_e2(S)
    for p in range(5):
        assert grid[(p, 0)] == group_cohomology(G, GModule.trivial(G), p, "periodic")
        assert grid[(p, 1)].is_zero
        assert grid[(p, 2)].is_zero


def test_grothendieck_trivial_group():
    X = polygon(3)
    S = scenario(X, p_max=2, q_max=2, kind="bar")
    grid = grothendieck_e2(S)
    for q in range(3):
        assert grid[(0, q)] == simplicial_cohomology(X, q)
        assert grid[(1, q)].is_zero
        assert grid[(2, q)].is_zero


def test_grothendieck_reflection_square_row1():
    X = reflection_square()
    S = scenario(X, p_max=3, q_max=2)
    grid = grothendieck_e2(S)
    # H^1(X) is the sign module, so row q=1 is 0, Z/2, 0, Z/2
    assert grid[(0, 1)].is_zero
    assert grid[(1, 1)] == FGModule(ZZ, 0, (2,))
    assert grid[(2, 1)].is_zero
    assert grid[(3, 1)] == FGModule(ZZ, 0, (2,))


def test_swan_e2_theorem_small_scenarios():
    spaces = [
        antipodal_hexagon(),
        reflection_square(),
        two_point_swap(),
        polygon(6, FiniteGroup.cyclic(2), [tuple(range(6))] * 2),  # trivial Z/2 action
    ]
    for X in spaces:
        S = scenario(X, p_max=4, q_max=4)
        D = build_swan(S)
        groth = grothendieck_e2(S)
        cells = S.safe_cells()
        e2 = page(D, 2, cells=cells)
        for cell in cells:
            assert e2.entry(*cell) == groth[cell], (X.n_vertices, cell)


def test_e1_is_hom_into_cohomology():
    for X in (antipodal_hexagon(), reflection_square()):
        S = scenario(X, p_max=3, q_max=3)
        D = build_swan(S)
        e1 = page(D, 1)
        for p in range(3):
            for q in range(2):
                assert e1.entry(p, q) == hom_into_cohomology(S, p, q), (p, q)


def test_resolution_independence_hexagon():
    X = antipodal_hexagon()
    Sb = scenario(X, p_max=4, q_max=4, kind="bar")
    Sp = scenario(X, p_max=4, q_max=4, kind="periodic")
    Db, Dp = build_swan(Sb), build_swan(Sp)
    cells = Sb.safe_cells()
    for r in range(2, 6):
        pb = page(Db, r, cells=cells)
        pp = page(Dp, r, cells=cells)
        for cell in cells:
            assert pb.entry(*cell) == pp.entry(*cell), (r, cell)


def test_free_action_abutment_matches_quotient():
    X = antipodal_hexagon()
    S = scenario(X, p_max=4, q_max=4)
    D = build_swan(S)
    tot = total_complex(D)
    Q = X.quotient_complex()
    for n in range(4):
        h = cohomology(tot, n)
        hq = simplicial_cohomology(Q, n)
        assert h.rank == hq.rank, n
        assert h.torsion_cardinality() == hq.torsion_cardinality(), n


def test_compare_point_z2():
    G = FiniteGroup.cyclic(2)
    S = scenario(point_space(G), p_max=5, q_max=5)
    rep = compare(S, borel_n_max=4, label="point-z2")
    assert rep.all_true()
    row = [rep.swan_e2[(p, 0)] for p in range(5)]
    assert row == [FGModule(ZZ, 1, ()), FGModule.zero(), FGModule(ZZ, 0, (2,)),
                   FGModule.zero(), FGModule(ZZ, 0, (2,))]


def test_compare_hexagon():
    X = antipodal_hexagon()
    S = scenario(X, p_max=4, q_max=4)
    rep = compare(S, borel_n_max=3, label="hexagon")
    assert rep.all_true()
    assert rep.abutment[0] == FGModule.free(1)
    assert rep.abutment[1] == FGModule.free(1)


def test_scenario_validation():
    G = FiniteGroup.cyclic(2)
    H = FiniteGroup.cyclic(2)
    with pytest.raises(ScenarioValidationError):
        SwanScenario(G, point_space(H), GModule.trivial(G), 2, 2, "bar")
    s3 = FiniteGroup.symmetric(3)
    with pytest.raises(ScenarioValidationError, match="cyclic"):
        SwanScenario(s3, point_space(s3), GModule.trivial(s3), 2, 2, "periodic")


def test_sign_coefficients_on_point():
    G = FiniteGroup.cyclic(2)
    A = sign_gmodule(G)
    S = scenario(point_space(G), coeffs=A, p_max=4, q_max=2)
    D = build_swan(S)
    tot = total_complex(D)
    expected = [(0, ()), (0, (2,)), (0, ()), (0, (2,))]
    for n, (rank, tors) in enumerate(expected):
        assert cohomology(tot, n) == FGModule(ZZ, rank, tors), n
