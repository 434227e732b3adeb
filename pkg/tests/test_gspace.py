import random

import pytest

from conftest import (
    antipodal_hexagon,
    point_space,
    polygon,
    reflection_square,
    rotation_polygon,
    two_point_swap,
)

from eqss.errors import IrregularAction
from eqss.exact_linalg import ZZ, FGModule, IntMatrix
from eqss.groupcoh import FiniteGroup, GModule
from eqss.gspace import (
    SimplicialGComplex,
    cochains,
    cohomology_gmodule,
    regularize,
    simplicial_cohomology,
)


def test_face_closure_enforced():
    G = FiniteGroup.cyclic(1)
    with pytest.raises(ValueError, match="face-closed"):
        SimplicialGComplex(2, [(0, 1)], G, [(0, 1)])


def test_action_must_preserve_simplices():
    G = FiniteGroup.cyclic(2)
    # path 0-1-2; swapping 0 and 2 fixes it, but swapping 0,1 breaks edge (1,2)
    with pytest.raises(ValueError, match="does not map simplex"):
        SimplicialGComplex.from_maximal(3, [(0, 1), (1, 2)], G, [(0, 1, 2), (1, 0, 2)])


def test_regularize_trivial_action_counts():
    X = polygon(3)
    Y = regularize(X)
    assert len(Y.simplices_of_dim(0)) == 6
    assert len(Y.simplices_of_dim(1)) == 6
    assert Y.is_regular()
    assert Y.vertex_grade is not None


def test_regularize_edge_flip():
    G = FiniteGroup.cyclic(2)
    X = SimplicialGComplex.from_maximal(2, [(0, 1)], G, [(0, 1), (1, 0)])
    assert not X.is_regular()
    Y = regularize(X)
    assert Y.is_regular()
    # midpoint fixed: 3 vertices, 2 edges
    assert len(Y.simplices_of_dim(0)) == 3
    assert len(Y.simplices_of_dim(1)) == 2


def test_regularize_preserves_regularity():
    X = antipodal_hexagon()
    assert X.is_regular()
    Y = regularize(X)
    assert Y.is_regular()
    assert simplicial_cohomology(Y, 0) == FGModule.free(1)
    assert simplicial_cohomology(Y, 1) == FGModule.free(1)


def test_cochains_point():
    G = FiniteGroup.cyclic(2)
    X = point_space(G)
    A = GModule.trivial(G)
    C = cochains(X, A, 3)
    assert C.complex.ranks == [1, 0, 0, 0]


def test_cochains_circle_ranks_and_rank_of_d():
    X = polygon(3)
    A = GModule.trivial(X.group)
    C = cochains(X, A, 2)
    assert C.complex.ranks == [3, 3, 0]
    from eqss.exact_linalg import rank_of_matrix

    assert rank_of_matrix(C.complex.differential(0)) == 2


def test_cochains_hexagon_action_matrices():
    X = antipodal_hexagon()
    A = GModule.trivial(X.group)
    C = cochains(X, A, 2)
    g = 1
    T0 = C.action(0, g)
    # vertex permutation matrix of the antipodal map
    expected = IntMatrix.zeros(6, 6)
    for v in range(6):
        expected.a[v, (v + 3) % 6] = 1
    assert T0 == expected


def test_cochains_rejects_irregular():
    G = FiniteGroup.cyclic(2)
    X = SimplicialGComplex.from_maximal(2, [(0, 1)], G, [(0, 1), (1, 0)])
    with pytest.raises(IrregularAction):
        cochains(X, GModule.trivial(G), 1)


def test_cohomology_gmodule_point():
    G = FiniteGroup.cyclic(2)
    X = point_space(G)
    from conftest import sign_gmodule

    A = sign_gmodule(G)
    M0 = cohomology_gmodule(X, A, 0)
    assert M0.fg_module() == FGModule.free(1)
    assert M0.action(1) == IntMatrix([[-1]])
    assert cohomology_gmodule(X, A, 1).fg_module().is_zero


def test_hexagon_rotation_trivial_on_h1():
    X = rotation_polygon(6, 3)
    A = GModule.trivial(X.group)
    M1 = cohomology_gmodule(X, A, 1)
    assert M1.fg_module() == FGModule.free(1)
    for g in range(3):
        assert M1.action(g) == IntMatrix.identity(1)


def test_reflection_square_sign_on_h1():
    X = reflection_square()
    A = GModule.trivial(X.group)
    M1 = cohomology_gmodule(X, A, 1)
    assert M1.fg_module() == FGModule.free(1)
    assert M1.action(1) == IntMatrix([[-1]])


def test_two_point_swap_h0():
    X = two_point_swap()
    A = GModule.trivial(X.group)
    M0 = cohomology_gmodule(X, A, 0)
    assert M0.fg_module() == FGModule.free(2)
    assert M0.action(1) == IntMatrix([[0, 1], [1, 0]])


def test_euler_characteristic():
    for X in (polygon(3), polygon(5), antipodal_hexagon()):
        A = GModule.trivial(X.group)
        C = cochains(X, A, 2)
        chi_c = C.complex.euler_characteristic()
        chi_h = sum((-1) ** q * simplicial_cohomology(X, q).rank for q in range(3))
        assert chi_c == chi_h


def test_relabeling_invariance():
    rng = random.Random(2)
    base = polygon(5)
    h = [simplicial_cohomology(base, q) for q in range(2)]
    for _ in range(5):
        relab = list(range(5))
        rng.shuffle(relab)
        edges = [(relab[i], relab[(i + 1) % 5]) for i in range(5)]
        Y = SimplicialGComplex.with_trivial_action(5, edges)
        assert [simplicial_cohomology(Y, q) for q in range(2)] == h


def test_quotient_complex_of_free_action():
    X = antipodal_hexagon()
    Q = X.quotient_complex()
    assert Q.n_vertices == 3
    assert len(Q.simplices_of_dim(1)) == 3
    assert simplicial_cohomology(Q, 0) == FGModule.free(1)
    assert simplicial_cohomology(Q, 1) == FGModule.free(1)


def test_grading_greedy_and_failure():
    assert antipodal_hexagon().ensure_grading() is not None
    G = FiniteGroup.cyclic(2)
    X = SimplicialGComplex.from_maximal(2, [(0, 1)], G, [(0, 1), (1, 0)])
    with pytest.raises(IrregularAction):
        X.ensure_grading()
    Y = regularize(X)
    assert Y.ensure_grading() == Y.vertex_grade
