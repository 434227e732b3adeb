import pytest

from conftest import antipodal_hexagon, point_space, polygon, sign_gmodule

from eqss.borel import (
    BorelSpace,
    borel_cochain_complex,
    borel_cohomology,
    borel_space,
    eg_skeleton,
    ordered_levels,
)
from eqss.errors import DegreeBeyondSkeleton, ResourceLimit
from eqss.exact_linalg import FGModule
from eqss.groupcoh import FiniteGroup, GModule, group_cohomology
from eqss.gspace import simplicial_cohomology


def test_eg_skeleton_sizes_and_identities():
    G = FiniteGroup.cyclic(2)
    eg, levels = eg_skeleton(G, 2)
    assert [len(l) for l in levels] == [2, 4, 8]
    eg.validate_identities()
    triv, levels = eg_skeleton(FiniteGroup.cyclic(1), 3)
    assert [len(l) for l in levels] == [1, 1, 1, 1]


def test_eg_skeleton_freeness():
    G = FiniteGroup.cyclic(3)
    _, levels = eg_skeleton(G, 2)
    for lv in levels:
        for t in lv:
            for g in range(1, 3):
                moved = tuple(G.mul(g, e) for e in t)
                assert moved != t


def test_eg_resource_limit(monkeypatch):
    monkeypatch.setenv("EQSS_MAX_RANK", "50")
    with pytest.raises(ResourceLimit):
        eg_skeleton(FiniteGroup.cyclic(4), 3)


def test_borel_point_is_bg():
    G = FiniteGroup.cyclic(2)
    B = borel_space(point_space(G), G, 3)
    assert [B.level_size(n) for n in range(4)] == [1, 2, 4, 8]
    assert [B.nondegenerate_size(n) for n in range(4)] == [1, 1, 1, 1]
    B.underlying_simplicial_set().validate_identities()


def test_borel_trivial_group_is_x():
    X = polygon(3)
    B = borel_space(X, X.group, 3)
    levels, _ = ordered_levels(X, 3)
    assert [B.level_size(n) for n in range(4)] == [len(l) for l in levels]
    B.underlying_simplicial_set().validate_identities()


def test_borel_hexagon_level0():
    X = antipodal_hexagon()
    B = borel_space(X, X.group, 2)
    assert B.level_size(0) == 6  # 6 vertices x 2 / orbit size 2
    B.underlying_simplicial_set().validate_identities()


def test_borel_cohomology_trivial_group_circle():
    X = polygon(3)
    B = borel_space(X, X.group, 3)
    A = GModule.trivial(X.group)
    assert borel_cohomology(B, A, 0) == FGModule.free(1)
    assert borel_cohomology(B, A, 1) == FGModule.free(1)
    assert borel_cohomology(B, A, 2).is_zero


@pytest.mark.parametrize("n", [2, 3])
def test_borel_point_matches_group_cohomology(n):
    G = FiniteGroup.cyclic(n)
    B = borel_space(point_space(G), G, 5)
    A = GModule.trivial(G)
    for k in range(5):
        assert borel_cohomology(B, A, k) == group_cohomology(G, A, k, "periodic"), k


def test_borel_point_sign_coefficients():
    G = FiniteGroup.cyclic(2)
    B = borel_space(point_space(G), G, 5)
    A = sign_gmodule(G)
    for k in range(5):
        assert borel_cohomology(B, A, k) == group_cohomology(G, A, k, "periodic"), k


def test_borel_free_action_matches_quotient():
    X = antipodal_hexagon()
    B = borel_space(X, X.group, 4)
    A = GModule.trivial(X.group)
    Q = X.quotient_complex()
    for k in range(4):
        assert borel_cohomology(B, A, k) == simplicial_cohomology(Q, k), k


def test_skeletal_stability():
    G = FiniteGroup.cyclic(2)
    A = GModule.trivial(G)
    X = point_space(G)
    vals = {}
    for n_max in (3, 4, 5):
        B = borel_space(X, G, n_max)
        for k in range(n_max - 1):
            v = borel_cohomology(B, A, k)
            if k in vals:
                assert vals[k] == v, (n_max, k)
            vals[k] = v


def test_normalized_vs_unnormalized():
    G = FiniteGroup.cyclic(2)
    B = borel_space(point_space(G), G, 4)
    A = GModule.trivial(G)
    for k in range(3):
        a = borel_cohomology(B, A, k, normalized=True)
        b = borel_cohomology(B, A, k, normalized=False)
        assert a == b, k


def test_degree_beyond_skeleton():
    G = FiniteGroup.cyclic(2)
    B = borel_space(point_space(G), G, 3)
    with pytest.raises(DegreeBeyondSkeleton):
        borel_cohomology(B, GModule.trivial(G), 3)
