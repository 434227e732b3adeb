import pytest

from eqss.complexes import cohomology
from eqss.errors import GroupMismatch, ResolutionTooShort, ResourceLimit
from eqss.exact_linalg import ZZ, FGModule, IntMatrix
from eqss.groupcoh import (
    FiniteGroup,
    GModule,
    bar_resolution,
    group_cohomology,
    hom_rg,
    invariants,
    periodic_resolution,
)


def sign_module(G):
    """Z with the sign action of a cyclic group of even order (generator acts by -1)."""
    t = G.cyclic_generator()
    mats = []
    for g in range(G.order):
        # power of t needed to express g
        k, x = 0, G.identity
        while x != g:
            x = G.mul(x, t)
            k += 1
        mats.append(IntMatrix([[(-1) ** k]]))
    return GModule(G, 1, mats)


NONASSOC_LOOP = [
    [0, 1, 2, 3, 4],
    [1, 0, 3, 4, 2],
    [2, 4, 0, 1, 3],
    [3, 2, 4, 0, 1],
    [4, 3, 1, 2, 0],
]


def test_table_validation():
    # Latin square with identity and two-sided inverses but no associativity
    with pytest.raises(ValueError, match="associativity"):
        FiniteGroup(NONASSOC_LOOP)
    with pytest.raises(ValueError):
        FiniteGroup([[1, 1], [1, 1]])
    with pytest.raises(ValueError, match="inverse"):
        FiniteGroup([[0, 1, 2], [1, 2, 0], [2, 1, 0]])


def test_cyclic_and_symmetric_constructions():
    z4 = FiniteGroup.cyclic(4)
    assert z4.order == 4 and z4.identity == 0 and z4.inv(1) == 3
    s3 = FiniteGroup.symmetric(3)
    assert s3.order == 6
    assert s3.cyclic_generator() is None
    assert FiniteGroup.cyclic(6).cyclic_generator() == 1


def test_bar_resolution_ranks():
    triv = FiniteGroup.cyclic(1)
    r = bar_resolution(triv, 3)
    assert r.rg_ranks == [1, 0, 0, 0]
    z2 = FiniteGroup.cyclic(2)
    assert bar_resolution(z2, 3).rg_ranks == [1, 1, 1, 1]
    z3 = FiniteGroup.cyclic(3)
    assert bar_resolution(z3, 2).rg_ranks == [1, 2, 4]


def test_bar_resolution_resource_limit(monkeypatch):
    monkeypatch.setenv("EQSS_MAX_RANK", "100")
    with pytest.raises(ResourceLimit):
        bar_resolution(FiniteGroup.cyclic(4), 5)


def test_periodic_resolution_structure():
    r = periodic_resolution(3, 4)
    assert r.rg_ranks == [1, 1, 1, 1, 1]
    # d1 = t - 1, d2 = 1 + t + t^2
    assert r.diffs[0][0] == {(0, 1): 1, (0, 0): -1}
    assert r.diffs[1][0] == {(0, 0): 1, (0, 1): 1, (0, 2): 1}
    assert r.diffs[2][0] == {(0, 1): 1, (0, 0): -1}
    assert r.certificate == "snf"


def test_hom_rg_trivial_group():
    G = FiniteGroup.cyclic(1)
    M = GModule.trivial(G)
    C = hom_rg(bar_resolution(G, 3), M)
    assert C.ranks == [1, 0, 0, 0]
    assert cohomology(C, 0) == FGModule.free(1)


def test_hom_rg_z2_periodic_trivial_and_sign():
    G = FiniteGroup.cyclic(2)
    P = periodic_resolution(2, 5, group=G)
    triv = GModule.trivial(G)
    C = hom_rg(P, triv)
    # complex Z -0-> Z -2-> Z -0-> Z -2-> ...
    assert C.differential(0) == IntMatrix([[0]])
    assert C.differential(1) == IntMatrix([[2]])
    assert C.differential(2) == IntMatrix([[0]])
    sgn = sign_module(G)
    Cs = hom_rg(P, sgn)
    assert Cs.differential(0) == IntMatrix([[-2]])
    assert Cs.differential(1) == IntMatrix([[0]])


def test_hom_rg_group_mismatch():
    G = FiniteGroup.cyclic(2)
    H = FiniteGroup.cyclic(2)
    with pytest.raises(GroupMismatch):
        hom_rg(periodic_resolution(2, 2, group=G), GModule.trivial(H))


def test_group_cohomology_z2_trivial():
    G = FiniteGroup.cyclic(2)
    M = GModule.trivial(G)
    expected = [(1, ()), (0, ()), (0, (2,)), (0, ()), (0, (2,))]
    for p, (rank, tors) in enumerate(expected):
        for kind in ("bar", "periodic"):
            assert group_cohomology(G, M, p, kind) == FGModule(ZZ, rank, tors), (p, kind)


def test_group_cohomology_z2_sign():
    G = FiniteGroup.cyclic(2)
    M = sign_module(G)
    expected = [(0, ()), (0, (2,)), (0, ()), (0, (2,))]
    for p, (rank, tors) in enumerate(expected):
        for kind in ("bar", "periodic"):
            assert group_cohomology(G, M, p, kind) == FGModule(ZZ, rank, tors), (p, kind)


def test_group_cohomology_trivial_group():
    G = FiniteGroup.cyclic(1)
    M = GModule.trivial(G, rank=2)
    assert group_cohomology(G, M, 0) == FGModule.free(2)
    for p in (1, 2, 3):
        assert group_cohomology(G, M, p).is_zero


@pytest.mark.parametrize("n", [2, 3, 4])
def test_bar_vs_periodic_all_degrees(n):
    G = FiniteGroup.cyclic(n)
    M = GModule.trivial(G)
    for p in range(5):
        assert group_cohomology(G, M, p, "bar") == group_cohomology(G, M, p, "periodic")


def test_degree_zero_is_invariants():
    G = FiniteGroup.cyclic(2)
    swap = IntMatrix([[0, 1], [1, 0]])
    M = GModule(G, 2, [IntMatrix.identity(2), swap])
    assert invariants(M) == FGModule.free(1)
    assert group_cohomology(G, M, 0, "bar") == invariants(M)
    assert group_cohomology(G, M, 0, "periodic") == invariants(M)


def test_invariants_examples():
    G = FiniteGroup.cyclic(2)
    assert invariants(GModule.trivial(G, rank=2)) == FGModule.free(2)
    assert invariants(sign_module(G)).is_zero


def test_order_annihilates_higher_cohomology():
    for n in (2, 3, 4):
        G = FiniteGroup.cyclic(n)
        M = GModule.trivial(G)
        for p in (1, 2, 3, 4):
            h = group_cohomology(G, M, p)
            assert h.rank == 0
            assert all(n % d == 0 for d in h.torsion)


def test_torsion_coefficient_module():
    # M = Z/3 with the nontrivial Z/2-action x -> -x
    G = FiniteGroup.cyclic(2)
    M = GModule(G, 1, [IntMatrix([[1]]), IntMatrix([[-1]])],
                relations=IntMatrix([[3]]))
    assert M.fg_module() == FGModule(ZZ, 0, (3,))
    assert invariants(M).is_zero
    # |G| = 2 is invertible mod 3, so all higher cohomology vanishes
    for p in range(4):
        h = group_cohomology(G, M, p, "bar")
        assert h.is_zero, p


def test_resolution_too_short():
    G = FiniteGroup.cyclic(2)
    P = periodic_resolution(2, 2, group=G)
    M = GModule.trivial(G)
    with pytest.raises(ResolutionTooShort):
        from eqss.groupcoh import _hom_cohomology

        _hom_cohomology(P, M, 2)


def test_s3_low_degrees():
    G = FiniteGroup.symmetric(3)
    M = GModule.trivial(G)
    assert group_cohomology(G, M, 0) == FGModule.free(1)
    assert group_cohomology(G, M, 1).is_zero
    assert group_cohomology(G, M, 2) == FGModule(ZZ, 0, (2,))
    assert group_cohomology(G, M, 3).is_zero
