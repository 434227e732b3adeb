import random

from eqss.exact_linalg import ZZ, IntMatrix
from eqss.groupcoh import FiniteGroup, GModule
from eqss.gspace import SimplicialGComplex
from eqss.spectral import DoubleComplex


def polygon(k, group=None, vertex_action=None):
    """The boundary-of-a-(k-gon) circle; trivial action when none is given."""
    edges = [(i, (i + 1) % k) for i in range(k)]
    if group is None:
        return SimplicialGComplex.with_trivial_action(k, edges)
    return SimplicialGComplex.from_maximal(k, edges, group, vertex_action)


def rotation_polygon(k, n):
    """Z/n acting on the k-gon by rotation through k/n vertices."""
    G = FiniteGroup.cyclic(n)
    step = k // n
    perms = [tuple((v + g * step) % k for v in range(k)) for g in range(n)]
    return polygon(k, G, perms)


def antipodal_hexagon():
    return rotation_polygon(6, 2)


def reflection_square():
    G = FiniteGroup.cyclic(2)
    perms = [(0, 1, 2, 3), (0, 3, 2, 1)]
    return polygon(4, G, perms)


def two_point_swap():
    G = FiniteGroup.cyclic(2)
    return SimplicialGComplex.from_maximal(2, [(0,), (1,)], G, [(0, 1), (1, 0)])


def point_space(group):
    return SimplicialGComplex.from_maximal(1, [(0,)], group,
                                           [(0,)] * group.order)


def sign_gmodule(G):
    """Z with the generator of a cyclic group acting by -1."""
    t = G.cyclic_generator()
    mats = []
    for g in range(G.order):
        k, x = 0, G.identity
        while x != g:
            x = G.mul(x, t)
            k += 1
        mats.append(IntMatrix([[(-1) ** k]]))
    return GModule(G, 1, mats)


def _random_two_term(rng, max_rank=2, bound=3):
    """Ranks (r0, r1) and a random differential with entries in [-bound, bound]."""
    r0 = rng.randint(0, max_rank)
    r1 = rng.randint(0, max_rank)
    d = IntMatrix([[rng.randint(-bound, bound) for _ in range(r0)] for _ in range(r1)],
                  shape=(r1, r0))
    return (r0, r1), d


def _tensor_block(ranks, dh, dv, dp, dq, rng):
    """Place the tensor square of two random two-term complexes at offset (dp, dq)."""
    (a0, a1), dA = _random_two_term(rng)
    (b0, b1), dB = _random_two_term(rng)
    aranks = {dp: a0, dp + 1: a1}
    branks = {dq: b0, dq + 1: b1}
    for p, ra in aranks.items():
        for q, rb in branks.items():
            if ra * rb:
                ranks[(p, q)] = ra * rb
    for q, rb in branks.items():
        if rb and a0 and a1:
            m = IntMatrix.zeros(a1 * rb, a0 * rb)
            for i in range(a1):
                for j in range(a0):
                    for k in range(rb):
                        m.a[i * rb + k, j * rb + k] = dA[i, j]
            dh[(dp, q)] = m
    for p, ra in aranks.items():
        if ra and b0 and b1:
            m = IntMatrix.zeros(ra * b1, ra * b0)
            for k in range(ra):
                for i in range(b1):
                    for j in range(b0):
                        m.a[k * b1 + i, k * b0 + j] = dB[i, j]
            dv[(p, dq)] = m


def random_double_complex(seed, p_max=3, q_max=3):
    """Random first-quadrant double complex with d^2 = 0 and anticommutation.

    A direct sum of tensor products of two-term complexes placed on disjoint
    2x2 blocks, so cell ranks stay <= 4 and entries stay in [-3, 3]; the
    builder applies the (-1)^p vertical sign and validates all identities.
    """
    rng = random.Random(seed)
    ranks, dh, dv = {}, {}, {}
    _tensor_block(ranks, dh, dv, rng.randint(0, 1), rng.randint(0, 1), rng)
    if rng.random() < 0.6:
        # second block strictly to the upper right: supports cannot overlap
        _tensor_block(ranks, dh, dv, rng.randint(2, p_max - 1), rng.randint(2, q_max - 1), rng)
    if rng.random() < 0.3:
        # an isolated cell with no differentials
        p, q = rng.randint(0, p_max), rng.randint(0, q_max)
        if all(abs(p - pp) > 1 or abs(q - qq) > 1 for (pp, qq) in ranks):
            ranks[(p, q)] = rng.randint(1, 4)
    return DoubleComplex.build(ZZ, p_max, q_max, ranks, dh, dv)
