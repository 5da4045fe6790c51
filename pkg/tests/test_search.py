import itertools

import numpy as np
import pytest

from spbound.bounds import batch_fixed_space_dim, no_eigenvalue_one_witness
from spbound.rings import Ring
from spbound.search import (
    Codec,
    GroupSpec,
    bfs_balls,
    conjugacy_closure,
    normal_closure,
    normal_closure_is_whole_group,
    orbit_codes,
    sp_order,
)
from spbound.symplectic import Long, ShortDiff, SpMatrix, identity, random_sp, root_element


def transvections(n, p):
    """I + c u u^T J for nonzero u and c, enumerated directly."""
    d = 2 * n
    Jm = np.zeros((d, d), dtype=np.int64)
    Jm[:n, n:] = np.eye(n, dtype=np.int64)
    Jm[n:, :n] = -np.eye(n, dtype=np.int64)
    out = set()
    for v in itertools.product(range(p), repeat=d):
        if not any(v):
            continue
        u = np.array(v)
        for c in range(1, p):
            T = (np.eye(d, dtype=np.int64) + c * np.outer(u, u) @ Jm) % p
            out.add(tuple(map(tuple, T.tolist())))
    return out


def test_order_formula():
    assert sp_order(2, 2) == 720
    assert sp_order(3, 2) == 1451520
    assert GroupSpec.parse("sp4f3").order == 51840


@pytest.mark.parametrize("name", ["sp4f2", "sp4f3"])
def test_enumeration_matches_order(name):
    G = GroupSpec.parse(name)
    C = Codec(G)
    start = np.array([C.encode(identity(G.n, G.ring))])
    assert orbit_codes(C, start, [C.right_table(g) for g in G.generators()]).size == G.order


def test_codec_round_trip():
    G = GroupSpec(2, 3)
    C = Codec(G)
    A = random_sp(2, G.ring, 10, 1)
    assert C.decode(C.encode(A)) == A
    codes = np.array([C.encode(A), C.encode(A.inverse())])
    assert (C.from_arrays(C.to_arrays(codes)) == codes).all()
    B = random_sp(2, G.ring, 10, 2)
    assert C.mul_right(codes[:1], C.right_table(B))[0] == C.encode(A @ B)


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3)])
def test_transvection_closure(n, p):
    G = GroupSpec(n, p)
    got = {M.rows for M in conjugacy_closure([root_element(n, Long(1), 1, G.ring)], G)}
    assert got == transvections(n, p)


def test_closure_trivial_and_conjugate_invariant():
    G = GroupSpec(2, 3)
    assert [M.is_identity() for M in conjugacy_closure([identity(2, G.ring)], G)] == [True]
    s = root_element(2, ShortDiff(1, 2), 1, G.ring)
    g = random_sp(2, G.ring, 10, 4)
    assert len(conjugacy_closure([s], G)) == len(conjugacy_closure([s.conj(g)], G))


def test_full_group_diameter_one():
    G = GroupSpec(2, 2)
    C = Codec(G)
    everything = orbit_codes(C, np.array([C.encode(identity(2, G.ring))]), [C.right_table(g) for g in G.generators()])
    rep = bfs_balls([C.decode(c) for c in everything], G, closed=True)
    assert rep.diameter == 1


def test_sp4f2_balls():
    G = GroupSpec(2, 2)
    rep = bfs_balls([root_element(2, Long(1), 1, G.ring)], G)
    sizes = [s for _, s in rep.radii]
    assert sizes == sorted(set(sizes)) and sizes[-1] == 720
    assert rep.diameter >= 4
    C = Codec(G)
    assert batch_fixed_space_dim(C.to_arrays(rep.ball(3)), 2).min() >= 1
    assert rep.distance(C.encode(no_eigenvalue_one_witness(2, 2))) > 3


def test_eigenvalue_law_sp4f3():
    G = GroupSpec(2, 3)
    rep = bfs_balls([root_element(2, Long(1), 1, G.ring)], G)
    assert batch_fixed_space_dim(Codec(G).to_arrays(rep.ball(3)), 3).min() >= 1
    assert rep.ball_size(rep.diameter) == G.order


def test_worker_independence():
    G = GroupSpec(2, 3)
    S = [root_element(2, Long(1), 1, G.ring)]
    reports = [bfs_balls(S, G, workers=w) for w in (1, 2, 3)]
    assert all(r.to_json() == reports[0].to_json() for r in reports)
    for r in reports[1:]:
        assert all((a == b).all() for a, b in zip(r.layers, reports[0].layers))


def test_cutoff_partial_report():
    G = GroupSpec(2, 3)
    rep = bfs_balls([root_element(2, Long(1), 1, G.ring)], G, cutoff=2)
    assert rep.diameter is None and rep.to_json()["diameter"] == "exceeds cutoff"
    assert rep.radii[-1][0] == 2
    assert "radius,ball_size" in rep.to_csv()


def test_normal_closure_examples():
    G = GroupSpec(3, 2)
    assert not normal_closure_is_whole_group([identity(3, G.ring)], G)
    assert normal_closure_is_whole_group([root_element(3, Long(1), 1, G.ring)], G)
    H = GroupSpec(2, 3)
    minus = SpMatrix([[2 if i == j else 0 for j in range(4)] for i in range(4)], H.ring)
    res = normal_closure([minus], H)
    assert not res.whole_group and res.order_lower_bound == 2


@pytest.mark.parametrize("seed", range(12))
def test_chain_agrees_with_enumeration_sp4f2(seed):
    # Sp4(F2) is not perfect, so some normal closures are proper
    G = GroupSpec(2, 2)
    S = [random_sp(2, G.ring, seed % 5 + 1, seed)]
    exact = normal_closure(S, G, method="bfs")
    assert normal_closure(S, G).whole_group == exact.whole_group
    assert exact.order_lower_bound in (1, 360, 720)


def test_chain_on_large_groups():
    for p in (3, 5):
        G = GroupSpec(3, p)
        assert not G.enumerable
        res = normal_closure([root_element(3, ShortDiff(1, 3), 1, G.ring)], G)
        assert res.whole_group and res.exact and res.order_lower_bound == G.order


def test_bfs_method_refuses_large_groups():
    with pytest.raises(OverflowError):
        normal_closure([identity(3, Ring(3))], GroupSpec(3, 3), method="bfs")


def test_group_parse_errors():
    with pytest.raises(ValueError):
        GroupSpec.parse("gl4f2")
    with pytest.raises(ValueError):
        GroupSpec(2, 4)
