from math import gcd, prod

import pytest

from biextlab.abgroup import FgAbGroup, GroupHom
from biextlab.complex import TwoTermComplex, homology
from biextlab.errors import InfiniteGroup, SizeGuardExceeded
from biextlab.resolution import canonical_resolution, resolution_map, tensor_resolution, tensor_total
from corpus import corpus, key

Z2, Z4 = FgAbGroup.cyclic(2), FgAbGroup.cyclic(4)


def test_component_ranks():
    r = canonical_resolution(TwoTermComplex.zero_map(FgAbGroup(), Z2))
    ranks = {p: r.bicomplex.component(*p).free_rank for p in r.bicomplex.positions()}
    assert ranks == {(0, 0): 2, (0, 1): 4, (0, 2): 12, (1, 0): 1}


def test_total_homology_matches_rank_oracle(oracle):
    for k in corpus():
        ref = oracle["canonical"][key(k)]["tot"]
        tot = canonical_resolution(k).total
        for n in (0, 1):
            h = homology(tot, n)
            got = {"free_rank": h.free_rank, "p_torsion": {str(p): sum(d % p == 0 for d in h.torsion) for p in (2, 3)}}
            assert got == ref[f"H{n}"], (str(k), n)


def test_augmentation_is_a_chain_map():
    for k in corpus():
        r = canonical_resolution(k)
        eps = r.augmentation
        assert (r.eps0 @ r.total.d(1)) == (k.u @ eps.component(1))


def test_degree_zero_homology_is_preserved():
    for k in corpus():
        assert homology(canonical_resolution(k).total, 0) == homology(k, 0)


def test_resolution_map_commutes_with_differentials():
    src = TwoTermComplex(Z2, Z4, GroupHom(Z2, Z4, [[2]]))
    tgt = TwoTermComplex(Z2, Z2, GroupHom.identity(Z2))
    f0, f1 = GroupHom(Z4, Z2, [[1]]), GroupHom.zero(Z2, Z2)
    rs, rt = canonical_resolution(src), canonical_resolution(tgt)
    maps = resolution_map(f0, f1, rs, rt)
    bs, bt = rs.bicomplex, rt.bicomplex
    assert maps["L00"] @ bs.d(0, 0) == bt.d(0, 0) @ maps["L01"]
    assert maps["L00"] @ bs.D(0, 0) == bt.D(0, 0) @ maps["L10"]
    assert rt.eps0 @ maps["L00"] == f0 @ rs.eps0


def test_size_guard(monkeypatch):
    big = TwoTermComplex.zero_map(FgAbGroup(), FgAbGroup(0, (2, 2, 2, 2, 2)))
    with pytest.raises(SizeGuardExceeded):
        canonical_resolution(big)
    canonical_resolution(big, max_order=32)
    monkeypatch.setenv("BIEXTLAB_MAX_ORDER", "64")
    canonical_resolution(big)


def test_infinite_groups_are_rejected():
    with pytest.raises(InfiniteGroup):
        canonical_resolution(TwoTermComplex.zero_map(FgAbGroup(), FgAbGroup.free(1)))


def test_tensor_total_degrees_and_guard():
    k = TwoTermComplex.zero_map(FgAbGroup(), Z2)
    tot = tensor_total(k, k)
    assert tot.high == 2
    assert tot.group(0).free_rank == 4
    four = TwoTermComplex.zero_map(FgAbGroup(), FgAbGroup(0, (2, 4)))
    with pytest.raises(SizeGuardExceeded):
        tensor_resolution(four, four)
