import json
from math import gcd, prod

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biextlab.abgroup import (
    FgAbGroup,
    GroupHom,
    HomGroup,
    cokernel,
    direct_sum,
    enumerate_elements,
    ext_group,
    hom_group,
    image,
    kernel,
    present_orders,
    snf,
    tensor_group,
    tor_group,
)
from biextlab.errors import IllDefinedHom
from corpus import GROUPS

BY_ORDERS = {g.orders: g for g in GROUPS.values()}

matrices = st.integers(1, 5).flatmap(
    lambda m: st.integers(1, 5).flatmap(
        lambda n: st.lists(st.lists(st.integers(-20, 20), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)
small_orders = st.lists(st.sampled_from([0, 1, 2, 3, 4, 6]), max_size=3)
finite_orders = st.lists(st.sampled_from([2, 3, 4, 6]), max_size=2)


def _signature(g):
    return {str(n): prod(gcd(n, d) for d in g.orders) for n in range(1, 13)}


def test_snf_matches_determinantal_divisors(oracle):
    for case in oracle["snf"]:
        diag = [d for d in snf(case["matrix"]).diagonal if d]
        assert diag == case["invariant_factors"]


@given(matrices)
@settings(max_examples=200, deadline=None)
def test_snf_transform_identity(m):
    d = snf(m)
    got = [[sum(d.U[i][k] * m[k][l] * d.V[l][j] for k in range(len(m)) for l in range(len(m[0])))
            for j in range(len(m[0]))] for i in range(len(m))]
    assert got == [list(r) for r in d.S]
    diag = [x for x in d.diagonal if x]
    assert all(b % a == 0 for a, b in zip(diag, diag[1:]))


@given(matrices)
@settings(max_examples=100, deadline=None)
def test_snf_is_deterministic(m):
    assert snf(m) == snf(m)


@pytest.mark.parametrize("op", ["hom", "ext", "tensor", "tor"])
def test_bifunctors_against_enumeration(oracle, op):
    f = {"hom": hom_group, "ext": ext_group, "tensor": tensor_group, "tor": tor_group}[op]
    for key, sigs in oracle["group_ops"].items():
        a, b = (BY_ORDERS[tuple(json.loads(x))] for x in key.split("|"))
        assert _signature(f(a, b)) == sigs[op], (op, key)


def test_normalization_to_invariant_factors():
    assert present_orders([6, 4]).group == FgAbGroup(0, (2, 12))
    assert present_orders([0, 1, 5, 3]).group == FgAbGroup(1, (15,))


@given(small_orders)
def test_normal_form_is_divisibility_chain(orders):
    g = present_orders(orders).group
    assert g.free_rank == orders.count(0)
    assert all(b % a == 0 for a, b in zip(g.torsion, g.torsion[1:]))
    finite = [o for o in orders if o]
    assert prod(g.torsion) == prod(finite)


def test_ill_defined_hom_is_rejected():
    with pytest.raises(IllDefinedHom):
        GroupHom(FgAbGroup.cyclic(2), FgAbGroup.cyclic(4), [[1]])
    GroupHom(FgAbGroup.cyclic(2), FgAbGroup.cyclic(4), [[2]])


def test_enumeration_counts():
    for g in GROUPS.values():
        assert len(enumerate_elements(g)) == g.order


def _random_hom(data, a, b):
    h = HomGroup(a, b)
    coords = [data.draw(st.integers(0, max(o - 1, 0) if o else 5)) for o in h.group.orders]
    return h.hom(coords)


@given(st.data(), finite_orders, finite_orders)
@settings(max_examples=80, deadline=None)
def test_first_isomorphism_theorem(data, ao, bo):
    a, b = present_orders(ao).group, present_orders(bo).group
    f = _random_hom(data, a, b)
    k, inc = kernel(f)
    im, _ = image(f)
    c, proj = cokernel(f)
    assert k.order * im.order == a.order
    assert c.order * im.order == b.order
    assert (f @ inc).is_zero()
    assert (proj @ f).is_zero()


@given(st.data(), finite_orders, finite_orders, finite_orders)
@settings(max_examples=50, deadline=None)
def test_composition_is_associative(data, ao, bo, co):
    a, b, c = (present_orders(o).group for o in (ao, bo, co))
    f, g = _random_hom(data, a, b), _random_hom(data, b, c)
    for x in enumerate_elements(a):
        assert (g @ f).apply_vector(x.coords) == g.apply_vector(f.apply_vector(x.coords))


def test_hom_group_witnesses_round_trip():
    a, b = FgAbGroup(0, (2, 4)), FgAbGroup(1, (4,))
    h = HomGroup(a, b)
    for k, phi in enumerate(h.basis):
        assert h.coords(phi) == tuple(int(i == k) for i in range(h.group.ngens))


def test_direct_sum_injections_and_projections():
    parts = [FgAbGroup.cyclic(2), FgAbGroup.free(1), FgAbGroup.cyclic(3)]
    s = direct_sum(parts)
    assert s.group == FgAbGroup(1, (6,))
    for i, p in enumerate(parts):
        for j, q in enumerate(parts):
            comp = s.projections[j] @ s.injections[i]
            assert comp.is_zero() == (i != j) or p.is_trivial
