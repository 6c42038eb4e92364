"""Derived tensor products, extension and biextension groups, and their checks.

Two routes are offered for every group:

* the geometric route evaluates the Ψ groups of an explicit free bicomplex
  (the canonical resolution for extensions, the tensor product of two
  canonical resolutions for biextensions) and decodes witnesses into
  cocycle tables;
* the homological route evaluates hyper-Ext on the derived tensor product.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

from . import _lattice as lat
from .abgroup import (
    FgAbGroup,
    GroupHom,
    Solver,
    direct_sum,
    group_from_orders,
    hom_group,
    image,
    kernel_data,
    tensor_group,
    tor_group,
)
from .bicomplex import TotalComplex, tensor_complexes, total_complex
from .complex import (
    ChainComplex,
    ChainMap,
    TwoTermComplex,
    as_complex,
    derived_hom_group,
    free_replacement,
    hom_complex,
    homology,
    homotopy_classes,
    induced_map,
    postcompose_map,
    truncate_keep,
)
from .errors import RouteMismatch
from .psi import PsiOne, PsiZero, psi0_data, psi1_data, spectral_report
from .resolution import canonical_resolution, tensor_total

Table = dict[tuple[tuple[int, ...], ...], tuple[int, ...]]


# --------------------------------------------------------------------------
# derived tensor product


def kunneth(K1, K2, n: int) -> FgAbGroup:
    """Closed form ``sum_{a+b=n} H_a ⊗ H_b + sum_{a+b=n-1} Tor(H_a, H_b)``."""
    c1, c2 = as_complex(K1), as_complex(K2)
    orders: list[int] = []
    for a in c1.degrees():
        ha = homology(c1, a)
        for b in c2.degrees():
            hb = homology(c2, b)
            if a + b == n:
                orders += tensor_group(ha, hb).orders
            elif a + b == n - 1:
                orders += tor_group(ha, hb).orders
    return group_from_orders(orders)


@lru_cache(maxsize=256)
def derived_tensor(K1, K2) -> ChainComplex:
    """``K1 ⊗^L K2`` as the total complex of two free replacements.

    Its homology is compared with the Künneth closed form in every degree.
    """
    f1 = free_replacement(K1).complex
    f2 = free_replacement(K2).complex
    tot = total_complex(tensor_complexes(f1, f2))
    for n in range(0, max(tot.high, 0) + 2):
        got, want = homology(tot, n), kunneth(K1, K2, n)
        if got != want:
            raise RouteMismatch(f"H_{n} of the derived tensor is {got}, Künneth gives {want}")
    return tot


# --------------------------------------------------------------------------
# cocycle tables


def _labels(tot: TotalComplex, n: int, name: str):
    blk = tot.block(n, name)
    module = tot.bicomplex.summands[blk.pos][blk.summand].basis
    return blk, module


def _table(c: GroupHom, tot: TotalComplex, n: int, name: str, local: bool = False) -> Table:
    """Values of ``c`` (defined on ``Tot_n``, or on the block alone) on each basis label."""
    try:
        blk, module = _labels(tot, n, name)
    except KeyError:
        return {}
    cols = c.columns()
    out = {}
    for k in range(blk.size):
        col = cols[k if local else blk.offset + k]
        value = tuple(col.get(i, 0) for i in range(c.target.ngens))
        out[tuple(x.coords for x in module.label(k))] = c.target.reduce(value)
    return out


def _cochain(p1: PsiOne, coords: Sequence[int]) -> tuple[GroupHom, GroupHom]:
    cbar, gamma = p1.solution.witness(coords)
    return cbar @ p1.model.q1.projection, gamma


@dataclass(frozen=True)
class BiextDatum:
    """Cocycle tables of a biextension class.

    ``phi`` on ``B1×B1×B2``, ``psi`` on ``B1×B2×B2``, ``rho1`` on ``A1×B2``,
    ``rho2`` on ``B1×A2`` (values in ``B3``), ``lam`` on ``A1×A2`` (values in ``A3``).
    """

    phi: Table
    psi: Table
    rho1: Table
    rho2: Table
    lam: Table


@dataclass(frozen=True)
class ExtDatum:
    """``f`` on ``B1×B1`` and ``r`` on ``A1`` (values in ``B3``), ``gamma`` on the degree-two block."""

    f: Table
    r: Table
    gamma: Table


def decode_biext(p1: PsiOne, coords: Sequence[int]) -> BiextDatum:
    tot = p1.model.tot
    c, gamma = _cochain(p1, coords)
    return BiextDatum(
        phi=_table(c, tot, 1, "Z[B1×B1×B2]"),
        psi=_table(c, tot, 1, "Z[B1×B2×B2]"),
        rho1=_table(c, tot, 1, "Z[A1×B2]"),
        rho2=_table(c, tot, 1, "Z[B1×A2]"),
        lam=_table(gamma, tot, 2, "Z[A1×A2]", local=True),
    )


def decode_ext(p1: PsiOne, coords: Sequence[int]) -> ExtDatum:
    tot = p1.model.tot
    c, gamma = _cochain(p1, coords)
    return ExtDatum(
        f=_table(c, tot, 1, "Z[B×B]"),
        r=_table(c, tot, 1, "Z[A]"),
        gamma={},  # the canonical resolution has no degree-two horizontal block
    )


# --------------------------------------------------------------------------
# geometric and homological groups


@dataclass
class GeometricGroups:
    total: TotalComplex
    zero: PsiZero
    one: PsiOne
    kind: str

    @property
    def groups(self) -> tuple[FgAbGroup, FgAbGroup]:
        return self.zero.group, self.one.group

    def data(self) -> list:
        decode = decode_biext if self.kind == "biext" else decode_ext
        n = self.one.group.ngens
        return [decode(self.one, [int(i == k) for i in range(n)]) for k in range(n)]


@lru_cache(maxsize=128)
def _tensor_model(K1, K2, max_order):
    return truncate_keep(tensor_total(K1, K2, max_order=max_order), 2)


@lru_cache(maxsize=128)
def _canonical_model(K1, max_order):
    return truncate_keep(canonical_resolution(K1, max_order=max_order).total, 2)


def biext_geometric(K1, K2, K3, *, max_order: int | None = None) -> GeometricGroups:
    T = _tensor_model(K1, K2, max_order)
    return GeometricGroups(T, psi0_data(T, K3), psi1_data(T, K3), "biext")


def ext_geometric(K1, K3, *, max_order: int | None = None) -> GeometricGroups:
    T = _canonical_model(K1, max_order)
    return GeometricGroups(T, psi0_data(T, K3), psi1_data(T, K3), "ext")


def biext_groups_geometric(K1, K2, K3, *, max_order: int | None = None) -> tuple[FgAbGroup, FgAbGroup]:
    return biext_geometric(K1, K2, K3, max_order=max_order).groups


def ext_groups_geometric(K1, K3, *, max_order: int | None = None) -> tuple[FgAbGroup, FgAbGroup]:
    return ext_geometric(K1, K3, max_order=max_order).groups


class HomologicalGroups:
    """Hyper-Ext groups of the derived tensor product; ``chain_level`` is computed on demand."""

    def __init__(self, ext0: FgAbGroup, ext1: FgAbGroup, model, target, chain_level_model: str):
        self.ext0 = ext0
        self.ext1 = ext1
        self.chain_level_model = chain_level_model
        self._model, self._target = model, target

    @property
    def groups(self) -> tuple[FgAbGroup, FgAbGroup]:
        return self.ext0, self.ext1

    @cached_property
    def chain_level(self) -> FgAbGroup:
        """Homotopy classes of chain maps from the model into the target."""
        return homotopy_classes(self._model, self._target).group


def biext_homological(K1, K2, K3, *, max_order: int | None = None) -> HomologicalGroups:
    X = derived_tensor(K1, K2)
    e0 = derived_hom_group(X, K3, 0)
    e1 = derived_hom_group(X, K3, 1)
    finite = all(g.is_finite for K in (K1, K2) for g in (K.A, K.B))
    if finite:
        model, name = _tensor_model(K1, K2, max_order), "tensor-resolution"
    else:
        model, name = X, "free-replacement"
    return HomologicalGroups(e0, e1, model, K3, name)


def biext_groups_homological(K1, K2, K3) -> tuple[FgAbGroup, FgAbGroup, FgAbGroup]:
    """``(Ext^0, Ext^1, Hom_K)`` for ``K1 ⊗^L K2`` against ``K3``."""
    h = biext_homological(K1, K2, K3)
    return h.ext0, h.ext1, h.chain_level


def ext_groups_homological(K1, K3) -> tuple[FgAbGroup, FgAbGroup]:
    return derived_hom_group(K1, K3, 0), derived_hom_group(K1, K3, 1)


# --------------------------------------------------------------------------
# comparison


EQUAL, UNEQUAL, NOT_ASSERTED = "equal", "unequal", "not-asserted"


@dataclass
class VerificationReport:
    instance: str
    hypotheses: dict[str, bool]
    hypothesis_witnesses: dict[str, object]
    geometric_route: GeometricGroups
    homological_route: HomologicalGroups
    verdicts: dict[int, str]
    observed_equal: dict[int, bool]

    @property
    def geometric(self) -> tuple[FgAbGroup, FgAbGroup]:
        return self.geometric_route.groups

    @property
    def homological(self) -> tuple[FgAbGroup, FgAbGroup]:
        return self.homological_route.groups

    @property
    def chain_level(self) -> FgAbGroup:
        return self.homological_route.chain_level

    @cached_property
    def witnesses(self) -> list:
        """Decoded cocycle tables, one per generator of the geometric Biext^1."""
        return self.geometric_route.data()

    def hypotheses_hold(self, degree: int) -> bool:
        keys = ("hom_vanishing", "ext1_vanishing") if degree == 0 else tuple(self.hypotheses)
        return all(self.hypotheses[k] for k in keys)

    @property
    def failed(self) -> bool:
        return any(v == UNEQUAL for v in self.verdicts.values())


def verify_main_theorem(K1, K2, K3, *, max_order: int | None = None) -> VerificationReport:
    geo = biext_geometric(K1, K2, K3, max_order=max_order)
    hom = biext_homological(K1, K2, K3, max_order=max_order)
    flags = spectral_report(geo.total, K3, 1).flags
    out = VerificationReport(
        instance=f"{K1} ⊗ {K2} -> {K3}",
        hypotheses={k: f.holds for k, f in flags.items()},
        hypothesis_witnesses={k: f.witness for k, f in flags.items() if not f.holds},
        geometric_route=geo,
        homological_route=hom,
        verdicts={},
        observed_equal={},
    )
    for n in (0, 1):
        same = geo.groups[n] == hom.groups[n]
        out.observed_equal[n] = same
        if not out.hypotheses_hold(n):
            out.verdicts[n] = NOT_ASSERTED
        else:
            out.verdicts[n] = EQUAL if same else UNEQUAL
    return out


# --------------------------------------------------------------------------
# the six-term sequence for 0 -> B3 -> K3 -> A3[1] -> 0


@dataclass(frozen=True)
class ExactnessAt:
    node: int
    composite_zero: bool
    kernel_in_image: bool
    image_order: int | None
    kernel_order: int | None

    @property
    def exact(self) -> bool:
        return self.composite_zero and self.kernel_in_image


@dataclass
class LesReport:
    groups: list[FgAbGroup]
    maps: list[GroupHom]
    nodes: list[ExactnessAt]

    @property
    def exact(self) -> bool:
        return all(n.exact for n in self.nodes)


def _order_or_none(g: FgAbGroup) -> int | None:
    return g.order if g.is_finite else None


def _exactness(node: int, f: GroupHom, g: GroupHom) -> ExactnessAt:
    zero = (g @ f).is_zero()
    kd = kernel_data(g)
    solver = Solver(f)
    inside = all(
        solver.solve(kd.inclusion.apply_vector(tuple(int(i == k) for i in range(kd.group.ngens)))) is not None
        for k in range(kd.group.ngens)
    )
    return ExactnessAt(node, zero, inside, _order_or_none(image(f)[0]), _order_or_none(kd.group))


def _connecting(
    cb: ChainComplex, ck: ChainComplex, ca: ChainComplex, iota_m1: GroupHom, pi_0: GroupHom
) -> GroupHom:
    """``H^0 Hom(F, A3[1]) -> H^1 Hom(F, B3)`` by lift, differentiate, pull back."""
    src = ca.homology_data(0)
    tgt = cb.homology_data(-1)
    lift = Solver(pi_0)
    back = Solver(iota_m1)
    cols = []
    for k in range(src.group.ngens):
        z = src.cycle_of([int(i == k) for i in range(src.group.ngens)])
        zt = tuple(z.get(i, 0) for i in range(ca.group(0).ngens))
        y = lift.solve(zt)
        dy = ck.d(0).apply_vector(y)
        x = back.solve(dy)
        if x is None:
            raise ArithmeticError("boundary does not come from the subcomplex")
        cols.append({i: v for i, v in enumerate(tgt.class_of(x)) if v})
    return GroupHom(src.group, tgt.group, rows=lat.columns_to_rows(tgt.group.ngens, cols))


@lru_cache(maxsize=256)
def les_check(K1, K2, K3) -> LesReport:
    """Exactness of ``Ext^0(X, B3) -> Ext^0(X, K3) -> Ext^0(X, A3[1]) -> Ext^1(X, B3) -> ...``.

    ``X = K1 ⊗^L K2``; all maps are computed explicitly on Hom complexes.
    """
    X = derived_tensor(K1, K2)
    A3, B3, u3 = K3.A, K3.B, K3.u
    zero = FgAbGroup()
    kb = TwoTermComplex.zero_map(zero, B3).complex
    kk = K3.complex
    ka = ChainComplex(1, (A3,), ())
    i_map = ChainMap(kb, kk, {0: GroupHom.identity(B3)})
    p_map = ChainMap(kk, ka, {1: GroupHom.identity(A3)})
    cb, ck, ca = hom_complex(X, kb), hom_complex(X, kk), hom_complex(X, ka)

    def induced(src, tgt, g, n):
        comps = {m: postcompose_map(X, src, tgt, g, m) for m in (n - 1, n, n + 1)}
        return induced_map(ChainMap(src, tgt, comps, check=False), n)

    groups = [homology(cb, 0), homology(ck, 0), homology(ca, 0), homology(cb, -1), homology(ck, -1), homology(ca, -1)]
    iota_m1 = postcompose_map(X, cb, ck, i_map, -1)
    pi_0 = postcompose_map(X, ck, ca, p_map, 0)
    maps = [
        induced(cb, ck, i_map, 0),
        induced(ck, ca, p_map, 0),
        _connecting(cb, ck, ca, iota_m1, pi_0),
        induced(cb, ck, i_map, -1),
        induced(ck, ca, p_map, -1),
    ]
    nodes = [_exactness(k + 2, maps[k], maps[k + 1]) for k in range(4)]
    return LesReport(groups, maps, nodes)


def les_closed_forms(K1, K2, K3) -> list[FgAbGroup]:
    """The six groups as named by the naive chain-level reading.

    ``Hom(B1⊗B2, B3)``, homotopy classes ``K1⊗K2 -> K3``, ``Hom(A1⊗B2 + B1⊗A2, A3)``,
    geometric ``Biext^1(·; B3)`` and ``Biext^1(·; K3)``, ``Hom(A1⊗A2, A3)``.
    Kept for comparison only; exactness is checked on the derived sequence.
    """
    A1, B1, A2, B2 = K1.A, K1.B, K2.A, K2.B
    zero = FgAbGroup()
    kb = TwoTermComplex.zero_map(zero, K3.B)
    naive = total_complex(tensor_complexes(K1, K2))
    mid = direct_sum([tensor_group(A1, B2), tensor_group(B1, A2)]).group
    return [
        hom_group(tensor_group(B1, B2), K3.B),
        homotopy_classes(truncate_keep(naive, 2), K3).group,
        hom_group(mid, K3.A),
        biext_groups_geometric(K1, K2, kb)[1],
        biext_groups_geometric(K1, K2, K3)[1],
        hom_group(tensor_group(A1, A2), K3.A),
    ]
