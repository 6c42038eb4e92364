"""The canonical free bicomplex attached to a two-term complex, and its tensor square.

For ``K = [A --u--> B]`` the bicomplex has

* ``L00 = Z[B]``, ``L01 = Z[B×B]``, ``L02 = Z[B×B] + Z[B×B×B]``, ``L10 = Z[A]``;
* ``d00[b1,b2] = [b1+b2] - [b1] - [b2]``;
* ``d01[b1,b2] = [b1,b2] - [b2,b1]`` on the first ``L02`` summand;
* ``d01[b1,b2,b3] = [b1+b2,b3] - [b1,b2+b3] + [b1,b2] - [b2,b3]`` on the second;
* ``D00[a] = [u(a)]``;

augmented by ``[b] -> b`` and ``[a] -> a``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import cached_property
from math import prod
from typing import Sequence

from .abgroup import FgAbGroup, GroupElement, GroupHom, enumerate_elements
from .bicomplex import (
    Bicomplex,
    ExactRow,
    Square,
    Summand,
    TotalComplex,
    check_conditions,
    tensor_complexes,
    total_complex,
)
from .complex import ChainMap, TwoTermComplex, homology, is_quasi_iso
from .errors import InfiniteGroup, SizeGuardExceeded
from . import _lattice as lat

DEFAULT_MAX_ORDER = 8
DEFAULT_MAX_PAIR_ORDER = 16


class FreeModuleOnSet:
    """``Z[X_1 × ... × X_k]`` for finite groups ``X_i``, basis in lexicographic order."""

    def __init__(self, factors: Sequence[tuple[str, FgAbGroup]]):
        self.factors = tuple(factors)
        for name, g in self.factors:
            if not g.is_finite:
                raise InfiniteGroup(f"Z[{name}] would be infinitely generated ({g})")
        self.elements = [enumerate_elements(g) for _, g in self.factors]
        self.sizes = [len(e) for e in self.elements]
        self.rank = prod(self.sizes)
        self.group = FgAbGroup(self.rank)
        self._index = [{e.coords: k for k, e in enumerate(els)} for els in self.elements]

    @property
    def name(self) -> str:
        return "Z[" + "×".join(n for n, _ in self.factors) + "]"

    def index(self, *points) -> int:
        """Basis index of ``[x_1, ..., x_k]`` (elements or coordinate tuples)."""
        k = 0
        for pt, table, size in zip(points, self._index, self.sizes):
            coords = pt.coords if isinstance(pt, GroupElement) else tuple(pt)
            k = k * size + table[coords]
        return k

    def label(self, k: int) -> tuple[GroupElement, ...]:
        out = []
        for els, size in zip(reversed(self.elements), reversed(self.sizes)):
            k, r = divmod(k, size)
            out.append(els[r])
        return tuple(reversed(out))

    def labels(self):
        return itertools.product(*self.elements)

    def product(self, other: FreeModuleOnSet) -> FreeModuleOnSet:
        return FreeModuleOnSet(self.factors + other.factors)

    def summand(self) -> Summand:
        return Summand(self.name, self.group, self)


def _hom_from_formula(src: FreeModuleOnSet, tgt: FreeModuleOnSet, formula) -> GroupHom:
    """Matrix of the linear map sending each basis label to ``formula(*label)``.

    ``formula`` returns a list of ``(coefficient, label tuple)``.
    """
    rows: list[dict[int, int]] = [{} for _ in range(tgt.rank)]
    for j, label in enumerate(src.labels()):
        for coeff, image in formula(*label):
            i = tgt.index(*image)
            new = rows[i].get(j, 0) + coeff
            if new:
                rows[i][j] = new
            else:
                rows[i].pop(j, None)
    return GroupHom(src.group, tgt.group, rows=rows, check=False)


def _env_max_order(default: int) -> int:
    value = os.environ.get("BIEXTLAB_MAX_ORDER")
    return int(value) if value else default


@dataclass(frozen=True)
class AugmentedResolution:
    K: TwoTermComplex
    bicomplex: Bicomplex
    modules: dict[str, FreeModuleOnSet]
    eps0: GroupHom
    eps1: GroupHom

    @cached_property
    def total(self) -> TotalComplex:
        return total_complex(self.bicomplex)

    @cached_property
    def augmentation(self) -> ChainMap:
        """``ε: Tot -> K`` (``ε1`` on the ``L10`` block of ``Tot_1``, zero on ``L01``)."""
        tot = self.total
        blk = tot.position_blocks(1, (1, 0))[0]
        rows = [{blk.offset + j: v for j, v in r.items()} for r in self.eps1.rows]
        eps1_full = GroupHom(tot.group(1), self.K.A, rows=rows, check=False)
        return ChainMap(tot, self.K.complex, {0: self.eps0, 1: eps1_full})


def canonical_resolution(
    K: TwoTermComplex, tag: str = "", *, max_order: int | None = None
) -> AugmentedResolution:
    """The canonical free bicomplex of ``K`` with its augmentation."""
    A, B, u = K.A, K.B, K.u
    if not A.is_finite or not B.is_finite:
        raise InfiniteGroup(f"canonical resolution needs finite A and B, got {K}")
    bound = max_order if max_order is not None else _env_max_order(DEFAULT_MAX_ORDER)
    if B.order > bound:
        raise SizeGuardExceeded(f"|B| = {B.order} exceeds the bound {bound}")
    bn, an = f"B{tag}", f"A{tag}"
    zb = FreeModuleOnSet([(bn, B)])
    zbb = FreeModuleOnSet([(bn, B)] * 2)
    zbbb = FreeModuleOnSet([(bn, B)] * 3)
    za = FreeModuleOnSet([(an, A)])

    d00 = _hom_from_formula(zbb, zb, lambda x, y: [(1, (x + y,)), (-1, (x,)), (-1, (y,))])
    d01_swap = _hom_from_formula(zbb, zbb, lambda x, y: [(1, (x, y)), (-1, (y, x))])
    d01_assoc = _hom_from_formula(
        zbbb,
        zbb,
        lambda x, y, z: [(1, (x + y, z)), (-1, (x, y + z)), (1, (x, y)), (-1, (y, z))],
    )
    D00 = _hom_from_formula(za, zb, lambda a: [(1, (u(a),))])

    # the L02 swap summand carries the same label set as L01; keep names distinct
    swap = Summand(zbb.name, zbb.group, zbb)
    bc = Bicomplex(
        {
            (0, 0): [zb.summand()],
            (0, 1): [zbb.summand()],
            (0, 2): [swap, zbbb.summand()],
            (1, 0): [za.summand()],
        },
        horizontal={(0, 0): {(0, 0): D00}},
        vertical={(0, 0): {(0, 0): d00}, (0, 1): {(0, 0): d01_swap, (0, 1): d01_assoc}},
    )
    eps0 = GroupHom(
        zb.group, B, rows=lat.columns_to_rows(B.ngens, [_coords(b) for (b,) in zb.labels()]), check=False
    )
    eps1 = GroupHom(
        za.group, A, rows=lat.columns_to_rows(A.ngens, [_coords(a) for (a,) in za.labels()]), check=False
    )
    modules = {"L00": zb, "L01": zbb, "L02_swap": zbb, "L02_assoc": zbbb, "L10": za}
    return AugmentedResolution(K, bc, modules, eps0, eps1)


def _coords(x: GroupElement) -> dict[int, int]:
    return {i: c for i, c in enumerate(x.coords) if c}


def resolution_map(
    f0: GroupHom, f1: GroupHom, src: AugmentedResolution, tgt: AugmentedResolution
) -> dict[str, GroupHom]:
    """Components of the bicomplex map induced by ``(f1, f0): K -> K'``."""
    out = {}
    for key, fn in (
        ("L00", lambda x: (f0(x),)),
        ("L01", lambda x, y: (f0(x), f0(y))),
        ("L02_assoc", lambda x, y, z: (f0(x), f0(y), f0(z))),
        ("L10", lambda a: (f1(a),)),
    ):
        out[key] = _hom_from_formula(src.modules[key], tgt.modules[key], lambda *p, fn=fn: [(1, fn(*p))])
    out["L02_swap"] = out["L01"]
    return out


@dataclass(frozen=True)
class PartialResolutionReport:
    K: TwoTermComplex
    tot_homology: dict[int, FgAbGroup]
    k_homology: dict[int, FgAbGroup]
    augmentation_is_chain_map: bool
    induced_iso: dict[int, bool]

    @property
    def invariants_match(self) -> dict[int, bool]:
        return {i: self.tot_homology[i] == self.k_homology[i] for i in (0, 1)}

    @property
    def ok(self) -> bool:
        return (
            self.augmentation_is_chain_map
            and all(self.invariants_match.values())
            and all(self.induced_iso.values())
        )


def check_partial_resolution(K: TwoTermComplex, *, max_order: int | None = None) -> PartialResolutionReport:
    res = canonical_resolution(K, max_order=max_order)
    tot = res.total
    try:
        eps = res.augmentation
        chain_ok = True
    except ValueError:
        chain_ok = False
    tot_h = {i: homology(tot, i) for i in (0, 1)}
    k_h = {i: homology(K, i) for i in (0, 1)}
    iso = {}
    if chain_ok:
        report = is_quasi_iso(eps)
        iso = {i: report.get(i, False) for i in (0, 1)}
    return PartialResolutionReport(K, tot_h, k_h, chain_ok, iso)


# --------------------------------------------------------------------------
# tensor resolution


def _designated() -> dict:
    b1b2 = "Z[B1×B2]"
    return {
        "exact1": ExactRow(
            ((0, 2), (0, 1), (0, 0)),
            (("Z[B1×B2×B2]", "Z[B1×B2×B2×B2]"), ("Z[B1×B2×B2]",), (b1b2,)),
        ),
        "exact2": ExactRow(
            ((0, 2), (0, 1), (0, 0)),
            (("Z[B1×B1×B2]", "Z[B1×B1×B1×B2]"), ("Z[B1×B1×B2]",), (b1b2,)),
        ),
        "anti1": Square(
            ((0, 2), "Z[B1×B1×B2×B2]"),
            (((0, 1), "Z[B1×B1×B2]"), ((0, 1), "Z[B1×B2×B2]")),
            ((0, 0), b1b2),
        ),
        "anti2": Square(
            ((1, 1), "Z[A1×B2×B2]"),
            (((0, 1), "Z[B1×B2×B2]"), ((1, 0), "Z[A1×B2]")),
            ((0, 0), b1b2),
        ),
        "anti3": Square(
            ((1, 1), "Z[B1×B1×A2]"),
            (((0, 1), "Z[B1×B1×B2]"), ((1, 0), "Z[B1×A2]")),
            ((0, 0), b1b2),
        ),
        "anti4": Square(
            ((2, 0), "Z[A1×A2]"),
            (((1, 0), "Z[A1×B2]"), ((1, 0), "Z[B1×A2]")),
            ((0, 0), b1b2),
        ),
    }


def tensor_resolution(
    K1: TwoTermComplex,
    K2: TwoTermComplex,
    *,
    max_order: int | None = None,
    max_degree: int | None = 2,
) -> Bicomplex:
    """``L(K1) ⊗ L(K2)``; positions above total degree ``max_degree`` are omitted."""
    for K in (K1, K2):
        if not (K.A.is_finite and K.B.is_finite):
            raise InfiniteGroup(f"tensor resolution needs finite groups, got {K}")
    bound = max_order if max_order is not None else _env_max_order(DEFAULT_MAX_PAIR_ORDER)
    if K1.B.order * K2.B.order > bound:
        raise SizeGuardExceeded(
            f"|B1|·|B2| = {K1.B.order * K2.B.order} exceeds the bound {bound}"
        )
    big = 1 << 30
    r1 = canonical_resolution(K1, "1", max_order=big)
    r2 = canonical_resolution(K2, "2", max_order=big)
    bc = tensor_complexes(r1.bicomplex, r2.bicomplex, max_degree=max_degree)
    bc.designated.update(_designated())
    return bc


def tensor_total(K1: TwoTermComplex, K2: TwoTermComplex, *, max_order: int | None = None) -> TotalComplex:
    """The total complex in degrees 0..2 of the tensor resolution."""
    return total_complex(tensor_resolution(K1, K2, max_order=max_order))


def tensor_conditions(K1, K2, **kw):
    return check_conditions(tensor_resolution(K1, K2, **kw))
