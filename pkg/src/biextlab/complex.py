"""Bounded chain complexes of finitely generated abelian groups.

Indexing is homological: ``d_n: C_n -> C_{n-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

from . import _lattice as lat
from ._homsys import LinearSystem, Solution
from .abgroup import (
    ExtGroup,
    FgAbGroup,
    GroupHom,
    HomGroup,
    Solver,
    cokernel_data,
    direct_sum,
    group_from_orders,
    kernel_data,
    lift_through,
)
from .errors import RouteMismatch

_ZERO = FgAbGroup()


class ChainComplex:
    """Groups ``C_low .. C_high`` and differentials between consecutive degrees."""

    def __init__(self, low: int, groups: Sequence[FgAbGroup], diffs: Sequence[GroupHom], *, check=True):
        groups = tuple(groups)
        diffs = tuple(diffs)
        if len(diffs) != max(len(groups) - 1, 0):
            raise ValueError("need one differential between each pair of consecutive groups")
        for k, d in enumerate(diffs):
            if d.source != groups[k + 1] or d.target != groups[k]:
                raise ValueError(f"differential out of degree {low + k + 1} has the wrong shape")
        self.low = low
        self.groups = groups
        self.diffs = diffs
        if check:
            for k in range(len(diffs) - 1):
                if not (diffs[k] @ diffs[k + 1]).is_zero():
                    raise ValueError(f"d∘d is nonzero at degree {low + k + 2}")

    @classmethod
    def from_degrees(cls, groups: Mapping[int, FgAbGroup], diffs: Mapping[int, GroupHom] = {}, **kw):
        """Build from ``{n: C_n}`` and ``{n: d_n}``; missing degrees are zero."""
        degs = [n for n, g in groups.items() if not g.is_trivial]
        if not degs:
            return cls(0, (), ())
        low, high = min(degs), max(degs)
        gs = [groups.get(n, _ZERO) for n in range(low, high + 1)]
        ds = []
        for n in range(low + 1, high + 1):
            d = diffs.get(n)
            ds.append(d if d is not None else GroupHom.zero(gs[n - low], gs[n - low - 1]))
        return cls(low, gs, ds, **kw)

    @property
    def high(self) -> int:
        return self.low + len(self.groups) - 1

    def degrees(self) -> range:
        return range(self.low, self.high + 1)

    def group(self, n: int) -> FgAbGroup:
        if self.low <= n <= self.high:
            return self.groups[n - self.low]
        return _ZERO

    def d(self, n: int) -> GroupHom:
        """``d_n: C_n -> C_{n-1}``."""
        if self.low < n <= self.high:
            return self.diffs[n - self.low - 1]
        return GroupHom.zero(self.group(n), self.group(n - 1))

    def is_free(self) -> bool:
        return all(g.is_free for g in self.groups)

    def ranks(self) -> dict[int, int]:
        return {n: self.group(n).ngens for n in self.degrees()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainComplex):
            return NotImplemented
        degs = set(self.degrees()) | set(other.degrees())
        return all(self.group(n) == other.group(n) for n in degs) and all(
            self.d(n) == other.d(n) for n in degs
        )

    def __hash__(self) -> int:
        return hash((self.low, self.groups, tuple(hash(d) for d in self.diffs)))

    def __repr__(self) -> str:
        parts = [f"{n}: {self.group(n)}" for n in reversed(self.degrees())]
        return f"ChainComplex({', '.join(parts)})"

    @cached_property
    def _homology_cache(self) -> dict:
        return {}

    def homology_data(self, n: int) -> HomologyData:
        cache = self._homology_cache
        if n not in cache:
            cache[n] = _compute_homology(self, n)
        return cache[n]


@dataclass(frozen=True)
class TwoTermComplex:
    """``K = [A --u--> B]`` with ``A`` in degree 1 and ``B`` in degree 0."""

    A: FgAbGroup
    B: FgAbGroup
    u: GroupHom

    def __post_init__(self):
        if self.u.source != self.A or self.u.target != self.B:
            raise ValueError("u must map A to B")

    @classmethod
    def zero_map(cls, a: FgAbGroup, b: FgAbGroup) -> TwoTermComplex:
        return cls(a, b, GroupHom.zero(a, b))

    @cached_property
    def complex(self) -> ChainComplex:
        return ChainComplex(0, (self.B, self.A), (self.u,))

    def __str__(self) -> str:
        return f"[{self.A} -> {self.B}]"


def as_complex(c) -> ChainComplex:
    return c.complex if isinstance(c, TwoTermComplex) else c


class ChainMap:
    def __init__(self, source, target, components: Mapping[int, GroupHom], *, check=True):
        self.source = as_complex(source)
        self.target = as_complex(target)
        self.components = dict(components)
        if check:
            for n in set(self.source.degrees()) | set(self.target.degrees()):
                lhs = self.target.d(n) @ self.component(n)
                rhs = self.component(n - 1) @ self.source.d(n)
                if lhs != rhs:
                    raise ValueError(f"chain map does not commute with d_{n}")

    def component(self, n: int) -> GroupHom:
        f = self.components.get(n)
        if f is None:
            return GroupHom.zero(self.source.group(n), self.target.group(n))
        return f

    @classmethod
    def identity(cls, c) -> ChainMap:
        c = as_complex(c)
        return cls(c, c, {n: GroupHom.identity(c.group(n)) for n in c.degrees()}, check=False)

    @classmethod
    def zero(cls, source, target) -> ChainMap:
        return cls(source, target, {}, check=False)


# --------------------------------------------------------------------------
# homology


@dataclass(frozen=True)
class HomologyData:
    group: FgAbGroup
    cycles: object  # KernelData of d_n
    quotient: object  # CokernelData of boundaries -> cycles

    def cycle_of(self, coords: Sequence[int]) -> dict[int, int]:
        """A cycle in ``C_n`` representing the given class."""
        z = self.quotient.lift(coords)
        return self.cycles.inclusion.apply_sparse(z)

    @cached_property
    def _solver(self) -> Solver:
        return Solver(self.cycles.inclusion)

    def class_of(self, cycle) -> tuple[int, ...]:
        z = self._solver.solve(cycle)
        if z is None:
            raise ValueError("not a cycle")
        return self.quotient.projection(z).coords


def _compute_homology(c: ChainComplex, n: int) -> HomologyData:
    cycles = kernel_data(c.d(n))
    boundary = lift_through(c.d(n + 1), cycles.inclusion)
    quot = cokernel_data(boundary)
    return HomologyData(quot.group, cycles, quot)


def homology(c, n: int) -> FgAbGroup:
    return as_complex(c).homology_data(n).group


def induced_map(f: ChainMap, n: int) -> GroupHom:
    """``H_n(f)``."""
    src = f.source.homology_data(n)
    tgt = f.target.homology_data(n)
    cols = []
    for k in range(src.group.ngens):
        z = src.cycle_of([int(i == k) for i in range(src.group.ngens)])
        img = f.component(n).apply_vector(z)
        cols.append({i: v for i, v in enumerate(tgt.class_of(img)) if v})
    return GroupHom(src.group, tgt.group, rows=lat.columns_to_rows(tgt.group.ngens, cols))


def is_quasi_iso(f: ChainMap) -> dict[int, bool]:
    """For every degree in either support, whether ``H_n(f)`` is an isomorphism."""
    degs = sorted(set(f.source.degrees()) | set(f.target.degrees()))
    return {n: induced_map(f, n).is_isomorphism() for n in degs}


# --------------------------------------------------------------------------
# shifts and truncation


def shift(c, k: int) -> ChainComplex:
    """``(C[k])_n = C_{n-k}`` with differentials multiplied by ``(-1)^k``."""
    c = as_complex(c)
    sign = -1 if k % 2 else 1
    return ChainComplex(c.low + k, c.groups, [d.scale(sign) for d in c.diffs], check=False)


def truncate_keep(c, n_max: int):
    """Keep degrees ``0..n_max``, replace everything else by zero."""
    c = as_complex(c)
    keep = getattr(c, "truncated", None)
    if keep is not None:
        return keep(n_max)
    lo, hi = max(c.low, 0), min(c.high, n_max)
    if lo > hi:
        return ChainComplex(0, (), ())
    return ChainComplex(
        lo,
        [c.group(n) for n in range(lo, hi + 1)],
        [c.d(n) for n in range(lo + 1, hi + 1)],
        check=False,
    )


def to_cohomological(c) -> dict[int, FgAbGroup]:
    """The single conversion point between indexings: ``K^{-i} = K_i``."""
    c = as_complex(c)
    return {-n: c.group(n) for n in c.degrees()}


# --------------------------------------------------------------------------
# chain maps as a group


@dataclass
class ChainMapGroup:
    """The group of chain maps ``L -> K`` (not up to homotopy)."""

    source: ChainComplex
    target: ChainComplex
    degrees: tuple[int, ...]
    solution: Solution

    @property
    def group(self) -> FgAbGroup:
        return self.solution.group

    def witness(self, coords: Sequence[int]) -> ChainMap:
        comps = self.solution.witness(coords)
        return ChainMap(self.source, self.target, dict(zip(self.degrees, comps)))

    def basis(self) -> list[ChainMap]:
        n = self.group.ngens
        return [self.witness([int(i == k) for i in range(n)]) for k in range(n)]

    def coords(self, f: ChainMap) -> tuple[int, ...]:
        return self.solution.classify([f.component(n) for n in self.degrees])


def _chain_map_system(l: ChainComplex, k: ChainComplex) -> tuple[LinearSystem, tuple[int, ...]]:
    degs = tuple(n for n in range(max(l.low, k.low), min(l.high, k.high) + 1))
    homs = [HomGroup(l.group(n), k.group(n)) for n in degs]
    sys = LinearSystem(homs)
    index = {n: i for i, n in enumerate(degs)}
    for n in range(min(l.low, k.low), max(l.high, k.high) + 2):
        # d^K_n f_n - f_{n-1} d^L_n = 0 in Hom(L_n, K_{n-1})
        target = HomGroup(l.group(n), k.group(n - 1))
        terms = {}
        if n in index:
            terms[index[n]] = homs[index[n]].postcompose(k.d(n), target)
        if n - 1 in index:
            m = homs[index[n - 1]].precompose(l.d(n), target)
            terms[index[n - 1]] = -m
        if terms:
            sys.add_equation(target.group, terms)
    return sys, degs


def chain_map_group(l, k) -> ChainMapGroup:
    l, k = as_complex(l), as_complex(k)
    sys, degs = _chain_map_system(l, k)
    return ChainMapGroup(l, k, degs, sys.solve())


def homotopy_classes(l, k) -> ChainMapGroup:
    """Chain maps modulo all degreewise homotopies ``h_n: L_n -> K_{n+1}``."""
    l, k = as_complex(l), as_complex(k)
    sys, degs = _chain_map_system(l, k)
    index = {n: i for i, n in enumerate(degs)}
    gauge = []
    for n in range(l.low - 1, l.high + 1):
        hg = HomGroup(l.group(n), k.group(n + 1))
        if hg.group.is_trivial:
            continue
        # h ↦ f with f_n = d_{n+1} h_n and f_{n+1} = h_n d_{n+1}
        terms = {}
        if n in index:
            terms[index[n]] = hg.postcompose(k.d(n + 1), sys.unknowns[index[n]])
        if n + 1 in index:
            terms[index[n + 1]] = hg.precompose(l.d(n + 1), sys.unknowns[index[n + 1]])
        if terms:
            gauge.append((hg.group, terms))
    return ChainMapGroup(l, k, degs, sys.solve(gauge))


# --------------------------------------------------------------------------
# free replacement and derived Hom


@dataclass(frozen=True)
class FreeReplacement:
    complex: ChainComplex
    homology_match: dict[int, bool]

    @property
    def ok(self) -> bool:
        return all(self.homology_match.values())


def free_replacement(c) -> FreeReplacement:
    """A complex of free groups with the same homology, built degree by degree.

    Each ``H_a = Z^r + sum Z/d_i`` contributes ``Z^(r+t)`` in degree ``a`` and
    ``Z^t`` in degree ``a+1`` mapping diagonally onto the torsion part.
    """
    c = as_complex(c)
    hs = {n: homology(c, n) for n in c.degrees()}
    sizes: dict[int, int] = {}
    for n, h in hs.items():
        sizes[n] = sizes.get(n, 0) + h.ngens
        sizes[n + 1] = sizes.get(n + 1, 0) + len(h.torsion)
    groups = {n: FgAbGroup(r) for n, r in sizes.items()}
    diffs = {}
    for n in sizes:
        if n - 1 not in hs:
            continue
        h = hs[n - 1]
        src, tgt = groups[n], groups[n - 1]
        offset_src = hs[n].ngens if n in hs else 0
        rows: list[dict[int, int]] = [{} for _ in range(tgt.ngens)]
        for t, d in enumerate(h.torsion):
            rows[h.free_rank + t][offset_src + t] = d
        diffs[n] = GroupHom(src, tgt, rows=rows, check=False)
    f = ChainComplex.from_degrees(groups, diffs)
    match = {n: homology(f, n) == hs.get(n, _ZERO) for n in set(hs) | set(f.degrees())}
    return FreeReplacement(f, match)


def _ext_formal(h1: FgAbGroup, h2: FgAbGroup, i: int) -> FgAbGroup:
    if i == 0:
        return HomGroup(h1, h2).group
    if i == 1:
        return ExtGroup(h1, h2).group
    return _ZERO


def derived_hom_formal(l, k, n: int) -> FgAbGroup:
    """``Ext^n(L, K)`` via ``sum_{a,b} Ext^{n+b-a}(H_a L, H_b K)``."""
    l, k = as_complex(l), as_complex(k)
    orders: list[int] = []
    for a in l.degrees():
        ha = homology(l, a)
        if ha.is_trivial:
            continue
        for b in k.degrees():
            hb = homology(k, b)
            if hb.is_trivial:
                continue
            orders += _ext_formal(ha, hb, n + b - a).orders
    return group_from_orders(orders)


def hom_complex(f: ChainComplex, k: ChainComplex) -> ChainComplex:
    """Homologically indexed: degree ``-m`` holds maps lowering degree by ``m``.

    ``δ(g) = d_K g - (-1)^m g d_F`` for ``g`` of degree ``m``.
    """
    ms = range(f.low - k.high - 1, f.high - k.low + 2)
    comps = {}
    for m in ms:
        pieces = [(p, HomGroup(f.group(p), k.group(p - m))) for p in f.degrees()]
        pieces = [(p, h) for p, h in pieces if not h.group.is_trivial]
        comps[m] = (pieces, direct_sum([h.group for _, h in pieces]))
    groups = {-m: comps[m][1].group for m in ms}
    diffs = {}
    for m in ms:
        if m + 1 not in comps:
            continue
        src_pieces, src_sum = comps[m]
        tgt_pieces, tgt_sum = comps[m + 1]
        tgt_index = {p: i for i, (p, _) in enumerate(tgt_pieces)}
        sign = -1 if m % 2 else 1
        total = GroupHom.zero(src_sum.group, tgt_sum.group)
        for i, (p, h) in enumerate(src_pieces):
            proj = src_sum.projections[i]
            if p in tgt_index:  # d_K ∘ g_p lands in Hom(F_p, K_{p-m-1})
                j = tgt_index[p]
                total = total + tgt_sum.injections[j] @ h.postcompose(k.d(p - m), tgt_pieces[j][1]) @ proj
            if p + 1 in tgt_index:  # g_p ∘ d_F lands in Hom(F_{p+1}, K_{p-m})
                j = tgt_index[p + 1]
                m_pre = h.precompose(f.d(p + 1), tgt_pieces[j][1])
                total = total + (tgt_sum.injections[j] @ m_pre @ proj).scale(-sign)
        diffs[-m] = total
    out = ChainComplex.from_degrees(groups, diffs)
    out.hom_layout = comps  # {m: (pieces, direct sum)}, used to build induced maps
    return out


def postcompose_map(f: ChainComplex, src: ChainComplex, tgt: ChainComplex, g: ChainMap, n: int) -> GroupHom:
    """Degree ``n`` component of ``Hom(F, K) -> Hom(F, K')``, ``φ ↦ g ∘ φ``.

    ``src`` and ``tgt`` must come from :func:`hom_complex` with the same ``F``.
    """
    m = -n
    sp, ssum = src.hom_layout.get(m, ([], direct_sum([])))
    tp, tsum = tgt.hom_layout.get(m, ([], direct_sum([])))
    tindex = {p: j for j, (p, _) in enumerate(tp)}
    total = GroupHom.zero(src.group(n), tgt.group(n))
    for i, (p, h) in enumerate(sp):
        if p in tindex:
            j = tindex[p]
            piece = h.postcompose(g.component(p - m), tp[j][1])
            total = total + tsum.injections[j] @ piece @ ssum.projections[i]
    return total


def derived_hom_resolved(l, k, n: int) -> FgAbGroup:
    """``Ext^n(L, K)`` as ``H^n`` of ``Hom(F, K)`` for a free model ``F`` of ``L``."""
    l, k = as_complex(l), as_complex(k)
    f = l if l.is_free() else free_replacement(l).complex
    return homology(hom_complex(f, k), -n)


def derived_hom_group(l, k, n: int) -> FgAbGroup:
    """``Ext^n(L, K) = Hom_D(L, K[n])``, computed two ways and cross-checked."""
    formal = derived_hom_formal(l, k, n)
    resolved = derived_hom_resolved(l, k, n)
    if formal != resolved:
        raise RouteMismatch(
            f"Ext^{n}: formality route gives {formal}, resolution route gives {resolved}"
        )
    return formal
