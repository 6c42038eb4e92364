"""Bicomplexes with anticommuting squares, their total complexes, and tensor products.

Position ``(i, j)`` holds ``L_ij``.  The horizontal differential
``D_ij: L_{i+1,j} -> L_ij`` lowers ``i``; the vertical ``d_ij: L_{i,j+1} -> L_ij``
lowers ``j``.  Every position is a direct sum of labelled summands so that
callers can address individual blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from . import _lattice as lat
from .abgroup import (
    DirectSum,
    FgAbGroup,
    GroupHom,
    TensorGroup,
    direct_sum,
    kronecker,
    tensor_hom,
)
from .complex import ChainComplex, as_complex, homology
from .errors import BicomplexInvalid

Pos = tuple[int, int]
Blocks = dict[tuple[int, int], GroupHom]  # (target summand, source summand) -> map


@dataclass(frozen=True)
class Summand:
    """A named direct summand; ``basis`` optionally labels its generators."""

    name: str
    group: FgAbGroup
    basis: object = None

    def tensor(self, other: Summand) -> Summand:
        group = TensorGroup(self.group, other.group).group
        if self.basis is not None and other.basis is not None:
            basis = self.basis.product(other.basis)
            return Summand(basis.name, group, basis)
        return Summand(f"{self.name}⊗{other.name}", group)


class Bicomplex:
    def __init__(
        self,
        summands: Mapping[Pos, Iterable[Summand]],
        horizontal: Mapping[Pos, Blocks] = {},
        vertical: Mapping[Pos, Blocks] = {},
        *,
        designated: Mapping | None = None,
    ):
        self.summands = {p: tuple(s) for p, s in summands.items() if tuple(s)}
        self.horizontal = {p: dict(b) for p, b in horizontal.items()}
        self.vertical = {p: dict(b) for p, b in vertical.items()}
        self.designated = dict(designated or {})
        for kind, table, step in (("D", self.horizontal, (1, 0)), ("d", self.vertical, (0, 1))):
            for (i, j), blocks in table.items():
                src = (i + step[0], j + step[1])
                for (t, s), h in blocks.items():
                    if h.source != self.summands[src][s].group or h.target != self.summands[(i, j)][t].group:
                        raise ValueError(f"{kind} block at {(i, j)} has the wrong shape")
        for (i, j) in self.positions():
            if not (self.D(i, j) @ self.D(i + 1, j)).is_zero():
                raise BicomplexInvalid(f"D∘D is nonzero at {(i + 2, j)}")
            if not (self.d(i, j) @ self.d(i, j + 1)).is_zero():
                raise BicomplexInvalid(f"d∘d is nonzero at {(i, j + 2)}")

    @classmethod
    def from_maps(
        cls,
        components: Mapping[Pos, FgAbGroup],
        horizontal: Mapping[Pos, GroupHom] = {},
        vertical: Mapping[Pos, GroupHom] = {},
    ) -> Bicomplex:
        """One unnamed summand per position."""
        summands = {p: [Summand(f"L{p[0]}{p[1]}", g)] for p, g in components.items() if not g.is_trivial}
        return cls(
            summands,
            {p: {(0, 0): h} for p, h in horizontal.items() if p in summands and (p[0] + 1, p[1]) in summands},
            {p: {(0, 0): h} for p, h in vertical.items() if p in summands and (p[0], p[1] + 1) in summands},
        )

    def positions(self) -> list[Pos]:
        return sorted(self.summands)

    def component(self, i: int, j: int) -> FgAbGroup:
        return self._sum((i, j)).group

    def summand_index(self, pos: Pos, name: str) -> int:
        for k, s in enumerate(self.summands.get(pos, ())):
            if s.name == name:
                return k
        raise KeyError(f"no summand {name!r} at {pos}")

    @cached_property
    def _sums(self) -> dict[Pos, DirectSum]:
        return {p: direct_sum([s.group for s in ss]) for p, ss in self.summands.items()}

    def _sum(self, pos: Pos) -> DirectSum:
        return self._sums.get(pos) or direct_sum([])

    def _assemble(self, src: Pos, tgt: Pos, blocks: Blocks | None) -> GroupHom:
        s, t = self._sum(src), self._sum(tgt)
        if not blocks:
            return GroupHom.zero(s.group, t.group)
        if s.group.is_free and t.group.is_free:
            offs_s = _offsets(self.summands[src])
            offs_t = _offsets(self.summands[tgt])
            rows: list[dict[int, int]] = [{} for _ in range(t.group.ngens)]
            for (ti, si), h in blocks.items():
                r0, c0 = offs_t[ti], offs_s[si]
                for r, row in enumerate(h.rows):
                    dst = rows[r0 + r]
                    for c, v in row.items():
                        dst[c0 + c] = dst.get(c0 + c, 0) + v
            return GroupHom(s.group, t.group, rows=rows, check=False)
        total = GroupHom.zero(s.group, t.group)
        for (ti, si), h in blocks.items():
            total = total + t.injections[ti] @ h @ s.projections[si]
        return total

    def D(self, i: int, j: int) -> GroupHom:
        """Horizontal ``L_{i+1,j} -> L_ij``."""
        return self._assemble((i + 1, j), (i, j), self.horizontal.get((i, j)))

    def d(self, i: int, j: int) -> GroupHom:
        """Vertical ``L_{i,j+1} -> L_ij``."""
        return self._assemble((i, j + 1), (i, j), self.vertical.get((i, j)))

    def block(self, src: Pos, src_name: str, tgt: Pos, tgt_name: str) -> GroupHom:
        """The block of ``D`` or ``d`` between two named summands."""
        if (src[0] - 1, src[1]) == tgt:
            table = self.horizontal.get(tgt, {})
        elif (src[0], src[1] - 1) == tgt:
            table = self.vertical.get(tgt, {})
        else:
            raise ValueError(f"{src} does not map to {tgt}")
        si, ti = self.summand_index(src, src_name), self.summand_index(tgt, tgt_name)
        h = table.get((ti, si))
        if h is None:
            return GroupHom.zero(self.summands[src][si].group, self.summands[tgt][ti].group)
        return h

    def square_defects(self) -> dict[Pos, bool]:
        """For each square with corner ``L_{i+1,j+1}``, whether it anticommutes."""
        out = {}
        for (i, j) in self.positions():
            if (i + 1, j + 1) not in self.summands:
                continue
            lhs = self.D(i, j) @ self.d(i + 1, j)
            rhs = self.d(i, j) @ self.D(i, j + 1)
            out[(i, j)] = (lhs + rhs).is_zero()
        return out

    def truncated(self, max_degree: int) -> Bicomplex:
        """Drop every position with ``i + j > max_degree``."""
        keep = {p: s for p, s in self.summands.items() if sum(p) <= max_degree}
        return Bicomplex(
            keep,
            {p: b for p, b in self.horizontal.items() if p in keep and (p[0] + 1, p[1]) in keep},
            {p: b for p, b in self.vertical.items() if p in keep and (p[0], p[1] + 1) in keep},
            designated=self.designated,
        )


def _offsets(summands) -> list[int]:
    out, acc = [], 0
    for s in summands:
        out.append(acc)
        acc += s.group.ngens
    return out


# --------------------------------------------------------------------------
# total complex


@dataclass(frozen=True)
class Block:
    pos: Pos
    summand: int
    name: str
    offset: int
    size: int


class TotalComplex(ChainComplex):
    """``Tot_n = sum_{i+j=n} L_ij`` with ``𝔻 = D + d``; positions ordered by ``i`` descending.

    ``blocks[n]`` records which generator range of ``Tot_n`` belongs to which
    summand (meaningful when the components are free).
    """

    def __init__(self, bicomplex: Bicomplex, low, groups, diffs, blocks, sums):
        super().__init__(low, groups, diffs, check=False)
        self.bicomplex = bicomplex
        self.blocks = blocks
        self._pos_sums = sums

    def block(self, n: int, name: str, pos: Pos | None = None) -> Block:
        for b in self.blocks.get(n, ()):
            if b.name == name and (pos is None or b.pos == pos):
                return b
        raise KeyError(f"no block {name!r} in degree {n}")

    def position_blocks(self, n: int, pos: Pos) -> list[Block]:
        return [b for b in self.blocks.get(n, ()) if b.pos == pos]

    def truncated(self, n_max: int) -> TotalComplex:
        return total_complex(self.bicomplex.truncated(n_max), check=False)

    def __hash__(self) -> int:
        return ChainComplex.__hash__(self)


def total_complex(bc: Bicomplex, *, check: bool = True) -> TotalComplex:
    if check:
        bad = [p for p, ok in bc.square_defects().items() if not ok]
        if bad:
            raise BicomplexInvalid(f"squares at {bad} do not anticommute")
    positions = bc.positions()
    if not positions:
        return TotalComplex(bc, 0, (), (), {}, {})
    degrees = range(min(sum(p) for p in positions), max(sum(p) for p in positions) + 1)
    layout: dict[int, list[Pos]] = {
        n: sorted((p for p in positions if sum(p) == n), key=lambda p: -p[0]) for n in degrees
    }
    sums: dict[int, DirectSum] = {}
    blocks: dict[int, tuple[Block, ...]] = {}
    for n in degrees:
        pos_groups = [bc.component(*p) for p in layout[n]]
        sums[n] = direct_sum(pos_groups)
        offs = _offsets([Summand("", g) for g in pos_groups])
        bl = []
        for p, off in zip(layout[n], offs):
            inner = 0
            for k, s in enumerate(bc.summands[p]):
                bl.append(Block(p, k, s.name, off + inner, s.group.ngens))
                inner += s.group.ngens
        blocks[n] = tuple(bl)
    groups = [sums[n].group for n in degrees]
    diffs = []
    for n in list(degrees)[1:]:
        src, tgt = sums[n], sums[n - 1]
        free = src.group.is_free and tgt.group.is_free
        rows: list[dict[int, int]] = [{} for _ in range(tgt.group.ngens)]
        total = GroupHom.zero(src.group, tgt.group)
        soffs = _offsets([Summand("", bc.component(*p)) for p in layout[n]])
        toffs = _offsets([Summand("", bc.component(*p)) for p in layout[n - 1]])
        tindex = {p: k for k, p in enumerate(layout[n - 1])}
        for sk, (i, j) in enumerate(layout[n]):
            for tp, h in (((i - 1, j), bc.D(i - 1, j)), ((i, j - 1), bc.d(i, j - 1))):
                if tp not in tindex or h.is_zero():
                    continue
                tk = tindex[tp]
                if free:
                    for r, row in enumerate(h.rows):
                        dst = rows[toffs[tk] + r]
                        for c, v in row.items():
                            dst[soffs[sk] + c] = dst.get(soffs[sk] + c, 0) + v
                else:
                    total = total + tgt.injections[tk] @ h @ src.projections[sk]
        if free:
            total = GroupHom(src.group, tgt.group, rows=rows, check=False)
        diffs.append(total)
    tot = TotalComplex(bc, degrees.start, groups, diffs, blocks, sums)
    if check:
        for k in range(len(diffs) - 1):
            if not (diffs[k] @ diffs[k + 1]).is_zero():
                raise BicomplexInvalid(f"𝔻∘𝔻 is nonzero at degree {degrees.start + k + 2}")
    return tot


# --------------------------------------------------------------------------
# tensor products


def _hom_tensor(f: GroupHom, g: GroupHom) -> GroupHom:
    if all(x.is_free for x in (f.source, f.target, g.source, g.target)):
        return kronecker(f, g)
    return tensor_hom(
        f, g, TensorGroup(f.source, g.source), TensorGroup(f.target, g.target)
    )


def _complex_as_bicomplex(c: ChainComplex, name: str, horizontal: bool) -> Bicomplex:
    summands, maps = {}, {}
    for n in c.degrees():
        if c.group(n).is_trivial:
            continue
        pos = (n, 0) if horizontal else (0, n)
        summands[pos] = [Summand(f"{name}{n}", c.group(n))]
    for n in c.degrees():
        pos, src = ((n - 1, 0), (n, 0)) if horizontal else ((0, n - 1), (0, n))
        if pos in summands and src in summands and not c.d(n).is_zero():
            maps[pos] = {(0, 0): c.d(n)}
    if horizontal:
        return Bicomplex(summands, maps, {})
    return Bicomplex(summands, {}, maps)


def tensor_complexes(p, q, *, max_degree: int | None = None) -> Bicomplex:
    """Tensor product as a bicomplex.

    For two chain complexes, ``P`` runs horizontally and ``Q`` vertically,
    with ``D = d^P ⊗ id`` and ``d = (-1)^i id ⊗ d^Q``.  For two bicomplexes
    the result is bigraded by the sum of positions, with Koszul signs by
    total degree: ``D(x⊗y) = Dx⊗y + (-1)^|x| x⊗Dy`` and likewise for ``d``.
    ``max_degree`` omits positions of total degree above it.
    """
    if not isinstance(p, Bicomplex):
        p = _complex_as_bicomplex(as_complex(p), "P", horizontal=True)
    if not isinstance(q, Bicomplex):
        q = _complex_as_bicomplex(as_complex(q), "Q", horizontal=False)
    # summand list per target position, ordered by i1 descending then j1 ascending
    pairs: dict[Pos, list[tuple[Pos, int, Pos, int]]] = {}
    for p1 in sorted(p.summands, key=lambda x: (-x[0], x[1])):
        for p2 in sorted(q.summands, key=lambda x: (-x[0], x[1])):
            pos = (p1[0] + p2[0], p1[1] + p2[1])
            if max_degree is not None and sum(pos) > max_degree:
                continue
            for s1 in range(len(p.summands[p1])):
                for s2 in range(len(q.summands[p2])):
                    pairs.setdefault(pos, []).append((p1, s1, p2, s2))
    summands = {
        pos: [p.summands[a][s].tensor(q.summands[b][t]) for a, s, b, t in lst]
        for pos, lst in pairs.items()
    }
    index = {pos: {key: k for k, key in enumerate(lst)} for pos, lst in pairs.items()}

    horizontal: dict[Pos, Blocks] = {}
    vertical: dict[Pos, Blocks] = {}
    for pos, lst in pairs.items():
        for src_k, (p1, s1, p2, s2) in enumerate(lst):
            x = p.summands[p1][s1]
            y = q.summands[p2][s2]
            sign = -1 if sum(p1) % 2 else 1
            for step, table, left, right in (
                ((1, 0), horizontal, p.horizontal, q.horizontal),
                ((0, 1), vertical, p.vertical, q.vertical),
            ):
                tgt = (pos[0] - step[0], pos[1] - step[1])
                if tgt not in index:
                    continue
                # differential on the left factor
                lp = (p1[0] - step[0], p1[1] - step[1])
                for (ti, si), h in left.get(lp, {}).items():
                    if si != s1:
                        continue
                    key = (lp, ti, p2, s2)
                    m = _hom_tensor(h, _identity(y.group))
                    _add_block(table, tgt, index[tgt][key], src_k, m)
                # differential on the right factor, Koszul sign
                rp = (p2[0] - step[0], p2[1] - step[1])
                for (ti, si), h in right.get(rp, {}).items():
                    if si != s2:
                        continue
                    key = (p1, s1, rp, ti)
                    m = _hom_tensor(_identity(x.group), h).scale(sign)
                    _add_block(table, tgt, index[tgt][key], src_k, m)
    return Bicomplex(summands, horizontal, vertical)


def _identity(g: FgAbGroup) -> GroupHom:
    return GroupHom.identity(g)


def _add_block(table: dict, tgt: Pos, ti: int, si: int, m: GroupHom) -> None:
    blocks = table.setdefault(tgt, {})
    if (ti, si) in blocks:
        blocks[(ti, si)] = blocks[(ti, si)] + m
    else:
        blocks[(ti, si)] = m


# --------------------------------------------------------------------------
# condition checks


@dataclass(frozen=True)
class ConditionResult:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class ConditionReport:
    results: tuple[ConditionResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def failures(self) -> list[ConditionResult]:
        return [r for r in self.results if not r.ok]

    def __getitem__(self, name: str) -> ConditionResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


@dataclass(frozen=True)
class ExactRow:
    """Summands ``top -> middle -> bottom`` along consecutive positions."""

    positions: tuple[Pos, Pos, Pos]
    names: tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]


@dataclass(frozen=True)
class Square:
    """Corner summand, two intermediate summands, and the final summand."""

    corner: tuple[Pos, str]
    via: tuple[tuple[Pos, str], tuple[Pos, str]]
    end: tuple[Pos, str]


def _restricted(bc: Bicomplex, src: Pos, src_names, tgt: Pos, tgt_names) -> GroupHom:
    from .abgroup import FgAbGroup as _G

    rows_total = sum(bc.summands[tgt][bc.summand_index(tgt, n)].group.ngens for n in tgt_names)
    cols_total = sum(bc.summands[src][bc.summand_index(src, n)].group.ngens for n in src_names)
    rows: list[dict[int, int]] = [{} for _ in range(rows_total)]
    c0 = 0
    for sn in src_names:
        r0 = 0
        for tn in tgt_names:
            h = bc.block(src, sn, tgt, tn)
            for r, row in enumerate(h.rows):
                for c, v in row.items():
                    rows[r0 + r][c0 + c] = v
            r0 += h.target.ngens
        c0 += bc.summands[src][bc.summand_index(src, sn)].group.ngens
    return GroupHom(_G(cols_total), _G(rows_total), rows=rows, check=False)


def check_conditions(bc: Bicomplex) -> ConditionReport:
    """Anticommutativity of every square plus any designated rows and squares."""
    results = []
    for pos, ok in sorted(bc.square_defects().items()):
        results.append(ConditionResult(f"square{pos}", ok))
    for name, spec in bc.designated.items():
        if isinstance(spec, ExactRow):
            (p2, p1, p0), (n2, n1, n0) = spec.positions, spec.names
            top = _restricted(bc, p2, n2, p1, n1)
            bottom = _restricted(bc, p1, n1, p0, n0)
            if not (bottom @ top).is_zero():
                results.append(ConditionResult(name, False, "composite is nonzero"))
                continue
            row = ChainComplex(0, (bottom.target, bottom.source, top.source), (bottom, top))
            h = homology(row, 1)
            results.append(ConditionResult(name, h.is_trivial, f"middle homology {h}"))
        elif isinstance(spec, Square):
            (cp, cn), (vp1, vn1), (vp2, vn2), (ep, en) = spec.corner, *spec.via, spec.end
            path1 = bc.block(vp1, vn1, ep, en) @ bc.block(cp, cn, vp1, vn1)
            path2 = bc.block(vp2, vn2, ep, en) @ bc.block(cp, cn, vp2, vn2)
            ok = (path1 + path2).is_zero()
            results.append(ConditionResult(name, ok, "" if ok else "paths do not cancel"))
    return ConditionReport(tuple(results))
