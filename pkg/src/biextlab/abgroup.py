"""Finitely generated abelian groups in invariant-factor form and their maps."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import gcd, prod
from typing import Iterable, Sequence

from . import _lattice as lat
from ._smith import smith
from .errors import IllDefinedHom, InfiniteGroup

Matrix = tuple[tuple[int, ...], ...]


# --------------------------------------------------------------------------
# groups and elements


@dataclass(frozen=True)
class FgAbGroup:
    """``Z^free_rank + Z/d_1 + ... + Z/d_k`` with ``d_1 | d_2 | ...`` and ``d_i >= 2``."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"torsion factor {d} must be at least 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"torsion {self.torsion} is not a divisibility chain")

    @classmethod
    def cyclic(cls, n: int) -> FgAbGroup:
        """``Z/n``; ``n = 0`` gives ``Z`` and ``n = 1`` the trivial group."""
        n = abs(n)
        if n == 0:
            return cls(1)
        return cls(0, (n,) if n > 1 else ())

    @classmethod
    def free(cls, rank: int) -> FgAbGroup:
        return cls(rank)

    @classmethod
    def trivial(cls) -> FgAbGroup:
        return cls()

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def orders(self) -> tuple[int, ...]:
        """Order of each normal-form generator, 0 meaning infinite."""
        return (0,) * self.free_rank + self.torsion

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.ngens == 0

    @property
    def is_free(self) -> bool:
        return not self.torsion

    @property
    def order(self) -> int:
        if not self.is_finite:
            raise InfiniteGroup(f"{self} is infinite")
        return prod(self.torsion)

    def invariants(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    def zero(self) -> GroupElement:
        return GroupElement(self, (0,) * self.ngens)

    def element(self, coords: Sequence[int]) -> GroupElement:
        return GroupElement(self, tuple(coords))

    def gens(self) -> list[GroupElement]:
        return [self.element([int(i == k) for i in range(self.ngens)]) for k in range(self.ngens)]

    def reduce(self, coords: Iterable[int]) -> tuple[int, ...]:
        return tuple(c % o if o else c for c, o in zip(coords, self.orders))

    def __str__(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class GroupElement:
    owner: FgAbGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.owner.ngens:
            raise ValueError("coordinate vector has the wrong length")
        object.__setattr__(self, "coords", self.owner.reduce(self.coords))

    def _check(self, other: GroupElement) -> None:
        if other.owner != self.owner:
            raise ValueError("elements of different groups")

    def __add__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        return GroupElement(self.owner, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> GroupElement:
        return GroupElement(self.owner, tuple(-a for a in self.coords))

    def __sub__(self, other: GroupElement) -> GroupElement:
        return self + (-other)

    def __rmul__(self, k: int) -> GroupElement:
        return GroupElement(self.owner, tuple(k * a for a in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)


def enumerate_elements(group: FgAbGroup) -> tuple[GroupElement, ...]:
    """All elements of a finite group, lexicographic in normal coordinates."""
    if not group.is_finite:
        raise InfiniteGroup(f"cannot enumerate the infinite group {group}")
    return tuple(
        GroupElement(group, c) for c in itertools.product(*(range(d) for d in group.torsion))
    )


# --------------------------------------------------------------------------
# homomorphisms


def _normalize_rows(target: FgAbGroup, rows) -> tuple[dict[int, int], ...]:
    out = []
    for row, e in zip(rows, target.orders):
        if e:
            out.append({j: v % e for j, v in row.items() if v % e})
        else:
            out.append({j: v for j, v in row.items() if v})
    return tuple(out)


class GroupHom:
    """A homomorphism given by an integer matrix (rows: target gens, columns: source gens).

    Entries in rows of torsion target generators are stored reduced, so two
    homomorphisms are equal exactly when their stored matrices agree.
    """

    __slots__ = ("source", "target", "rows", "__dict__")

    def __init__(self, source: FgAbGroup, target: FgAbGroup, matrix=None, *, rows=None, check=True):
        self.source = source
        self.target = target
        if rows is None:
            matrix = [list(r) for r in (matrix or [])]
            if target.ngens == 0:
                matrix = []
            if len(matrix) != target.ngens or any(len(r) != source.ngens for r in matrix):
                raise ValueError(
                    f"matrix shape does not match {target.ngens}x{source.ngens}"
                )
            rows = lat.sparse_rows(matrix)
        elif len(rows) != target.ngens:
            raise ValueError("row count does not match target")
        self.rows = _normalize_rows(target, rows)
        if check:
            self._check_well_defined()

    def _check_well_defined(self) -> None:
        src_orders = self.source.orders
        for i, (row, e) in enumerate(zip(self.rows, self.target.orders)):
            for j, m in row.items():
                d = src_orders[j]
                if not d:
                    continue
                if (e == 0 and d * m != 0) or (e and (d * m) % e):
                    tgt = f"Z/{e}" if e else "Z"
                    raise IllDefinedHom(
                        f"generator {j} has order {d} but its image coordinate {m} "
                        f"against target generator {i} ({tgt}) is not killed by {d}"
                    )

    @classmethod
    def zero(cls, source: FgAbGroup, target: FgAbGroup) -> GroupHom:
        return cls(source, target, rows=[{} for _ in range(target.ngens)], check=False)

    @classmethod
    def identity(cls, group: FgAbGroup) -> GroupHom:
        return cls(group, group, rows=[{i: 1} for i in range(group.ngens)], check=False)

    @property
    def matrix(self) -> Matrix:
        return lat.dense_rows(self.rows, self.source.ngens)

    def column(self, j: int) -> dict[int, int]:
        return {i: r[j] for i, r in enumerate(self.rows) if j in r}

    def columns(self) -> list[dict[int, int]]:
        cols: list[dict[int, int]] = [{} for _ in range(self.source.ngens)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                cols[j][i] = v
        return cols

    def __call__(self, x):
        if isinstance(x, GroupElement):
            if x.owner != self.source:
                raise ValueError("element is not in the source")
            coords = x.coords
        else:
            coords = tuple(x)
        vec = {j: c for j, c in enumerate(coords) if c}
        return GroupElement(self.target, self._apply_vec(vec))

    def apply_vector(self, vec) -> tuple[int, ...]:
        """Image of a coordinate vector (sparse dict or dense sequence), reduced."""
        if not isinstance(vec, dict):
            vec = {j: v for j, v in enumerate(vec) if v}
        return self._apply_vec(vec)

    def _apply_vec(self, vec: dict[int, int]) -> tuple[int, ...]:
        return self.target.reduce(
            sum(v * vec[j] for j, v in r.items() if j in vec) for r in self.rows
        )

    def apply_sparse(self, vec: dict[int, int]) -> dict[int, int]:
        out = {}
        for i, (r, e) in enumerate(zip(self.rows, self.target.orders)):
            s = sum(v * vec[j] for j, v in r.items() if j in vec)
            if e:
                s %= e
            if s:
                out[i] = s
        return out

    def compose(self, inner: GroupHom) -> GroupHom:
        """``self ∘ inner``."""
        if inner.target != self.source:
            raise ValueError(f"cannot compose: {inner.target} is not {self.source}")
        rows = []
        for r in self.rows:
            acc: dict[int, int] = {}
            for k, v in r.items():
                lat._axpy_into(acc, inner.rows[k], v)
            rows.append(acc)
        return GroupHom(inner.source, self.target, rows=rows, check=False)

    def __matmul__(self, inner: GroupHom) -> GroupHom:
        return self.compose(inner)

    def _same_shape(self, other: GroupHom) -> None:
        if self.source != other.source or self.target != other.target:
            raise ValueError("homomorphisms have different source or target")

    def __add__(self, other: GroupHom) -> GroupHom:
        self._same_shape(other)
        rows = []
        for a, b in zip(self.rows, other.rows):
            acc = dict(a)
            lat._axpy_into(acc, b, 1)
            rows.append(acc)
        return GroupHom(self.source, self.target, rows=rows, check=False)

    def __neg__(self) -> GroupHom:
        return self.scale(-1)

    def __sub__(self, other: GroupHom) -> GroupHom:
        return self + (-other)

    def scale(self, k: int) -> GroupHom:
        rows = [{j: k * v for j, v in r.items()} for r in self.rows]
        return GroupHom(self.source, self.target, rows=rows, check=False)

    def __rmul__(self, k: int) -> GroupHom:
        return self.scale(k)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupHom)
            and self.source == other.source
            and self.target == other.target
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.source, self.target, tuple(tuple(sorted(r.items())) for r in self.rows)))

    def is_zero(self) -> bool:
        return not any(self.rows)

    def __repr__(self) -> str:
        return f"GroupHom({self.source} -> {self.target}, {self.matrix})"

    # structural properties

    @cached_property
    def _kernel(self) -> KernelData:
        return kernel_data(self)

    @cached_property
    def _cokernel(self) -> CokernelData:
        return cokernel_data(self)

    def is_injective(self) -> bool:
        return self._kernel.group.is_trivial

    def is_surjective(self) -> bool:
        return self._cokernel.group.is_trivial

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()


def block_hom(source_parts, target_parts, blocks, source: FgAbGroup, target: FgAbGroup) -> GroupHom:
    """Assemble a map between free direct sums from blocks ``{(t, s): GroupHom}``.

    ``source_parts``/``target_parts`` are the generator offsets of each summand.
    """
    rows: list[dict[int, int]] = [{} for _ in range(target.ngens)]
    for (t, s), h in blocks.items():
        r0, c0 = target_parts[t], source_parts[s]
        for i, r in enumerate(h.rows):
            dst = rows[r0 + i]
            for j, v in r.items():
                dst[c0 + j] = dst.get(c0 + j, 0) + v
    return GroupHom(source, target, rows=rows, check=False)


# --------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SnfDecomposition:
    """``U @ M @ V == S`` with ``U``, ``V`` unimodular and ``S`` diagonal."""

    U: Matrix
    S: Matrix
    V: Matrix

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.U), len(self.V))

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.S[k][k] for k in range(min(self.shape)))


def snf(matrix: Sequence[Sequence[int]]) -> SnfDecomposition:
    """Smith normal form with transforms; deterministic for a given input."""
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    res = smith(m, n, lat.sparse_rows(matrix), want_u=True, want_v=True)
    u = lat.dense_rows(res.u_rows, m)
    v_cols = lat.dense_rows(res.v_cols, n)
    v = tuple(tuple(v_cols[j][i] for j in range(n)) for i in range(n))
    s = tuple(
        tuple(res.diag[i] if i == j and i < res.rank else 0 for j in range(n)) for i in range(m)
    )
    return SnfDecomposition(u, s, v)


# --------------------------------------------------------------------------
# presentations, kernels, cokernels


def _relation_columns(group: FgAbGroup, offset: int = 0) -> list[dict[int, int]]:
    return [{offset + i: d} for i, d in enumerate(group.orders) if d]


@dataclass(frozen=True)
class Presentation:
    """A quotient ``Z^n / relations`` identified with a normal-form group.

    ``to_normal`` sends the ``n`` ambient generators to normal coordinates,
    ``from_normal`` sends each normal generator to an ambient lift.
    """

    group: FgAbGroup
    to_normal: tuple[dict[int, int], ...]
    from_normal: tuple[dict[int, int], ...]

    @cached_property
    def _columns(self) -> list[dict[int, int]]:
        cols: list[dict[int, int]] = [{} for _ in range(self.ambient)]
        for i, row in enumerate(self.to_normal):
            for j, v in row.items():
                cols[j][i] = v
        return cols

    @property
    def ambient(self) -> int:
        return 1 + max((j for row in self.to_normal for j in row), default=-1)

    def normal_sparse(self, vec: dict[int, int]) -> dict[int, int]:
        cols = self._columns
        out: dict[int, int] = {}
        for j, c in vec.items():
            if c and j < len(cols):
                for i, v in cols[j].items():
                    out[i] = out.get(i, 0) + v * c
        orders = self.group.orders
        red = {}
        for i, v in out.items():
            v = v % orders[i] if orders[i] else v
            if v:
                red[i] = v
        return red

    def normal(self, vec: dict[int, int]) -> tuple[int, ...]:
        cols = self._columns
        out = [0] * self.group.ngens
        for j, c in vec.items():
            if c and j < len(cols):
                for i, v in cols[j].items():
                    out[i] += v * c
        return self.group.reduce(out)


def present(n: int, relations: list[dict[int, int]]) -> Presentation:
    q = lat.present(n, relations)
    return Presentation(FgAbGroup(q.free_rank, q.torsion), tuple(q.proj), tuple(q.sect))


def present_orders(orders: Sequence[int]) -> Presentation:
    """Normal form of ``Z/o_1 + Z/o_2 + ...`` (``o = 0`` for ``Z``) with change of basis."""
    return present(len(orders), [{i: o} for i, o in enumerate(orders) if o])


@dataclass(frozen=True)
class KernelData:
    group: FgAbGroup
    inclusion: GroupHom


@dataclass(frozen=True)
class CokernelData:
    group: FgAbGroup
    projection: GroupHom
    section: tuple[dict[int, int], ...]

    def lift(self, coords: Sequence[int]) -> dict[int, int]:
        """An ambient preimage of a normal-coordinate vector."""
        return lat.combine_cols(list(self.section), {k: c for k, c in enumerate(coords) if c})


def cokernel_data(f: GroupHom) -> CokernelData:
    gens = f.columns() + _relation_columns(f.target)
    pres = present(f.target.ngens, gens)
    proj = GroupHom(f.target, pres.group, rows=[dict(r) for r in pres.to_normal], check=False)
    return CokernelData(pres.group, proj, pres.from_normal)


def cokernel(f: GroupHom) -> tuple[FgAbGroup, GroupHom]:
    data = f._cokernel
    return data.group, data.projection


def kernel_data(f: GroupHom) -> KernelData:
    g, h = f.source, f.target
    n = g.ngens
    cols = f.columns() + [{i: e} for i, e in enumerate(h.orders) if e]
    rows = lat.columns_to_rows(h.ngens, cols)
    basis = lat.kernel_basis(h.ngens, len(cols), rows)
    gens = [{j: v for j, v in b.items() if j < n} for b in basis]
    gens = [x for x in gens if x]
    sub = lat.span(n, gens)
    r = len(sub.basis)
    rel_coords = []
    for rel in _relation_columns(g):
        c = sub.coords(rel)
        assert c is not None, "relation lattice must lie in the kernel lattice"
        rel_coords.append({k: x for k, x in enumerate(c) if x})
    pres = present(r, rel_coords)
    incl_cols = []
    for k, lift in enumerate(pres.from_normal):
        col = lat.combine_cols(sub.basis, lift)
        # free generators: orient so the leading coordinate is positive
        if k < pres.group.free_rank and col and col[min(col)] < 0:
            col = {i: -v for i, v in col.items()}
        incl_cols.append(col)
    rows_incl = lat.columns_to_rows(n, incl_cols)
    incl = GroupHom(pres.group, g, rows=rows_incl, check=False)
    return KernelData(pres.group, incl)


def kernel(f: GroupHom) -> tuple[FgAbGroup, GroupHom]:
    data = f._kernel
    return data.group, data.inclusion


def image(f: GroupHom) -> tuple[FgAbGroup, GroupHom]:
    """Image of ``f`` with its inclusion into the target."""
    coimage = cokernel_data(kernel(f)[1])
    incl = descend(f, coimage)
    return coimage.group, incl


class Solver:
    """Solves ``f(x) = y`` for ``x`` in the source; reuses one Smith form."""

    def __init__(self, f: GroupHom):
        self.f = f
        n = f.source.ngens
        cols = f.columns() + [{i: e} for i, e in enumerate(f.target.orders) if e]
        self._n = n
        self._ncols = len(cols)
        rows = lat.columns_to_rows(f.target.ngens, cols)
        self._res = smith(f.target.ngens, len(cols), rows, want_u=True, want_v=True)

    def solve(self, y) -> tuple[int, ...] | None:
        if isinstance(y, GroupElement):
            y = y.coords
        vec = {i: c for i, c in enumerate(y) if c}
        res = self._res
        w: dict[int, int] = {}
        for k, row in enumerate(res.u_rows):
            s = sum(v * vec[j] for j, v in row.items() if j in vec)
            if k < res.rank:
                d = res.diag[k]
                if s % d:
                    return None
                if s:
                    w[k] = s // d
            elif s:
                return None
        x = lat.combine_cols(res.v_cols, w)
        return self.f.source.reduce(x.get(j, 0) for j in range(self._n))


def lift_through(f: GroupHom, g: GroupHom) -> GroupHom:
    """Find ``h`` with ``g ∘ h = f`` (``g`` typically injective)."""
    if f.target != g.target:
        raise ValueError("f and g must share a target")
    solver = Solver(g)
    cols = []
    for j in range(f.source.ngens):
        x = solver.solve(f(tuple(int(i == j) for i in range(f.source.ngens))).coords)
        if x is None:
            raise ValueError("f does not factor through g")
        cols.append({i: v for i, v in enumerate(x) if v})
    return GroupHom(f.source, g.source, rows=lat.columns_to_rows(g.source.ngens, cols))


def descend(f: GroupHom, quotient: CokernelData) -> GroupHom:
    """The map induced on a cokernel by ``f`` vanishing on the relations."""
    cols = []
    for lift in quotient.section:
        cols.append(f.apply_sparse(dict(lift)))
    return GroupHom(
        quotient.group, f.target, rows=lat.columns_to_rows(f.target.ngens, cols)
    )


@dataclass(frozen=True)
class DirectSum:
    group: FgAbGroup
    summands: tuple[FgAbGroup, ...]
    injections: tuple[GroupHom, ...]
    projections: tuple[GroupHom, ...]


def direct_sum(groups: Sequence[FgAbGroup]) -> DirectSum:
    offsets = list(itertools.accumulate((g.ngens for g in groups), initial=0))
    total = offsets[-1]
    if all(g.is_free for g in groups):
        whole = FgAbGroup(total)
        inj = tuple(
            GroupHom(g, whole, rows=[{i - off: 1} if off <= i < off + g.ngens else {} for i in range(total)], check=False)
            for g, off in zip(groups, offsets)
        )
        proj = tuple(
            GroupHom(whole, g, rows=[{off + i: 1} for i in range(g.ngens)], check=False)
            for g, off in zip(groups, offsets)
        )
        return DirectSum(whole, tuple(groups), inj, proj)
    rels = []
    for g, off in zip(groups, offsets):
        rels += _relation_columns(g, off)
    pres = present(total, rels)
    injections, projections = [], []
    for g, off in zip(groups, offsets):
        cols = [pres.normal_sparse({off + j: 1}) for j in range(g.ngens)]
        injections.append(
            GroupHom(g, pres.group, rows=lat.columns_to_rows(pres.group.ngens, cols), check=False)
        )
        pcols = []
        for lift in pres.from_normal:
            pcols.append({j - off: v for j, v in lift.items() if off <= j < off + g.ngens})
        projections.append(GroupHom(pres.group, g, rows=lat.columns_to_rows(g.ngens, pcols)))
    return DirectSum(pres.group, tuple(groups), tuple(injections), tuple(projections))


# --------------------------------------------------------------------------
# bifunctors


@dataclass(frozen=True)
class _RawPiece:
    """A cyclic summand ``Z/order`` of a bifunctor, before normalization."""

    index: tuple[int, int]
    order: int
    unit: int


class _RawGroup:
    def __init__(self, pieces: list[_RawPiece]):
        self.pieces = pieces
        self.where = {p.index: k for k, p in enumerate(pieces)}
        rels = [{k: p.order} for k, p in enumerate(pieces) if p.order]
        self.pres = present(len(pieces), rels)
        self.group = self.pres.group


class HomGroup:
    """``Hom(A, B)`` with coordinates and a basis of homomorphism witnesses.

    Entry ``(i, j)`` of a homomorphism matrix (target gen ``i``, source gen
    ``j``) ranges over ``Z`` or a cyclic group; the raw description is the
    direct sum of these, normalized once.
    """

    def __init__(self, source: FgAbGroup, target: FgAbGroup):
        self.source = source
        self.target = target
        pieces = []
        for i, e in enumerate(target.orders):
            for j, d in enumerate(source.orders):
                if d == 0:
                    pieces.append(_RawPiece((i, j), e, 1))
                elif e:
                    g = gcd(d, e)
                    if g > 1:
                        pieces.append(_RawPiece((i, j), g, e // g))
        self._raw = _RawGroup(pieces)
        self.group = self._raw.group

    def _raw_vector(self, f: GroupHom) -> dict[int, int]:
        vec = {}
        for i, row in enumerate(f.rows):
            for j, m in row.items():
                k = self._raw.where[(i, j)]
                vec[k] = m // self._raw.pieces[k].unit
        return vec

    def coords(self, f: GroupHom) -> tuple[int, ...]:
        if f.source != self.source or f.target != self.target:
            raise ValueError("homomorphism has the wrong source or target")
        return self._raw.pres.normal(self._raw_vector(f))

    def hom(self, coords: Sequence[int]) -> GroupHom:
        vec = lat.combine_cols(
            list(self._raw.pres.from_normal), {k: c for k, c in enumerate(coords) if c}
        )
        rows: list[dict[int, int]] = [{} for _ in range(self.target.ngens)]
        for k, c in vec.items():
            p = self._raw.pieces[k]
            i, j = p.index
            rows[i][j] = c * p.unit
        return GroupHom(self.source, self.target, rows=rows, check=False)

    @cached_property
    def basis(self) -> tuple[GroupHom, ...]:
        n = self.group.ngens
        return tuple(self.hom([int(i == k) for i in range(n)]) for k in range(n))

    def precompose(self, f: GroupHom, other: HomGroup) -> GroupHom:
        """``Hom(self.source, B) -> Hom(f.source, B)``, ``φ ↦ φ ∘ f``; ``other`` is the codomain."""
        cols = [
            {i: v for i, v in enumerate(other.coords(phi.compose(f))) if v} for phi in self.basis
        ]
        return GroupHom(self.group, other.group, rows=lat.columns_to_rows(other.group.ngens, cols))

    def postcompose(self, g: GroupHom, other: HomGroup) -> GroupHom:
        """``Hom(A, self.target) -> Hom(A, g.target)``, ``φ ↦ g ∘ φ``."""
        cols = [
            {i: v for i, v in enumerate(other.coords(g.compose(phi))) if v} for phi in self.basis
        ]
        return GroupHom(self.group, other.group, rows=lat.columns_to_rows(other.group.ngens, cols))


def hom_group(a: FgAbGroup, b: FgAbGroup) -> FgAbGroup:
    return HomGroup(a, b).group


class ExtGroup:
    """``Ext^1(A, B)`` from the resolution ``0 -> Z^t -> Z^n -> A -> 0``.

    A class is represented by a cocycle: one element of ``B`` (as a
    coordinate tuple) per torsion generator of ``A``.
    """

    def __init__(self, source: FgAbGroup, target: FgAbGroup):
        self.source = source
        self.target = target
        self._tors = list(range(source.free_rank, source.ngens))
        pieces = []
        for jj, j in enumerate(self._tors):
            d = source.orders[j]
            for i, e in enumerate(target.orders):
                g = gcd(d, e)
                if g > 1:
                    pieces.append(_RawPiece((jj, i), g, 1))
        self._raw = _RawGroup(pieces)
        self.group = self._raw.group

    @property
    def cocycle_length(self) -> int:
        return len(self._tors)

    def class_of(self, cocycle: Sequence[Sequence[int]]) -> tuple[int, ...]:
        vec = {}
        for jj, b in enumerate(cocycle):
            for i, c in enumerate(b):
                k = self._raw.where.get((jj, i))
                if k is not None and c:
                    vec[k] = c
        return self._raw.pres.normal(vec)

    def representative(self, coords: Sequence[int]) -> list[tuple[int, ...]]:
        vec = lat.combine_cols(
            list(self._raw.pres.from_normal), {k: c for k, c in enumerate(coords) if c}
        )
        out = [[0] * self.target.ngens for _ in self._tors]
        for k, c in vec.items():
            jj, i = self._raw.pieces[k].index
            out[jj][i] = c
        return [self.target.reduce(b) for b in out]

    def pullback(self, f: GroupHom, other: ExtGroup) -> GroupHom:
        """Map ``Ext(self.source, B) -> Ext(f.source, B)`` induced by ``f``."""
        a, a2 = self.source, f.source
        # lift f to the relation modules: N[jj][jj2]
        lift = []
        for j2 in other._tors:
            d2 = a2.orders[j2]
            col = {}
            for jj, j in enumerate(self._tors):
                m = f.rows[j].get(j2, 0)
                if m:
                    col[jj] = d2 * m // a.orders[j]
            lift.append(col)
        cols = []
        for k in range(self.group.ngens):
            rep = self.representative([int(i == k) for i in range(self.group.ngens)])
            new = []
            for col in lift:
                acc = [0] * self.target.ngens
                for jj, c in col.items():
                    for i, x in enumerate(rep[jj]):
                        acc[i] += c * x
                new.append(acc)
            cols.append({i: v for i, v in enumerate(other.class_of(new)) if v})
        return GroupHom(self.group, other.group, rows=lat.columns_to_rows(other.group.ngens, cols))

    def pushforward(self, g: GroupHom, other: ExtGroup) -> GroupHom:
        """Map ``Ext(A, self.target) -> Ext(A, g.target)`` induced by ``g``."""
        cols = []
        for k in range(self.group.ngens):
            rep = self.representative([int(i == k) for i in range(self.group.ngens)])
            new = [g(b).coords for b in rep]
            cols.append({i: v for i, v in enumerate(other.class_of(new)) if v})
        return GroupHom(self.group, other.group, rows=lat.columns_to_rows(other.group.ngens, cols))


def ext_group(a: FgAbGroup, b: FgAbGroup) -> FgAbGroup:
    return ExtGroup(a, b).group


class TensorGroup:
    """``A ⊗ B`` with the universal bilinear map."""

    def __init__(self, left: FgAbGroup, right: FgAbGroup):
        self.left = left
        self.right = right
        pieces = []
        for i, d in enumerate(left.orders):
            for j, e in enumerate(right.orders):
                g = gcd(d, e)
                if g != 1:
                    pieces.append(_RawPiece((i, j), g, 1))
        self._raw = _RawGroup(pieces)
        self.group = self._raw.group

    def bilinear(self, x, y) -> GroupElement:
        """Image of ``(x, y)`` under ``A x B -> A ⊗ B``."""
        xc = x.coords if isinstance(x, GroupElement) else tuple(x)
        yc = y.coords if isinstance(y, GroupElement) else tuple(y)
        vec = {}
        for (i, j), k in self._raw.where.items():
            c = xc[i] * yc[j]
            if c:
                vec[k] = c
        return GroupElement(self.group, self._raw.pres.normal(vec))


def tensor_group(a: FgAbGroup, b: FgAbGroup) -> FgAbGroup:
    return TensorGroup(a, b).group


def tensor_hom(f: GroupHom, g: GroupHom, src: TensorGroup, tgt: TensorGroup) -> GroupHom:
    """``f ⊗ g: src -> tgt`` where ``src = f.source ⊗ g.source`` and ``tgt = f.target ⊗ g.target``."""
    fcols, gcols = f.columns(), g.columns()
    cols = []
    for lift in src._raw.pres.from_normal:
        vec: dict[int, int] = {}
        for k, c in lift.items():
            i, j = src._raw.pieces[k].index
            for a, x in fcols[i].items():
                for b, y in gcols[j].items():
                    t = tgt._raw.where.get((a, b))
                    if t is not None:
                        vec[t] = vec.get(t, 0) + c * x * y
        cols.append({i: v for i, v in enumerate(tgt._raw.pres.normal(vec)) if v})
    return GroupHom(src.group, tgt.group, rows=lat.columns_to_rows(tgt.group.ngens, cols), check=False)


def kronecker(f: GroupHom, g: GroupHom) -> GroupHom:
    """``f ⊗ g`` between free groups, in the row-major product basis."""
    fr, gr = f.rows, g.rows
    m2 = g.source.ngens
    rows = []
    for a in fr:
        for b in gr:
            rows.append({j1 * m2 + j2: x * y for j1, x in a.items() for j2, y in b.items()})
    src = FgAbGroup(f.source.ngens * g.source.ngens)
    tgt = FgAbGroup(f.target.ngens * g.target.ngens)
    return GroupHom(src, tgt, rows=rows, check=False)


def tor_group(a: FgAbGroup, b: FgAbGroup) -> FgAbGroup:
    pieces = []
    for i, d in enumerate(a.torsion):
        for j, e in enumerate(b.torsion):
            g = gcd(d, e)
            if g > 1:
                pieces.append(_RawPiece((i, j), g, 1))
    return _RawGroup(pieces).group


def group_from_orders(orders: Sequence[int]) -> FgAbGroup:
    """Normal form of ``Z/o_1 + Z/o_2 + ...`` (0 meaning ``Z``)."""
    return present_orders(orders).group
