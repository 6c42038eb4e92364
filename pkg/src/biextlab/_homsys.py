"""Linear systems whose unknowns are homomorphisms.

Unknowns live in Hom groups; each equation is a sum of linear maps from the
unknowns into another Hom group.  The solution set is a kernel, and an
optional gauge action turns it into a subquotient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .abgroup import (
    FgAbGroup,
    GroupHom,
    HomGroup,
    Solver,
    cokernel_data,
    direct_sum,
    kernel,
)
from . import _lattice as lat


@dataclass
class LinearSystem:
    unknowns: list[HomGroup]
    equations: list[tuple[FgAbGroup, dict[int, GroupHom]]] = field(default_factory=list)

    def add_equation(self, target: FgAbGroup, terms: dict[int, GroupHom]) -> None:
        """Require ``sum(terms[k](x_k)) == 0`` in ``target``."""
        if not target.is_trivial:
            self.equations.append((target, terms))

    def solve(self, gauge: Sequence[tuple[FgAbGroup, dict[int, GroupHom]]] = ()) -> Solution:
        """Solutions modulo the images of the gauge maps (each ``{unknown: map}``)."""
        usum = direct_sum([h.group for h in self.unknowns])
        esum = direct_sum([t for t, _ in self.equations])
        phi = GroupHom.zero(usum.group, esum.group)
        for e, (_, terms) in enumerate(self.equations):
            for k, m in terms.items():
                phi = phi + esum.injections[e] @ m @ usum.projections[k]
        zgroup, zincl = kernel(phi)
        if gauge:
            solver = Solver(zincl)
            cols = []
            for ggroup, gterms in gauge:
                total = GroupHom.zero(ggroup, usum.group)
                for k, m in gterms.items():
                    total = total + usum.injections[k] @ m
                for j in range(ggroup.ngens):
                    y = total(tuple(int(i == j) for i in range(ggroup.ngens)))
                    x = solver.solve(y.coords)
                    if x is None:
                        raise ArithmeticError("gauge does not preserve the solution set")
                    cols.append({i: v for i, v in enumerate(x) if v})
            gmap = GroupHom(
                FgAbGroup(len(cols)), zgroup, rows=lat.columns_to_rows(zgroup.ngens, cols)
            )
            quot = cokernel_data(gmap)
        else:
            quot = cokernel_data(GroupHom.zero(FgAbGroup(), zgroup))
        return Solution(self.unknowns, usum, zgroup, zincl, quot)


@dataclass
class Solution:
    unknowns: list[HomGroup]
    usum: object
    zgroup: FgAbGroup
    zincl: GroupHom
    quot: object

    @property
    def group(self) -> FgAbGroup:
        return self.quot.group

    def witness(self, coords: Sequence[int]) -> tuple[GroupHom, ...]:
        """A representative tuple of homomorphisms for a class."""
        z = self.quot.lift(coords)
        u = self.zincl.apply_sparse(z)
        out = []
        for h, p in zip(self.unknowns, self.usum.projections):
            out.append(h.hom(p.apply_vector(u)))
        return tuple(out)

    def witnesses(self) -> list[tuple[GroupHom, ...]]:
        n = self.group.ngens
        return [self.witness([int(i == k) for i in range(n)]) for k in range(n)]

    def classify(self, values: Sequence[GroupHom]) -> tuple[int, ...]:
        """Class of a solution tuple; raises if it is not a solution."""
        vec: dict[int, int] = {}
        for h, inj, f in zip(self.unknowns, self.usum.injections, values):
            c = h.coords(f)
            lat._axpy_into(vec, inj.apply_sparse({i: x for i, x in enumerate(c) if x}), 1)
        z = Solver(self.zincl).solve(self.usum.group.reduce(vec.get(i, 0) for i in range(self.usum.group.ngens)))
        if z is None:
            raise ValueError("values do not satisfy the system")
        return self.quot.projection(z).coords
