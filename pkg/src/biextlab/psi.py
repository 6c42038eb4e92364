"""The split linear model of Ψ⁰ and Ψ¹, and the two-row spectral sequence.

For a total complex ``T`` with free components in degrees 0..2 and blocks
``L00``, ``L01``, ``L10``, ``L02``, ``L11``, ``L20``, and a target
``K = [A --u--> B]``:

* Ψ⁰ is the group of pairs ``f0: L00 -> B``, ``f1: L10 -> A`` with
  ``f0∘d00 = 0``, ``u∘f1 = f0∘D00`` and ``f1∘D10 = 0``;
* Ψ¹ is the group of triples ``α: L01 -> B``, ``β: L10 -> B``, ``γ: L20 -> A``
  with ``(β, α)∘𝔻1 = u∘γ`` on ``L20`` and ``= 0`` on ``L02 + L11``, modulo
  ``(h∘d00, h∘D00, 0)`` for ``h: L00 -> B``.

Both are computed through quotients of ``T`` that depend only on ``T``, so
the expensive part is shared by every target.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from . import _lattice as lat
from ._homsys import LinearSystem, Solution
from .abgroup import (
    CokernelData,
    ExtGroup,
    FgAbGroup,
    GroupHom,
    HomGroup,
    cokernel_data,
    descend,
    direct_sum,
    kernel_data,
)
from .bicomplex import TotalComplex
from .complex import ChainComplex, TwoTermComplex, as_complex, homology, to_cohomological
from .errors import BlockLabelsMissing


def _restrict_cols(h: GroupHom, offset: int, size: int, source: FgAbGroup) -> GroupHom:
    rows = [{j - offset: v for j, v in r.items() if offset <= j < offset + size} for r in h.rows]
    return GroupHom(source, h.target, rows=rows, check=False)


def _restrict_rows(h: GroupHom, offset: int, size: int, target: FgAbGroup) -> GroupHom:
    return GroupHom(h.source, target, rows=[dict(r) for r in h.rows[offset : offset + size]], check=False)


class PsiModel:
    """Per-``T`` data: block ranges and the quotients used by Ψ⁰ and Ψ¹."""

    def __init__(self, tot: ChainComplex):
        if not isinstance(tot, TotalComplex):
            raise BlockLabelsMissing("Ψ groups need a total complex with block labels")
        for n in (0, 1, 2):
            if not tot.group(n).is_free:
                raise ValueError(f"component of degree {n} is not free")
        self.tot = tot
        self.t0, self.t1, self.t2 = (tot.group(n) for n in (0, 1, 2))
        self.r00 = self._range(0, (0, 0))
        self.r01 = self._range(1, (0, 1))
        self.r10 = self._range(1, (1, 0))
        self.r20 = self._range(2, (2, 0))
        self.r11 = self._range(2, (1, 1))
        self.r02 = self._range(2, (0, 2))
        self.L00, self.L01, self.L10, self.L20 = (
            FgAbGroup(r[1]) for r in (self.r00, self.r01, self.r10, self.r20)
        )
        D0, D1 = tot.d(1), tot.d(2)
        self.d00 = _restrict_rows(_restrict_cols(D0, *self.r01, self.L01), *self.r00, self.L00)
        self.D00 = _restrict_rows(_restrict_cols(D0, *self.r10, self.L10), *self.r00, self.L00)
        D10_full = _restrict_cols(D1, *self.r20, self.L20)  # L20 -> Tot1
        self.D10 = _restrict_rows(D10_full, *self.r10, self.L10)
        self.D10_full = D10_full

    def _range(self, n: int, pos) -> tuple[int, int]:
        blocks = self.tot.position_blocks(n, pos)
        if not blocks:
            return (0, 0)
        return (blocks[0].offset, sum(b.size for b in blocks))

    # quotients shared by all targets

    @cached_property
    def q0(self) -> CokernelData:
        """``L00 / d00(L01)``."""
        return cokernel_data(self.d00)

    @cached_property
    def q10(self) -> CokernelData:
        """``L10 / D10(L20)``."""
        return cokernel_data(self.D10)

    @cached_property
    def q1(self) -> CokernelData:
        """``Tot_1 / 𝔻1(L11 + L02)``."""
        D1 = self.tot.d(2)
        keep = set(range(self.r11[0], self.r11[0] + self.r11[1])) | set(
            range(self.r02[0], self.r02[0] + self.r02[1])
        )
        rows = [{j: v for j, v in r.items() if j in keep} for r in D1.rows]
        part = GroupHom(self.t2, self.t1, rows=rows, check=False)
        return cokernel_data(part)

    @cached_property
    def D00_on_q0(self) -> GroupHom:
        """``q0 ∘ D00: L10 -> Q0``."""
        return self.q0.projection @ self.D00

    @cached_property
    def q10_proj(self) -> GroupHom:
        return self.q10.projection

    @cached_property
    def D0_on_q1(self) -> GroupHom:
        """``𝔻0`` descended to ``Q1 -> L00``."""
        return descend(self.tot.d(1), self.q1)

    @cached_property
    def D10_on_q1(self) -> GroupHom:
        """``q1 ∘ 𝔻1|L20: L20 -> Q1``."""
        return self.q1.projection @ self.D10_full


def psi_model(tot: ChainComplex) -> PsiModel:
    model = getattr(tot, "_psi_model", None)
    if model is None:
        model = PsiModel(tot)
        try:
            tot._psi_model = model
        except AttributeError:
            pass
    return model


@dataclass
class PsiZero:
    """Ψ⁰ with witnesses ``(f0, f1)`` on ``L00`` and ``L10``."""

    model: PsiModel
    K: TwoTermComplex
    solution: Solution

    @property
    def group(self) -> FgAbGroup:
        return self.solution.group

    def witness(self, coords: Sequence[int]) -> tuple[GroupHom, GroupHom]:
        f0bar, f1bar = self.solution.witness(coords)
        return f0bar @ self.model.q0.projection, f1bar @ self.model.q10.projection

    def witnesses(self) -> list[tuple[GroupHom, GroupHom]]:
        n = self.group.ngens
        return [self.witness([int(i == k) for i in range(n)]) for k in range(n)]


@dataclass
class PsiOne:
    """Ψ¹ with witnesses ``(α, β, γ)`` on ``L01``, ``L10`` and ``L20``."""

    model: PsiModel
    K: TwoTermComplex
    solution: Solution

    @property
    def group(self) -> FgAbGroup:
        return self.solution.group

    def witness(self, coords: Sequence[int]) -> tuple[GroupHom, GroupHom, GroupHom]:
        cbar, gamma = self.solution.witness(coords)
        c = cbar @ self.model.q1.projection  # Tot_1 -> B
        m = self.model
        alpha = _restrict_cols(c, *m.r01, m.L01)
        beta = _restrict_cols(c, *m.r10, m.L10)
        return alpha, beta, gamma

    def witnesses(self) -> list[tuple[GroupHom, GroupHom, GroupHom]]:
        n = self.group.ngens
        return [self.witness([int(i == k) for i in range(n)]) for k in range(n)]


def psi0_data(tot: ChainComplex, K: TwoTermComplex) -> PsiZero:
    m = psi_model(tot)
    h0 = HomGroup(m.q0.group, K.B)  # f0bar
    h1 = HomGroup(m.q10.group, K.A)  # f1bar
    sys = LinearSystem([h0, h1])
    eq = HomGroup(m.L10, K.B)
    # u ∘ f1bar ∘ q10 - f0bar ∘ q0 ∘ D00 = 0
    t1 = _chain(h1, eq, post=K.u, pre=m.q10_proj)
    t0 = h0.precompose(m.D00_on_q0, eq)
    sys.add_equation(eq.group, {0: -t0, 1: t1})
    return PsiZero(m, K, sys.solve())


def psi1_data(tot: ChainComplex, K: TwoTermComplex) -> PsiOne:
    m = psi_model(tot)
    hc = HomGroup(m.q1.group, K.B)  # cbar
    hg = HomGroup(m.L20, K.A)  # gamma
    sys = LinearSystem([hc, hg])
    eq = HomGroup(m.L20, K.B)
    # cbar ∘ q1 ∘ 𝔻1|L20 - u ∘ gamma = 0
    sys.add_equation(eq.group, {0: hc.precompose(m.D10_on_q1, eq), 1: -hg.postcompose(K.u, eq)})
    hh = HomGroup(m.L00, K.B)
    gauge = [(hh.group, {0: hh.precompose(m.D0_on_q1, hc)})]
    return PsiOne(m, K, sys.solve(gauge))


def _chain(src: HomGroup, dst: HomGroup, *, post: GroupHom, pre: GroupHom) -> GroupHom:
    """``φ ↦ post ∘ φ ∘ pre`` as a map ``src.group -> dst.group``."""
    cols = []
    for phi in src.basis:
        cols.append({i: v for i, v in enumerate(dst.coords(post @ phi @ pre)) if v})
    return GroupHom(src.group, dst.group, rows=lat.columns_to_rows(dst.group.ngens, cols))


def psi0(tot: ChainComplex, K: TwoTermComplex) -> FgAbGroup:
    return psi0_data(tot, K).group


def psi1(tot: ChainComplex, K: TwoTermComplex) -> FgAbGroup:
    return psi1_data(tot, K).group


# --------------------------------------------------------------------------
# the spectral sequence of the stupid filtration


class _Row:
    """Row ``q`` of ``E_1``: ``E_1^{p,q} = sum_{p2 - p1 = p} F(L^{p1}, K^{p2})``.

    ``F`` is ``Hom`` (q = 0) or ``Ext^1`` (q = 1); the differential is built
    from the functoriality of ``F`` with the sign rule of the Hom complex.
    """

    def __init__(self, q: int, lco, kco, ldiff, kdiff, p_max: int):
        cls = HomGroup if q == 0 else ExtGroup
        self.q = q
        self.pieces: dict[int, list[tuple[int, object]]] = {}
        for p1, lg in lco.items():
            for p2, kg in kco.items():
                f = cls(lg, kg)
                if not f.group.is_trivial:
                    self.pieces.setdefault(p2 - p1, []).append((p1, f))
        top = min(max(kco) - min(lco) + 1, p_max) if lco and kco else -1
        ps = range(min(kco) - max(lco) - 1, top + 1) if lco and kco else range(0)
        self.sums = {p: direct_sum([f.group for _, f in self.pieces.get(p, [])]) for p in ps}
        self._ldiff, self._kdiff = ldiff, kdiff
        self._diffs: dict[int, GroupHom] = {}

    @property
    def diffs(self) -> dict[int, GroupHom]:
        return {p: self.d(p) for p in self.sums if p + 1 in self.sums}

    def group(self, p: int) -> FgAbGroup:
        s = self.sums.get(p)
        return s.group if s is not None else FgAbGroup()

    def _diff(self, p: int, ldiff, kdiff) -> GroupHom:
        src, tgt = self.sums[p], self.sums[p + 1]
        tgt_index = {p1: i for i, (p1, _) in enumerate(self.pieces.get(p + 1, []))}
        tgt_pieces = self.pieces.get(p + 1, [])
        sign = -1 if p % 2 else 1
        total = GroupHom.zero(src.group, tgt.group)
        for i, (p1, f) in enumerate(self.pieces.get(p, [])):
            proj = src.projections[i]
            p2 = p1 + p
            if p1 in tgt_index:  # d_K: K^{p2} -> K^{p2+1}
                j = tgt_index[p1]
                g = kdiff(p2)
                m = f.postcompose(g, tgt_pieces[j][1]) if self.q == 0 else f.pushforward(g, tgt_pieces[j][1])
                total = total + tgt.injections[j] @ m @ proj
            if p1 - 1 in tgt_index:  # d_L: L^{p1-1} -> L^{p1}
                j = tgt_index[p1 - 1]
                g = ldiff(p1)
                m = f.precompose(g, tgt_pieces[j][1]) if self.q == 0 else f.pullback(g, tgt_pieces[j][1])
                total = total + (tgt.injections[j] @ m @ proj).scale(-sign)
        return total

    def d(self, p: int) -> GroupHom:
        if p not in self.sums or p + 1 not in self.sums:
            return GroupHom.zero(self.group(p), self.group(p + 1))
        if p not in self._diffs:
            self._diffs[p] = self._diff(p, self._ldiff, self._kdiff)
        return self._diffs[p]

    def as_complex(self) -> ChainComplex:
        """Homological form: degree ``-p`` holds ``E_1^{p,q}``."""
        groups = {-p: s.group for p, s in self.sums.items()}
        diffs = {-p: d for p, d in self.diffs.items()}
        return ChainComplex.from_degrees(groups, diffs)


@dataclass(frozen=True)
class Flag:
    holds: bool
    witness: object = None  # a nonzero element when the flag fails


class SpectralReport:
    """``E_1`` rows ``q = 0, 1`` for ``Hom(L, K)``, hypothesis flags and ``E_2^{00}``.

    Rows with ``q >= 2`` vanish because ``Ext^q = 0`` over the integers.
    Columns are built up to ``p_max``; the differentials ``d_1^{pq}`` exist
    for ``p < p_max``.
    """

    def __init__(self, L, K: TwoTermComplex, target_degree: int, p_max: int = 1):
        if target_degree not in (0, 1):
            raise ValueError("target_degree must be 0 or 1")
        L = as_complex(L)
        self.L = L
        self.K = K
        self.target_degree = target_degree
        self.p_max = p_max
        self.L0 = L.group(0)

    @cached_property
    def _row(self):
        L, kc = self.L, as_complex(self.K)
        lco, kco = to_cohomological(L), to_cohomological(kc)
        cache: dict[int, _Row] = {}

        def build(q: int) -> _Row:
            # cohomological differential d^p: X^p -> X^{p+1} is d_{-p}
            if q not in cache:
                cache[q] = _Row(q, lco, kco, lambda p1: L.d(-(p1 - 1)), lambda p2: kc.d(-p2), self.p_max)
            return cache[q]

        return build

    @property
    def rows(self) -> dict[int, _Row]:
        return {q: self._row(q) for q in (0, 1)}

    def e1(self, p: int, q: int) -> FgAbGroup:
        if q not in (0, 1):
            return FgAbGroup()
        return self._row(q).group(p)

    def e1_table(self) -> dict[tuple[int, int], FgAbGroup]:
        return {(p, q): r.group(p) for q, r in self.rows.items() for p in r.sums}

    def d1(self, p: int, q: int) -> GroupHom:
        """``d_1^{pq}: E_1^{pq} -> E_1^{p+1,q}``."""
        return self._row(q).d(p)

    def d1_squares_vanish(self) -> bool:
        return all((r.d(p + 1) @ r.d(p)).is_zero() for r in self.rows.values() for p in r.diffs)

    @cached_property
    def flags(self) -> dict[str, Flag]:
        A = self.K.A
        hom = HomGroup(self.L0, A)
        ext = ExtGroup(self.L0, A)
        out = {
            "hom_vanishing": Flag(hom.group.is_trivial, None if hom.group.is_trivial else hom.basis[0]),
            "ext1_vanishing": Flag(
                ext.group.is_trivial,
                None if ext.group.is_trivial else ext.representative([1] + [0] * (ext.group.ngens - 1)),
            ),
        }
        if self.target_degree == 1:
            out["ext2_vanishing"] = Flag(True)
            kd = kernel_data(self.d1(-1, 1))
            triv = kd.group.is_trivial
            out["kernel_d1_trivial"] = Flag(
                triv, None if triv else kd.inclusion.apply_vector(tuple(int(i == 0) for i in range(kd.group.ngens)))
            )
        return out

    @property
    def hypotheses_hold(self) -> bool:
        return all(f.holds for f in self.flags.values())

    @cached_property
    def e2_00(self) -> FgAbGroup:
        """``ker d_1^{00} / im d_1^{-10}``."""
        return homology(self._row(0).as_complex(), 0)

    def e2(self, p: int, q: int) -> FgAbGroup:
        return homology(self._row(q).as_complex(), -p) if q in (0, 1) else FgAbGroup()


def spectral_report(L, K: TwoTermComplex, target_degree: int = 0, *, p_max: int = 1) -> SpectralReport:
    return SpectralReport(L, K, target_degree, p_max)
