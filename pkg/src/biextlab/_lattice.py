"""Lattice helpers built on the sparse Smith form: quotients, kernels, spans."""

from __future__ import annotations

from dataclasses import dataclass

from ._smith import Sparse, smith


def columns_to_rows(nrows: int, cols: Sparse) -> Sparse:
    rows: Sparse = [{} for _ in range(nrows)]
    for j, col in enumerate(cols):
        for i, val in col.items():
            if val:
                rows[i][j] = val
    return rows


def dense_rows(rows: Sparse, ncols: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(r.get(j, 0) for j in range(ncols)) for r in rows)


def sparse_rows(matrix) -> Sparse:
    return [{j: v for j, v in enumerate(row) if v} for row in matrix]


def apply_rows(rows: Sparse, vec: dict[int, int]) -> dict[int, int]:
    """Matrix (given by sparse rows) times sparse vector."""
    out = {}
    for i, row in enumerate(rows):
        if len(row) < len(vec):
            s = sum(val * vec[j] for j, val in row.items() if j in vec)
        else:
            s = sum(val * row[j] for j, val in vec.items() if j in row)
        if s:
            out[i] = s
    return out


def combine_cols(cols: Sparse, coeffs: dict[int, int]) -> dict[int, int]:
    """Linear combination sum coeffs[k] * cols[k]."""
    out: dict[int, int] = {}
    for k, c in coeffs.items():
        for i, val in cols[k].items():
            new = out.get(i, 0) + c * val
            if new:
                out[i] = new
            else:
                out.pop(i, None)
    return out


@dataclass
class Quotient:
    """``Z^n / span(gens)`` in invariant-factor form.

    ``proj`` maps ambient vectors to normal coordinates (free first, then
    torsion in divisibility order); ``sect`` lifts normal generators back.
    """

    free_rank: int
    torsion: tuple[int, ...]
    proj: Sparse
    sect: Sparse

    @property
    def orders(self) -> tuple[int, ...]:
        return (0,) * self.free_rank + self.torsion

    def reduce(self, vec: dict[int, int]) -> tuple[int, ...]:
        out = []
        for row, order in zip(self.proj, self.orders):
            s = sum(val * vec[j] for j, val in row.items() if j in vec)
            out.append(s % order if order else s)
        return tuple(out)


def present(n: int, gens: Sparse) -> Quotient:
    res = smith(n, len(gens), columns_to_rows(n, gens), want_u=True, want_uinv=True)
    free_idx = list(range(res.rank, n))
    tors_idx = [k for k, d in enumerate(res.diag) if d > 1]
    keep = free_idx + tors_idx
    return Quotient(
        free_rank=len(free_idx),
        torsion=tuple(res.diag[k] for k in tors_idx),
        proj=[res.u_rows[k] for k in keep],
        sect=[res.uinv_cols[k] for k in keep],
    )


def kernel_basis(nrows: int, ncols: int, rows: Sparse) -> Sparse:
    """Basis (as sparse columns) of the integer kernel of a matrix."""
    res = smith(nrows, ncols, [dict(r) for r in rows], want_v=True)
    return res.v_cols[res.rank :]


@dataclass
class Span:
    """A sublattice of ``Z^n`` with a basis and exact coordinates."""

    n: int
    basis: Sparse
    u_rows: Sparse
    diag: list[int]

    def coords(self, vec: dict[int, int]) -> list[int] | None:
        out = []
        for k, d in enumerate(self.diag):
            s = sum(val * vec[j] for j, val in self.u_rows[k].items() if j in vec)
            if s % d:
                return None
            out.append(s // d)
        for k in range(len(self.diag), self.n):
            s = sum(val * vec[j] for j, val in self.u_rows[k].items() if j in vec)
            if s:
                return None
        return out


def span(n: int, gens: Sparse) -> Span:
    res = smith(n, len(gens), columns_to_rows(n, gens), want_u=True, want_uinv=True)
    basis = [{i: d * x for i, x in res.uinv_cols[k].items()} for k, d in enumerate(res.diag)]
    return Span(n, basis, res.u_rows, res.diag)


def _axpy_into(dst: dict[int, int], src: dict[int, int], k: int) -> None:
    """dst += k * src."""
    for key, val in src.items():
        new = dst.get(key, 0) + k * val
        if new:
            dst[key] = new
        else:
            dst.pop(key, None)
