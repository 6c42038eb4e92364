"""Sparse exact Smith normal form over the integers.

Rows of the working matrix are dicts ``{column: value}``.  Transforms are
tracked only when requested: ``U`` by rows, ``U^-1`` by columns, ``V`` by
columns and ``V^-1`` by rows, so each elementary operation touches a single
dict.  Python integers are used throughout (no fixed-width arithmetic).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from math import gcd

Sparse = list[dict[int, int]]


def _axpy(dst: dict[int, int], src: dict[int, int], k: int) -> None:
    """dst += k * src, dropping zeros."""
    for key, val in src.items():
        new = dst.get(key, 0) + k * val
        if new:
            dst[key] = new
        else:
            dst.pop(key, None)


def _identity(n: int) -> Sparse:
    return [{i: 1} for i in range(n)]


@dataclass
class SmithResult:
    """Outcome of :func:`smith`.

    ``diag`` holds the nonzero invariant factors (positive, divisibility
    chain), so ``rank == len(diag)``.  The transforms satisfy
    ``U @ M @ V == S`` where ``S`` has ``diag`` on its leading diagonal.
    """

    nrows: int
    ncols: int
    diag: list[int]
    u_rows: Sparse | None = None
    uinv_cols: Sparse | None = None
    v_cols: Sparse | None = None
    vinv_rows: Sparse | None = None
    extra: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.diag)


def smith(
    nrows: int,
    ncols: int,
    rows: Sparse,
    *,
    want_u: bool = False,
    want_uinv: bool = False,
    want_v: bool = False,
    want_vinv: bool = False,
) -> SmithResult:
    """Smith normal form of a sparse ``nrows x ncols`` matrix.

    ``rows`` is consumed (mutated).  Pivots are chosen by the smallest
    absolute value, ties broken by lowest (row, column) index.
    """
    a = rows
    colsets: list[set[int]] = [set() for _ in range(ncols)]
    heap: list[tuple[int, int, int]] = []
    for i, row in enumerate(a):
        for j, v in row.items():
            colsets[j].add(i)
            heap.append((abs(v), i, j))
    heapq.heapify(heap)

    u = _identity(nrows) if want_u else None
    uinv = _identity(nrows) if want_uinv else None
    v = _identity(ncols) if want_v else None
    vinv = _identity(ncols) if want_vinv else None

    row_alive = [True] * nrows
    col_alive = [True] * ncols

    def pop_pivot() -> tuple[int, int] | None:
        while heap:
            absval, i, j = heap[0]
            if row_alive[i] and col_alive[j]:
                val = a[i].get(j)
                if val is not None and abs(val) == absval:
                    return i, j
            heapq.heappop(heap)
        return None

    def row_op(r: int, p: int, k: int) -> None:
        """row_r += k * row_p."""
        for j, val in a[p].items():
            new = a[r].get(j, 0) + k * val
            if new:
                if j not in a[r]:
                    colsets[j].add(r)
                a[r][j] = new
                heapq.heappush(heap, (abs(new), r, j))
            elif j in a[r]:
                del a[r][j]
                colsets[j].discard(r)
        if u is not None:
            _axpy(u[r], u[p], k)
        if uinv is not None:
            _axpy(uinv[p], uinv[r], -k)

    def col_op(c: int, p: int, k: int) -> None:
        """col_c += k * col_p."""
        for i in list(colsets[p]):
            val = a[i][p]
            new = a[i].get(c, 0) + k * val
            if new:
                if c not in a[i]:
                    colsets[c].add(i)
                a[i][c] = new
                heapq.heappush(heap, (abs(new), i, c))
            elif c in a[i]:
                del a[i][c]
                colsets[c].discard(i)
        if v is not None:
            _axpy(v[c], v[p], k)
        if vinv is not None:
            _axpy(vinv[p], vinv[c], -k)

    pivots: list[tuple[int, int, int]] = []
    while True:
        found = pop_pivot()
        if found is None:
            break
        i, j = found
        while True:
            p = a[i][j]
            remainder = False
            for r in list(colsets[j]):
                if r == i:
                    continue
                q = a[r][j] // p
                row_op(r, i, -q)
                if j in a[r]:
                    remainder = True
            if not remainder:
                for c in [c for c in a[i] if c != j]:
                    q = a[i][c] // p
                    col_op(c, j, -q)
                    if c in a[i]:
                        remainder = True
            if not remainder:
                break
            i, j = pop_pivot()
        pivots.append((i, j, a[i][j]))
        row_alive[i] = False
        col_alive[j] = False

    # Reorder so that pivot k sits at (k, k).
    pivot_rows = [i for i, _, _ in pivots]
    pivot_cols = [j for _, j, _ in pivots]
    taken_r = set(pivot_rows)
    taken_c = set(pivot_cols)
    row_perm = pivot_rows + [i for i in range(nrows) if i not in taken_r]
    col_perm = pivot_cols + [j for j in range(ncols) if j not in taken_c]
    diag = [p for _, _, p in pivots]
    if u is not None:
        u = [u[i] for i in row_perm]
    if uinv is not None:
        uinv = [uinv[i] for i in row_perm]
    if v is not None:
        v = [v[j] for j in col_perm]
    if vinv is not None:
        vinv = [vinv[j] for j in col_perm]

    for k, d in enumerate(diag):
        if d < 0:
            diag[k] = -d
            if u is not None:
                u[k] = {key: -x for key, x in u[k].items()}
            if uinv is not None:
                uinv[k] = {key: -x for key, x in uinv[k].items()}

    _fix_divisibility(diag, u, uinv, v, vinv)
    return SmithResult(nrows, ncols, diag, u, uinv, v, vinv)


def _combine(x: dict[int, int], cx: int, y: dict[int, int], cy: int) -> dict[int, int]:
    out: dict[int, int] = {}
    if cx:
        for key, val in x.items():
            out[key] = cx * val
    if cy:
        for key, val in y.items():
            new = out.get(key, 0) + cy * val
            if new:
                out[key] = new
            else:
                out.pop(key, None)
    return out


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _fix_divisibility(diag, u, uinv, v, vinv) -> None:
    n = len(diag)
    if n < 2 or all(d == diag[0] for d in diag):
        return
    for k in range(n):
        if diag[k] == 1:
            continue
        for l in range(k + 1, n):
            a, b = diag[k], diag[l]
            if b % a == 0:
                continue
            g, s, t = _ext_gcd(a, b)
            ag, bg = a // g, b // g
            # rows: [[s, t], [-b/g, a/g]]; cols: [[1, -t b/g], [1, s a/g]]
            if u is not None:
                u[k], u[l] = _combine(u[k], s, u[l], t), _combine(u[k], -bg, u[l], ag)
            if uinv is not None:
                uinv[k], uinv[l] = (
                    _combine(uinv[k], ag, uinv[l], bg),
                    _combine(uinv[k], -t, uinv[l], s),
                )
            if v is not None:
                v[k], v[l] = _combine(v[k], 1, v[l], 1), _combine(v[k], -t * bg, v[l], s * ag)
            if vinv is not None:
                vinv[k], vinv[l] = (
                    _combine(vinv[k], s * ag, vinv[l], t * bg),
                    _combine(vinv[k], -1, vinv[l], 1),
                )
            diag[k], diag[l] = g, a * bg
