"""The test corpus: every ``[A --u--> B]`` with ``A, B`` among five small groups."""

from __future__ import annotations

import json
from functools import lru_cache

from biextlab.abgroup import FgAbGroup, HomGroup, enumerate_elements
from biextlab.complex import TwoTermComplex

GROUPS = {
    "0": FgAbGroup(),
    "Z/2": FgAbGroup.cyclic(2),
    "Z/3": FgAbGroup.cyclic(3),
    "Z/4": FgAbGroup.cyclic(4),
    "Z/2+Z/2": FgAbGroup(0, (2, 2)),
}


@lru_cache(maxsize=None)
def corpus() -> tuple[TwoTermComplex, ...]:
    out = []
    for a in GROUPS.values():
        for b in GROUPS.values():
            h = HomGroup(a, b)
            for e in enumerate_elements(h.group):
                out.append(TwoTermComplex(a, b, h.hom(e.coords)))
    return tuple(out)


def small_b(bound: int) -> tuple[TwoTermComplex, ...]:
    return tuple(k for k in corpus() if k.B.order <= bound)


def zero_a() -> tuple[TwoTermComplex, ...]:
    return tuple(k for k in corpus() if k.A.is_trivial)


def name(k: TwoTermComplex) -> str:
    return str(k) if k.u.is_zero() else f"[{k.A} -{[list(r) for r in k.u.matrix]}-> {k.B}]"


def key(k: TwoTermComplex) -> str:
    """Oracle lookup key: source orders, target orders, generator images."""
    a, b = k.A.orders, k.B.orders
    m = k.u.matrix
    images = [[m[i][j] % b[i] for i in range(len(b))] for j in range(len(a))]
    return f"{list(a)}|{list(b)}|{images}"


def _group_text(g) -> str:
    return " + ".join(f"Z/{d}" for d in g.orders)


def document_text(k: TwoTermComplex, label: str = "K") -> str:
    """Input-language text declaring ``k``; trivial groups use the predeclared ``0``."""
    lines = []
    src = tgt = "0"
    if not k.A.is_trivial:
        src = f"A{label}"
        lines.append(f"group {src} = {_group_text(k.A)}")
    if not k.B.is_trivial:
        tgt = f"B{label}"
        lines.append(f"group {tgt} = {_group_text(k.B)}")
    hom = "0"
    if not (k.A.is_trivial or k.B.is_trivial):
        hom = f"u{label}"
        matrix = json.dumps([list(r) for r in k.u.matrix], separators=(",", ":"))
        lines.append(f"hom {hom} : {src} -> {tgt} = {matrix}")
    lines.append(f"complex {label} = {src} --{hom}--> {tgt}")
    return "\n".join(lines) + "\n"
