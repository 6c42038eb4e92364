"""Chain maps and homotopy classes between two-term complexes of finite groups."""

from __future__ import annotations

from .finite import add, elements, homs, neg


def _compose(f, g):
    return {x: f[g[x]] for x in g}


def chain_map_counts(k, l):
    """``(#chain maps, #homotopy classes)`` for ``k = (A, B, u)`` and ``l = (A', B', u')``.

    ``u`` is given as a dict on elements of ``A``.
    """
    a, b, u = k
    a2, b2, u2 = l
    maps = []
    f0s = homs(b, b2)
    for f1 in homs(a, a2):
        left = _compose(u2, f1)
        for f0 in f0s:
            if left == _compose(f0, u):
                maps.append((f1, f0))
    keyed = {(_freeze(f1), _freeze(f0)) for f1, f0 in maps}
    nulls = set()
    for h in homs(b, a2):
        nulls.add((_freeze(_compose(h, u)), _freeze(_compose(u2, h))))
    classes = set()
    for f1, f0 in keyed:
        rep = min(
            (tuple(add(a2, v, neg(a2, w)) for v, w in zip(_vals(f1), _vals(n1))),
             tuple(add(b2, v, neg(b2, w)) for v, w in zip(_vals(f0), _vals(n0))))
            for n1, n0 in nulls
        )
        classes.add(rep)
    return len(keyed), len(classes)


def _freeze(f):
    return tuple(sorted(f.items()))


def _vals(frozen):
    return [v for _, v in frozen]


def hom_map(a, b, images):
    """Element-level dict of the hom ``A -> B`` sending generator k to ``images[k]``."""
    from .finite import scale, zero

    out = {}
    for x in elements(a):
        y = zero(b)
        for k, xk in enumerate(x):
            y = add(b, y, scale(b, xk, images[k]))
        out[x] = y
    return out
