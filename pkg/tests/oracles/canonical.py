"""Homology of the canonical partial resolution, rebuilt from its defining formulas.

Ranks are taken over Q and over F_p; the number of invariant factors of a
boundary matrix divisible by ``p`` is ``rank_Q - rank_Fp``.
"""

from __future__ import annotations

from fractions import Fraction
import itertools

from .finite import add, elements, group_signature, scale, zero


def rank(rows, p=None):
    """Row rank of an integer matrix (list of dicts col -> value)."""
    work = []
    for r in rows:
        if p is None:
            work.append({c: Fraction(v) for c, v in r.items() if v})
        else:
            work.append({c: v % p for c, v in r.items() if v % p})
    pivots = {}
    rk = 0
    for r in work:
        r = dict(r)
        while r:
            c = min(r)
            if c not in pivots:
                pivots[c] = r
                rk += 1
                break
            pr = pivots[c]
            if p is None:
                f = r[c] / pr[c]
            else:
                f = r[c] * pow(pr[c], -1, p) % p
            for k, v in pr.items():
                nv = r.get(k, 0) - f * v
                if p is not None:
                    nv %= p
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
    return rk


def _vec(*terms):
    out = {}
    for coeff, key in terms:
        out[key] = out.get(key, 0) + coeff
    return {k: v for k, v in out.items() if v}


def boundaries(a, b, images):
    """Columns of the two boundary maps of the total complex, keyed by basis labels.

    ``images[k]`` is the image of the k-th generator of ``A``.
    """
    eb, ea = elements(b), elements(a)

    def u(x):
        out = zero(b)
        for k, xk in enumerate(x):
            out = add(b, out, scale(b, xk, images[k]))
        return out

    d0 = []
    for b1, b2 in itertools.product(eb, repeat=2):
        d0.append(_vec((1, ("B", add(b, b1, b2))), (-1, ("B", b1)), (-1, ("B", b2))))
    for x in ea:
        d0.append(_vec((1, ("B", u(x)))))
    d1 = []
    for b1, b2 in itertools.product(eb, repeat=2):
        d1.append(_vec((1, ("BB", b1, b2)), (-1, ("BB", b2, b1))))
    for b1, b2, b3 in itertools.product(eb, repeat=3):
        d1.append(
            _vec(
                (1, ("BB", add(b, b1, b2), b3)),
                (-1, ("BB", b1, add(b, b2, b3))),
                (1, ("BB", b1, b2)),
                (-1, ("BB", b2, b3)),
            )
        )
    dims = (len(eb), len(eb) ** 2 + len(ea), 2 * len(eb) ** 2 + len(eb) ** 3)
    return dims, d0, d1


def _index(cols):
    labels = sorted({k for c in cols for k in c})
    pos = {k: i for i, k in enumerate(labels)}
    return [{pos[k]: v for k, v in c.items()} for c in cols]


def tot_homology(a, b, images, primes=(2, 3)):
    """Free ranks and p-torsion counts of H_0 and H_1 of the total complex."""
    dims, d0, d1 = boundaries(a, b, images)
    m0, m1 = _index(d0), _index(d1)
    r0, r1 = rank(m0), rank(m1)
    out = {
        "H0": {"free_rank": dims[0] - r0, "p_torsion": {str(p): r0 - rank(m0, p) for p in primes}},
        "H1": {"free_rank": dims[1] - r0 - r1, "p_torsion": {str(p): r1 - rank(m1, p) for p in primes}},
    }
    return out


def complex_homology(a, b, images):
    """Signatures of ``ker u`` and ``coker u`` for ``[A --u--> B]``."""
    def u(x):
        out = zero(b)
        for k, xk in enumerate(x):
            out = add(b, out, scale(b, xk, images[k]))
        return out

    ker = [x for x in elements(a) if u(x) == zero(b)]
    image = {u(x) for x in elements(a)}
    h1 = {n: sum(1 for x in ker if scale(a, n, x) == zero(a)) for n in range(1, 13)}
    # coker: count cosets y + im with n·y in im
    cosets = {}
    for y in elements(b):
        key = frozenset(add(b, y, z) for z in image)
        cosets[key] = y
    h0 = {n: sum(1 for y in cosets.values() if scale(b, n, y) in image) for n in range(1, 13)}
    return {"H0": h0, "H1": h1, "A": group_signature(a), "B": group_signature(b)}
