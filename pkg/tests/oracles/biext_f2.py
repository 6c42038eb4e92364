"""Biextensions of ``(Z/2, Z/2)`` by ``Z/2`` as pairs of partial cocycles.

A biextension with trivial underlying torsor is a pair
``phi: P x P x Q -> G`` and ``psi: P x Q x Q -> G`` where each partial law is
a commutative associative cocycle and the two laws commute; coboundaries come
from functions ``h: P x Q -> G``. Everything is enumerated over F_2, so signs
play no role.
"""

from __future__ import annotations

import itertools

E = (0, 1)


def _keys3():
    return list(itertools.product(E, E, E))


def _phi_ok(phi):
    for q in E:
        for x, y in itertools.product(E, E):
            if phi[(x, y, q)] != phi[(y, x, q)]:
                return False
        for x, y, z in itertools.product(E, E, E):
            if (phi[(x, y, q)] + phi[((x + y) % 2, z, q)] + phi[(x, (y + z) % 2, q)] + phi[(y, z, q)]) % 2:
                return False
    return True


def _psi_ok(psi):
    # psi[(p, q1, q2)]
    for p in E:
        for x, y in itertools.product(E, E):
            if psi[(p, x, y)] != psi[(p, y, x)]:
                return False
        for x, y, z in itertools.product(E, E, E):
            if (psi[(p, x, y)] + psi[(p, (x + y) % 2, z)] + psi[(p, x, (y + z) % 2)] + psi[(p, y, z)]) % 2:
                return False
    return True


def _compatible(phi, psi):
    for p1, p2, q1, q2 in itertools.product(E, E, E, E):
        lhs = phi[(p1, p2, (q1 + q2) % 2)] + phi[(p1, p2, q1)] + phi[(p1, p2, q2)]
        rhs = psi[((p1 + p2) % 2, q1, q2)] + psi[(p1, q1, q2)] + psi[(p2, q1, q2)]
        if (lhs + rhs) % 2:
            return False
    return True


def _coboundary(h):
    phi = {(x, y, q): (h[((x + y) % 2, q)] + h[(x, q)] + h[(y, q)]) % 2 for x, y, q in _keys3()}
    psi = {(p, x, y): (h[(p, (x + y) % 2)] + h[(p, x)] + h[(p, y)]) % 2 for p, x, y in _keys3()}
    return phi, psi


def biext_orders():
    """``(|Biext^0|, |Biext^1|)`` by exhaustive enumeration."""
    keys = _keys3()
    phis = []
    for vals in itertools.product(E, repeat=8):
        phi = dict(zip(keys, vals))
        if _phi_ok(phi):
            phis.append(phi)
    psis = []
    for vals in itertools.product(E, repeat=8):
        psi = dict(zip(keys, vals))
        if _psi_ok(psi):
            psis.append(psi)
    cocycles = sum(1 for phi in phis for psi in psis if _compatible(phi, psi))
    hkeys = list(itertools.product(E, E))
    bounds = set()
    bilinear = 0
    for vals in itertools.product(E, repeat=4):
        phi, psi = _coboundary(dict(zip(hkeys, vals)))
        if not any(phi.values()) and not any(psi.values()):
            bilinear += 1
        bounds.add((tuple(phi[k] for k in keys), tuple(psi[k] for k in keys)))
    return bilinear, cocycles // len(bounds)
