"""Molecular integrals over contracted Cartesian Gaussians.

McMurchie-Davidson scheme: Hermite expansion coefficients E_t for overlap
and kinetic integrals, Hermite Coulomb repulsion tensor R_tuv with the
Boys function for nuclear attraction and electron repulsion.  Angular
momenta up to p are exercised; the recursions are general.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import hyp1f1


def boys(n: int, x: float) -> float:
    return float(hyp1f1(n + 0.5, n + 1.5, -x)) / (2.0 * n + 1.0)


def hermite_e(i: int, j: int, t: int, q_dist: float, a: float, b: float) -> float:
    """Expansion coefficient of Gaussian product in Hermite Gaussians."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return math.exp(-q * q_dist * q_dist)
    if j == 0:
        return (
            (1.0 / (2.0 * p)) * hermite_e(i - 1, j, t - 1, q_dist, a, b)
            - (q * q_dist / a) * hermite_e(i - 1, j, t, q_dist, a, b)
            + (t + 1) * hermite_e(i - 1, j, t + 1, q_dist, a, b)
        )
    return (
        (1.0 / (2.0 * p)) * hermite_e(i, j - 1, t - 1, q_dist, a, b)
        + (q * q_dist / b) * hermite_e(i, j - 1, t, q_dist, a, b)
        + (t + 1) * hermite_e(i, j - 1, t + 1, q_dist, a, b)
    )


def overlap_prim(a, lmn1, ra, b, lmn2, rb) -> float:
    s = 1.0
    for k in range(3):
        s *= hermite_e(lmn1[k], lmn2[k], 0, ra[k] - rb[k], a, b)
    return s * (math.pi / (a + b)) ** 1.5


def kinetic_prim(a, lmn1, ra, b, lmn2, rb) -> float:
    l2, m2, n2 = lmn2
    term0 = b * (2 * (l2 + m2 + n2) + 3) * overlap_prim(a, lmn1, ra, b, lmn2, rb)
    term1 = -2.0 * b * b * (
        overlap_prim(a, lmn1, ra, b, (l2 + 2, m2, n2), rb)
        + overlap_prim(a, lmn1, ra, b, (l2, m2 + 2, n2), rb)
        + overlap_prim(a, lmn1, ra, b, (l2, m2, n2 + 2), rb)
    )
    term2 = -0.5 * (
        l2 * (l2 - 1) * overlap_prim(a, lmn1, ra, b, (l2 - 2, m2, n2), rb)
        + m2 * (m2 - 1) * overlap_prim(a, lmn1, ra, b, (l2, m2 - 2, n2), rb)
        + n2 * (n2 - 1) * overlap_prim(a, lmn1, ra, b, (l2, m2, n2 - 2), rb)
    )
    return term0 + term1 + term2


def _hermite_coulomb(t, u, v, n, p, pc, cache) -> float:
    key = (t, u, v, n)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if t == u == v == 0:
        val = (-2.0 * p) ** n * boys(n, p * float(pc @ pc))
    elif t > 0:
        val = (t - 1) * (_hermite_coulomb(t - 2, u, v, n + 1, p, pc, cache) if t > 1 else 0.0)
        val += pc[0] * _hermite_coulomb(t - 1, u, v, n + 1, p, pc, cache)
    elif u > 0:
        val = (u - 1) * (_hermite_coulomb(t, u - 2, v, n + 1, p, pc, cache) if u > 1 else 0.0)
        val += pc[1] * _hermite_coulomb(t, u - 1, v, n + 1, p, pc, cache)
    else:
        val = (v - 1) * (_hermite_coulomb(t, u, v - 2, n + 1, p, pc, cache) if v > 1 else 0.0)
        val += pc[2] * _hermite_coulomb(t, u, v - 1, n + 1, p, pc, cache)
    cache[key] = val
    return val


def nuclear_prim(a, lmn1, ra, b, lmn2, rb, rc) -> float:
    p = a + b
    rp = (a * ra + b * rb) / p
    pc = rp - rc
    cache: dict = {}
    val = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        et = hermite_e(lmn1[0], lmn2[0], t, ra[0] - rb[0], a, b)
        for u in range(lmn1[1] + lmn2[1] + 1):
            eu = hermite_e(lmn1[1], lmn2[1], u, ra[1] - rb[1], a, b)
            for v in range(lmn1[2] + lmn2[2] + 1):
                ev = hermite_e(lmn1[2], lmn2[2], v, ra[2] - rb[2], a, b)
                val += et * eu * ev * _hermite_coulomb(t, u, v, 0, p, pc, cache)
    return 2.0 * math.pi / p * val


def eri_prim(a, lmn1, ra, b, lmn2, rb, c, lmn3, rc, d, lmn4, rd) -> float:
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    pq = rp - rq
    cache: dict = {}

    e1 = [
        [hermite_e(lmn1[k], lmn2[k], t, ra[k] - rb[k], a, b)
         for t in range(lmn1[k] + lmn2[k] + 1)]
        for k in range(3)
    ]
    e2 = [
        [hermite_e(lmn3[k], lmn4[k], t, rc[k] - rd[k], c, d)
         for t in range(lmn3[k] + lmn4[k] + 1)]
        for k in range(3)
    ]
    val = 0.0
    for t, et in enumerate(e1[0]):
        for u, eu in enumerate(e1[1]):
            for v, ev in enumerate(e1[2]):
                w1 = et * eu * ev
                if w1 == 0.0:
                    continue
                for tt, ett in enumerate(e2[0]):
                    for uu, euu in enumerate(e2[1]):
                        for vv, evv in enumerate(e2[2]):
                            w2 = ett * euu * evv
                            if w2 == 0.0:
                                continue
                            sign = -1.0 if (tt + uu + vv) % 2 else 1.0
                            val += w1 * w2 * sign * _hermite_coulomb(
                                t + tt, u + uu, v + vv, 0, alpha, pq, cache
                            )
    return val * 2.0 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))


def _contract2(fn, g1, g2) -> float:
    out = 0.0
    for a, ca in zip(g1.exponents, g1.coefficients):
        for b, cb in zip(g2.exponents, g2.coefficients):
            out += ca * cb * fn(a, g1.lmn, g1.center, b, g2.lmn, g2.center)
    return out


def overlap_contracted(g1, g2) -> float:
    return _contract2(overlap_prim, g1, g2)


def kinetic_contracted(g1, g2) -> float:
    return _contract2(kinetic_prim, g1, g2)


def nuclear_contracted(g1, g2, rc) -> float:
    return _contract2(lambda a, l1, r1, b, l2, r2: nuclear_prim(a, l1, r1, b, l2, r2, rc), g1, g2)


def eri_contracted(g1, g2, g3, g4) -> float:
    out = 0.0
    for a, ca in zip(g1.exponents, g1.coefficients):
        for b, cb in zip(g2.exponents, g2.coefficients):
            for c, cc in zip(g3.exponents, g3.coefficients):
                for d, cd in zip(g4.exponents, g4.coefficients):
                    out += ca * cb * cc * cd * eri_prim(
                        a, g1.lmn, g1.center, b, g2.lmn, g2.center,
                        c, g3.lmn, g3.center, d, g4.lmn, g4.center,
                    )
    return out


def ao_integrals(mol, basis):
    """(S, T, V, ERI) in the AO basis; ERI in chemists' notation (pq|rs)."""
    n = len(basis)
    s = np.zeros((n, n))
    t = np.zeros((n, n))
    v = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            s[i, j] = s[j, i] = overlap_contracted(basis[i], basis[j])
            t[i, j] = t[j, i] = kinetic_contracted(basis[i], basis[j])
            vij = 0.0
            for charge, rc in zip(mol.charges, mol.coords):
                vij -= charge * nuclear_contracted(basis[i], basis[j], rc)
            v[i, j] = v[j, i] = vij

    eri = np.zeros((n, n, n, n))
    done = np.zeros((n, n, n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    if (i, j) < (k, l):
                        continue
                    if done[i, j, k, l]:
                        continue
                    val = eri_contracted(basis[i], basis[j], basis[k], basis[l])
                    for (p, q, r, ss) in {
                        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
                    }:
                        eri[p, q, r, ss] = val
                        done[p, q, r, ss] = True
    return s, t, v, eri
