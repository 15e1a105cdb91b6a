"""Numba-compiled implementations of the per-element hot kernels.

Same contracts as ``_kernels_numpy``; plain serial loops that numba
turns into tight machine code.  Kept free of fastmath so both backends
agree to rounding order.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def stress_mass_blocks(det, dirs, cmat, smass):
    ne, ns = dirs.shape[0], dirs.shape[1]
    out = np.empty((ne, ns, ns))
    for e in range(ne):
        for i in range(ns):
            for j in range(ns):
                g = 0.0
                for a in range(3):
                    for b in range(3):
                        g += dirs[e, i, a] * cmat[a, b] * dirs[e, j, b]
                out[e, i, j] = det[e] * smass[i, j] * g
    return out


@njit(cache=True)
def coupling_blocks(sqdet, wmats, dref):
    ne, ns = wmats.shape[0], wmats.shape[1]
    nm = dref.shape[2]
    out = np.empty((ne, 2 * nm, ns))
    for e in range(ne):
        for j in range(ns):
            for c in range(2):
                for m in range(nm):
                    s = 0.0
                    for a in range(2):
                        s += wmats[e, j, c, a] * dref[a, j, m]
                    out[e, c * nm + m, j] = sqdet[e] * s
    return out


@njit(cache=True)
def load_blocks(sqdet, fq, pw):
    ne, nq = fq.shape[0], fq.shape[1]
    nm = pw.shape[1]
    out = np.zeros((ne, 2 * nm))
    for e in range(ne):
        for q in range(nq):
            for c in range(2):
                fv = fq[e, q, c]
                for m in range(nm):
                    out[e, c * nm + m] += fv * pw[q, m]
        for r in range(2 * nm):
            out[e, r] *= sqdet[e]
    return out


@njit(cache=True)
def div_gram_blocks(det, wmats, gref):
    ne, ns = wmats.shape[0], wmats.shape[1]
    out = np.empty((ne, ns, ns))
    for e in range(ne):
        for i in range(ns):
            for j in range(ns):
                s = 0.0
                for c in range(2):
                    for a in range(2):
                        for b in range(2):
                            s += (wmats[e, i, c, a] * wmats[e, j, c, b]
                                  * gref[i, j, a, b])
                out[e, i, j] = det[e] * s
    return out


@njit(cache=True)
def displacement_values(vcoef, pvals):
    ne, nm = vcoef.shape[0], vcoef.shape[2]
    nq = pvals.shape[0]
    out = np.zeros((ne, nq, 2))
    for e in range(ne):
        for q in range(nq):
            for c in range(2):
                s = 0.0
                for m in range(nm):
                    s += vcoef[e, c, m] * pvals[q, m]
                out[e, q, c] = s
    return out


@njit(cache=True)
def stress_values(scoef, dirs, svals):
    ne, ns = scoef.shape
    nq = svals.shape[0]
    out = np.zeros((ne, nq, 3))
    for e in range(ne):
        for q in range(nq):
            for i in range(ns):
                w = scoef[e, i] * svals[q, i]
                for x in range(3):
                    out[e, q, x] += w * dirs[e, i, x]
    return out


@njit(cache=True)
def stress_divergence_values(scoef, wmats, sgrads):
    ne, ns = scoef.shape
    nq = sgrads.shape[0]
    out = np.zeros((ne, nq, 2))
    for e in range(ne):
        for q in range(nq):
            for i in range(ns):
                for c in range(2):
                    s = 0.0
                    for a in range(2):
                        s += wmats[e, i, c, a] * sgrads[q, i, a]
                    out[e, q, c] += scoef[e, i] * s
    return out
