"""Pure-numpy implementations of the per-element hot kernels.

Shared array conventions (ne elements, ns stress slots, nm scalar
displacement modes, nq quadrature points):

- ``det``: (ne,) twice the element areas;
- ``dirs``: (ne, ns, 3) constant symmetric direction per stress slot;
- ``wmats``: (ne, ns, 2, 2) direction matrix times N^T, mapping
  reference gradients of the slot's scalar factor to the divergence;
- ``cmat``: (3, 3) bilinear form of the material law in (a11, a12, a22)
  coordinates, off-diagonal Frobenius factor included;
- ``smass``: (ns, ns) reference mass of the slots' scalar factors;
- ``dref``: (2, ns, nm) reference moments of slot gradients against
  displacement modes;
- ``gref``: (ns, ns, 2, 2) reference moments of slot gradient pairs.

Displacement rows are ordered component-major: row c*nm + m.
"""

import numpy as np


def stress_mass_blocks(det, dirs, cmat, smass):
    """(ne, ns, ns) element blocks of the weighted stress mass matrix."""
    gram = (dirs @ cmat) @ dirs.transpose(0, 2, 1)
    return det[:, None, None] * smass[None, :, :] * gram


def coupling_blocks(sqdet, wmats, dref):
    """(ne, 2*nm, ns) element blocks of the divergence coupling."""
    out = np.einsum("ejca,ajm->ecmj", wmats, dref, optimize=True)
    ne, _, nm, ns = out.shape
    return sqdet[:, None, None] * out.reshape(ne, 2 * nm, ns)


def load_blocks(sqdet, fq, pw):
    """(ne, 2*nm) element load vectors; ``pw`` are mode values times
    quadrature weights, ``fq`` the load at the element points."""
    out = np.einsum("eqc,qm->ecm", fq, pw, optimize=True)
    ne = out.shape[0]
    return sqdet[:, None] * out.reshape(ne, -1)


def div_gram_blocks(det, wmats, gref):
    """(ne, ns, ns) element blocks of the divergence Gram matrix."""
    ne, ns = wmats.shape[0], wmats.shape[1]
    out = np.zeros((ne, ns, ns))
    for c in range(2):
        for a in range(2):
            for b in range(2):
                out += (wmats[:, :, c, a][:, :, None]
                        * wmats[:, :, c, b][:, None, :]
                        * gref[None, :, :, a, b])
    return det[:, None, None] * out


def displacement_values(vcoef, pvals):
    """(ne, nq, 2) field values from per-element mode coefficients
    ``vcoef`` of shape (ne, 2, nm)."""
    return np.einsum("ecm,qm->eqc", vcoef, pvals, optimize=True)


def stress_values(scoef, dirs, svals):
    """(ne, nq, 3) symmetric stress values from slot coefficients
    (ne, ns) and slot scalar values ``svals`` of shape (nq, ns)."""
    return np.einsum("ei,qi,eix->eqx", scoef, svals, dirs, optimize=True)


def stress_divergence_values(scoef, wmats, sgrads):
    """(ne, nq, 2) divergence values; ``sgrads`` are reference gradients
    of the slot scalar factors, shape (nq, ns, 2)."""
    return np.einsum("ei,eica,qia->eqc", scoef, wmats, sgrads, optimize=True)
