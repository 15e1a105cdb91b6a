#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the per-element hot kernels on a realistic workload (level-5 mesh,
k = 3 by default) and reports best-of-N wall times for both backends,
plus an end-to-end assembly comparison.  Select the backend used by the
library itself with TRIELAST_BACKEND={auto,numba,numpy}.
"""

import argparse
import time

import numpy as np

from trielast.assembly import (ComplianceTensor, assemble, element_wmats,
                               reference_tensors)
from trielast.analysis import default_solution
from trielast.backends import get_kernels
from trielast.mesh import build_unit_square_mesh, geometry_arrays
from trielast.quadrature import triangle_rule
from trielast.spaces import DisplacementSpace, StressSpace


def best_of(fn, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--k", type=int, default=3, choices=(3, 4, 5))
    parser.add_argument("--level", type=int, default=5)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    mesh = build_unit_square_mesh(args.level)
    space = StressSpace(mesh, args.k)
    disp = DisplacementSpace(mesh, args.k)
    det, nmat, _ = geometry_arrays(mesh)
    sqdet = np.sqrt(det)
    ref = reference_tensors(args.k, space.local_snode)
    cmat = ComplianceTensor(0.5, 1.0).bilinear_matrix()
    dirs = space.element_dirs
    wmats = element_wmats(dirs, nmat)
    rule = triangle_rule(2 * args.k + 4)
    pw = (0.5 * rule.weights)[:, None] * disp.modes.values(rule.points[:, 1:])
    rng = np.random.default_rng(0)
    fq = rng.normal(size=(mesh.num_triangles, len(rule.weights), 2))
    scoef = rng.normal(size=(mesh.num_triangles, space.n_local()))
    vcoef = rng.normal(size=(mesh.num_triangles, 2, disp.n_scalar))
    svals = np.ascontiguousarray(space.basis.values(rule.points)[:, space.local_snode])
    sgrads = np.ascontiguousarray(space.basis.ref_grads(rule.points)[:, space.local_snode, :])
    pvals = disp.modes.values(rule.points[:, 1:])

    cases = {
        "stress_mass_blocks": lambda kern: kern.stress_mass_blocks(det, dirs, cmat, ref.smass),
        "coupling_blocks": lambda kern: kern.coupling_blocks(sqdet, wmats, ref.dref),
        "load_blocks": lambda kern: kern.load_blocks(sqdet, fq, pw),
        "div_gram_blocks": lambda kern: kern.div_gram_blocks(det, wmats, ref.gref),
        "displacement_values": lambda kern: kern.displacement_values(vcoef, pvals),
        "stress_values": lambda kern: kern.stress_values(scoef, dirs, svals),
        "stress_divergence_values": lambda kern: kern.stress_divergence_values(scoef, wmats, sgrads),
    }

    print("k={} level={} elements={}".format(args.k, args.level, mesh.num_triangles))
    backends = {}
    for name in ("numpy", "numba"):
        try:
            backends[name] = get_kernels(name)
        except ImportError:
            print("({} backend unavailable)".format(name))
    header = "{:<26}".format("kernel") + "".join("{:>12}".format(b) for b in backends)
    print(header)
    for case, runner in cases.items():
        times = {}
        for name, kern in backends.items():
            runner(kern)  # warm up (jit compile on first call)
            times[name] = best_of(lambda: runner(kern), args.repeat)
        row = "{:<26}".format(case)
        row += "".join("{:>10.2f}ms".format(1e3 * times[b]) for b in backends)
        print(row)
        ref_out = {name: cases[case](kern) for name, kern in backends.items()}
        if len(ref_out) == 2:
            a, b = ref_out.values()
            assert np.allclose(a, b, rtol=1e-12, atol=1e-13), case

    comp = ComplianceTensor(0.5, 1.0)
    load = default_solution(0.5, 1.0).load
    print()
    for name, kern in backends.items():
        assemble(mesh, space, disp, comp, load, kernels=kern)
        t = best_of(lambda: assemble(mesh, space, disp, comp, load, kernels=kern),
                    max(2, args.repeat // 2))
        print("full assembly [{}]: {:.1f}ms".format(name, 1e3 * t))


if __name__ == "__main__":
    main()
