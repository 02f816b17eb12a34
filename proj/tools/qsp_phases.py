#!/usr/bin/env python3
"""Numerically fit QSP phases for a short segment.

Each eigenvalue lam of the block-encoded Hamiltonian spans a two-dimensional
invariant subspace on which the walk operator is a rotation. The script fits
phi_1..phi_M so that <+|<G| V |+>|G> approximates exp(-i lam tau) on a grid
of lam in [-1, 1], then writes an angle file readable by the synthesizer.
"""

import argparse
import json
import math
import sys

import numpy as np
from scipy.optimize import least_squares


def walk(lams):
    """-iQ restricted to each invariant subspace, shape (len(lams), 2, 2)."""
    s = np.sqrt(np.clip(1.0 - lams * lams, 0.0, None))
    q = np.empty((len(lams), 2, 2), dtype=complex)
    q[:, 0, 0] = lams
    q[:, 0, 1] = s
    q[:, 1, 0] = -s
    q[:, 1, 1] = lams
    return -1j * q


def response(phases, lams):
    """<+|<G| V |+>|G> for every lam."""
    w = walk(lams)
    wd = np.conj(np.swapaxes(w, 1, 2))
    # psi[:, b, k]: ancilla qubit in the |+>,|-> basis, then the subspace index.
    psi = np.zeros((len(lams), 2, 2), dtype=complex)
    psi[:, 0, 0] = 1.0
    for i, phi in enumerate(phases):
        dagger = i % 2 == 1
        ang = phi + math.pi if dagger else phi
        # exp(+-i ang Z / 2) is cos(ang/2) I +- i sin(ang/2) X in this basis.
        c, s = math.cos(ang / 2), math.sin(ang / 2)
        psi = c * psi + 1j * s * psi[:, ::-1, :]
        psi[:, 1, :] = np.einsum("lij,lj->li", wd if dagger else w, psi[:, 1, :])
        psi = c * psi - 1j * s * psi[:, ::-1, :]
    return psi[:, 0, 0]


def fit(m, tau, seed, restarts, grid):
    lams = np.cos(np.linspace(0.0, math.pi, grid))
    target = np.exp(-1j * lams * tau)

    def residual(phases):
        r = response(phases, lams) - target
        return np.concatenate([r.real, r.imag])

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        sol = least_squares(residual, rng.uniform(0, 2 * math.pi, m), xtol=1e-14, ftol=1e-14, gtol=1e-14)
        err = float(np.max(np.abs(response(sol.x, lams) - target)))
        if best is None or err < best[1]:
            best = (sol.x, err)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--M", type=int, required=True, help="number of phased iterates (even)")
    ap.add_argument("--tau", type=float, required=True, help="alpha * t / r for one segment")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--restarts", type=int, default=8)
    ap.add_argument("--grid", type=int, default=81)
    ap.add_argument("--out", required=True)
    args = ap.parse_args(argv)
    if args.M <= 0 or args.M % 2:
        ap.error("--M must be a positive even number")
    phases, err = fit(args.M, args.tau, args.seed, args.restarts, args.grid)
    with open(args.out, "w") as f:
        json.dump({"angles": [[float(x) for x in phases]], "tau": args.tau, "max_residual": err}, f, indent=1)
    print(f"max residual {err:.3e}", file=sys.stderr)


if __name__ == "__main__":
    main()
