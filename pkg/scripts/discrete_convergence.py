#!/usr/bin/env python3
"""Error of the K-mode discrete bath against the continuum closed forms.

The discrete sums are exact for a finite bath of K oscillators, so the error
measures how well K Gauss-Legendre modes represent J(w) up to the time
window. Prints max relative error of gamma and Phi for Omega t <= t_max.
"""

import argparse

import numpy as np

from dephasing.decoherence import gamma_th, gamma_vac, phi
from dephasing.discrete import discretize, gamma_discrete, phi_discrete
from dephasing.spectral import BathSpec, SpectralDensity


def main(argv=None):
    p = argparse.ArgumentParser(description="discrete-bath error vs number of modes")
    p.add_argument("--s", type=float, nargs="+", default=[0.5, 1.0, 3.0])
    p.add_argument("--modes", type=int, nargs="+", default=[10, 50, 200, 1000, 2000])
    p.add_argument("--omega-beta", type=float, default=10.0)
    p.add_argument("--t-max", type=float, default=20.0)
    args = p.parse_args(argv)
    t = np.geomspace(1e-2, args.t_max, 40)
    print(f"{'s':>5} {'K':>6} {'gamma err':>12} {'phi err':>12}")
    for s in args.s:
        b = BathSpec(SpectralDensity(1.0, s, 1.0), args.omega_beta)
        ref_g = gamma_vac(b, t) + gamma_th(b, t)
        ref_p = phi(b, t)
        for k in args.modes:
            db = discretize(b.j, k)
            eg = np.max(np.abs(gamma_discrete(db, b.beta, t) / ref_g - 1.0))
            ep = np.max(np.abs(phi_discrete(db, t) / ref_p - 1.0))
            print(f"{s:5g} {k:6d} {eg:12.3e} {ep:12.3e}")


if __name__ == "__main__":
    main()
