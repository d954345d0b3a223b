"""A bounded, non-analytic solution of P u = f with analytic f when Im c changes sign.

For a = 0, b = sin t, q = 3/10 the script builds the diagonal family
f^(t, l) = d_l e^{-l psi(t)} and u^(t, l) = int e^{-qs} e^{-l Phi(t, s)} ds,
then prints the decay of |f^| at t = 0 and of |u^| at the maximum t* of B.

    python3 demos/singular_solution.py [twoEllMax] [N]
"""

from __future__ import annotations

import sys
import time

from gahtorus import OperatorSpec
from gahtorus.singular import build_sign_change_witness


def main(twoEllMax=256, N=1024):
    spec = OperatorSpec.make(a=0, b={"sin": [1]}, q="3/10")
    t0 = time.perf_counter()
    sd = build_sign_change_witness(spec, twoEllMax, N)
    s = sd.summary()
    print(f"M = {sd.M:.6f}, t* = {sd.tStar:.6f}, K = {sd.K}, panels = {sd.panels}")
    print(f"phi max on grid {s['checks']['phi_grid_max']:.2e}, "
          f"corner error {s['checks']['corner_error']:.1e}")
    print(f"{'l':>6s} {'|f^(0,l)|':>12s} {'|u^(t*,l)|':>12s} {'sqrt(l)|u^|':>12s}")
    for e in (1, 2, 4, 8, 16, 32, 64, 128, 256):
        if e <= twoEllMax:
            u = abs(sd.u_at_tstar[e])
            print(f"{e / 2:6.1f} {abs(sd.f_at_tmin[e]):12.4e} {u:12.4e} {u * (e / 2) ** 0.5:12.6f}")
    print(f"f fit: {sd.decayF.model} {sd.decayF.params}")
    print(f"u fit: {sd.decayU.model} {sd.decayU.params}")
    print(f"sup |u^| = {s['u_sup']:.4f} <= {s['u_bound']:.2f}; "
          f"max mode residual {s['max_mode_residual']:.1e}; {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main(*(int(x) for x in sys.argv[1:3]))
