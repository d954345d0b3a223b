"""Removing a zero order term by conjugation with e^{-Q}.

With c(t) = 0.7 + i sin t, Q = i e^{i psi} sin(theta) and q = q0 - i c(t) Q one has
(d_t + c d_0) Q = q - q0, hence P o e^{-Q} = e^{-Q} o P00 with P00 = d_t + c d_0 + q0.
The script checks both identities on an Euler-angle grid and classifies P00.

    python3 demos/conjugation.py
"""

from __future__ import annotations

import numpy as np

from gahtorus import OperatorSpec, decide
from gahtorus.conjugation import (example_Q, example_q, hypothesis_residual, random_band_limited,
                                  verify_zero_order_conjugation)
from gahtorus.su2 import EulerGrid


def main():
    spec = OperatorSpec.make(a=0.7, b={"sin": [1]}, q=0)
    q0 = 0.5j
    for Nt, npsi in ((32, 16), (64, 32), (64, 64)):
        grid = EulerGrid(16, 16, npsi)
        Q = example_Q(Nt, grid)
        qf = example_q(spec, q0, Q)
        u = random_band_limited(np.random.default_rng(0), Nt, grid)
        hres = hypothesis_residual(spec, Q, q0, qf)
        res = verify_zero_order_conjugation(spec, Q, q0, u, qf, tol=1.0)
        print(f"grid {Nt}x16x16x{npsi}: hypothesis {hres:.1e}, conjugation {res:.1e}")
    v = decide(OperatorSpec.make(a=0.7, b={"sin": [1]}, q=[0, "1/2"]))
    print(f"P00 = d_t + c d_0 + i/2: {v.answer} ({v.kind})")


if __name__ == "__main__":
    main()
