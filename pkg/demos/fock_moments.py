"""Vacuum moments on the truncated Fock space.

Prints the moments of a semicircular field next to the Catalan targets, the
two state values of the generalized circular element and how truncation
depth limits exactness.

    python demos/fock_moments.py
"""

import numpy as np

from awlab import RepSpec, build_fock, generalized_circular, semicircular_field
from awlab.fock import empirical_spectrum
from awlab.laws import law_moments


def main():
    F = build_fock(1, 8)
    s = semicircular_field(F, RepSpec.create(1), [1.0])
    target = law_moments("semicircle", 8, r=1.0)
    vec = F.vacuum()
    print("k   phi(s^k)            semicircle on [-1, 1]")
    for k in range(9):
        print(f"{k}   {vec[0].real:<18.15f}  {target[k]:.15f}")
        vec = s.matrix @ vec

    # a closed path of length k climbs at most k/2 levels, so depth 8 stays
    # exact up to k = 16 and the truncation shows from k = 18 on
    m = s.toarray()
    exact = law_moments("semicircle", 20, r=1.0)
    for k in (16, 18, 20):
        got = np.linalg.matrix_power(m, k)[0, 0].real
        print(f"depth 8, k={k}: {got:.8f} vs {exact[k]:.8f}")

    hist = empirical_spectrum(s, bins=8)
    print("\neigenvalues of the truncated field (9 of them):")
    print(hist.to_csv())

    G = build_fock(2, 4)
    for lam in (0.25, 0.5, 0.9, 1.0):
        y = generalized_circular(G, lam, [1, 0], [0, 1])
        ysy = (y.adjoint() @ y).matrix[0, 0].real
        yys = (y @ y.adjoint()).matrix[0, 0].real
        print(f"lambda={lam:<5} phi(y*y)={ysy:.12f}  phi(yy*)={yys:.12f}")


if __name__ == "__main__":
    main()
