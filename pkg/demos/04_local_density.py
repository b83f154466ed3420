"""Local densities: the exact formula against brute-force counting.

The engine computes the density from the exponent bookkeeping and the
special fiber group order.  The oracle independently counts congruence
solutions X^T G X = G mod 2^k; the normalized counts plateau at exactly
twice the density (the count sees the full orthogonal group, the density
its special fiber quotient).
"""

from latdens import (
    QuadLattice,
    density_estimate,
    density_report,
    local_density,
    unramified,
)

Z2 = unramified(1)

for rows in [
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[1, 0], [0, 2]],
    [[2, 0], [0, 3]],
]:
    L = QuadLattice.from_entries(Z2, rows)
    report = density_report(L)
    print("gram", rows)
    print("  exponent N =", report.exponents.n,
          " fiber order =", report.group.special_fiber_order,
          " density =", report.density)
    estimate = density_estimate(rows, p=2, max_level=6)
    print("  oracle ratios:", [str(r) for r in estimate.ratios],
          "-> plateau", estimate.value, "=",
          "2 x density" if estimate.value == 2 * report.density else "MISMATCH")

# Densities scale by q^(n(n+1)/2) when the gram matrix doubles.
L = QuadLattice.from_entries(Z2, [[1, 0], [0, 3]])
print("\ndensity:", local_density(L), "-> doubled gram:",
      local_density(L.scaled(1)))

# Over the unramified quadratic extension the same shape gives q = 4.
F4 = unramified(2)
L4 = QuadLattice.from_entries(F4, [[1, 0], [0, 3]])
print("same gram over the quadratic extension:", local_density(L4))
