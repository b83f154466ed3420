"""Global masses: assembling local densities into exact rationals.

The mass of a genus multiplies an archimedean constant, the determinant,
and the inverse local densities at every prime; good odd primes collapse
into zeta values, leaving a finite exact computation.  Single-class
genera give the sharpest regression targets: the mass is 1/#O(L).
"""

import math
from fractions import Fraction

from latdens import (
    mass_report,
    mass_via_local,
    sum_squares_mass_analytic,
    sum_squares_mass_rational,
)


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


print("sums of squares (single class up to n = 8, so mass = 1/(2^n n!)):")
for n in range(2, 9):
    mass = mass_via_local(identity(n))
    closed = sum_squares_mass_rational(n)
    print(f"  n={n}: {mass}  closed form {closed}  "
          f"1/(2^n n!) = {Fraction(1, 2 ** n * math.factorial(n))}")

E8 = [
    [2, -1, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, 0],
    [0, 0, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, -1],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0],
    [0, 0, 0, 0, -1, 0, 0, 2],
]
print("\nE8 mass:", mass_via_local(E8), "= 1/696729600:",
      mass_via_local(E8) == Fraction(1, 696729600))

# The full report shows each local factor and the archimedean constant.
report = mass_report([[1, 0], [0, 3]])
print("\ndiag(1,3) report:", report.to_json_dict())

# Past n = 8 the genus of I_n has two classes; the mass is a sum of
# reciprocal automorphism group orders (I_9 sits with E8 + I_1).
print("\nI_9 mass:", mass_via_local(identity(9)),
      "= 1/(2^9 9!) + 1/(2 * 696729600):",
      mass_via_local(identity(9))
      == Fraction(1, 2 ** 9 * math.factorial(9))
      + Fraction(1, 2 * 696729600))

# Floating-point evaluation of the same closed form, for a sanity check.
print("\nanalytic vs rational at n = 12:")
print("  analytic:", sum_squares_mass_analytic(12))
print("  rational:", float(sum_squares_mass_rational(12)))
