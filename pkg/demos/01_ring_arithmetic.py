"""Truncated arithmetic in the 2-adic integers and their unramified extensions.

Every element carries a certified window of digits.  Arithmetic tracks how
that window erodes, and operations that would need digits beyond it raise
instead of silently returning garbage.
"""

from fractions import Fraction

from latdens import unramified
from latdens.base_ring import PrecisionExhausted

Z2 = unramified(1)  # the 2-adic integers, 24 digits by default

x = Z2.elem(12)
y = Z2.elem(Fraction(3, 4))
print("x = 12:", x, "valuation", x.valuation())
print("y = 3/4:", y, "valuation", y.valuation())
print("x * y =", x * y)
print("x + y =", x + y)
print("1 / 3 =", Z2.elem(3).inverse())

# Exact cancellation is indistinguishable from a tiny nonzero remainder,
# so the difference below is "near zero" rather than zero.
d = Z2.elem(5) - Z2.elem(5)
print("5 - 5 =", d, "(kind", d.kind + ")")
try:
    d.valuation()
except PrecisionExhausted as exc:
    print("valuation of a near-zero raises:", exc)

# The unramified quartic extension: elements are coordinate vectors over
# a basis of the residue field lifted to the ring.
F16 = unramified(4)
a = F16.elem([1, 0, 1, 0])
b = F16.elem([0, 2, 0, 0])
print("\nover the degree-4 extension (residue field size", F16.residue_size, ")")
print("a =", a)
print("a * b =", a * b)
print("a residue:", a.residue().bits, "(bit mask over the F_2 basis)")

# Residue fields: every element of kappa is a square in characteristic 2.
k = F16.kappa(11)
print("kappa element", k.bits, "has square root with bits", k.sqrt().bits)
print("check:", (k.sqrt() * k.sqrt()).bits == k.bits)
