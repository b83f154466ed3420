"""Jordan splittings and per-scale unimodular normal forms.

A lattice over the 2-adics decomposes into scaled unimodular blocks; each
block then has a normal form whose few residues (eps mod 8, lambda mod 4,
and friends) pin it down up to isometry.
"""

from fractions import Fraction

from latdens import QuadLattice, jordan_split, unimodular_normal_form, unramified

Z2 = unramified(1, precision=36)

rows = [
    [2, 1, 0, 0],
    [1, 2, 0, 0],
    [0, 0, 4, 0],
    [0, 0, 0, 24],
]
L = QuadLattice.from_entries(Z2, rows)
symbol = jordan_split(L)
print("gram:", rows)
print("jordan shape (scale, rank, parity):", symbol.shape)
for constituent in symbol.constituents:
    print("  scale", constituent.scale, "block:",
          [[repr(e) for e in row] for row in constituent.gram])

# verify() re-multiplies the recorded basis against the original gram.
print("splitting verifies:", symbol.verify())

print("\nnormal form of each constituent:")
for constituent in symbol.constituents:
    profile = unimodular_normal_form(constituent)
    print("  scale", constituent.scale, "rank", constituent.rank,
          "parity", profile.parity, "planes", profile.planes,
          "eps mod 8:", profile.eps_mod8,
          "lambda mod 4:", profile.lambda_mod4)

# Fractional scales are fine: scale -1 means entries with denominator 2.
half = QuadLattice.from_entries(Z2, [[Fraction(1, 2), 0], [0, 6]])
print("\nhalf-integral lattice shape:", jordan_split(half).shape)
