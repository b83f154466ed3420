"""The residue chain: per-scale quadratic spaces over the residue field.

Each scale i of a lattice yields a chain of sublattices whose quotients
carry residue quadratic forms.  Their dimensions, Arf classes, and the
bound/free classification of constituents drive everything downstream:
the invariants alpha and beta and the special fiber group order.
"""

from latdens import (
    QuadLattice,
    chain_compute,
    chain_report,
    classify,
    jordan_split,
    unramified,
)

Z2 = unramified(1, precision=36)

rows = [
    [1, 0, 0, 0],
    [0, 2, 0, 0],
    [0, 0, 8, 4],
    [0, 0, 4, 8],
]
L = QuadLattice.from_entries(Z2, rows)
symbol = jordan_split(L)
chain = chain_compute(symbol)

print("window of scales:", list(chain.window))
for i in chain.window:
    sc = chain.at(i)
    res = sc.residue
    print(f"scale {i}: B dim {sc.b.dim}  W/X dims {sc.w.dim}/{sc.x.dim}  "
          f"Y/Z dims {sc.y.dim}/{sc.z.dim}  residue dim {res.dimension} "
          f"({res.kind})")

print("\nconstituent types:")
for t in classify(symbol, chain):
    print(f"  scale {t.scale}: rank {t.rank} parity {t.parity} "
          f"fine type {t.fine} {'bound' if t.bound else 'free'}")

report = chain_report(L)
print("\nalpha =", report.alpha, " beta =", report.beta)
print("as JSON:", report.to_json_dict())
